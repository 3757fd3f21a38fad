#pragma once

#include <cstddef>

#include "grembed/eigen.hpp"
#include "grembed/embedding.hpp"
#include "grembed/social_graph.hpp"

namespace grembed::embed {

struct SpectralOptions {
    std::size_t dim = 25;
    // Reject graphs with more than one connected component.
    bool strict = false;
    num::EigenOptions eigen{};
};

// I - D^{-1/2} W D^{-1/2}.
num::SparseMatrix normalized_laplacian(const WeightedGraph& g);

/// Laplacian eigenmap: column j is the eigenvector of the (j+2)-th smallest
/// eigenvalue of the symmetric normalized Laplacian (the first eigenvector,
/// proportional to sqrt(degree), is skipped). Columns are unit-norm.
Embedding spectral_embed(const WeightedGraph& g, const SpectralOptions& opts = {});

}  // namespace grembed::embed
