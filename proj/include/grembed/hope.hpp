#pragma once

#include <cstddef>

#include "grembed/embedding.hpp"
#include "grembed/social_graph.hpp"
#include "grembed/svd.hpp"

namespace grembed::embed {

struct HopeOptions {
    std::size_t dim = 25;
    // Katz decay; 0 selects 0.5 / spectral_radius(W).
    double beta = 0.0;
    // Katz matrix is formed explicitly up to this many nodes; beyond it the
    // proximity is applied through conjugate-gradient solves.
    std::size_t dense_limit = 2000;
    num::EigenOptions eigen{};
};

// Largest eigenvalue of the (non-negative, symmetric) adjacency matrix by
// power iteration on W + I.
double spectral_radius(const WeightedGraph& g);

// S = (I - beta W)^{-1} beta W, i.e. sum_{k>=1} beta^k W^k. Requires beta < 1/rho(W).
num::DenseMatrix katz_matrix(const WeightedGraph& g, double beta);

struct HopeFactors {
    double beta = 0.0;
    num::SvdResult svd;
};

HopeFactors hope_factorize(const WeightedGraph& g, const HopeOptions& opts = {});

// Source embedding U * sqrt(diag(s)); validated for finite, non-zero rows.
Embedding hope_embed(const WeightedGraph& g, const HopeOptions& opts = {});

}  // namespace grembed::embed
