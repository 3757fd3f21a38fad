#include "grembed/spectral.hpp"

#include <cmath>

#include "grembed/error.hpp"

namespace grembed::embed {

num::SparseMatrix normalized_laplacian(const WeightedGraph& g) {
    const std::size_t n = g.size();
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = g.weighted_degree(i);
        inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    std::vector<num::SparseMatrix::Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        if (inv_sqrt[i] > 0.0) t.emplace_back(i, i, 1.0);
        for (const auto& nb : g.neighbors(i)) t.emplace_back(i, nb.node, -nb.weight * inv_sqrt[i] * inv_sqrt[nb.node]);
    }
    return num::SparseMatrix::from_triplets(n, n, std::move(t));
}

Embedding spectral_embed(const WeightedGraph& g, const SpectralOptions& opts) {
    const std::size_t n = g.size();
    if (opts.dim == 0 || opts.dim >= n) throw ValidationError("spectral_embed: need 1 <= dim < node count");
    if (opts.strict) {
        std::size_t parts = 0;
        g.components(&parts);
        if (parts > 1) throw DisconnectedGraphError("spectral_embed: graph has " + std::to_string(parts) + " components");
    }
    const num::SparseMatrix lap = normalized_laplacian(g);
    const num::EigenPairs eig = num::symmetric_eigs_smallest(lap, opts.dim + 1, opts.eigen);
    num::DenseMatrix vectors(n, opts.dim);
    for (std::size_t j = 0; j < opts.dim; ++j)
        for (std::size_t r = 0; r < n; ++r) vectors(r, j) = eig.vectors(r, j + 1);
    return Embedding(EmbeddingMethod::spectral, g.users(), std::move(vectors));
}

}  // namespace grembed::embed
