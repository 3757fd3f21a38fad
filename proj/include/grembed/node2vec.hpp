#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grembed/alias_table.hpp"
#include "grembed/embedding.hpp"
#include "grembed/rng.hpp"
#include "grembed/social_graph.hpp"

namespace grembed::embed {

struct WalkParams {
    double p = 1.0;
    double q = 1.0;
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 80;
};

struct WalkCorpus {
    std::vector<std::vector<std::size_t>> walks;
    std::size_t node_count = 0;
    WalkParams params;
};

/// Second-order biased transition sampler. From (prev, cur) a neighbor x of
/// cur is drawn with unnormalized probability w(cur,x)/p if x == prev,
/// w(cur,x) if x neighbors prev, and w(cur,x)/q otherwise. Draws are exact:
/// a first-order alias draw followed by rejection on the bias factor.
class TransitionSampler {
public:
    TransitionSampler(const WeightedGraph& g, double p, double q);

    // nullopt when cur has no neighbors.
    std::optional<std::size_t> next(std::optional<std::size_t> prev, std::size_t cur, num::Rng& rng) const;

private:
    const WeightedGraph& graph_;
    double inv_p_;
    double inv_q_;
    double max_bias_;
    std::vector<num::AliasTable> tables_;
};

// Walk r of node v lands at index r * n + v; node v draws from its own stream
// derived from (seed, v), so the corpus does not depend on thread count.
WalkCorpus generate_walks(const WeightedGraph& g, const WalkParams& params, std::uint64_t seed,
                          unsigned threads = 1);

struct SgnsParams {
    std::size_t dim = 25;
    std::size_t window = 10;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double lr = 0.025;
};

struct SgnsModel {
    num::DenseMatrix center;   // returned as the embedding
    num::DenseMatrix context;
    std::vector<double> epoch_loss;  // end-of-epoch mean loss per (center, context) pair
};

/// Skip-gram with negative sampling over the walk corpus. Centers start
/// uniform in [-0.5/dim, 0.5/dim), contexts at zero; negatives come from the
/// corpus unigram distribution raised to 0.75; the learning rate decays
/// linearly to lr * 1e-4 over all epochs.
SgnsModel train_sgns(const WalkCorpus& corpus, const SgnsParams& params, std::uint64_t seed);

// -log σ(u·v_pos) - Σ log σ(-u·v_neg); writes d/du into grad_u when non-empty.
double sgns_loss(std::span<const double> u, std::span<const double> v_pos,
                 std::span<const std::span<const double>> v_negs, std::span<double> grad_u = {});

struct Node2VecParams {
    WalkParams walk{};
    SgnsParams sgns{};
    unsigned threads = 1;
};

Embedding node2vec_embed(const WeightedGraph& g, const Node2VecParams& params, std::uint64_t seed);

}  // namespace grembed::embed
