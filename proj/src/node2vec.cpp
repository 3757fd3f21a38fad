#include "grembed/node2vec.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "grembed/error.hpp"

namespace grembed::embed {

namespace {

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

// log σ(x), stable for large |x|.
double log_sigmoid(double x) noexcept { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

TransitionSampler::TransitionSampler(const WeightedGraph& g, double p, double q)
    : graph_(g), inv_p_(1.0 / p), inv_q_(1.0 / q), max_bias_(std::max({1.0 / p, 1.0, 1.0 / q})) {
    if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("node2vec: p and q must be positive");
    tables_.resize(g.size());
    std::vector<double> w;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto nb = g.neighbors(v);
        if (nb.empty()) continue;
        w.assign(nb.size(), 0.0);
        for (std::size_t k = 0; k < nb.size(); ++k) w[k] = nb[k].weight;
        tables_[v] = num::AliasTable(w);
    }
}

std::optional<std::size_t> TransitionSampler::next(std::optional<std::size_t> prev, std::size_t cur,
                                                   num::Rng& rng) const {
    const auto nb = graph_.neighbors(cur);
    if (nb.empty()) return std::nullopt;
    const auto& table = tables_[cur];
    if (!prev) return nb[table.sample(rng)].node;
    for (;;) {
        const std::size_t x = nb[table.sample(rng)].node;
        double bias = inv_q_;
        if (x == *prev)
            bias = inv_p_;
        else if (graph_.has_edge(*prev, x))
            bias = 1.0;
        if (rng.uniform() * max_bias_ < bias) return x;
    }
}

WalkCorpus generate_walks(const WeightedGraph& g, const WalkParams& params, std::uint64_t seed, unsigned threads) {
    if (params.walk_length < 2) throw ValidationError("node2vec: walk_length must be >= 2");
    const TransitionSampler sampler(g, params.p, params.q);
    const std::size_t n = g.size();
    WalkCorpus corpus;
    corpus.node_count = n;
    corpus.params = params;
    corpus.walks.resize(n * params.walks_per_node);

    auto walk_node = [&](std::size_t v) {
        if (g.degree(v) == 0) return;
        num::Rng rng(num::derive_seed(seed, v));
        for (std::size_t r = 0; r < params.walks_per_node; ++r) {
            auto& walk = corpus.walks[r * n + v];
            walk.reserve(params.walk_length);
            walk.push_back(v);
            std::optional<std::size_t> prev;
            while (walk.size() < params.walk_length) {
                const auto next = sampler.next(prev, walk.back(), rng);
                if (!next) break;
                prev = walk.back();
                walk.push_back(*next);
            }
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1) {
        for (std::size_t v = 0; v < n; ++v) walk_node(v);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t v = t; v < n; v += threads) walk_node(v);
            });
    }
    std::erase_if(corpus.walks, [](const auto& w) { return w.empty(); });
    return corpus;
}

double sgns_loss(std::span<const double> u, std::span<const double> v_pos,
                 std::span<const std::span<const double>> v_negs, std::span<double> grad_u) {
    const double pos = num::dot(u, v_pos);
    double loss = -log_sigmoid(pos);
    if (!grad_u.empty()) {
        const double g = sigmoid(pos) - 1.0;
        for (std::size_t i = 0; i < u.size(); ++i) grad_u[i] = g * v_pos[i];
    }
    for (const auto& vn : v_negs) {
        const double s = num::dot(u, vn);
        loss -= log_sigmoid(-s);
        if (!grad_u.empty()) {
            const double g = sigmoid(s);
            for (std::size_t i = 0; i < u.size(); ++i) grad_u[i] += g * vn[i];
        }
    }
    return loss;
}

namespace {

// Mean pair loss of a frozen model over the whole corpus. The negative stream
// restarts from the same seed on every call so epochs are compared on
// identical draws.
double corpus_loss(const SgnsModel& model, const WalkCorpus& corpus, const SgnsParams& params,
                   const num::AliasTable& noise, std::uint64_t seed) {
    num::Rng rng(seed);
    double total = 0.0;
    std::size_t pairs = 0;
    for (const auto& walk : corpus.walks) {
        for (std::size_t pos = 0; pos < walk.size(); ++pos) {
            const std::size_t lo = pos >= params.window ? pos - params.window : 0;
            const std::size_t hi = std::min(walk.size() - 1, pos + params.window);
            const auto u = model.center.row(walk[pos]);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == pos) continue;
                total -= log_sigmoid(num::dot(u, model.context.row(walk[j])));
                for (std::size_t s = 0; s < params.negatives; ++s) {
                    const std::size_t target = noise.sample(rng);
                    if (target != walk[j]) total -= log_sigmoid(-num::dot(u, model.context.row(target)));
                }
                ++pairs;
            }
        }
    }
    return pairs ? total / static_cast<double>(pairs) : 0.0;
}

}  // namespace

SgnsModel train_sgns(const WalkCorpus& corpus, const SgnsParams& params, std::uint64_t seed) {
    if (params.dim == 0) throw ValidationError("sgns: dim must be >= 1");
    if (corpus.walks.empty() || corpus.node_count == 0) throw ValidationError("sgns: empty corpus");
    const std::size_t n = corpus.node_count;
    const std::size_t d = params.dim;
    num::Rng rng(seed);

    SgnsModel model;
    model.center = num::DenseMatrix(n, d);
    model.context = num::DenseMatrix(n, d);
    for (auto& x : model.center.data()) x = rng.uniform(-0.5, 0.5) / static_cast<double>(d);

    std::vector<double> counts(n, 0.0);
    std::size_t tokens = 0;
    for (const auto& walk : corpus.walks) {
        for (const auto v : walk) counts[v] += 1.0;
        tokens += walk.size();
    }
    for (auto& c : counts) c = std::pow(c, 0.75);
    const num::AliasTable noise(counts);

    const double total_steps = static_cast<double>(tokens * params.epochs);
    double processed = 0.0;
    std::vector<double> grad(d);
    const std::uint64_t loss_seed = num::derive_seed(seed, "loss");
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        for (const auto& walk : corpus.walks) {
            for (std::size_t pos = 0; pos < walk.size(); ++pos) {
                const double lr = params.lr * std::max(1e-4, 1.0 - processed / total_steps);
                processed += 1.0;
                const std::size_t c = walk[pos];
                const std::size_t lo = pos >= params.window ? pos - params.window : 0;
                const std::size_t hi = std::min(walk.size() - 1, pos + params.window);
                auto u = model.center.row(c);
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == pos) continue;
                    std::fill(grad.begin(), grad.end(), 0.0);
                    for (std::size_t s = 0; s <= params.negatives; ++s) {
                        std::size_t target = walk[j];
                        double label = 1.0;
                        if (s > 0) {
                            target = noise.sample(rng);
                            if (target == walk[j]) continue;
                            label = 0.0;
                        }
                        auto v = model.context.row(target);
                        const double score = num::dot(u, v);
                        const double g = (label - sigmoid(score)) * lr;
                        for (std::size_t k = 0; k < d; ++k) {
                            grad[k] += g * v[k];
                            v[k] += g * u[k];
                        }
                    }
                    for (std::size_t k = 0; k < d; ++k) u[k] += grad[k];
                }
            }
        }
        model.epoch_loss.push_back(corpus_loss(model, corpus, params, noise, loss_seed));
    }
    return model;
}

Embedding node2vec_embed(const WeightedGraph& g, const Node2VecParams& params, std::uint64_t seed) {
    const WalkCorpus corpus = generate_walks(g, params.walk, num::derive_seed(seed, "walks"), params.threads);
    SgnsModel model = train_sgns(corpus, params.sgns, num::derive_seed(seed, "sgns"));
    return Embedding(EmbeddingMethod::node2vec, g.users(), std::move(model.center));
}

}  // namespace grembed::embed
