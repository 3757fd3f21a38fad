#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "grembed/eigen.hpp"
#include "grembed/matrix.hpp"
#include "grembed/rng.hpp"
#include "grembed/social_graph.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::Mat to_oracle(const grembed::num::DenseMatrix& m) {
    oracle::Mat out = oracle::zeros(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

inline grembed::num::DenseMatrix random_symmetric(std::size_t n, grembed::num::Rng& rng) {
    grembed::num::DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
    return m;
}

inline grembed::num::DenseMatrix random_dense(std::size_t r, std::size_t c, grembed::num::Rng& rng) {
    grembed::num::DenseMatrix m(r, c);
    for (auto& x : m.data()) x = rng.uniform(-1.0, 1.0);
    return m;
}

// Erdos-Renyi graph on n nodes with uniform weights in (0.1, 1].
inline grembed::WeightedGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
    grembed::num::Rng rng(seed);
    std::vector<std::string> users;
    for (std::size_t i = 0; i < n; ++i) users.push_back("n" + std::to_string(100 + i));
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n, rng.uniform(0.1, 1.0));  // ring keeps it connected
        for (std::size_t j = i + 2; j < n; ++j)
            if (rng.uniform() < p && !(i == 0 && j == n - 1)) edges.emplace_back(i, j, 1.0 - rng.uniform() * 0.9);
    }
    return grembed::WeightedGraph::from_edges(users, edges);
}

inline double eigen_residual(const grembed::num::DenseMatrix& a, const grembed::num::EigenPairs& e) {
    double worst = 0.0;
    for (std::size_t j = 0; j < e.values.size(); ++j) {
        const auto v = e.vectors.column(j);
        const auto av = grembed::num::multiply(a, v);
        double r = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) r += (av[i] - e.values[j] * v[i]) * (av[i] - e.values[j] * v[i]);
        worst = std::max(worst, std::sqrt(r));
    }
    return worst;
}

inline double orthonormality_error(const grembed::num::DenseMatrix& v) {
    const grembed::num::DenseMatrix g = grembed::num::multiply_at_b(v, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

// sin of the largest principal angle between the column spans of a and b.
inline double subspace_gap(const grembed::num::DenseMatrix& a, const grembed::num::DenseMatrix& b) {
    const grembed::num::DenseMatrix c = grembed::num::multiply_at_b(a, b);
    double worst = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) {
        double captured = 0.0;
        for (std::size_t i = 0; i < c.rows(); ++i) captured += c(i, j) * c(i, j);
        worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - captured)));
    }
    return worst;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("grembed_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing_support
