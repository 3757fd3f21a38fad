#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "grembed/matrix.hpp"

namespace grembed::cluster {

struct Clustering {
    std::size_t k = 0;
    num::DenseMatrix centroids;           // k x D
    std::vector<std::size_t> assignment;  // per point
    double inertia = 0.0;
    // Inertia after every centroid update of the winning run.
    std::vector<double> inertia_trace;
};

struct KMeansOptions {
    std::size_t max_iter = 300;
    // Independent k-means++ starts; the lowest-inertia run is kept.
    std::size_t restarts = 10;
};

/// Lloyd's algorithm from k-means++ seeds. Runs until assignments stop
/// changing or max_iter is reached; an emptied cluster is re-seeded with the
/// point farthest from its centroid. Ties go to the lowest centroid id.
Clustering kmeans(const num::DenseMatrix& points, std::size_t k, const KMeansOptions& opts, std::uint64_t seed);

struct ElbowResult {
    std::size_t k = 0;
    std::vector<std::pair<std::size_t, double>> inertia;  // (k, inertia), ascending k
};

/// Picks the k in [k_min, k_max] with the largest second difference
/// inertia(k-1) - 2 inertia(k) + inertia(k+1); ties favor the smaller k.
/// Inertia is evaluated from k_min - 1 through k_max + 1.
ElbowResult elbow_select_k(const num::DenseMatrix& points, std::size_t k_min, std::size_t k_max,
                           const KMeansOptions& opts, std::uint64_t seed);

// Nearest centroid by Euclidean distance; ties to the lowest id.
std::size_t predict_cluster(const Clustering& c, std::span<const double> point);

std::size_t count_distinct_rows(const num::DenseMatrix& points);

}  // namespace grembed::cluster
