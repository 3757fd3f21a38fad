#include "grembed/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "grembed/error.hpp"
#include "grembed/rng.hpp"

namespace grembed::cluster {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

num::DenseMatrix seed_plus_plus(const num::DenseMatrix& points, std::size_t k, num::Rng& rng) {
    const std::size_t n = points.rows();
    num::DenseMatrix centroids(k, points.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    for (std::size_t c = 0; c < k; ++c) {
        std::copy_n(points.row(pick).begin(), points.cols(), centroids.row(c).begin());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(c)));
            total += d2[i];
        }
        if (c + 1 == k) break;
        if (total <= 0.0) throw ValidationError("kmeans: k exceeds the number of distinct points");
        double target = rng.uniform() * total;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0) continue;
            target -= d2[i];
            if (target < 0.0) {
                pick = i;
                break;
            }
        }
        while (d2[pick] <= 0.0) --pick;
    }
    return centroids;
}

std::size_t nearest(const num::DenseMatrix& centroids, std::span<const double> p, double* dist = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(p, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

double total_inertia(const num::DenseMatrix& points, const num::DenseMatrix& centroids,
                     const std::vector<std::size_t>& assignment) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) s += squared_distance(points.row(i), centroids.row(assignment[i]));
    return s;
}

Clustering lloyd(const num::DenseMatrix& points, std::size_t k, std::size_t max_iter, num::Rng& rng) {
    const std::size_t n = points.rows();
    const std::size_t dim = points.cols();
    Clustering out;
    out.k = k;
    out.centroids = seed_plus_plus(points, k, rng);
    out.assignment.assign(n, 0);

    bool converged = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = nearest(out.centroids, points.row(i));
            if (it == 0 || c != out.assignment[i]) changed = true;
            out.assignment[i] = c;
        }
        if (!changed) {
            converged = true;
            break;
        }

        // Re-seed empty clusters with the point farthest from its centroid.
        std::vector<std::size_t> sizes(k, 0);
        for (const auto a : out.assignment) ++sizes[a];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[out.assignment[i]] <= 1) continue;
                const double d = squared_distance(points.row(i), out.centroids.row(out.assignment[i]));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --sizes[out.assignment[far]];
            out.assignment[far] = c;
            sizes[c] = 1;
        }

        num::DenseMatrix sums(k, dim);
        for (std::size_t i = 0; i < n; ++i) {
            auto dst = sums.row(out.assignment[i]);
            const auto src = points.row(i);
            for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            auto dst = out.centroids.row(c);
            const auto src = sums.row(c);
            for (std::size_t j = 0; j < dim; ++j) dst[j] = src[j] / static_cast<double>(sizes[c]);
        }
        out.inertia_trace.push_back(total_inertia(points, out.centroids, out.assignment));
    }
    if (!converged)
        for (std::size_t i = 0; i < n; ++i) out.assignment[i] = nearest(out.centroids, points.row(i));
    out.inertia = total_inertia(points, out.centroids, out.assignment);
    return out;
}

}  // namespace

std::size_t count_distinct_rows(const num::DenseMatrix& points) {
    std::set<std::vector<double>> seen;
    for (std::size_t i = 0; i < points.rows(); ++i) seen.emplace(points.row(i).begin(), points.row(i).end());
    return seen.size();
}

Clustering kmeans(const num::DenseMatrix& points, std::size_t k, const KMeansOptions& opts, std::uint64_t seed) {
    if (k == 0) throw ValidationError("kmeans: k must be >= 1");
    if (opts.max_iter == 0) throw ValidationError("kmeans: max_iter must be >= 1");
    if (k > count_distinct_rows(points))
        throw ValidationError("kmeans: k = " + std::to_string(k) + " exceeds the number of distinct points");
    Clustering best;
    const std::size_t runs = std::max<std::size_t>(1, opts.restarts);
    for (std::size_t r = 0; r < runs; ++r) {
        num::Rng rng(num::derive_seed(seed, r));
        Clustering c = lloyd(points, k, opts.max_iter, rng);
        if (r == 0 || c.inertia < best.inertia) best = std::move(c);
    }
    return best;
}

ElbowResult elbow_select_k(const num::DenseMatrix& points, std::size_t k_min, std::size_t k_max,
                           const KMeansOptions& opts, std::uint64_t seed) {
    if (k_min < 2 || k_max <= k_min) throw ValidationError("elbow: need 2 <= k_min < k_max");
    ElbowResult out;
    for (std::size_t k = k_min - 1; k <= k_max + 1; ++k)
        out.inertia.emplace_back(k, kmeans(points, k, opts, num::derive_seed(seed, k)).inertia);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < out.inertia.size(); ++i) {
        const double second = out.inertia[i - 1].second - 2.0 * out.inertia[i].second + out.inertia[i + 1].second;
        if (second > best) {
            best = second;
            out.k = out.inertia[i].first;
        }
    }
    return out;
}

std::size_t predict_cluster(const Clustering& c, std::span<const double> point) {
    if (point.size() != c.centroids.cols()) throw ValidationError("predict_cluster: dimension mismatch");
    return nearest(c.centroids, point);
}

}  // namespace grembed::cluster
