#include "grembed/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "grembed/error.hpp"
#include "grembed/rng.hpp"

namespace grembed::num {

namespace {

constexpr int kMaxQlIterations = 60;

// Implicit QL on a tridiagonal (d diagonal, e sub-diagonal with e[i] coupling
// i-1 and i after the initial shift), accumulating rotations into v (n x n,
// row-major). Mirrors the classic EISPACK tql2.
void tql2(std::vector<double>& d, std::vector<double>& e, DenseMatrix& v) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxQlIterations) throw ConvergenceError("tridiagonal QL did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, ii + 1);
                        v(k, ii + 1) = s * v(k, ii) + c * h;
                        v(k, ii) = c * v(k, ii) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

// Householder reduction of symmetric v to tridiagonal form (EISPACK tred2).
// On return v holds the orthogonal transform, d the diagonal, e the sub-diagonal
// in e[1..n-1].
void tred2(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

EigenPairs sorted_pairs(std::vector<double> d, const DenseMatrix& v) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    EigenPairs out;
    out.values.resize(n);
    out.vectors = DenseMatrix(v.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t r = 0; r < v.rows(); ++r) out.vectors(r, j) = v(r, order[j]);
    }
    return out;
}

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

// Removes components along every basis vector (two classical Gram-Schmidt passes).
void orthogonalize(std::span<double> w, const std::vector<std::vector<double>>& a,
                   const std::vector<std::vector<double>>& b) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : a) axpy(-dot(q, w), q, w);
        for (const auto& q : b) axpy(-dot(q, w), q, w);
    }
}

struct RitzSet {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

class Lanczos {
public:
    Lanczos(const LinearOperator& op, std::size_t n, double tol_abs, std::size_t max_basis, Rng& rng)
        : op_(op), n_(n), tol_abs_(tol_abs), max_basis_(max_basis), rng_(rng) {}

    // Smallest `want` eigenpairs of op restricted to the orthogonal complement of `locked`.
    RitzSet run(std::size_t want, const std::vector<std::vector<double>>& locked) {
        const std::size_t available = n_ - locked.size();
        want = std::min(want, available);
        std::vector<std::vector<double>> basis;
        std::vector<double> alpha;
        std::vector<double> beta;
        std::vector<double> w(n_);

        auto q = fresh(locked, basis);
        for (;;) {
            basis.push_back(std::move(q));
            const auto& cur = basis.back();
            op_(cur, w);
            const double a = dot(cur, w);
            axpy(-a, cur, w);
            if (basis.size() > 1) axpy(-beta.back(), basis[basis.size() - 2], w);
            orthogonalize(w, locked, basis);
            const double b = norm2(w);
            alpha.push_back(a);

            const std::size_t m = basis.size();
            const bool exhausted = m >= available;
            const bool breakdown = b <= 1e-13 * std::max(scale_hint_, 1e-300);
            if (m >= want && (exhausted || breakdown || m % 8 == 0 || m >= max_basis_)) {
                const EigenPairs t = tridiagonal_eigen(alpha, beta);
                bool converged = true;
                for (std::size_t i = 0; i < want && converged; ++i)
                    converged = std::abs(b * t.vectors(m - 1, i)) <= tol_abs_;
                if (converged || exhausted) return ritz(basis, t, want);
            }
            if (exhausted) break;
            if (m >= max_basis_)
                throw ConvergenceError("Lanczos did not converge within a basis of " + std::to_string(max_basis_));
            if (breakdown) {
                beta.push_back(0.0);
                q = fresh(locked, basis);
            } else {
                beta.push_back(b);
                q.assign(w.begin(), w.end());
                for (auto& x : q) x /= b;
            }
        }
        return {};
    }

    double scale_hint_ = 1.0;

private:
    std::vector<double> fresh(const std::vector<std::vector<double>>& locked,
                              const std::vector<std::vector<double>>& basis) {
        std::vector<double> q(n_);
        for (int attempt = 0; attempt < 16; ++attempt) {
            for (auto& x : q) x = rng_.gaussian();
            const double before = norm2(q);
            orthogonalize(q, locked, basis);
            const double after = norm2(q);
            if (after > 1e-8 * before) {
                for (auto& x : q) x /= after;
                return q;
            }
        }
        throw ConvergenceError("Lanczos could not find a new start vector");
    }

    RitzSet ritz(const std::vector<std::vector<double>>& basis, const EigenPairs& t, std::size_t want) const {
        RitzSet out;
        for (std::size_t i = 0; i < want; ++i) {
            std::vector<double> v(n_, 0.0);
            for (std::size_t j = 0; j < basis.size(); ++j) axpy(t.vectors(j, i), basis[j], v);
            const double nv = norm2(v);
            for (auto& x : v) x /= nv;
            out.values.push_back(t.values[i]);
            out.vectors.push_back(std::move(v));
        }
        return out;
    }

    const LinearOperator& op_;
    std::size_t n_;
    double tol_abs_;
    std::size_t max_basis_;
    Rng& rng_;
};

EigenPairs to_pairs(const RitzSet& set, std::size_t n) {
    EigenPairs out;
    out.values = set.values;
    out.vectors = DenseMatrix(n, set.values.size());
    for (std::size_t j = 0; j < set.values.size(); ++j) out.vectors.set_column(j, set.vectors[j]);
    return out;
}

}  // namespace

EigenPairs tridiagonal_eigen(std::span<const double> diag, std::span<const double> off) {
    const std::size_t n = diag.size();
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) e[i] = off[i - 1];
    DenseMatrix v = DenseMatrix::identity(n);
    tql2(d, e, v);
    return sorted_pairs(std::move(d), v);
}

EigenPairs symmetric_eigen_dense(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("eigen: matrix must be square");
    const std::size_t n = m.rows();
    if (n == 0) return {};
    DenseMatrix v = m;
    std::vector<double> d(n), e(n);
    tred2(v, d, e);
    tql2(d, e, v);
    return sorted_pairs(std::move(d), v);
}

void normalize_signs(DenseMatrix& vectors) {
    for (std::size_t c = 0; c < vectors.cols(); ++c) {
        std::size_t best = 0;
        for (std::size_t r = 1; r < vectors.rows(); ++r)
            if (std::abs(vectors(r, c)) > std::abs(vectors(best, c)) * (1.0 + 1e-12)) best = r;
        if (vectors.rows() > 0 && vectors(best, c) < 0)
            for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, c) = -vectors(r, c);
    }
}

EigenPairs lanczos_smallest(const LinearOperator& op, std::size_t n, std::size_t k, double scale,
                            const EigenOptions& opts) {
    if (k == 0 || k > n) throw ValidationError("eigensolver: need 1 <= k <= n");
    const std::size_t max_basis =
        opts.max_basis ? std::min(opts.max_basis, n) : std::min(n, std::max<std::size_t>(8 * k + 64, 400));
    if (max_basis < k) throw ValidationError("eigensolver: basis cap below k");
    Rng rng(opts.seed);
    const double tol_abs = opts.tol * std::max(scale, 1e-300);
    Lanczos lanczos(op, n, tol_abs, max_basis, rng);
    lanczos.scale_hint_ = scale;

    RitzSet cur = lanczos.run(k, {});
    // Deflated passes: anything below the current k-th value that the first
    // run missed (e.g. a second copy of a repeated eigenvalue) shows up here.
    for (std::size_t pass = 0; pass < n && cur.values.size() < n; ++pass) {
        RitzSet probe = lanczos.run(k, cur.vectors);
        if (probe.values.empty() || probe.values.front() >= cur.values.back() - 10.0 * tol_abs) break;
        std::vector<std::pair<double, std::vector<double>>> merged;
        for (std::size_t i = 0; i < cur.values.size(); ++i) merged.emplace_back(cur.values[i], std::move(cur.vectors[i]));
        for (std::size_t i = 0; i < probe.values.size(); ++i) merged.emplace_back(probe.values[i], std::move(probe.vectors[i]));
        std::stable_sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        merged.resize(k);
        cur = {};
        for (auto& [val, vec] : merged) {
            cur.values.push_back(val);
            cur.vectors.push_back(std::move(vec));
        }
    }
    EigenPairs out = to_pairs(cur, n);
    normalize_signs(out.vectors);
    return out;
}

EigenPairs lanczos_largest(const LinearOperator& op, std::size_t n, std::size_t k, double scale,
                           const EigenOptions& opts) {
    const LinearOperator neg = [&op](std::span<const double> x, std::span<double> y) {
        op(x, y);
        for (auto& v : y) v = -v;
    };
    EigenPairs out = lanczos_smallest(neg, n, k, scale, opts);
    for (auto& v : out.values) v = -v;
    return out;
}

EigenPairs symmetric_eigs_smallest(const SparseMatrix& m, std::size_t k, const EigenOptions& opts) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw ValidationError("eigensolver: matrix must be square");
    if (k == 0 || k > n) throw ValidationError("eigensolver: need 1 <= k <= n");
    const double scale = m.frobenius_norm();
    if (m.asymmetry() > 1e-12 * std::max(1.0, scale)) throw ValidationError("eigensolver: matrix not symmetric");
    if (n <= opts.dense_limit) {
        EigenPairs all = symmetric_eigen_dense(m.to_dense());
        EigenPairs out;
        out.values.assign(all.values.begin(), all.values.begin() + static_cast<std::ptrdiff_t>(k));
        out.vectors = DenseMatrix(n, k);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = all.vectors(r, j);
        normalize_signs(out.vectors);
        return out;
    }
    const LinearOperator op = [&m](std::span<const double> x, std::span<double> y) { m.multiply(x, y); };
    return lanczos_smallest(op, n, k, scale, opts);
}

}  // namespace grembed::num
