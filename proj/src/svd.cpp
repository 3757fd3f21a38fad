#include "grembed/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grembed/error.hpp"

namespace grembed::num {

namespace {

using Columns = std::vector<std::vector<double>>;

// Extends `basis` so every column is unit-norm and orthogonal to all earlier
// ones, replacing columns flagged in `replace` with standard-basis completions.
void complete_orthonormal(Columns& basis, const std::vector<bool>& replace) {
    const std::size_t m = basis.empty() ? 0 : basis.front().size();
    std::size_t probe = 0;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (!replace[j]) continue;
        for (; probe < m; ++probe) {
            std::vector<double> e(m, 0.0);
            e[probe] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t i = 0; i < basis.size(); ++i) {
                    if (i == j || (replace[i] && i > j)) continue;
                    const double c = dot(basis[i], e);
                    for (std::size_t r = 0; r < m; ++r) e[r] -= c * basis[i][r];
                }
            const double ne = norm2(e);
            if (ne > 1e-6) {
                for (auto& x : e) x /= ne;
                basis[j] = std::move(e);
                ++probe;
                break;
            }
        }
    }
}

// One-sided (Hestenes) Jacobi on a tall matrix given as columns.
SvdResult jacobi_svd(const DenseMatrix& a, std::size_t d, int max_sweeps) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Columns u(n, std::vector<double>(m));
    Columns v(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < m; ++r) u[j][r] = a(r, j);
        v[j][j] = 1.0;
    }

    const double eps = 1e-15;
    bool rotated = true;
    int sweep = 0;
    while (rotated) {
        if (++sweep > max_sweeps) throw ConvergenceError("one-sided Jacobi SVD did not converge");
        rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double alpha = dot(u[i], u[i]);
                const double beta = dot(u[j], u[j]);
                const double gamma = dot(u[i], u[j]);
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const double x = u[i][r];
                    const double y = u[j][r];
                    u[i][r] = c * x - s * y;
                    u[j][r] = s * x + c * y;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double x = v[i][r];
                    const double y = v[j][r];
                    v[i][r] = c * x - s * y;
                    v[j][r] = s * x + c * y;
                }
            }
        }
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(u[j]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double smax = sigma[order.front()];
    Columns uc;
    Columns vc;
    std::vector<bool> degenerate;
    SvdResult out;
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t j = order[k];
        out.s.push_back(sigma[j]);
        const bool tiny = sigma[j] <= 1e-14 * std::max(smax, 1e-300);
        std::vector<double> col = u[j];
        if (!tiny)
            for (auto& x : col) x /= sigma[j];
        uc.push_back(std::move(col));
        vc.push_back(v[j]);
        degenerate.push_back(tiny);
    }
    if (std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end())
        complete_orthonormal(uc, degenerate);

    out.u = DenseMatrix(m, d);
    out.v = DenseMatrix(n, d);
    for (std::size_t k = 0; k < d; ++k) {
        out.u.set_column(k, uc[k]);
        out.v.set_column(k, vc[k]);
    }
    return out;
}

SvdResult gram_svd(const DenseMatrix& a, std::size_t d, const EigenOptions& opts) {
    const std::size_t n = a.cols();
    std::vector<double> tmp(a.rows());
    const LinearOperator gram = [&](std::span<const double> x, std::span<double> y) {
        for (std::size_t r = 0; r < a.rows(); ++r) tmp[r] = dot(a.row(r), x);
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t r = 0; r < a.rows(); ++r) {
            const auto row = a.row(r);
            for (std::size_t c = 0; c < n; ++c) y[c] += row[c] * tmp[r];
        }
    };
    const double f = a.frobenius_norm();
    const EigenPairs eig = lanczos_largest(gram, n, d, f * f, opts);
    SvdResult out;
    out.v = eig.vectors;
    out.u = DenseMatrix(a.rows(), d);
    Columns uc;
    std::vector<bool> degenerate;
    const double smax = std::sqrt(std::max(eig.values.front(), 0.0));
    for (std::size_t k = 0; k < d; ++k) {
        const double sigma = std::sqrt(std::max(eig.values[k], 0.0));
        out.s.push_back(sigma);
        std::vector<double> col = multiply(a, out.v.column(k));
        const bool tiny = sigma <= 1e-12 * std::max(smax, 1e-300);
        if (!tiny)
            for (auto& x : col) x /= sigma;
        uc.push_back(std::move(col));
        degenerate.push_back(tiny);
    }
    if (std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end())
        complete_orthonormal(uc, degenerate);
    for (std::size_t k = 0; k < d; ++k) out.u.set_column(k, uc[k]);
    return out;
}

}  // namespace

SvdResult truncated_svd(const DenseMatrix& m, std::size_t d, const SvdOptions& opts) {
    if (d == 0 || d > std::min(m.rows(), m.cols())) throw ValidationError("truncated_svd: need 1 <= d <= min(rows, cols)");
    const bool wide = m.cols() > m.rows();
    const DenseMatrix a = wide ? m.transposed() : m;
    SvdResult r = std::min(a.rows(), a.cols()) <= opts.jacobi_limit ? jacobi_svd(a, d, opts.max_sweeps)
                                                                    : gram_svd(a, d, opts.eigen);
    if (wide) std::swap(r.u, r.v);
    return r;
}

SvdResult truncated_svd_symmetric(const LinearOperator& op, std::size_t n, std::size_t d, double scale,
                                  const EigenOptions& opts) {
    if (d == 0 || d > n) throw ValidationError("truncated_svd: need 1 <= d <= n");
    std::vector<double> tmp(n);
    const LinearOperator squared = [&](std::span<const double> x, std::span<double> y) {
        op(x, tmp);
        op(tmp, y);
    };
    const EigenPairs eig = lanczos_largest(squared, n, d, scale * scale, opts);
    SvdResult out;
    out.v = eig.vectors;
    out.u = DenseMatrix(n, d);
    Columns uc;
    std::vector<bool> degenerate;
    const double smax = std::sqrt(std::max(eig.values.front(), 0.0));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < d; ++k) {
        const double sigma = std::sqrt(std::max(eig.values[k], 0.0));
        out.s.push_back(sigma);
        const auto vk = out.v.column(k);
        op(vk, col);
        const bool tiny = sigma <= 1e-12 * std::max(smax, 1e-300);
        std::vector<double> c = col;
        if (!tiny)
            for (auto& x : c) x /= sigma;
        uc.push_back(std::move(c));
        degenerate.push_back(tiny);
    }
    if (std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end())
        complete_orthonormal(uc, degenerate);
    for (std::size_t k = 0; k < d; ++k) out.u.set_column(k, uc[k]);
    return out;
}

}  // namespace grembed::num
