#include "grembed/hope.hpp"

#include <cmath>

#include "grembed/error.hpp"

namespace grembed::embed {

namespace {

constexpr int kPowerIterations = 20000;

// In-place Cholesky of an SPD matrix (lower triangle holds L).
void cholesky(num::DenseMatrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
        if (!(diag > 0.0)) throw SolverError("Katz system is not positive definite");
        const double l = std::sqrt(diag);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
}

void cholesky_solve(const num::DenseMatrix& l, std::span<double> b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
        b[i] = s / l(i, i);
    }
}

double resolve_beta(const WeightedGraph& g, double beta) {
    const double rho = spectral_radius(g);
    if (beta == 0.0) return rho > 0.0 ? 0.5 / rho : 0.5;
    if (!(beta > 0.0)) throw ValidationError("HOPE: beta must be positive");
    if (beta * rho >= 1.0)
        throw DivergentSeriesError("HOPE: beta = " + num::format_double(beta) + " is not below 1/rho(W) = " +
                                   num::format_double(1.0 / rho));
    return beta;
}

// Solves (I - beta W) y = rhs by conjugate gradients.
void katz_cg(const num::SparseMatrix& w, double beta, std::span<const double> rhs, std::span<double> y) {
    const std::size_t n = rhs.size();
    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> p = r;
    std::vector<double> ap(n);
    std::fill(y.begin(), y.end(), 0.0);
    double rr = num::dot(r, r);
    const double stop = 1e-28 * std::max(rr, 1e-300);
    for (std::size_t it = 0; it < 10 * n + 100 && rr > stop; ++it) {
        w.multiply(p, ap);
        for (std::size_t i = 0; i < n; ++i) ap[i] = p[i] - beta * ap[i];
        const double alpha = rr / num::dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_next = num::dot(r, r);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + (rr_next / rr) * p[i];
        rr = rr_next;
    }
    if (rr > stop) throw SolverError("Katz CG solve did not converge");
}

}  // namespace

double spectral_radius(const WeightedGraph& g) {
    const std::size_t n = g.size();
    if (n == 0) return 0.0;
    const num::SparseMatrix w = g.adjacency_matrix();
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    double lambda = 0.0;
    for (int it = 0; it < kPowerIterations; ++it) {
        w.multiply(x, y);
        for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
        const double next = num::dot(x, y);
        const double ny = num::norm2(y);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (it > 0 && std::abs(next - lambda) <= 1e-14 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda - 1.0;
}

num::DenseMatrix katz_matrix(const WeightedGraph& g, double beta) {
    const std::size_t n = g.size();
    const double rho = spectral_radius(g);
    if (!(beta > 0.0)) throw ValidationError("Katz: beta must be positive");
    if (beta * rho >= 1.0) throw DivergentSeriesError("Katz: beta must be below 1/rho(W)");
    num::DenseMatrix m = num::DenseMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& nb : g.neighbors(i)) m(i, nb.node) -= beta * nb.weight;
    cholesky(m);
    num::DenseMatrix s(n, n);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        for (const auto& nb : g.neighbors(j)) col[nb.node] = beta * nb.weight;
        cholesky_solve(m, col);
        s.set_column(j, col);
    }
    // Symmetrize away rounding.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    return s;
}

HopeFactors hope_factorize(const WeightedGraph& g, const HopeOptions& opts) {
    const std::size_t n = g.size();
    if (opts.dim == 0 || opts.dim > n) throw ValidationError("HOPE: need 1 <= dim <= node count");
    HopeFactors out;
    out.beta = resolve_beta(g, opts.beta);
    if (n <= opts.dense_limit) {
        num::SvdOptions svd_opts;
        svd_opts.eigen = opts.eigen;
        out.svd = num::truncated_svd(katz_matrix(g, out.beta), opts.dim, svd_opts);
        return out;
    }
    const num::SparseMatrix w = g.adjacency_matrix();
    std::vector<double> rhs(n);
    const double beta = out.beta;
    const num::LinearOperator katz = [&](std::span<const double> x, std::span<double> y) {
        w.multiply(x, rhs);
        for (auto& v : rhs) v *= beta;
        katz_cg(w, beta, rhs, y);
    };
    // ||S||_2 = beta*rho / (1 - beta*rho) bounds the scale.
    const double rho = spectral_radius(g);
    out.svd = num::truncated_svd_symmetric(katz, n, opts.dim, beta * rho / (1.0 - beta * rho), opts.eigen);
    return out;
}

Embedding hope_embed(const WeightedGraph& g, const HopeOptions& opts) {
    const HopeFactors f = hope_factorize(g, opts);
    num::DenseMatrix vectors(g.size(), opts.dim);
    for (std::size_t j = 0; j < opts.dim; ++j) {
        const double root = std::sqrt(f.svd.s[j]);
        for (std::size_t r = 0; r < g.size(); ++r) vectors(r, j) = f.svd.u(r, j) * root;
    }
    Embedding e(EmbeddingMethod::hope, g.users(), std::move(vectors));
    e.validate();
    return e;
}

}  // namespace grembed::embed
