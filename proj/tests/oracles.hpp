#pragma once

// Brute-force reference implementations used only by the tests. They share no
// code with the library kernels they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, std::vector<double>(c, 0.0)); }

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat out = zeros(a.size(), b.empty() ? 0 : b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline Mat transpose(const Mat& a) {
    Mat t = zeros(a.empty() ? 0 : a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

struct Eigen {
    std::vector<double> values;  // ascending
    Mat vectors;                 // column j pairs with values[j]
};

// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
inline Eigen jacobi_eigen(Mat a) {
    const std::size_t n = a.size();
    Mat v = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] < a[y][y]; });
    Eigen e;
    e.vectors = zeros(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        e.values.push_back(a[order[j]][order[j]]);
        for (std::size_t i = 0; i < n; ++i) e.vectors[i][j] = v[i][order[j]];
    }
    return e;
}

// Singular values of m (descending) from the Jacobi eigenvalues of m^T m.
inline std::vector<double> singular_values(const Mat& m) {
    const auto e = jacobi_eigen(matmul(transpose(m), m));
    std::vector<double> s;
    for (auto it = e.values.rbegin(); it != e.values.rend(); ++it) s.push_back(std::sqrt(std::max(0.0, *it)));
    return s;
}

// Eckart-Young: the best rank-d Frobenius error is the tail of the spectrum.
inline double best_rank_error(const Mat& m, std::size_t d) {
    const auto s = singular_values(m);
    double tail = 0.0;
    for (std::size_t i = d; i < s.size(); ++i) tail += s[i] * s[i];
    return std::sqrt(tail);
}

// Partial sum of beta^k W^k for k = 1..terms.
inline Mat katz_series(const Mat& w, double beta, int terms) {
    const std::size_t n = w.size();
    Mat sum = zeros(n, n);
    Mat power = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) power[i][i] = 1.0;
    for (int k = 1; k <= terms; ++k) {
        power = matmul(power, w);
        for (auto& row : power)
            for (auto& x : row) x *= beta;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) sum[i][j] += power[i][j];
    }
    return sum;
}

// Rectified dense layers written out without any shared helpers.
inline std::vector<double> mlp_forward(const std::vector<Mat>& weights, const std::vector<std::vector<double>>& biases,
                                       std::vector<double> x) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        std::vector<double> next(weights[l].size());
        for (std::size_t o = 0; o < weights[l].size(); ++o) {
            double z = biases[l][o];
            for (std::size_t i = 0; i < x.size(); ++i) z += weights[l][o][i] * x[i];
            next[o] = z > 0.0 ? z : 0.0;
        }
        x = std::move(next);
    }
    return x;
}

// Central differences of f at x, one coordinate at a time.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = f(x);
        x[i] = keep - h;
        const double down = f(x);
        x[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// max_i |a_i - b_i| / max(1, |b_i|)-style relative error over the whole vector.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / std::max(den, 1e-12);
}

}  // namespace oracle
