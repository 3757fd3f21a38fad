#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "grembed/adam.hpp"
#include "grembed/alias_table.hpp"
#include "grembed/eigen.hpp"
#include "grembed/error.hpp"
#include "grembed/svd.hpp"
#include "helpers.hpp"

using namespace grembed;
using namespace grembed::num;
using testing_support::random_dense;
using testing_support::random_symmetric;
using testing_support::to_oracle;
using testing_support::eigen_residual;
using testing_support::orthonormality_error;
using testing_support::subspace_gap;

namespace {

SparseMatrix path_laplacian(std::size_t n) {
    std::vector<SparseMatrix::Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.emplace_back(i, i, (i == 0 || i + 1 == n) ? 1.0 : 2.0);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("rng streams are frozen") {
    Rng a(1);
    CHECK(a.next_u64() == 0xb3f2af6d0fc710c5ULL);
    CHECK(a.next_u64() == 0x853b559647364ceaULL);
    CHECK(a.next_u64() == 0x92f89756082a4514ULL);
    CHECK(a.next_u64() == 0x642e1c7bc266a3a7ULL);
    Rng b(2);
    CHECK(b.next_u64() == 0x1a28690da8a8d057ULL);
    CHECK(b.next_u64() == 0xb9bb8042daedd58aULL);

    std::vector<int> items(10);
    std::iota(items.begin(), items.end(), 0);
    Rng c(42);
    c.shuffle(std::span<int>(items));
    CHECK(items == std::vector<int>{9, 1, 4, 2, 8, 7, 6, 5, 3, 0});
}

TEST_CASE("rng same seed gives the same 1000 draws") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
    Rng c(1), d(2);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ |= c.next_u64() != d.next_u64();
    CHECK(differ);
}

TEST_CASE("rng derived draws stay in range") {
    Rng r(5);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(r.below(7) < 7);
        const double g = r.gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / 20000) < 0.03);
    CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
    CHECK(derive_seed(9, "walks") != derive_seed(9, "sgns"));
    CHECK(derive_seed(9, std::uint64_t{1}) != derive_seed(9, std::uint64_t{2}));
}

TEST_CASE("alias table reproduces its distribution") {
    const std::vector<double> w{1.0, 0.0, 3.0, 6.0};
    AliasTable t(w);
    Rng r(77);
    std::vector<int> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[t.sample(r)];
    CHECK(counts[1] == 0);
    CHECK(std::abs(counts[0] / double(n) - 0.1) < 0.005);
    CHECK(std::abs(counts[2] / double(n) - 0.3) < 0.006);
    CHECK(std::abs(counts[3] / double(n) - 0.6) < 0.006);
}

TEST_CASE("dense matrix helpers") {
    DenseMatrix a(2, 3);
    a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
    a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;
    const DenseMatrix at = a.transposed();
    CHECK(at(2, 1) == 6);
    const DenseMatrix g = multiply_at_b(a, a);
    const DenseMatrix g2 = multiply(at, a);
    CHECK(g == g2);
    CHECK(a.frobenius_norm() == doctest::Approx(std::sqrt(91.0)));
    const auto y = multiply(a, std::vector<double>{1, 0, -1});
    CHECK(y == std::vector<double>{-2, -2});
}

TEST_CASE("dense matrix csv round-trips bit-exactly") {
    Rng r(3);
    DenseMatrix m = random_dense(4, 5, r);
    m(0, 0) = 1e-300;
    m(1, 1) = -0.1;
    m(2, 2) = 1.0 / 3.0;
    std::stringstream ss;
    write_csv(m, ss);
    CHECK(ss.str().rfind("4,5\n", 0) == 0);
    CHECK(read_csv(ss) == m);
}

TEST_CASE("sparse matrix from triplets") {
    const auto s = SparseMatrix::from_triplets(3, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 1.5}, {1, 1, 1.0}, {1, 1, -1.0}});
    CHECK(s.nonzeros() == 2);
    const auto cols = s.col_indices();
    CHECK(cols[0] == 0);
    CHECK(cols[1] == 2);
    CHECK(s.to_dense()(0, 2) == 2.5);
    CHECK(s.asymmetry() == 2.5);
    std::vector<double> y(3);
    s.multiply(std::vector<double>{1, 1, 1}, y);
    CHECK(y == std::vector<double>{4.5, 0, 0});
}

TEST_CASE("eigensolver simple fixtures") {
    const auto d = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}});
    const auto e = symmetric_eigs_smallest(d, 2);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));

    const auto id = SparseMatrix::from_dense(DenseMatrix::identity(4));
    const auto one = symmetric_eigs_smallest(id, 1);
    CHECK(one.values[0] == doctest::Approx(1.0));
    CHECK(eigen_residual(DenseMatrix::identity(4), one) < 1e-12);
}

TEST_CASE("eigensolver rejects asymmetric input") {
    const auto s = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 0.5}});
    CHECK_THROWS_AS(symmetric_eigs_smallest(s, 1), ValidationError);
}

TEST_CASE("eigensolver matches the Jacobi oracle on random matrices") {
    Rng r(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 11;
        const DenseMatrix a = random_symmetric(n, r);
        const auto oracle_eig = oracle::jacobi_eigen(to_oracle(a));
        const std::size_t k = 1 + trial % n;
        for (const std::size_t dense_limit : {std::size_t{64}, std::size_t{0}}) {
            EigenOptions opts;
            opts.dense_limit = dense_limit;
            const auto e = symmetric_eigs_smallest(SparseMatrix::from_dense(a), k, opts);
            REQUIRE(e.values.size() == k);
            for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(e.values[j] - oracle_eig.values[j]) <= 1e-8);
            CHECK(eigen_residual(a, e) <= 1e-8 * a.frobenius_norm());
            CHECK(orthonormality_error(e.vectors) <= 1e-10);
        }
    }
}

TEST_CASE("lanczos handles a large path graph and repeated eigenvalues") {
    const std::size_t n = 400;
    const auto lap = path_laplacian(n);
    const auto e = symmetric_eigs_smallest(lap, 6);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(e.values[j] == doctest::Approx(2.0 - 2.0 * std::cos(std::numbers::pi * double(j) / double(n))).epsilon(1e-9));
    CHECK(orthonormality_error(e.vectors) <= 1e-10);

    // Two disjoint copies double every eigenvalue's multiplicity.
    std::vector<SparseMatrix::Triplet> t;
    const std::size_t m = 100;
    for (std::size_t copy = 0; copy < 2; ++copy)
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t o = copy * m;
            t.emplace_back(o + i, o + i, (i == 0 || i + 1 == m) ? 1.0 : 2.0);
            if (i + 1 < m) {
                t.emplace_back(o + i, o + i + 1, -1.0);
                t.emplace_back(o + i + 1, o + i, -1.0);
            }
        }
    const auto twin = symmetric_eigs_smallest(SparseMatrix::from_triplets(2 * m, 2 * m, t), 4);
    CHECK(twin.values[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(twin.values[1]) < 1e-9);
    const double second = 2.0 - 2.0 * std::cos(std::numbers::pi / double(m));
    CHECK(twin.values[2] == doctest::Approx(second).epsilon(1e-8));
    CHECK(twin.values[3] == doctest::Approx(second).epsilon(1e-8));
}

TEST_CASE("eigenvector sign convention") {
    DenseMatrix v(3, 2);
    v(0, 0) = 0.2; v(1, 0) = -0.9; v(2, 0) = 0.1;
    v(0, 1) = 0.5; v(1, 1) = -0.5; v(2, 1) = 0.0;
    normalize_signs(v);
    CHECK(v(1, 0) == 0.9);
    CHECK(v(0, 1) == 0.5);
}

TEST_CASE("svd fixtures") {
    DenseMatrix d(3, 3);
    d(0, 0) = 3; d(1, 1) = 2; d(2, 2) = 1;
    const auto s = truncated_svd(d, 2);
    CHECK(s.s[0] == doctest::Approx(3.0));
    CHECK(s.s[1] == doctest::Approx(2.0));

    const std::vector<double> u{0.6, 0.8}, v{0.0, 1.0, 0.0};
    DenseMatrix r1(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) r1(i, j) = u[i] * v[j];
    const auto s1 = truncated_svd(r1, 1);
    CHECK(s1.s[0] == doctest::Approx(1.0));
    CHECK(std::abs(s1.u(0, 0)) == doctest::Approx(0.6));
    CHECK(std::abs(s1.v(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("svd matches the m^T m oracle and the Eckart-Young optimum") {
    Rng r(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 2 + trial % 11;
        const std::size_t cols = 2 + (trial * 7) % 11;
        const DenseMatrix m = random_dense(rows, cols, r);
        const std::size_t d = 1 + trial % std::min(rows, cols);
        const auto om = to_oracle(m);
        const auto sv = oracle::singular_values(om);
        for (const std::size_t limit : {std::size_t{512}, std::size_t{0}}) {
            SvdOptions opts;
            opts.jacobi_limit = limit;
            opts.eigen.dense_limit = 0;
            const auto res = truncated_svd(m, d, opts);
            for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(res.s[j] - sv[j]) <= 1e-8);
            CHECK(orthonormality_error(res.u) <= 1e-10);
            CHECK(orthonormality_error(res.v) <= 1e-10);
            DenseMatrix approx(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                    for (std::size_t t = 0; t < d; ++t) approx(i, j) += res.u(i, t) * res.s[t] * res.v(j, t);
            double err = 0.0;
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) err += (m(i, j) - approx(i, j)) * (m(i, j) - approx(i, j));
            const double best = oracle::best_rank_error(om, d);
            CHECK(std::sqrt(err) - best <= 1e-6 * std::max(1.0, m.frobenius_norm()));
        }
    }
}

TEST_CASE("svd singular subspaces match the oracle when the spectrum is separated") {
    Rng r(5);
    const DenseMatrix m = random_dense(10, 6, r);
    const auto oracle_eig = oracle::jacobi_eigen(oracle::matmul(oracle::transpose(to_oracle(m)), to_oracle(m)));
    const auto res = truncated_svd(m, 3);
    DenseMatrix ov(6, 3);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 3; ++j) ov(i, j) = oracle_eig.vectors[i][5 - j];
    CHECK(subspace_gap(res.v, ov) <= 1e-6);
}

TEST_CASE("adam recurrence") {
    std::vector<double> p{1.0, -2.0};
    AdamState st(2, 0.001);
    adam_step(p, std::vector<double>{0.0, 0.0}, st);
    CHECK(p == std::vector<double>{1.0, -2.0});
    CHECK(st.m == std::vector<double>{0.0, 0.0});
    CHECK(st.v == std::vector<double>{0.0, 0.0});

    std::vector<double> x{0.0};
    AdamState s1(1, 0.001);
    adam_step(x, std::vector<double>{1.0}, s1);
    const double first = std::abs(x[0]);
    CHECK(first > 0.00099);
    CHECK(first <= 0.001);
    CHECK(s1.t == 1);
    const double before = x[0];
    adam_step(x, std::vector<double>{1.0}, s1);
    CHECK(std::abs(x[0] - before) <= first + 1e-12);
}
