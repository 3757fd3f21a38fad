#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "grembed/matrix.hpp"

namespace grembed::num {

// Eigenvalues ascending; column i of `vectors` pairs with values[i].
struct EigenPairs {
    std::vector<double> values;
    DenseMatrix vectors;
};

struct EigenOptions {
    // Inputs with n at or below this size are solved densely.
    std::size_t dense_limit = 64;
    // Cap on the Krylov basis per Lanczos run; 0 means min(n, max(8k + 64, 400)).
    std::size_t max_basis = 0;
    // Ritz pairs are accepted once their residual is below tol * scale.
    double tol = 1e-11;
    std::uint64_t seed = 0x6C616E637A6F73ULL;
};

// y = A x for a symmetric operator A.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

// All eigenpairs of a symmetric tridiagonal matrix (implicit QL).
// `off` holds the n-1 sub-diagonal entries.
EigenPairs tridiagonal_eigen(std::span<const double> diag, std::span<const double> off);

// All eigenpairs of a dense symmetric matrix (Householder reduction + implicit QL).
EigenPairs symmetric_eigen_dense(const DenseMatrix& m);

/// k smallest eigenpairs of a symmetric sparse matrix. Small inputs go
/// through the dense solver; larger ones through Lanczos with full
/// reorthogonalization, followed by deflated restarts until no eigenvalue
/// below the current k-th one remains undiscovered (repeated eigenvalues are
/// recovered this way). Each eigenvector is sign-fixed so its largest-magnitude
/// entry is positive.
EigenPairs symmetric_eigs_smallest(const SparseMatrix& m, std::size_t k, const EigenOptions& opts = {});

// Same contract over an abstract operator; `scale` estimates ||A|| for tolerances.
EigenPairs lanczos_smallest(const LinearOperator& op, std::size_t n, std::size_t k, double scale,
                            const EigenOptions& opts = {});
// k largest, returned in descending order.
EigenPairs lanczos_largest(const LinearOperator& op, std::size_t n, std::size_t k, double scale,
                           const EigenOptions& opts = {});

// Flips each column so its largest-magnitude entry (first on ties) is positive.
void normalize_signs(DenseMatrix& vectors);

}  // namespace grembed::num
