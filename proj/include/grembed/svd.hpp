#pragma once

#include <cstddef>
#include <vector>

#include "grembed/eigen.hpp"
#include "grembed/matrix.hpp"

namespace grembed::num {

// Leading singular triplets; s descending, u is rows x d, v is cols x d.
struct SvdResult {
    DenseMatrix u;
    std::vector<double> s;
    DenseMatrix v;
};

struct SvdOptions {
    // One-sided Jacobi when min(rows, cols) is at or below this; Gram-operator Lanczos otherwise.
    std::size_t jacobi_limit = 512;
    int max_sweeps = 80;
    EigenOptions eigen{};
};

SvdResult truncated_svd(const DenseMatrix& m, std::size_t d, const SvdOptions& opts = {});

// Leading d singular triplets of a symmetric operator given only its action.
// Uses Lanczos on the squared operator; `scale` estimates ||A||.
SvdResult truncated_svd_symmetric(const LinearOperator& op, std::size_t n, std::size_t d, double scale,
                                  const EigenOptions& opts = {});

}  // namespace grembed::num
