#pragma once

#include "icopt/sparse.hpp"

namespace icopt {

/// Incomplete Cholesky with zero fill-in.
///
/// The factor has exactly the lower-triangular pattern of `a`, and
/// (L Lᵀ)_ij == A_ij for every (i, j) in that pattern. Rows are processed
/// top-down (up-looking):
///
///   L_ij = (A_ij - sum_{k<j} L_ik L_jk) / L_jj   for stored j < i
///   L_ii = sqrt(A_ii - sum_{k<i} L_ik^2)
///
/// where the sums run over columns present in both rows. There is no diagonal
/// shift: a non-positive pivot throws BreakdownError naming the row.
LowerFactor ic0_factorize(const CsrMatrix& a);

}  // namespace icopt
