#include "icopt/ic0.hpp"

#include <cmath>

namespace icopt {

LowerFactor ic0_factorize(const CsrMatrix& a) {
  if (!a.symmetric && !is_exactly_symmetric(a)) {
    throw std::invalid_argument("ic0_factorize: matrix must be symmetric");
  }
  LowerFactor l = LowerFactor::lower_pattern_of(a);  // throws if a diagonal entry is missing
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  auto v = l.values();

  for (std::size_t i = 0; i < l.n(); ++i) {
    const std::size_t d = l.diag_pos(i);
    for (std::size_t p = rp[i]; p < d; ++p) {
      const std::size_t j = ci[p];
      // Sparse dot of row i (columns < j, already final) with row j (off-diagonal part).
      double s = v[p];
      std::size_t q = rp[i];
      std::size_t r = rp[j];
      const std::size_t rend = l.diag_pos(j);
      while (q < p && r < rend) {
        if (ci[q] < ci[r]) {
          ++q;
        } else if (ci[r] < ci[q]) {
          ++r;
        } else {
          s -= v[q] * v[r];
          ++q;
          ++r;
        }
      }
      v[p] = s / v[rend];
    }
    double pivot = v[d];
    for (std::size_t p = rp[i]; p < d; ++p) pivot -= v[p] * v[p];
    if (!(pivot > 0.0)) throw BreakdownError("ic0_factorize: non-positive pivot", i);
    v[d] = std::sqrt(pivot);
  }
  return l;
}

}  // namespace icopt
