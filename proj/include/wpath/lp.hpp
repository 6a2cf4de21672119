#ifndef WPATH_LP_HPP
#define WPATH_LP_HPP

#include "wpath/barrier.hpp"
#include "wpath/common.hpp"

#include <vector>

namespace wpath {

// min c^T x  subject to  A^T x = b,  l <= x <= u.
// A is m x n with m >= n and full column rank.
struct BoxedLP {
  SparseMat A;
  Vec b;
  Vec c;
  std::vector<Bound> lower;
  std::vector<Bound> upper;
  std::vector<Barrier1D> barriers;

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

// Validates shapes and bounds and builds the barriers. Throws ShapeMismatch,
// DegenerateDomain or InvalidShape (rank deficient).
BoxedLP make_lp(SparseMat A, Vec b, Vec c, std::vector<Bound> lower, std::vector<Bound> upper,
                bool check_rank = true);

bool interior(const BoxedLP& lp, const Vec& x);

// max(||(u-l)/(u-x0)||, ||(u-l)/(x0-l)||, ||u-l||, ||c||), infinity norms over finite entries, at least 1.
double width(const BoxedLP& lp, const Vec& x0);

}  // namespace wpath

#endif
