#include "wpath/lp.hpp"

#include "wpath/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace wpath {

BoxedLP make_lp(SparseMat A, Vec b, Vec c, std::vector<Bound> lower, std::vector<Bound> upper, bool check_rank) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (b.size() != n) throw Error(ErrorCode::ShapeMismatch, "b must have one entry per column of A");
  if (c.size() != m) throw Error(ErrorCode::ShapeMismatch, "c must have one entry per row of A");
  if (static_cast<Index>(lower.size()) != m || static_cast<Index>(upper.size()) != m)
    throw Error(ErrorCode::ShapeMismatch, "bounds must have one entry per row of A");
  if (m < n) throw Error(ErrorCode::InvalidShape, "need m >= n");
  if (!c.allFinite() || !b.allFinite()) throw Error(ErrorCode::ShapeMismatch, "b and c must be finite");
  BoxedLP lp;
  lp.barriers.reserve(m);
  for (Index i = 0; i < m; ++i) lp.barriers.push_back(make_barrier(lower[i], upper[i]));
  A.makeCompressed();
  if (check_rank && n > 0) require_full_column_rank(A);
  lp.A = std::move(A);
  lp.b = std::move(b);
  lp.c = std::move(c);
  lp.lower = std::move(lower);
  lp.upper = std::move(upper);
  return lp;
}

bool interior(const BoxedLP& lp, const Vec& x) {
  if (x.size() != lp.m()) return false;
  for (Index i = 0; i < x.size(); ++i)
    if (!is_interior(lp.barriers[i], x[i])) return false;
  return true;
}

double width(const BoxedLP& lp, const Vec& x0) {
  double U = 1.0;
  for (Index i = 0; i < lp.m(); ++i) {
    const Barrier1D& bar = lp.barriers[i];
    if (bar.kind == BarrierKind::TwoSided) {
      const double r = bar.u - bar.l;
      U = std::max({U, r, r / (bar.u - x0[i]), r / (x0[i] - bar.l)});
    }
  }
  if (lp.c.size() > 0) U = std::max(U, lp.c.cwiseAbs().maxCoeff());
  return U;
}

}  // namespace wpath
