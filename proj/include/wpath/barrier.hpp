#ifndef WPATH_BARRIER_HPP
#define WPATH_BARRIER_HPP

#include "wpath/common.hpp"

#include <vector>

namespace wpath {

// A bound is either a finite value or the infinity on its side.
struct Bound {
  double value = 0.0;
  bool infinite = false;

  static Bound finite(double v) { return {v, false}; }
  static Bound unbounded() { return {0.0, true}; }
};

enum class BarrierKind { LowerOnly, UpperOnly, TwoSided };

struct Barrier1D {
  BarrierKind kind = BarrierKind::LowerOnly;
  double l = 0.0;
  double u = 0.0;
  double a = 0.0;        // pi/(u-l), two-sided only
  double b_shift = 0.0;  // -(pi/2)(u+l)/(u-l), two-sided only

  bool has_lower() const { return kind != BarrierKind::UpperOnly; }
  bool has_upper() const { return kind != BarrierKind::LowerOnly; }
};

struct BarrierDerivs {
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

Barrier1D make_barrier(Bound l, Bound u);

// Throws OutOfDomain when x is not strictly interior or lies inside the guard band.
BarrierDerivs eval(const Barrier1D& bar, double x);

bool is_interior(const Barrier1D& bar, double x);

// Distance from x to the nearer finite bound.
double slack(const Barrier1D& bar, double x);

// Per-coordinate derivative arrays for a full iterate.
struct BarrierArrays {
  Vec phi, d1, d2, d3;
};

BarrierArrays eval_all(const std::vector<Barrier1D>& bars, const Vec& x);

// Sum of phi over all coordinates.
double barrier_value(const std::vector<Barrier1D>& bars, const Vec& x);

}  // namespace wpath

#endif
