#include "wpath/barrier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wpath {

namespace {

constexpr double kGuard = 1e-14;

[[noreturn]] void out_of_domain(const Barrier1D& bar, double x) {
  std::ostringstream os;
  os.precision(17);
  os << "x=" << x << " not interior to (" << (bar.has_lower() ? bar.l : -INFINITY) << ", "
     << (bar.has_upper() ? bar.u : INFINITY) << ")";
  throw Error(ErrorCode::OutOfDomain, os.str());
}

// s is the distance to the bound located at `at`.
bool guarded(double s, double at) { return !(s > kGuard * std::abs(at)) || !(s > 0.0); }

}  // namespace

Barrier1D make_barrier(Bound l, Bound u) {
  Barrier1D bar;
  if (l.infinite && u.infinite) throw Error(ErrorCode::DegenerateDomain, "both bounds infinite");
  if (!l.infinite && !std::isfinite(l.value)) throw Error(ErrorCode::DegenerateDomain, "lower bound not finite");
  if (!u.infinite && !std::isfinite(u.value)) throw Error(ErrorCode::DegenerateDomain, "upper bound not finite");
  if (l.infinite) {
    bar.kind = BarrierKind::UpperOnly;
    bar.u = u.value;
    return bar;
  }
  if (u.infinite) {
    bar.kind = BarrierKind::LowerOnly;
    bar.l = l.value;
    return bar;
  }
  if (!(l.value < u.value)) throw Error(ErrorCode::DegenerateDomain, "empty interior");
  bar.kind = BarrierKind::TwoSided;
  bar.l = l.value;
  bar.u = u.value;
  bar.a = std::numbers::pi / (u.value - l.value);
  bar.b_shift = -(std::numbers::pi / 2) * (u.value + l.value) / (u.value - l.value);
  return bar;
}

bool is_interior(const Barrier1D& bar, double x) {
  if (!std::isfinite(x)) return false;
  if (bar.has_lower() && guarded(x - bar.l, bar.l)) return false;
  if (bar.has_upper() && guarded(bar.u - x, bar.u)) return false;
  return true;
}

double slack(const Barrier1D& bar, double x) {
  double s = INFINITY;
  if (bar.has_lower()) s = std::min(s, x - bar.l);
  if (bar.has_upper()) s = std::min(s, bar.u - x);
  return s;
}

BarrierDerivs eval(const Barrier1D& bar, double x) {
  if (!is_interior(bar, x)) out_of_domain(bar, x);
  BarrierDerivs r;
  switch (bar.kind) {
    case BarrierKind::LowerOnly: {
      const double s = x - bar.l;
      r.phi = -std::log(s);
      r.d1 = -1.0 / s;
      r.d2 = 1.0 / (s * s);
      r.d3 = -2.0 / (s * s * s);
      break;
    }
    case BarrierKind::UpperOnly: {
      const double s = bar.u - x;
      r.phi = -std::log(s);
      r.d1 = 1.0 / s;
      r.d2 = 1.0 / (s * s);
      r.d3 = 2.0 / (s * s * s);
      break;
    }
    case BarrierKind::TwoSided: {
      const double a = bar.a;
      const double sl = x - bar.l;
      const double su = bar.u - x;
      const double theta = a * (x - 0.5 * (bar.u + bar.l));
      if (std::abs(theta) <= std::numbers::pi / 4) {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        r.phi = -std::log(c);
        r.d1 = a * s / c;
        r.d2 = a * a / (c * c);
        r.d3 = 2.0 * a * a * a * s / (c * c * c);
      } else {
        // Near a bound, work with psi = pi/2 - |theta| taken from the exact slack.
        const bool lower = sl <= su;
        const double psi = a * (lower ? sl : su);
        const double sp = std::sin(psi);
        const double cp = std::cos(psi);
        const double sign = lower ? -1.0 : 1.0;
        r.phi = -std::log(sp);
        r.d1 = sign * a * cp / sp;
        r.d2 = a * a / (sp * sp);
        r.d3 = sign * 2.0 * a * a * a * cp / (sp * sp * sp);
      }
      break;
    }
  }
  if (!std::isfinite(r.d2) || !std::isfinite(r.d3) || !(r.d2 > 0.0)) out_of_domain(bar, x);
  return r;
}

BarrierArrays eval_all(const std::vector<Barrier1D>& bars, const Vec& x) {
  const Index m = x.size();
  BarrierArrays out;
  out.phi.resize(m);
  out.d1.resize(m);
  out.d2.resize(m);
  out.d3.resize(m);
  for (Index i = 0; i < m; ++i) {
    const BarrierDerivs r = eval(bars[i], x[i]);
    out.phi[i] = r.phi;
    out.d1[i] = r.d1;
    out.d2[i] = r.d2;
    out.d3[i] = r.d3;
  }
  return out;
}

double barrier_value(const std::vector<Barrier1D>& bars, const Vec& x) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += eval(bars[i], x[i]).phi;
  return s;
}

}  // namespace wpath
