#include "wpath/centering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace wpath {

namespace {

Vec eta_or_zero(const PathPoint& pt, Index n) { return pt.eta.size() == n ? pt.eta : Vec::Zero(n); }

Vec normal_weights(const PathPoint& pt, const BarrierArrays& B) {
  return (pt.w.cwiseProduct(B.d2)).cwiseInverse();
}

// Coordinates by |a_i|/l_i descending, ties by index; a_i = 0 sorts last.
std::vector<Index> projection_order(const Vec& a, const Vec& l) {
  std::vector<Index> ord(a.size());
  std::iota(ord.begin(), ord.end(), Index{0});
  std::stable_sort(ord.begin(), ord.end(),
                   [&](Index i, Index j) { return std::abs(a[i]) / l[i] > std::abs(a[j]) / l[j]; });
  return ord;
}

void require_box(const Vec& a, const Vec& l) {
  if (a.size() != l.size()) throw Error(ErrorCode::InvalidShape, "a and l differ in length");
  for (Index i = 0; i < l.size(); ++i)
    if (!(l[i] > 0.0) || !std::isfinite(l[i])) throw Error(ErrorCode::PreconditionFailed, "l must be positive");
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Suffix sums of squares in sorted order; out[i] = sum_{k >= i} an[ord[k]]^2.
Vec suffix_squares(const Vec& an, const std::vector<Index>& ord) {
  const Index m = an.size();
  Vec out = Vec::Zero(m + 1);
  for (Index k = m - 1; k >= 0; --k) out[k] = out[k + 1] + an[ord[k]] * an[ord[k]];
  return out;
}

}  // namespace

double mixed_norm(const Vec& y, const Vec& w, double c_norm) { return mixed_norm_parts(y, w, c_norm).delta_hat; }

CentralityReading mixed_norm_parts(const Vec& y, const Vec& w, double c_norm) {
  if (y.size() != w.size()) throw Error(ErrorCode::InvalidShape, "y and w differ in length");
  CentralityReading r;
  if (y.size() == 0) return r;
  r.inf_part = y.cwiseAbs().maxCoeff();
  r.w_part = std::sqrt(w.dot(y.cwiseAbs2()));
  r.delta_hat = r.inf_part + c_norm * r.w_part;
  return r;
}

Vec gradient(const Vec& cost, const PathPoint& pt, const BarrierArrays& B) {
  return pt.t * cost + pt.w.cwiseProduct(B.d1);
}

Vec eta_star(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double eps_s) {
  const BarrierArrays B = eval_all(lp.barriers, pt.x);
  const Vec D = normal_weights(pt, B);
  ws.newton.factor(D);
  const Vec q = lp.A.transpose() * D.cwiseProduct(gradient(cost, pt, B));
  return ws.newton.solve(q, eps_s).solution;
}

Vec eta_star(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double eps_s) {
  Workspace ws(lp.A);
  return eta_star(ws, lp, cost, pt, eps_s);
}

CentralityReading reading_at(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, const Vec& eta, double c_norm) {
  const BarrierArrays B = eval_all(lp.barriers, pt.x);
  const Vec r = gradient(cost, pt, B) - lp.A * eta;
  const Vec y = r.cwiseQuotient(pt.w.cwiseProduct(B.d2.cwiseSqrt()));
  return mixed_norm_parts(y, pt.w, c_norm);
}

CentralityReading centrality(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm,
                             double eps_s) {
  return reading_at(lp, cost, pt, eta_star(ws, lp, cost, pt, eps_s), c_norm);
}

CentralityReading centrality(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm, double eps_s) {
  Workspace ws(lp.A);
  return centrality(ws, lp, cost, pt, c_norm, eps_s);
}

NewtonDirection newton_direction(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt,
                                 double c_norm, double eps_s, bool correct_residual) {
  const BarrierArrays B = eval_all(lp.barriers, pt.x);
  const Vec D = normal_weights(pt, B);
  const Vec eta = eta_or_zero(pt, lp.n());
  const Vec r = gradient(cost, pt, B) - lp.A * eta;
  ws.newton.factor(D);
  const Vec S = ws.newton.solve(lp.A.transpose() * D.cwiseProduct(r), eps_s, nullptr).solution;
  NewtonDirection dir;
  dir.eta = eta + S;
  const Vec rr = r - lp.A * S;
  dir.dx = -D.cwiseProduct(rr);
  if (correct_residual) {
    const Vec res = lp.A.transpose() * pt.x - lp.b;
    if (res.size() && res.cwiseAbs().maxCoeff() > 0.0)
      dir.dx -= D.cwiseProduct(lp.A * ws.newton.solve(res, eps_s, nullptr).solution);
  }
  const Vec y = rr.cwiseQuotient(pt.w.cwiseProduct(B.d2.cwiseSqrt()));
  dir.before = mixed_norm_parts(y, pt.w, c_norm);
  return dir;
}

NewtonResult newton_step(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm,
                         double eps_s) {
  const NewtonDirection dir = newton_direction(ws, lp, cost, pt, c_norm, eps_s);
  NewtonResult res;
  res.x = pt.x + dir.dx;
  if (!interior(lp, res.x)) throw Error(ErrorCode::StepLeftDomain, "Newton step leaves the domain");
  res.eta = dir.eta;
  res.report.delta_before = dir.before.delta_hat;
  res.report.hypothesis_ok = dir.before.delta_hat <= 0.1;
  return res;
}

NewtonResult newton_step(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm, double eps_s) {
  Workspace ws(lp.A);
  return newton_step(ws, lp, cost, pt, c_norm, eps_s);
}

double log_potential_phi(const Vec& y, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::PreconditionFailed, "mu must be positive");
  if (y.size() == 0) return -INFINITY;
  const double M = y.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += std::exp(mu * (y[i] - M)) + std::exp(-mu * (y[i] + M));
  return mu * M + std::log(s);
}

double potential_phi(const Vec& y, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::PreconditionFailed, "mu must be positive");
  if (y.size() == 0) return 0.0;
  if (mu * y.cwiseAbs().maxCoeff() > 500.0) return std::exp(log_potential_phi(y, mu));
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += std::exp(mu * y[i]) + std::exp(-mu * y[i]);
  return s;
}

Vec potential_direction(const Vec& y, double mu) {
  Vec g(y.size());
  if (y.size() == 0) return g;
  const double M = y.cwiseAbs().maxCoeff();
  for (Index i = 0; i < y.size(); ++i) g[i] = std::exp(mu * (y[i] - M)) - std::exp(-mu * (y[i] + M));
  return g;
}

Vec project_onto_ball_box(const Vec& a, const Vec& l) {
  require_box(a, l);
  const Index m = a.size();
  Vec x = Vec::Zero(m);
  const double nrm = a.norm();
  if (nrm == 0.0) return x;
  const Vec an = a / nrm;
  const std::vector<Index> ord = projection_order(an, l);
  const Vec tail = suffix_squares(an, ord);
  double L = 0.0;
  Index i = 0;
  double lam = 0.0;
  for (; i < m; ++i) {
    if (tail[i] <= 0.0) break;
    const double lam2 = std::max(0.0, 1.0 - L) / tail[i];
    const Index j = ord[i];
    if (lam2 * an[j] * an[j] <= l[j] * l[j]) {
      lam = std::sqrt(lam2);
      break;
    }
    L += l[j] * l[j];
  }
  for (Index k = 0; k < m; ++k) {
    const Index j = ord[k];
    x[j] = k < i ? sgn(an[j]) * l[j] : lam * an[j];
  }
  return x;
}

Vec project_onto_mixed_norm_ball(const Vec& a, const Vec& l) {
  require_box(a, l);
  const Index m = a.size();
  Vec x = Vec::Zero(m);
  const double nrm = a.norm();
  if (nrm == 0.0) return x;
  const Vec an = a / nrm;
  const std::vector<Index> ord = projection_order(an, l);
  const Vec tail = suffix_squares(an, ord);
  Vec Lp = Vec::Zero(m + 1);  // sum of l^2 over the first i sorted coordinates
  Vec Pp = Vec::Zero(m + 1);  // sum of |a| l over the first i sorted coordinates
  Vec T = Vec::Zero(m);       // t at which coordinate k leaves the saturated set
  for (Index k = 0; k < m; ++k) {
    const Index j = ord[k];
    Lp[k + 1] = Lp[k] + l[j] * l[j];
    Pp[k + 1] = Pp[k] + std::abs(an[j]) * l[j];
    const double den = std::sqrt(l[j] * l[j] * tail[k] + an[j] * an[j] * Lp[k]);
    const double tau = den > 0.0 ? std::abs(an[j]) / den : 0.0;
    T[k] = tau / (1.0 + tau);
  }
  auto value = [&](Index i, double t) {
    const double q = (1.0 - t) * (1.0 - t) - t * t * Lp[i];
    return t * Pp[i] + std::sqrt(std::max(0.0, q)) * std::sqrt(tail[i]);
  };
  double best = -INFINITY;
  Index best_i = 0;
  double best_t = 0.0;
  auto consider = [&](Index i, double t) {
    const double v = value(i, t);
    if (v > best) {
      best = v;
      best_i = i;
      best_t = t;
    }
  };
  for (Index i = 0; i <= m; ++i) {
    const double lo = i < m ? T[i] : 0.0;
    const double hi = std::min(i > 0 ? T[i - 1] : 1.0, 1.0 / (1.0 + std::sqrt(Lp[i])));
    if (lo > hi) continue;
    consider(i, lo);
    consider(i, hi);
    // Stationary points of value(i, .) solve a quadratic in t.
    const double Ab = tail[i];
    const double P2 = Pp[i] * Pp[i];
    const double L = Lp[i];
    const double c2 = Ab * (L - 1.0) * (L - 1.0) - P2 * (1.0 - L);
    const double c1 = 2.0 * Ab * (L - 1.0) + 2.0 * P2;
    const double c0 = Ab - P2;
    std::vector<double> roots;
    if (std::abs(c2) < 1e-300) {
      if (c1 != 0.0) roots.push_back(-c0 / c1);
    } else {
      const double disc = c1 * c1 - 4.0 * c2 * c0;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double qq = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
        roots.push_back(qq / c2);
        if (qq != 0.0) roots.push_back(c0 / qq);
      }
    }
    for (double t : roots)
      if (t > lo && t < hi) consider(i, t);
  }
  const double q = std::max(0.0, (1.0 - best_t) * (1.0 - best_t) - best_t * best_t * Lp[best_i]);
  const double scale = tail[best_i] > 0.0 ? std::sqrt(q) / std::sqrt(tail[best_i]) : 0.0;
  for (Index k = 0; k < m; ++k) {
    const Index j = ord[k];
    x[j] = k < best_i ? sgn(an[j]) * best_t * l[j] : scale * an[j];
  }
  return x;
}

Vec chasing_zero_move(const Vec& z, const Vec& w, double C, double c_norm, double mu, double eps) {
  if (!(C > 0.0)) throw Error(ErrorCode::PreconditionFailed, "C must be positive");
  if (z.size() != w.size()) throw Error(ErrorCode::InvalidShape, "z and w differ in length");
  require_positive(w, "w");
  const Vec grad = potential_direction(z, mu);
  if (grad.cwiseAbs().maxCoeff() == 0.0) return Vec::Zero(z.size());
  const Vec l = c_norm * w.cwiseSqrt();
  const Vec y = project_onto_mixed_norm_ball(-grad.cwiseQuotient(l), l);
  return (1.0 + eps) * C * y.cwiseQuotient(l);
}

CenteringResult centering_inexact(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt,
                                  const WeightParams& p, std::uint64_t seed, const CenteringOptions& opts) {
  CenteringResult res;
  res.point = pt;
  PathPoint& cur = res.point;
  const bool paper = p.mode == Mode::Paper;
  const int steps = paper ? 1 : std::max(1, opts.max_newton);
  for (int k = 0; k < steps; ++k) {
    const NewtonDirection dir = newton_direction(ws, lp, cost, cur, p.c_norm, opts.eps_s, !paper);
    if (k == 0) res.delta_entry = dir.before.delta_hat;
    res.delta_last = dir.before.delta_hat;
    double lam = 1.0;
    Vec xn = cur.x + dir.dx;
    while (!interior(lp, xn)) {
      if (++res.halvings > opts.max_halvings)
        throw Error(ErrorCode::CenteringStalled, "Newton step left the domain after repeated halving");
      lam *= 0.5;
      xn = cur.x + lam * dir.dx;
    }
    cur.x = xn;
    cur.eta = dir.eta;
    ++res.newton_steps;
    if (dir.before.delta_hat <= opts.target) break;
  }

  if (!opts.update_weights) return res;

  // Chase log g(x) with log w.
  const Vec phi2 = eval_all(lp.barriers, cur.x).d2;
  WeightRun z;
  if (paper) {
    z = compute_weight_run(ws.weight, phi2, cur.w, p.R, p, seed);
  } else {
    const Vec& start = ws.g_hint.size() == cur.w.size() ? ws.g_hint : cur.w;
    z = compute_weight_run(ws.weight, phi2, start, p.R, p, seed, opts.z_iters);
  }
  ws.g_hint = z.w;
  const double radius = paper ? res.delta_entry : std::min(res.delta_entry, opts.radius_cap);
  const double C = (1.0 - 7.0 / (8.0 * p.c_k)) * radius;
  if (C > 0.0) {
    const Vec state = cur.w.array().log().matrix() - z.w.array().log().matrix();
    const Vec step = chasing_zero_move(state, cur.w, C, p.c_norm, p.mu, 1.0 / (2.0 * p.c_k));
    cur.w = cur.w.cwiseProduct(step.array().exp().matrix());
  }
  return res;
}

PathPoint centering_inexact(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double K, const WeightParams& p,
                            std::uint64_t seed) {
  Workspace ws(lp.A);
  return centering_inexact(ws, lp, cost, pt, with_K(p, K), seed).point;
}

}  // namespace wpath
