#include "wpath/pathfollow.hpp"

#include <algorithm>
#include <cmath>

namespace wpath {

namespace {

Vec newton_weights(const BoxedLP& lp, const PathPoint& pt) {
  const BarrierArrays B = eval_all(lp.barriers, pt.x);
  return (pt.w.cwiseProduct(B.d2)).cwiseInverse();
}

// Phase A ends once swapping in the true cost moves the centrality by at most this much.
constexpr double kSwitchTol = 1.0;

double log400m(const WeightParams& p) { return std::log(400.0 * static_cast<double>(p.m)); }

}  // namespace

double infeasibility(Workspace& ws, const BoxedLP& lp, const PathPoint& pt, double eps_s) {
  const Vec r = lp.A.transpose() * pt.x - lp.b;
  ws.newton.factor(newton_weights(lp, pt));
  if (r.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Vec v = ws.newton.solve(r, eps_s).solution;
  return std::sqrt(std::max(0.0, r.dot(v)));
}

double infeasibility(const BoxedLP& lp, const PathPoint& pt, double eps_s) {
  Workspace ws(lp.A);
  return infeasibility(ws, lp, pt, eps_s);
}

PathPoint repair_feasibility(Workspace& ws, const BoxedLP& lp, const PathPoint& pt, double eps_s, bool enforce) {
  const Vec r = lp.A.transpose() * pt.x - lp.b;
  const Vec D = newton_weights(lp, pt);
  ws.newton.factor(D);
  if (r.cwiseAbs().maxCoeff() == 0.0) return pt;
  const Vec v = ws.newton.solve(r, eps_s).solution;
  const double I = std::sqrt(std::max(0.0, r.dot(v)));
  if (enforce && I > 0.01 / static_cast<double>(lp.m()))
    throw Error(ErrorCode::RepairHypothesisViolated, "infeasibility above 0.01/m");
  const Vec dx = -D.cwiseProduct(lp.A * v);
  PathPoint out = pt;
  double lam = 1.0;
  for (int h = 0;; ++h) {
    out.x = pt.x + lam * dx;
    if (interior(lp, out.x)) break;
    if (enforce || h >= 30) throw Error(ErrorCode::StepLeftDomain, "feasibility repair leaves the domain");
    lam *= 0.5;
  }
  return out;
}

PathPoint repair_feasibility(const BoxedLP& lp, const PathPoint& pt, double eps_s) {
  Workspace ws(lp.A);
  return repair_feasibility(ws, lp, pt, eps_s, true);
}

double progress_certificate(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double delta_hat,
                            const WeightParams& p) {
  const BarrierArrays B = eval_all(lp.barriers, pt.x);
  const double dist = cost.cwiseAbs().cwiseQuotient(B.d2.cwiseSqrt()).sum();
  return pt.w.sum() / pt.t + 16.0 * p.c_gamma * p.c_k * delta_hat * dist;
}

double t_step(const WeightParams& p, const PathOptions& opts) {
  const double sr = std::sqrt(static_cast<double>(p.rank));
  if (p.mode == Mode::Paper) return 1.0 / (1e5 * std::pow(p.c_k, 4) * log400m(p) * sr);
  return opts.step / sr;
}

PathPoint path_following(Workspace& ws, const BoxedLP& lp, const Vec& cost, PathPoint pt, double t_start,
                         double t_end, double eps, const WeightParams& p, std::uint64_t seed, const PathOptions& opts,
                         PathStats* stats) {
  if (!(t_start > 0.0) || !(t_end > 0.0)) throw Error(ErrorCode::PreconditionFailed, "t must be positive");
  if (!(eps > 0.0)) throw Error(ErrorCode::PreconditionFailed, "eps must be positive");
  PathStats local;
  PathStats& st = stats ? *stats : local;
  const bool paper = p.mode == Mode::Paper;
  const double h = t_step(p, opts);
  const double m = static_cast<double>(lp.m());
  const double repair_at = std::min(1.0 / (m * m), opts.repair_tol);
  const bool up = t_end >= t_start;
  pt.t = t_start;
  int stall = 0;
  double prev = INFINITY;

  auto iterate = [&](bool final_loop, const CenteringOptions& copts) {
    if (opts.max_iters > 0 && st.iterations >= opts.max_iters)
      throw Error(ErrorCode::IterationLimit, "path following hit the iteration cap");
    const PathPoint before = opts.on_iteration ? pt : PathPoint{};
    CenteringResult cr = centering_inexact(ws, lp, cost, pt, p, seed + static_cast<std::uint64_t>(st.iterations), copts);
    if (!paper) {
      stall = (cr.delta_last > 1.0 && cr.delta_last >= prev) ? stall + 1 : 0;
      prev = cr.delta_last;
      if (stall >= 10) throw Error(ErrorCode::CenteringStalled, "centrality failed to decrease for 10 calls");
    }
    pt = cr.point;
    ++st.iterations;
    st.last_delta = cr.delta_last;
    double t_next = pt.t;
    if (!final_loop) t_next = up ? std::min(t_end, pt.t * (1.0 + h)) : std::max(t_end, pt.t * (1.0 - h));
    if (opts.on_iteration) {
      IterationEvent ev;
      ev.iteration = st.iterations;
      ev.phase = opts.phase;
      ev.final_loop = final_loop;
      ev.before = &before;
      ev.after = &pt;
      ev.centering = &cr;
      ev.cost = &cost;
      ev.t_next = t_next;
      opts.on_iteration(ev);
    }
    pt.t = t_next;
    if (infeasibility(ws, lp, pt, copts.eps_s) > repair_at) {
      pt = repair_feasibility(ws, lp, pt, copts.eps_s, paper);
      ++st.repairs;
    }
    return cr;
  };

  while (pt.t != t_end) {
    const CenteringResult cr = iterate(false, opts.centering);
    if (opts.stop && opts.stop(pt, cr)) {
      st.stopped = true;
      return pt;
    }
  }
  CenteringOptions fin = opts.centering;
  fin.target = std::min(fin.target, eps);
  // At fixed t, plain Newton on the current weights converges quadratically.
  if (!paper) fin.update_weights = false;
  const long long count =
      std::max<long long>(1, static_cast<long long>(std::ceil(4.0 * p.c_k * std::log(1.0 / std::min(eps, 0.5)))));
  for (long long k = 0; k < count; ++k) {
    const CenteringResult cr = iterate(true, fin);
    if (opts.stop && opts.stop(pt, cr)) {
      st.stopped = true;
      return pt;
    }
    if (!paper && cr.delta_last <= eps) break;
  }
  return pt;
}

SolveResult lp_solve(const BoxedLP& lp, const Vec& x0, double eps, const WeightParams& p, std::uint64_t seed,
                     const SolveOptions& opts) {
  if (!(eps > 0.0)) throw Error(ErrorCode::PreconditionFailed, "eps must be positive");
  const Index m = lp.m();
  const Index n = lp.n();
  if (x0.size() != m) throw Error(ErrorCode::ShapeMismatch, "x0 must have one entry per row of A");
  if (!interior(lp, x0)) throw Error(ErrorCode::InfeasibleStart, "x0 is not strictly interior");
  const double bscale = std::max(1.0, lp.b.size() ? lp.b.cwiseAbs().maxCoeff() : 0.0);
  const Vec r0 = lp.A.transpose() * x0 - lp.b;
  if (r0.size() && r0.cwiseAbs().maxCoeff() > 1e-9 * bscale)
    throw Error(ErrorCode::InfeasibleStart, "A^T x0 differs from b");
  const bool paper = p.mode == Mode::Paper;
  const double md = static_cast<double>(m);
  const double eps_s = opts.eps_s > 0.0 ? opts.eps_s : (paper ? std::pow(md, -8.0) : 1e-10);

  Workspace ws(lp.A, opts.backend);
  ws.newton.on_factor = opts.on_factor;
  const BarrierArrays B0 = eval_all(lp.barriers, x0);
  const double k_init = paper ? 1.0 / (1e5 * std::pow(log400m(p), 5)) : 0.01;
  const Vec w0 = compute_initial_weight(ws.weight, B0.d2, k_init, p, seed);
  ws.g_hint = w0;
  const Vec d = -w0.cwiseProduct(B0.d1);

  PathPoint pt;
  pt.x = x0;
  pt.w = w0;
  pt.t = 1.0;
  pt.eta = Vec::Zero(n);

  const double U = width(lp, x0);
  const double t1 = 1.0 / (1e10 * U * U * md * md * md);
  const double t2 = 3.0 * md / eps;
  const double eps1 = 1.0 / (2000.0 * p.c_k * p.c_k * log400m(p));
  const double eps2 = eps / (1e6 * md * md * md * U * U);

  PathOptions po;
  po.centering.eps_s = eps_s;
  po.max_iters = opts.max_iters;
  po.on_iteration = opts.on_iteration;
  po.repair_tol = eps / 10.0;

  // Phase A: follow the path of the synthetic cost d towards small t.
  PathStats sa;
  po.phase = 1;
  if (!paper) {
    po.stop = [&](const PathPoint& q, const CenteringResult&) {
      const Vec phi2 = eval_all(lp.barriers, q.x).d2;
      const Vec y = (lp.c - d).cwiseQuotient(q.w.cwiseProduct(phi2.cwiseSqrt()));
      return q.t * mixed_norm(y, q.w, p.c_norm) <= kSwitchTol;
    };
  }
  pt = path_following(ws, lp, d, pt, 1.0, t1, eps1, p, seed, po, &sa);

  // Phase B: true cost towards large t.
  PathStats sb;
  po.phase = 2;
  if (opts.max_iters > 0) {
    po.max_iters = opts.max_iters - sa.iterations;
    if (po.max_iters <= 0) throw Error(ErrorCode::IterationLimit, "path following hit the iteration cap");
  }
  if (!paper) {
    po.stop = [&](const PathPoint& q, const CenteringResult&) { return q.w.sum() / q.t <= eps / 2.0; };
  } else {
    po.stop = nullptr;
  }
  const double t_b = paper ? t1 : pt.t;
  pt = path_following(ws, lp, lp.c, pt, t_b, t2, paper ? eps2 : 1e-9, p, seed + 1000003ULL, po, &sb);
  if (!paper) {
    // Newton polish at the final t until the certificate reaches eps.
    for (int k = 0; k < 60; ++k) {
      const NewtonDirection dir = newton_direction(ws, lp, lp.c, pt, p.c_norm, eps_s, true);
      if (progress_certificate(lp, lp.c, pt, dir.before.delta_hat, p) <= eps) break;
      double lam = 1.0;
      Vec xn = pt.x + dir.dx;
      for (int h = 0; !interior(lp, xn); ++h) {
        if (h >= 30) throw Error(ErrorCode::CenteringStalled, "Newton step left the domain after repeated halving");
        lam *= 0.5;
        xn = pt.x + lam * dir.dx;
      }
      pt.x = xn;
      pt.eta = dir.eta;
      ++sb.iterations;
    }
  }

  SolveResult res;
  res.x = pt.x;
  SolveReport& rep = res.report;
  rep.mode = p.mode;
  rep.iterations = sa.iterations + sb.iterations;
  rep.phase_a_iterations = sa.iterations;
  rep.repairs = sa.repairs + sb.repairs;
  rep.final_delta = centrality(ws, lp, lp.c, pt, p.c_norm, eps_s).delta_hat;
  rep.gap_bound = pt.w.sum() / pt.t;
  rep.certificate = progress_certificate(lp, lp.c, pt, rep.final_delta, p);
  rep.infeasibility = infeasibility(ws, lp, pt, eps_s);
  rep.objective = lp.c.dot(pt.x);
  rep.t = pt.t;
  rep.solves = ws.solves();
  rep.warning = p.warning;
  res.point = std::move(pt);
  return res;
}

}  // namespace wpath
