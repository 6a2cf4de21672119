#include "wpath/weights.hpp"

#include <algorithm>
#include <cmath>

namespace wpath {

WeightParams weight_params(Index m, Index rank, Mode mode) {
  if (rank <= 0 || rank > m) throw Error(ErrorCode::InvalidShape, "need 1 <= rank <= m");
  WeightParams p;
  p.mode = mode;
  p.m = m;
  p.rank = rank;
  const double L = std::log2(2.0 * static_cast<double>(m) / static_cast<double>(rank));
  p.alpha = 1.0 + 1.0 / L;
  if (p.alpha >= 2.0) {
    p.alpha = 2.0 - 1e-9;
    p.alpha_clamped = true;
    p.warning = "alpha clamped to 2-1e-9 because m == rank";
  }
  p.beta = static_cast<double>(rank) / (2.0 * static_cast<double>(m));
  p.c_norm = 18.0 * L;
  p.c_k = 9.0 * L;
  p.c_gamma = 1.0 + 1.0 / (9.0 * L);
  p.c_delta = 1.0 - 2.0 / (9.0 * L);
  if (mode == Mode::Practical) {
    p.c_norm = std::min(p.c_norm, 64.0);
    return with_K(p, 0.05);
  }
  return with_K(p, 1.0 / (20.0 * p.c_k));
}

WeightParams with_K(WeightParams p, double K) {
  const double lg = std::log(400.0 * static_cast<double>(p.m));
  p.K = K;
  p.mu = 2.0 * lg / K;
  p.R = K / (48.0 * p.c_k * lg);
  return p;
}

Vec weighted_leverage(NormalSolver& ns, const Vec& phi2, const Vec& w, double alpha) {
  const Vec d = w.array().pow(-alpha).matrix().cwiseQuotient(phi2);
  ns.factor(d);
  return ns.leverage_scores();
}

Vec fhat_grad(const SparseMat& A, const Vec& phi2, const Vec& w, const WeightParams& p) {
  require_positive(w, "w");
  require_positive(phi2, "phi''");
  NormalSolver ns(A);
  const Vec sigma = weighted_leverage(ns, phi2, w, p.alpha);
  return Vec::Ones(w.size()) - sigma.cwiseQuotient(w) - Vec::Constant(w.size(), p.beta).cwiseQuotient(w);
}

WeightRun compute_weight_run(NormalSolver& ns, const Vec& phi2, const Vec& w0, double K, const WeightParams& p,
                             std::uint64_t seed, int max_iters) {
  if (!(K > 0.0 && K < 1.0)) throw Error(ErrorCode::PreconditionFailed, "K must lie in (0, 1)");
  require_positive(w0, "w0");
  const Index m = w0.size();
  const double theta = K / 8.0;
  const bool sketch = NormalSolver::sketch_size(m, theta) < ns.cols();
  const bool strict = max_iters < 0;
  const int cap = strict ? static_cast<int>(std::ceil(200.0 * std::log(1.0 / K))) + 1 : max_iters;
  const Vec lo = (1.0 - 1.0 / 48.0) * w0;
  const Vec hi = (1.0 + 1.0 / 48.0) * w0;
  WeightRun run;
  run.w = w0;
  for (int j = 1; j <= cap; ++j) {
    const Vec d = run.w.array().pow(-p.alpha).matrix().cwiseQuotient(phi2);
    ns.factor(d);
    const Vec sigma = sketch ? ns.leverage_scores_approx(theta, seed + 7919ULL * j) : ns.leverage_scores();
    Vec next = 0.75 * run.w + 0.25 * sigma + Vec::Constant(m, p.beta / 4.0);
    run.clamped = false;
    for (Index i = 0; i < m; ++i) {
      if (next[i] <= lo[i]) {
        next[i] = lo[i];
        run.clamped = true;
      } else if (next[i] >= hi[i]) {
        next[i] = hi[i];
        run.clamped = true;
      }
    }
    const double change = ((next - run.w).cwiseQuotient(next)).cwiseAbs().maxCoeff();
    run.w = next;
    run.iterations = j;
    if (change <= K / 8.0) return run;
  }
  if (strict) throw Error(ErrorCode::NoConvergence, "compute_weight hit its iteration cap");
  return run;
}

Vec compute_weight(const SparseMat& A, const Vec& phi2, const Vec& w0, double K, const WeightParams& p,
                   std::uint64_t seed) {
  NormalSolver ns(A);
  return compute_weight_run(ns, phi2, w0, K, p, seed).w;
}

Vec compute_initial_weight(NormalSolver& ns, const Vec& phi2, double K, const WeightParams& p, std::uint64_t seed) {
  if (!(K > 0.0 && K < 1.0)) throw Error(ErrorCode::PreconditionFailed, "K must lie in (0, 1)");
  const Index m = ns.rows();
  const double shrink = 1.0 - 1.0 / (2.0 * std::sqrt(static_cast<double>(p.rank)));
  WeightParams stage = p;
  stage.beta = 100.0;
  Vec w = Vec::Constant(m, 100.0);
  std::uint64_t s = seed;
  for (;;) {
    const bool last = stage.beta <= p.beta;
    const double k_stage = last ? K : std::max(K, 1e-2);
    // Each call may move w by at most 1/48; repeat until the box is no longer binding.
    for (int call = 0;; ++call) {
      const WeightRun run = compute_weight_run(ns, phi2, w, k_stage, stage, s++);
      w = run.w;
      if (!run.clamped) break;
      if (call > 10000) throw Error(ErrorCode::NoConvergence, "initial weight homotopy stalled");
    }
    if (last) return w;
    stage.beta = std::max(p.beta, stage.beta * shrink);
  }
}

Vec compute_initial_weight(const SparseMat& A, const Vec& phi2, double K, const WeightParams& p, std::uint64_t seed) {
  NormalSolver ns(A);
  return compute_initial_weight(ns, phi2, K, p, seed);
}

Vec weight_function_oracle(const SparseMat& A, const Vec& phi2, const WeightParams& p, double tol) {
  if (A.rows() > 200) throw Error(ErrorCode::PreconditionFailed, "oracle limited to m <= 200");
  NormalSolver ns(A);
  const Index m = A.rows();
  Vec w = Vec::Constant(m, 1.0 + p.beta);
  // Damped step; contracts by alpha/(2 + alpha) since Lambda W^{-1} has spectrum in [0, 1).
  const double theta = 2.0 / (2.0 + p.alpha);
  for (int it = 0; it < 10000; ++it) {
    const Vec target = weighted_leverage(ns, phi2, w, p.alpha) + Vec::Constant(m, p.beta);
    const Vec next = w + theta * (target - w);
    const double change = (next - w).cwiseAbs().maxCoeff();
    w = next;
    if (change <= tol) return w;
  }
  throw Error(ErrorCode::NoConvergence, "weight oracle did not converge");
}

}  // namespace wpath
