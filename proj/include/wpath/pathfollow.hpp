#ifndef WPATH_PATHFOLLOW_HPP
#define WPATH_PATHFOLLOW_HPP

#include "wpath/centering.hpp"
#include "wpath/common.hpp"
#include "wpath/lp.hpp"
#include "wpath/weights.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace wpath {

struct SolveReport {
  long long iterations = 0;
  long long solves = 0;
  double final_delta = 0.0;
  double gap_bound = 0.0;  // ||w||_1 / t
  double certificate = 0.0;
  double infeasibility = 0.0;
  Mode mode = Mode::Practical;
  double objective = 0.0;
  double t = 0.0;
  long long phase_a_iterations = 0;
  int repairs = 0;
  std::string warning;
};

// ||A^T x - b|| in the (A_x^T W^{-1} A_x)^{-1} norm.
double infeasibility(Workspace& ws, const BoxedLP& lp, const PathPoint& pt, double eps_s);
double infeasibility(const BoxedLP& lp, const PathPoint& pt, double eps_s);

// x - (W Phi'')^{-1} A S(A^T x - b). With enforce set, requires I <= 0.01/m.
PathPoint repair_feasibility(Workspace& ws, const BoxedLP& lp, const PathPoint& pt, double eps_s, bool enforce = true);
PathPoint repair_feasibility(const BoxedLP& lp, const PathPoint& pt, double eps_s);

// ||w||_1/t + 16 c_gamma c_k delta sum |c_i| / sqrt(phi''_i).
double progress_certificate(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double delta_hat,
                            const WeightParams& p);

// Per-iteration view for invariant monitors.
struct IterationEvent {
  long long iteration = 0;
  int phase = 0;  // 1 = synthetic cost, 2 = true cost
  bool final_loop = false;
  const PathPoint* before = nullptr;
  const PathPoint* after = nullptr;  // after centering, before t changes
  const CenteringResult* centering = nullptr;
  const Vec* cost = nullptr;
  double t_next = 0.0;
};

struct PathOptions {
  CenteringOptions centering;
  long long max_iters = 0;  // 0: unlimited
  double step = 0.05;       // practical mode: t multiplier 1 +- step/sqrt(rank)
  double repair_tol = INFINITY;
  int phase = 0;
  std::function<void(const IterationEvent&)> on_iteration;
  // Checked after every iteration; returning true ends the call.
  std::function<bool(const PathPoint&, const CenteringResult&)> stop;
};

struct PathStats {
  long long iterations = 0;
  int repairs = 0;
  double last_delta = 0.0;
  bool stopped = false;
};

// t-step size of the path-following loop for the given mode.
double t_step(const WeightParams& p, const PathOptions& opts);

PathPoint path_following(Workspace& ws, const BoxedLP& lp, const Vec& cost, PathPoint pt, double t_start,
                         double t_end, double eps, const WeightParams& p, std::uint64_t seed,
                         const PathOptions& opts = {}, PathStats* stats = nullptr);

struct SolveOptions {
  Backend backend = Backend::Auto;
  double eps_s = 0.0;  // 0: 1e-10 practical, 1/m^8 paper
  long long max_iters = 0;
  std::function<void(const IterationEvent&)> on_iteration;
  std::function<void(const Vec&)> on_factor;  // Newton system weights at each factorization
};

struct SolveResult {
  Vec x;
  PathPoint point;
  SolveReport report;
};

SolveResult lp_solve(const BoxedLP& lp, const Vec& x0, double eps, const WeightParams& p, std::uint64_t seed,
                     const SolveOptions& opts = {});

}  // namespace wpath

#endif
