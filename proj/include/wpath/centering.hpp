#ifndef WPATH_CENTERING_HPP
#define WPATH_CENTERING_HPP

#include "wpath/barrier.hpp"
#include "wpath/common.hpp"
#include "wpath/linalg.hpp"
#include "wpath/lp.hpp"
#include "wpath/weights.hpp"

#include <cstdint>

namespace wpath {

struct PathPoint {
  Vec x;
  Vec w;
  double t = 1.0;
  Vec eta;
};

struct CentralityReading {
  double delta_hat = 0.0;
  double inf_part = 0.0;
  double w_part = 0.0;
};

// ||y||_inf + c_norm * sqrt(sum w_i y_i^2)
double mixed_norm(const Vec& y, const Vec& w, double c_norm);
CentralityReading mixed_norm_parts(const Vec& y, const Vec& w, double c_norm);

// Factorizations reused across the iterations of one solve.
struct Workspace {
  explicit Workspace(const SparseMat& A, Backend backend = Backend::Auto) : newton(A, backend), weight(A, backend) {
    newton.set_pivot_policy(PivotPolicy::Skip);
    weight.set_pivot_policy(PivotPolicy::Skip);
  }
  NormalSolver newton;  // A^T (W Phi'')^{-1} A
  NormalSolver weight;  // A^T W^{-alpha} Phi''^{-1} A
  Vec g_hint;           // latest estimate of g(x)
  long long solves() const { return newton.solve_count() + weight.solve_count(); }
};

// t c + w phi'(x)
Vec gradient(const Vec& cost, const PathPoint& pt, const BarrierArrays& B);

// (A^T D A)^{-1} A^T D grad with D = 1/(w phi'').
Vec eta_star(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double eps_s);
Vec eta_star(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double eps_s);

// Mixed norm of (grad - A eta)/(w sqrt(phi'')) for a given eta.
CentralityReading reading_at(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, const Vec& eta, double c_norm);

// Reading with eta replaced by eta*.
CentralityReading centrality(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm,
                             double eps_s);
CentralityReading centrality(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm, double eps_s);

struct NewtonDirection {
  Vec dx;
  Vec eta;                    // eta + S(A^T D r), i.e. eta* at the current x
  CentralityReading before;   // reading at the current x with eta*
};

// With correct_residual, dx also removes the equality residual A^T x - b.
NewtonDirection newton_direction(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt,
                                 double c_norm, double eps_s, bool correct_residual = false);

struct StepReport {
  double delta_before = 0.0;
  bool hypothesis_ok = true;  // delta_before <= 1/10
};

struct NewtonResult {
  Vec x;
  Vec eta;
  StepReport report;
};

// Full Newton step; throws StepLeftDomain if the new point is not interior.
NewtonResult newton_step(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm,
                         double eps_s);
NewtonResult newton_step(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double c_norm, double eps_s);

// sum_i e^{mu y_i} + e^{-mu y_i}
double potential_phi(const Vec& y, double mu);
double log_potential_phi(const Vec& y, double mu);

// grad Phi_mu(y) scaled by a positive constant so it never overflows.
Vec potential_direction(const Vec& y, double mu);

// argmax <a, x> over ||x||_2 <= 1, |x_i| <= l_i.
Vec project_onto_ball_box(const Vec& a, const Vec& l);

// argmax <a, x> over ||x||_2 + ||x / l||_inf <= 1.
Vec project_onto_mixed_norm_ball(const Vec& a, const Vec& l);

// (1+eps) argmin of <grad Phi_mu(z), u> over ||u||_{w+inf} <= C.
Vec chasing_zero_move(const Vec& z, const Vec& w, double C, double c_norm, double mu, double eps);

struct CenteringOptions {
  double eps_s = 1e-10;
  double target = 0.05;   // practical mode: stop Newton once delta_hat is below this
  int max_newton = 4;     // practical mode only
  int max_halvings = 30;
  int z_iters = 3;        // practical mode: warm-started weight iterations for z
  double radius_cap = 0.5;  // practical mode: cap on delta_hat when sizing the weight step
  bool update_weights = true;
};

struct CenteringResult {
  PathPoint point;
  double delta_entry = 0.0;  // delta_hat with eta* before the first Newton step
  double delta_last = 0.0;   // delta_hat before the last Newton step taken
  int newton_steps = 0;
  int halvings = 0;
};

CenteringResult centering_inexact(Workspace& ws, const BoxedLP& lp, const Vec& cost, const PathPoint& pt,
                                  const WeightParams& p, std::uint64_t seed, const CenteringOptions& opts = {});
PathPoint centering_inexact(const BoxedLP& lp, const Vec& cost, const PathPoint& pt, double K, const WeightParams& p,
                            std::uint64_t seed);

}  // namespace wpath

#endif
