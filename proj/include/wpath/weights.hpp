#ifndef WPATH_WEIGHTS_HPP
#define WPATH_WEIGHTS_HPP

#include "wpath/common.hpp"
#include "wpath/linalg.hpp"

#include <cstdint>
#include <string>

namespace wpath {

struct WeightParams {
  Mode mode = Mode::Practical;
  Index m = 0;
  Index rank = 0;
  double alpha = 1.5;
  double beta = 0.25;
  double c_norm = 36.0;
  double c_k = 18.0;
  double c_gamma = 1.0;
  double c_delta = 1.0;
  double K = 0.05;
  double mu = 0.0;
  double R = 0.0;
  bool alpha_clamped = false;
  std::string warning;
};

WeightParams weight_params(Index m, Index rank, Mode mode);

// Returns p with K replaced and mu, R recomputed from it.
WeightParams with_K(WeightParams p, double K);

// Gradient of fhat in w: 1 - sigma(w^{-alpha})/w - beta/w.
Vec fhat_grad(const SparseMat& A, const Vec& phi2, const Vec& w, const WeightParams& p);

// Leverage scores of Phi''^{-1/2} A under row weights w^{-alpha}.
Vec weighted_leverage(NormalSolver& ns, const Vec& phi2, const Vec& w, double alpha);

struct WeightRun {
  Vec w;
  int iterations = 0;
  bool clamped = false;  // some coordinate ended on the 1/48 box around w0
};

// One call of the projected gradient iteration; leverage scores are sketched
// with theta = K/8 when that is cheaper than computing them exactly.
WeightRun compute_weight_run(NormalSolver& ns, const Vec& phi2, const Vec& w0, double K, const WeightParams& p,
                             std::uint64_t seed, int max_iters = -1);

Vec compute_weight(const SparseMat& A, const Vec& phi2, const Vec& w0, double K, const WeightParams& p,
                   std::uint64_t seed);

Vec compute_initial_weight(NormalSolver& ns, const Vec& phi2, double K, const WeightParams& p, std::uint64_t seed);

Vec compute_initial_weight(const SparseMat& A, const Vec& phi2, double K, const WeightParams& p, std::uint64_t seed);

// Fixed point w = sigma(w^{-alpha}) + beta with exact scores; small instances only.
Vec weight_function_oracle(const SparseMat& A, const Vec& phi2, const WeightParams& p, double tol);

}  // namespace wpath

#endif
