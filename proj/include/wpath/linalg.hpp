#ifndef WPATH_LINALG_HPP
#define WPATH_LINALG_HPP

#include "wpath/common.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace wpath {

enum class Backend { Auto, Direct, ConjugateGradient };

// Throw: pivots below 1e-12 of the largest raise SingularSystem.
// Skip: the dense factor gets a 1e-14 diagonal shift and pivots below 1e-16
// drop their variable from the solve, which keeps late interior point
// iterations usable when D spans many decades.
enum class PivotPolicy { Throw, Skip };

const char* backend_name(Backend b);

struct SolveReceipt {
  Vec solution;
  double rel_residual = 0.0;
  int iterations = 0;
  Backend backend = Backend::Direct;
};

// Builds an m x n matrix, summing duplicate (i, j) pairs and dropping zeros.
SparseMat make_sparse(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& entries);

// Throws InvalidShape if A is rank deficient.
void require_full_column_rank(const SparseMat& A);

void require_positive(const Vec& d, const char* what);

// Factorizes A^T D A for a fixed A and a changing positive diagonal D.
//
// The sparsity pattern and the fill-reducing ordering are computed once, so a
// path-following loop only pays for numeric refactorization.
class NormalSolver {
 public:
  static constexpr Index kDirectLimit = 4096;
  // Below this size the direct backend factors a dense copy instead.
  static constexpr Index kDenseLimit = 256;

  explicit NormalSolver(const SparseMat& A, Backend backend = Backend::Auto);
  ~NormalSolver();
  NormalSolver(const NormalSolver&) = delete;
  NormalSolver& operator=(const NormalSolver&) = delete;

  // A repeated call with an identical d keeps the existing factorization.
  void factor(const Vec& d);

  void set_pivot_policy(PivotPolicy p) { policy_ = p; }
  PivotPolicy pivot_policy() const { return policy_; }
  Index skipped_pivots() const { return skipped_count_; }

  // Called with d on every numeric factorization.
  std::function<void(const Vec&)> on_factor;

  // v with ||v - N^{-1} q||_N <= eps_s ||N^{-1} q||_N, N = A^T D A.
  SolveReceipt solve(const Vec& q, double eps_s, const Vec* hint = nullptr);

  // sigma_i = d_i a_i^T N^{-1} a_i for the last factored D.
  Vec leverage_scores();

  // Johnson-Lindenstrauss estimate with ceil(24 ln m / theta^2) probes.
  Vec leverage_scores_approx(double theta, std::uint64_t seed);

  static Index sketch_size(Index m, double theta);

  // (A^T D A)^{-1} as a dense matrix.
  Mat dense_inverse();

  // x^T N x for the current D.
  double quad(const Vec& x) const;

  const SparseMat& matrix() const { return A_; }
  const Vec& weights() const { return d_; }
  Backend active_backend() const { return active_; }
  long long solve_count() const { return solves_; }
  Index rows() const { return A_.rows(); }
  Index cols() const { return A_.cols(); }

 private:
  struct Contribution {
    int row;
    int pos;
    double coef;
  };
  using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
  using Ldlt = Eigen::SimplicialLDLT<SparseMat, Eigen::Lower, Eigen::AMDOrdering<int>>;
  using Cg = Eigen::ConjugateGradient<SparseMat, Eigen::Lower, Eigen::DiagonalPreconditioner<double>>;

  Vec solve_scaled(const Vec& rhs_scaled, const Vec* guess_scaled, int* iters);
  Vec direct_solve(const Vec& rhs_scaled) const;
  Mat direct_solve(const Mat& rhs_scaled) const;
  void factor_dense();
  void factor_dense_mmatrix();
  void factor_direct();

  SparseMat A_;
  RowMat rows_;
  Backend requested_;
  Backend active_;
  SparseMat N_;       // lower triangle of A^T D A
  SparseMat Ns_;      // symmetrically equilibrated copy
  Vec scale_;         // diag(N)^{-1/2}
  Vec d_;
  std::vector<Contribution> contrib_;
  std::vector<int> diag_pos_;
  std::unique_ptr<Ldlt> ldlt_;
  Mat L_;                      // dense Cholesky factor, unit columns where skipped
  std::vector<char> skipped_;
  Index skipped_count_ = 0;
  bool dense_ = false;
  // Set when every N = A^T D A is an M-matrix with nonnegative row sums; then
  // excess_^T d gives those row sums without cancellation.
  bool mmatrix_ = false;
  SparseMat excess_;
  PivotPolicy policy_ = PivotPolicy::Throw;
  std::unique_ptr<Cg> cg_;
  bool analyzed_ = false;
  bool factored_ = false;
  long long solves_ = 0;
};

SolveReceipt solve_normal(const SparseMat& A, const Vec& d, const Vec& q, double eps_s,
                          const Vec* hint = nullptr, Backend backend = Backend::Auto);

Vec leverage_scores_exact(const SparseMat& A, const Vec& d);

Vec leverage_scores_approx(const SparseMat& A, const Vec& d, double theta, std::uint64_t seed);

// P_{x,w} v = v - W^{-1} A_x (A_x^T W^{-1} A_x)^{-1} A_x^T v with A_x = Phi''^{-1/2} A.
Vec apply_pxw(const SparseMat& A, const Vec& phi2, const Vec& w, const Vec& v, double eps_s);

}  // namespace wpath

#endif
