#include "wpath/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace wpath {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Direct: return "direct";
    case Backend::ConjugateGradient: return "cg";
  }
  return "unknown";
}

SparseMat make_sparse(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& entries) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::InvalidShape, "negative dimension");
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw Error(ErrorCode::InvalidShape, "triplet index out of range");
    if (!std::isfinite(t.value())) throw Error(ErrorCode::InvalidShape, "non-finite matrix entry");
  }
  SparseMat A(rows, cols);
  A.setFromTriplets(entries.begin(), entries.end());
  A.prune([](Index, Index, double v) { return v != 0.0; });
  A.makeCompressed();
  return A;
}

void require_positive(const Vec& d, const char* what) {
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i]))
      throw Error(ErrorCode::PreconditionFailed, std::string(what) + " must be finite and positive");
  }
}

void require_full_column_rank(const SparseMat& A) {
  if (A.cols() == 0 || A.rows() < A.cols()) throw Error(ErrorCode::InvalidShape, "A must have m >= n >= 1");
  NormalSolver ns(A, Backend::Direct);
  try {
    ns.factor(Vec::Ones(A.rows()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularSystem) throw Error(ErrorCode::InvalidShape, "A is not full column rank");
    throw;
  }
}

NormalSolver::NormalSolver(const SparseMat& A, Backend backend)
    : A_(A), rows_(A), requested_(backend) {
  const Index n = A_.cols();
  if (backend == Backend::Auto) {
    active_ = n <= kDirectLimit ? Backend::Direct : Backend::ConjugateGradient;
  } else {
    active_ = backend;
  }
  std::vector<Eigen::Triplet<double>> pattern;
  for (Index j = 0; j < n; ++j) pattern.emplace_back(j, j, 1.0);
  for (Index i = 0; i < rows_.rows(); ++i) {
    for (RowMat::InnerIterator a(rows_, i); a; ++a) {
      for (RowMat::InnerIterator b(rows_, i); b; ++b) {
        if (a.col() >= b.col()) pattern.emplace_back(a.col(), b.col(), 1.0);
      }
    }
  }
  N_.resize(n, n);
  N_.setFromTriplets(pattern.begin(), pattern.end());
  N_.makeCompressed();
  auto position = [&](Index r, Index c) {
    const int* inner = N_.innerIndexPtr();
    const int* begin = inner + N_.outerIndexPtr()[c];
    const int* end = inner + N_.outerIndexPtr()[c + 1];
    return static_cast<int>(std::lower_bound(begin, end, static_cast<int>(r)) - inner);
  };
  diag_pos_.resize(n);
  for (Index j = 0; j < n; ++j) diag_pos_[j] = position(j, j);
  for (Index i = 0; i < rows_.rows(); ++i) {
    for (RowMat::InnerIterator a(rows_, i); a; ++a) {
      for (RowMat::InnerIterator b(rows_, i); b; ++b) {
        if (a.col() >= b.col())
          contrib_.push_back({static_cast<int>(i), position(a.col(), b.col()), a.value() * b.value()});
      }
    }
  }
  Ns_ = N_;
  scale_ = Vec::Ones(n);
  dense_ = n <= kDenseLimit;

  // Graph-like rows: at most one positive and one negative entry, with row sum
  // of the same sign as each entry it touches.
  mmatrix_ = dense_;
  std::vector<Eigen::Triplet<double>> ex;
  for (Index i = 0; i < rows_.rows() && mmatrix_; ++i) {
    double sum = 0.0;
    int pos = 0, neg = 0;
    for (RowMat::InnerIterator a(rows_, i); a; ++a) {
      sum += a.value();
      pos += a.value() > 0.0;
      neg += a.value() < 0.0;
    }
    if (pos > 1 || neg > 1) mmatrix_ = false;
    for (RowMat::InnerIterator a(rows_, i); a; ++a) {
      if (a.value() * sum < 0.0) mmatrix_ = false;
      if (a.value() * sum > 0.0) ex.emplace_back(i, a.col(), a.value() * sum);
    }
  }
  if (mmatrix_) {
    excess_.resize(A_.rows(), n);
    excess_.setFromTriplets(ex.begin(), ex.end());
  }
}

NormalSolver::~NormalSolver() = default;

void NormalSolver::factor(const Vec& d) {
  if (d.size() != A_.rows()) throw Error(ErrorCode::InvalidShape, "weight length differs from row count");
  require_positive(d, "normal-equation weights");
  if (factored_ && d_.size() == d.size() && d_ == d) return;
  if (on_factor) on_factor(d);
  d_ = d;
  double* v = N_.valuePtr();
  std::fill(v, v + N_.nonZeros(), 0.0);
  for (const auto& c : contrib_) v[c.pos] += d[c.row] * c.coef;
  const Index n = N_.cols();
  for (Index j = 0; j < n; ++j) {
    const double djj = v[diag_pos_[j]];
    if (!(djj > 0.0) || !std::isfinite(djj)) throw Error(ErrorCode::SingularSystem, "zero column in normal matrix");
    scale_[j] = 1.0 / std::sqrt(djj);
  }
  double* vs = Ns_.valuePtr();
  for (Index k = 0; k < n; ++k) {
    for (int p = N_.outerIndexPtr()[k]; p < N_.outerIndexPtr()[k + 1]; ++p) {
      vs[p] = v[p] * scale_[N_.innerIndexPtr()[p]] * scale_[k];
    }
  }
  factored_ = false;
  if (active_ == Backend::Direct) {
    factor_direct();
  } else {
    if (!cg_) cg_ = std::make_unique<Cg>();
    cg_->setMaxIterations(std::max<Index>(100, 10 * n));
    cg_->compute(Ns_);
  }
  factored_ = true;
}

void NormalSolver::factor_dense() {
  const Index n = Ns_.cols();
  const SparseMat full = Ns_.selfadjointView<Eigen::Lower>();
  L_ = Mat(full);
  // Refinement below runs against the unshifted matrix.
  if (policy_ == PivotPolicy::Skip) L_.diagonal().array() += 1e-14;
  skipped_.assign(n, 0);
  skipped_count_ = 0;
  const double skip_tol = 1e-16;
  for (Index j = 0; j < n; ++j) {
    const Index rest = n - j;
    if (j > 0) L_.col(j).tail(rest).noalias() -= L_.block(j, 0, rest, j) * L_.row(j).head(j).transpose();
    const double piv = L_(j, j);
    if (!std::isfinite(piv)) throw Error(ErrorCode::SingularSystem, "non-finite pivot");
    const bool tiny = policy_ == PivotPolicy::Throw ? !(piv > 1e-12) : !(piv > skip_tol);
    if (tiny) {
      if (policy_ == PivotPolicy::Throw) throw Error(ErrorCode::SingularSystem, "pivot below 1e-12 of largest pivot");
      skipped_[j] = 1;
      ++skipped_count_;
      L_.col(j).tail(rest).setZero();
      L_(j, j) = 1.0;
      continue;
    }
    const double ljj = std::sqrt(piv);
    L_(j, j) = ljj;
    L_.col(j).tail(rest - 1) /= ljj;
  }
  for (Index j = 0; j < n; ++j) L_.row(j).tail(n - j - 1).setZero();
}

// Elimination that keeps off-diagonals and row-sum excesses apart, so every
// pivot is a sum of nonnegative terms (Grassmann-Taksar-Heyman).
void NormalSolver::factor_dense_mmatrix() {
  const Index n = N_.cols();
  Mat M = Mat(SparseMat(N_.selfadjointView<Eigen::Lower>()));
  Vec e = excess_.transpose() * d_;
  L_ = Mat::Zero(n, n);
  skipped_.assign(n, 0);
  skipped_count_ = 0;
  for (Index k = 0; k < n; ++k) {
    const Index rest = n - k - 1;
    const double p = e[k] - M.col(k).tail(rest).sum();
    const double scaled = p * scale_[k] * scale_[k];
    if (!std::isfinite(p)) throw Error(ErrorCode::SingularSystem, "non-finite pivot");
    const bool tiny = policy_ == PivotPolicy::Throw ? !(scaled > 1e-12) : !(p > 0.0);
    if (tiny) {
      if (policy_ == PivotPolicy::Throw) throw Error(ErrorCode::SingularSystem, "pivot below 1e-12 of largest pivot");
      skipped_[k] = 1;
      ++skipped_count_;
      L_(k, k) = 1.0;
      continue;
    }
    const Vec c = M.col(k).tail(rest);
    M.bottomRightCorner(rest, rest).noalias() -= c * c.transpose() / p;
    e.tail(rest) -= c * (e[k] / p);
    const double r = std::sqrt(p);
    L_(k, k) = r;
    L_.col(k).tail(rest) = c / r;
  }
  // Factor of the equilibrated matrix.
  L_ = scale_.asDiagonal() * L_;
}

void NormalSolver::factor_direct() {
  if (dense_ && mmatrix_) {
    factor_dense_mmatrix();
    return;
  }
  if (dense_) {
    factor_dense();
    return;
  }
  if (!ldlt_) ldlt_ = std::make_unique<Ldlt>();
  if (!analyzed_) {
    ldlt_->analyzePattern(Ns_);
    analyzed_ = true;
  }
  ldlt_->factorize(Ns_);
  if (ldlt_->info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "LDL^T factorization failed");
  const Vec& D = ldlt_->vectorD();
  if (!D.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite pivot");
  const double dmax = D.cwiseAbs().maxCoeff();
  const double dmin = D.minCoeff();
  if (policy_ == PivotPolicy::Throw && !(dmin > 1e-12 * dmax))
    throw Error(ErrorCode::SingularSystem, "pivot below 1e-12 of largest pivot");
}

Vec NormalSolver::direct_solve(const Vec& rhs) const {
  if (!dense_) return ldlt_->solve(rhs);
  Vec y = L_.triangularView<Eigen::Lower>().solve(rhs);
  if (skipped_count_ > 0)
    for (Index j = 0; j < y.size(); ++j)
      if (skipped_[j]) y[j] = 0.0;
  L_.triangularView<Eigen::Lower>().transpose().solveInPlace(y);
  return y;
}

Mat NormalSolver::direct_solve(const Mat& rhs) const {
  if (!dense_) return ldlt_->solve(rhs);
  Mat y = L_.triangularView<Eigen::Lower>().solve(rhs);
  if (skipped_count_ > 0)
    for (Index j = 0; j < y.rows(); ++j)
      if (skipped_[j]) y.row(j).setZero();
  L_.triangularView<Eigen::Lower>().transpose().solveInPlace(y);
  return y;
}

Vec NormalSolver::solve_scaled(const Vec& rhs, const Vec* guess, int* iters) {
  if (active_ == Backend::Direct) {
    if (iters) *iters = 1;
    return direct_solve(rhs);
  }
  Vec out = guess ? Vec(cg_->solveWithGuess(rhs, *guess)) : Vec(cg_->solve(rhs));
  if (iters) *iters = static_cast<int>(cg_->iterations());
  if (cg_->info() != Eigen::Success) {
    if (requested_ == Backend::Auto) {
      active_ = Backend::Direct;
      factor_direct();
      if (iters) *iters = 1;
      return direct_solve(rhs);
    }
    throw Error(ErrorCode::NoConvergence, "conjugate gradient exceeded its iteration cap");
  }
  return out;
}

SolveReceipt NormalSolver::solve(const Vec& q, double eps_s, const Vec* hint) {
  if (!factored_) throw Error(ErrorCode::PreconditionFailed, "solve before factor");
  if (q.size() != A_.cols()) throw Error(ErrorCode::InvalidShape, "rhs length differs from column count");
  ++solves_;
  SolveReceipt rec;
  const Vec qs = scale_.cwiseProduct(q);
  const double qnorm = qs.norm();
  if (qnorm == 0.0) {
    rec.solution = Vec::Zero(q.size());
    rec.backend = active_;
    return rec;
  }
  if (active_ == Backend::ConjugateGradient) {
    cg_->setTolerance(std::max(eps_s, 1e-15));
    Vec guess;
    if (hint && hint->size() == q.size()) guess = hint->cwiseQuotient(scale_);
    int it = 0;
    Vec vs = solve_scaled(qs, guess.size() ? &guess : nullptr, &it);
    rec.iterations = it;
    if (active_ == Backend::ConjugateGradient) {
      rec.rel_residual = cg_->error();
      rec.backend = Backend::ConjugateGradient;
      rec.solution = scale_.cwiseProduct(vs);
      return rec;
    }
  }
  Vec vs = direct_solve(qs);
  double rel = 0.0;
  if (dense_ && mmatrix_) {
    // No refinement: these factors are accurate entrywise.
    const Vec rs = qs - Ns_.selfadjointView<Eigen::Lower>() * vs;
    const double den = std::abs(qs.dot(vs));
    rec.rel_residual = den > 0.0 ? std::sqrt(std::abs(rs.dot(direct_solve(rs))) / den) : 0.0;
    rec.backend = Backend::Direct;
    rec.solution = scale_.cwiseProduct(vs);
    return rec;
  }
  for (int it = 0; it < 4; ++it) {
    const Vec rs = qs - Ns_.selfadjointView<Eigen::Lower>() * vs;
    const Vec zs = direct_solve(rs);
    const double num = std::abs(rs.dot(zs));
    const double den = std::abs(qs.dot(vs));
    rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
    if (rel <= eps_s || it == 3) break;
    vs += zs;
    rec.iterations = it + 1;
  }
  if (!(rel <= eps_s) && policy_ == PivotPolicy::Throw)
    throw Error(ErrorCode::NoConvergence, "direct solve residual above tolerance after refinement");
  rec.rel_residual = rel;
  rec.backend = Backend::Direct;
  rec.solution = scale_.cwiseProduct(vs);
  return rec;
}

Mat NormalSolver::dense_inverse() {
  if (!factored_) throw Error(ErrorCode::PreconditionFailed, "inverse before factor");
  const Index n = A_.cols();
  Mat inv(n, n);
  if (active_ == Backend::Direct) {
    inv = direct_solve(Mat(Mat::Identity(n, n)));
  } else {
    for (Index j = 0; j < n; ++j) {
      Vec e = Vec::Zero(n);
      e[j] = 1.0;
      inv.col(j) = solve_scaled(e, nullptr, nullptr);
    }
  }
  return scale_.asDiagonal() * inv * scale_.asDiagonal();
}

Vec NormalSolver::leverage_scores() {
  if (!factored_) throw Error(ErrorCode::PreconditionFailed, "leverage scores before factor");
  ++solves_;
  const Index m = A_.rows();
  Vec sigma(m);
  const Mat inv = dense_inverse();
  for (Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (RowMat::InnerIterator a(rows_, i); a; ++a) {
      for (RowMat::InnerIterator b(rows_, i); b; ++b) s += a.value() * b.value() * inv(a.col(), b.col());
    }
    sigma[i] = d_[i] * s;
  }
  return sigma;
}

Index NormalSolver::sketch_size(Index m, double theta) {
  const double k = std::ceil(24.0 * std::log(static_cast<double>(std::max<Index>(m, 2))) / (theta * theta));
  const double cap = static_cast<double>(std::numeric_limits<Index>::max() / 2);
  return static_cast<Index>(std::min(k, cap));
}

Vec NormalSolver::leverage_scores_approx(double theta, std::uint64_t seed) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::PreconditionFailed, "theta must lie in (0, 1)");
  if (!factored_) throw Error(ErrorCode::PreconditionFailed, "leverage scores before factor");
  const Index m = A_.rows();
  const Index k = sketch_size(m, theta);
  const Vec sqrt_d = d_.cwiseSqrt();
  Vec est = Vec::Zero(m);
  Vec q(m);
  for (Index j = 0; j < k; ++j) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j));
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < m; ++i) q[i] = coin(rng) ? sqrt_d[i] : -sqrt_d[i];
    const Vec rhs = A_.transpose() * q;
    const Vec vs = solve_scaled(scale_.cwiseProduct(rhs), nullptr, nullptr);
    const Vec v = scale_.cwiseProduct(vs);
    const Vec Av = A_ * v;
    est += Av.cwiseAbs2();
  }
  solves_ += k;
  return d_.cwiseProduct(est) / static_cast<double>(k);
}

double NormalSolver::quad(const Vec& x) const {
  const Vec Ax = A_ * x;
  return d_.dot(Ax.cwiseAbs2());
}

SolveReceipt solve_normal(const SparseMat& A, const Vec& d, const Vec& q, double eps_s, const Vec* hint,
                          Backend backend) {
  NormalSolver ns(A, backend);
  ns.factor(d);
  return ns.solve(q, eps_s, hint);
}

Vec leverage_scores_exact(const SparseMat& A, const Vec& d) {
  NormalSolver ns(A);
  ns.factor(d);
  return ns.leverage_scores();
}

Vec leverage_scores_approx(const SparseMat& A, const Vec& d, double theta, std::uint64_t seed) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::PreconditionFailed, "theta must lie in (0, 1)");
  NormalSolver ns(A);
  ns.factor(d);
  return ns.leverage_scores_approx(theta, seed);
}

Vec apply_pxw(const SparseMat& A, const Vec& phi2, const Vec& w, const Vec& v, double eps_s) {
  require_positive(phi2, "phi''");
  require_positive(w, "w");
  const Vec sq = phi2.cwiseSqrt();
  const Vec d = (w.cwiseProduct(phi2)).cwiseInverse();
  const Vec rhs = A.transpose() * v.cwiseQuotient(sq);
  const SolveReceipt r = solve_normal(A, d, rhs, eps_s);
  const Vec back = A * r.solution;
  return v - back.cwiseQuotient(w.cwiseProduct(sq));
}

}  // namespace wpath
