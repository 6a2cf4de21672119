#ifndef WPATH_COMMON_HPP
#define WPATH_COMMON_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wpath {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Index = Eigen::Index;

enum class Mode { Paper, Practical };

enum class ErrorCode {
  DegenerateDomain,
  OutOfDomain,
  InvalidShape,
  PreconditionFailed,
  SingularSystem,
  NoConvergence,
  StepLeftDomain,
  CenteringStalled,
  InfeasibleStart,
  RepairHypothesisViolated,
  IterationLimit,
  Disconnected,
  MalformedNetwork,
  BadTarget,
  TargetInfeasible,
  RoundingFailed,
  ParseError,
  UnsupportedFeature,
  ShapeMismatch,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wpath

#endif
