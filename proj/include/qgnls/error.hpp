#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qgnls {

enum class ErrorCode {
  // graph_core
  EmptyGraph,
  DuplicateId,
  NonPositiveLength,
  Disconnected,
  DanglingEndpoint,
  // discretization
  HTooLarge,
  OutOfRange,
  // functionals
  NoPositivePart,
  NotOnNehari,
  // profiles
  PeakOnNonTerminalVertex,
  SupportTooLong,
  InvalidPeakSpec,
  // solvers
  SingularSystem,
  NoConvergence,
  SingularHessian,
  OnlyConstantBranchFound,
  PeakSetMismatch,
  // spectral
  EigenNoConvergence,
  // analysis
  EdgeNotTerminal,
  NonPositiveSamples,
  InsufficientData,
  // shared
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Iterative solver failure; keeps the iteration count and the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(ErrorCode code, const std::string& what, int iterations, double last_residual)
      : Error(code, what), iterations_(iterations), last_residual_(last_residual) {}

  int iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  int iterations_ = -1;
  double last_residual_ = std::numeric_limits<double>::quiet_NaN();
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace qgnls
