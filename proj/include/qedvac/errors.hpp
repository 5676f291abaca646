#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qedvac {

// Coupling window of the variational theory; solvers and the config layer
// reject alpha outside [0, 4/pi) unless a caller overrides explicitly.
inline const double kMaxCoupling = 4.0 / M_PI;

struct ConstraintError : std::runtime_error {
  ConstraintError(const std::string& msg, std::vector<int> nodes)
      : std::runtime_error(msg), offending_nodes(std::move(nodes)) {}
  std::vector<int> offending_nodes;
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& msg, std::vector<double> hist)
      : std::runtime_error(msg), residual_history(std::move(hist)) {}
  std::vector<double> residual_history;
};

struct UniquenessViolationError : std::runtime_error {
  UniquenessViolationError(const std::string& msg, double dev)
      : std::runtime_error(msg), deviation(dev) {}
  double deviation;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace qedvac
