#ifndef SOL1D_ERRORS_HPP
#define SOL1D_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace sol1d {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid inputs: bad device definitions, bad axis specs, bad flags.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Malformed input files (device JSON, spectrum tables).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Solver failed to converge. Carries the residual trace and the bias
/// point that failed so sweeps can report it.
class SolverError : public Error {
 public:
  SolverError(const std::string& msg, double bias_V, std::vector<double> residual_history)
      : Error(msg), bias_V(bias_V), residual_history(std::move(residual_history)) {}

  double bias_V = 0.0;
  std::vector<double> residual_history;
};

}  // namespace sol1d

#endif
