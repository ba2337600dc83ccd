#pragma once

#include <stdexcept>
#include <string>

namespace sgsr {

/// Non-finite or structurally invalid numeric input.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scalar minimization hit a non-finite objective value.
class InvalidFunctionError : public std::runtime_error {
 public:
  InvalidFunctionError(double abscissa, const std::string& what)
      : std::runtime_error(what), abscissa_(abscissa) {}
  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

/// Random-graph generation exhausted its resampling budget.
class GraphGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Detector parameter outside its admissible range (eta vs. 2*L_kk, empty
/// search interval, and similar).
class CalibrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Threshold at or below the statistic's floor f; the decision degenerates to
/// "always flag" (p_md = 0, p_fd = 1).
class ThresholdDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mask leaves no honest nodes, or the honest block carries zero energy.
class DegeneratePartitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pencil eigenvector cannot be normalized to a finite minimizer.
class OracleDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config or table text that does not parse; carries a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Config that parses but violates a validity constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgsr
