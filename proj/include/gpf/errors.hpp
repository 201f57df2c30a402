#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gpf {

// Base class for all library errors. Subclasses exist so callers can
// distinguish failure modes without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-convergent eigendecomposition or similar numerical breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class DegeneratePerturbationError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class UnsupportedMeanError : public Error {
 public:
  using Error::Error;
};

// Errors that mean "the data or claim failed a check" rather than "the input
// was unusable"; the CLI maps these to exit code 2.
class CheckFailure : public Error {
 public:
  using Error::Error;
};

// A covariance whose sign-conjugates disagree across positive-measure cells.
// Carries the offending pair of sign patterns.
class NotPushforwardClosedError : public CheckFailure {
 public:
  NotPushforwardClosedError(const std::string& msg, std::vector<int> lhs,
                            std::vector<int> rhs)
      : CheckFailure(msg), lhs_signs(std::move(lhs)), rhs_signs(std::move(rhs)) {}
  std::vector<int> lhs_signs;
  std::vector<int> rhs_signs;
};

class ProbeAtPoleError : public CheckFailure {
 public:
  ProbeAtPoleError(const std::string& msg, double z_value)
      : CheckFailure(msg), z(z_value) {}
  double z;
};

class TooFewPairsError : public Error {
 public:
  using Error::Error;
};

class NoIsometryError : public CheckFailure {
 public:
  NoIsometryError(const std::string& msg, int i, int j)
      : CheckFailure(msg), worst_i(i), worst_j(j) {}
  int worst_i;
  int worst_j;
};

class DegenerateConfigurationError : public CheckFailure {
 public:
  using CheckFailure::CheckFailure;
};

class InconsistentDataError : public CheckFailure {
 public:
  using CheckFailure::CheckFailure;
};

class NotInFamilyError : public CheckFailure {
 public:
  using CheckFailure::CheckFailure;
};

class EstimationFailureError : public CheckFailure {
 public:
  using CheckFailure::CheckFailure;
};

class ModelMismatchError : public CheckFailure {
 public:
  using CheckFailure::CheckFailure;
};

// JSON input that fails schema validation; `pointer` locates the bad field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& msg, std::string ptr)
      : Error(msg), pointer(std::move(ptr)) {}
  std::string pointer;
};

// Malformed CSV; `line` is 1-based.
class CsvError : public Error {
 public:
  CsvError(const std::string& msg, long line_number)
      : Error(msg), line(line_number) {}
  long line;
};

class UnknownScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpf
