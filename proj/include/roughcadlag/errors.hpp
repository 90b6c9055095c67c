#pragma once

#include <stdexcept>
#include <string>

namespace roughcadlag {

/// Precondition violated by an argument (bad time, exponent, dimension...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input too large for an exact (exponential or dense) algorithm.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Level sequence did not stabilize within the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// Fewer than two usable levels for a log-rate fit.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal identity that must hold by construction was violated.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed CSV / JSON input. `field()` names the offending entry.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace roughcadlag
