#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scalemix {

// Parameter combination violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Power-law density does not integrate (tail exponent too shallow).
class NonIntegrable : public std::domain_error {
 public:
  explicit NonIntegrable(const std::string& what) : std::domain_error(what) {}
};

// Requested moment order is at or beyond the finiteness bound.
class DivergentMoment : public std::domain_error {
 public:
  explicit DivergentMoment(const std::string& what) : std::domain_error(what) {}
};

// Pointwise density of a point mass was requested.
class DegenerateDensity : public std::logic_error {
 public:
  explicit DegenerateDensity(const std::string& what) : std::logic_error(what) {}
};

class IndexOutOfRange : public std::out_of_range {
 public:
  explicit IndexOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

// A correlation denominator has zero variance.
class DegenerateVariance : public std::runtime_error {
 public:
  explicit DegenerateVariance(const std::string& what) : std::runtime_error(what) {}
};

class ZeroDenominator : public std::runtime_error {
 public:
  explicit ZeroDenominator(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

class CalibrationFailed : public std::runtime_error {
 public:
  explicit CalibrationFailed(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NonPositivePrice : public std::runtime_error {
 public:
  NonPositivePrice(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NoCompleteSessions : public std::runtime_error {
 public:
  explicit NoCompleteSessions(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scalemix
