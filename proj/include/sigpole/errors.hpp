#pragma once

#include <stdexcept>
#include <string>

namespace sigpole {

/// Malformed text input (words, partitions, position sets, rationals).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pair with equal or out-of-range positions, or a set of pairs that is
/// not a perfect matching.
class InvalidPairError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lengths or dimensions that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of the operation (e.g. H <= 1/2 for a
/// numeric evaluator, a non-monotone list, a pole of Gamma).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Problem size beyond what an exact path supports.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Identity that must hold by construction was violated.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical procedure did not reach its target. Carries the best estimate
/// available when it gave up.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double best_estimate, double achieved)
      : std::runtime_error(what), best_estimate_(best_estimate), achieved_(achieved) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double achieved() const noexcept { return achieved_; }

 private:
  double best_estimate_;
  double achieved_;
};

}  // namespace sigpole
