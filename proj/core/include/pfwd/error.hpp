#pragma once

#include <stdexcept>
#include <string>

namespace pfwd {

// Precondition violations: bad sizes, probabilities outside [0,1], k > n, ...
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A minimum-probability search whose target cannot be met even at p = 1.
class NoSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An analytic bound used outside the regime in which it was proved.
class InapplicableBound : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Random generator gave up (e.g. configuration model rejection cap).
class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input exceeds a brute-force size cap.
class TooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

inline void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
  }
}

}  // namespace detail
}  // namespace pfwd
