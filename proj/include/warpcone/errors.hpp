#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace warpcone {

/// Malformed or out-of-contract input (unknown label, bad dimension, bad config value).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured enumeration or memory cap was hit before the computation finished.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t partial_count, double upper_bound = -1.0)
      : std::runtime_error(what), partial_count_(partial_count), upper_bound_(upper_bound) {}

  std::size_t partial_count() const noexcept { return partial_count_; }
  // Best value known when the cap was hit, negative when not applicable.
  double upper_bound() const noexcept { return upper_bound_; }

 private:
  std::size_t partial_count_;
  double upper_bound_;
};

/// An operation precondition that depends on computed data failed (empty region, x0 in chi, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace warpcone
