#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace robust {

/// Malformed or inconsistent input (bad measure, bad file, bad parameters).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Marginals fail the convex order. Carries a violating strike and, for
/// multi-period problems, the index of the failing step (marginal i vs i+1).
class ConvexOrderError : public ValidationError {
 public:
  ConvexOrderError(const std::string& message, std::string witness, double witness_value,
                   std::optional<std::size_t> step = std::nullopt)
      : ValidationError(message),
        witness_(std::move(witness)),
        witness_value_(witness_value),
        step_(step) {}

  const std::string& witness() const { return witness_; }
  double witness_value() const { return witness_value_; }
  std::optional<std::size_t> step() const { return step_; }

 private:
  std::string witness_;
  double witness_value_;
  std::optional<std::size_t> step_;
};

/// A property that a proved statement guarantees did not hold. Always a bug
/// somewhere (or a counterexample worth triage).
class FalsificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A self-check of solver output failed (certificate does not hedge, duality gap).
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The request is well-formed but too large for the brute-force routines.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robust
