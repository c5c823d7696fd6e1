#pragma once

#include <stdexcept>
#include <string>

namespace dotchain {

/// Invalid physical parameters, schedules or configuration values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A perturbative formula was evaluated too close to one of its poles.
class SingularDenominator : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Eigendecomposition or substep refinement failed to converge.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A chain step kept less than half of its weight in the logical subspace.
class TransferFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dotchain
