#pragma once

// N-dot transfer as a sequence of isolated triple-dot steps. Step k moves the
// qubit from dots (k, k+1) to (k+1, k+2); the remaining dots are assumed to be
// detuned far enough to be exactly decoupled.

#include <variant>
#include <vector>

#include "dotchain/protocols.hpp"

namespace dotchain {

struct ChainSpec {
  int n_dots = 3;
  std::variant<PulseGatedConfig, AdiabaticConfig> scheme = PulseGatedConfig{};

  void validate() const;
};

struct ChainResult {
  std::vector<TransferResult> per_step;
  std::vector<double> retained_weight;  // logical-subspace population kept at each hand-off
  /// Fidelity of the final (unrenormalized) chain state against the target.
  double composed_fidelity = 0.0;
  /// Product of the per-step fidelities.
  double product_fidelity = 0.0;
  double total_time_ns = 0.0;
};

/// Runs n_dots - 2 steps. Each step's output is projected onto
/// {|S>23, |T0>23}, relabelled as the next step's (1,2) input, renormalized
/// for that step's own fidelity, and its discarded weight carried into the
/// composed fidelity. Throws TransferFailed if a step keeps less than half of
/// its weight.
ChainResult n_dot_transfer(const ChainSpec& spec, const LogicalState& initial,
                           const DeviceParams& params);

}  // namespace dotchain
