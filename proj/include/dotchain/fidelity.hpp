#pragma once

#include "dotchain/evolution.hpp"

namespace dotchain {

/// |<target|final>|^2 for normalized states.
inline double fidelity(const QubitState& final_state, const QubitState& target) {
  return std::norm(target.amps.dot(final_state.amps));
}

}  // namespace dotchain
