#include "dotchain/hamiltonian.hpp"

#include <sstream>

namespace dotchain {

namespace {

constexpr std::array<std::string_view, kStateDim> kLabels = {
    "S33", "S23", "S13", "S22", "S12", "S11", "T0_12", "T0_13", "T0_23"};

double guarded(double denominator, double floor, const char* what) {
  if (!std::isfinite(denominator) || std::abs(denominator) < floor) {
    std::ostringstream msg;
    msg << "singular denominator " << what << " = " << denominator;
    throw SingularDenominator(msg.str());
  }
  return denominator;
}

}  // namespace

std::string_view BasisIndex::label() const { return kLabels.at(full_index()); }

void DeviceParams::validate(bool allow_zero_tunneling) const {
  for (double v : {t, j_e, u, k, mu}) {
    if (!std::isfinite(v)) throw InvalidArgument("device parameters must be finite");
  }
  if (allow_zero_tunneling ? t < 0.0 : t <= 0.0) {
    throw InvalidArgument("tunnel coupling t must be positive");
  }
  if (j_e < 0.0) throw InvalidArgument("exchange energy j_e must be non-negative");
  if (k <= 0.0) throw InvalidArgument("interdot Coulomb energy k must be positive");
  if (u <= k) throw InvalidArgument("intradot Coulomb energy u must exceed k");
}

bool DeviceParams::coulomb_ratio_is_two() const {
  return std::abs(u - 2.0 * k) <= 1e-12 * std::abs(u);
}

namespace detail {

void check_finite_inputs(const DeviceParams& params, const DetuningVector& eps) {
  for (double v : {params.t, params.j_e, params.u, params.k, params.mu}) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite device parameter");
  }
  if (!eps.allFinite()) throw InvalidArgument("non-finite detuning");
}

}  // namespace detail

EffectiveCouplings sw_effective_couplings(const DeviceParams& params, double eps_resonant,
                                          double floor) {
  const double t2 = params.t * params.t;
  const double d_s = guarded(params.u - params.k + eps_resonant, floor, "U-K+eps");
  const double d_t = guarded(params.k + eps_resonant, floor, "K+eps");
  return {-t2 * (-4.0 / d_s + 2.0 / d_t), -t2 * (2.0 / d_t)};
}

CouplingError leading_order_coupling_error(const DeviceParams& params, double eps_resonant,
                                           double delta_u, double floor) {
  const double d = guarded(params.k + eps_resonant, floor, "K+eps");
  const auto c = sw_effective_couplings(params.with_u(2.0 * params.k + delta_u), eps_resonant,
                                        floor);
  const double t2 = params.t * params.t;
  return {-4.0 * t2 * delta_u / (d * d), c.j_s + c.j_t};
}

}  // namespace dotchain
