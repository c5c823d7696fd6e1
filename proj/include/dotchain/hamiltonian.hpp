#pragma once

// Three-dot Hubbard model restricted to two electrons in the S_z = 0 sector.
//
// The Hamiltonian is block diagonal in spin: a 6x6 singlet block and a 3x3
// unpolarized-triplet block. Energies are in meV throughout.

#include <array>
#include <cmath>
#include <complex>
#include <string_view>
#include <type_traits>

#include <Eigen/Dense>

#include "dotchain/error.hpp"

namespace dotchain {

struct DeviceParams {
  double t = 0.12;     // tunnel coupling
  double j_e = 0.1;    // exchange energy
  double u = 6.1;      // intradot Coulomb energy
  double k = 3.05;     // nearest-neighbour interdot Coulomb energy
  double mu = 0.0;     // electrochemical potential

  /// Throws InvalidArgument unless t > 0, j_e >= 0, u > k > 0 and all finite.
  /// `allow_zero_tunneling` admits t = 0 for decoupled-limit studies.
  void validate(bool allow_zero_tunneling = false) const;

  /// True when u == 2k up to a relative 1e-12, the equal-coupling condition.
  bool coulomb_ratio_is_two() const;

  DeviceParams with_u(double new_u) const {
    DeviceParams p = *this;
    p.u = new_u;
    return p;
  }
};

/// Pulse-gated parameter set (U = 2K).
inline DeviceParams pulse_gated_device() { return {0.12, 0.1, 6.1, 3.05, 0.0}; }
/// Adiabatic parameter set (K = 2.3 meV, U unchanged).
inline DeviceParams adiabatic_device() { return {0.12, 0.1, 6.1, 2.3, 0.0}; }

/// Detunings (eps_1, eps_2, eps_3) of the three dots, meV.
using DetuningVector = Eigen::Vector3d;

enum class Sector { Singlet, Triplet };

inline constexpr int kSingletDim = 6;
inline constexpr int kTripletDim = 3;
inline constexpr int kStateDim = kSingletDim + kTripletDim;

/// Position of a charge/spin configuration in the fixed 9-state basis.
///
/// Singlets: |S>33 |S>23 |S>13 |S>22 |S>12 |S>11, then triplets
/// |T0>12 |T0>13 |T0>23. The singlet block occupies full indices 0-5.
struct BasisIndex {
  Sector sector;
  int ordinal;

  constexpr int full_index() const {
    return sector == Sector::Singlet ? ordinal : kSingletDim + ordinal;
  }
  static constexpr BasisIndex from_full(int i) {
    return i < kSingletDim ? BasisIndex{Sector::Singlet, i}
                           : BasisIndex{Sector::Triplet, i - kSingletDim};
  }
  std::string_view label() const;
};

namespace basis {
inline constexpr BasisIndex S33{Sector::Singlet, 0};
inline constexpr BasisIndex S23{Sector::Singlet, 1};
inline constexpr BasisIndex S13{Sector::Singlet, 2};
inline constexpr BasisIndex S22{Sector::Singlet, 3};
inline constexpr BasisIndex S12{Sector::Singlet, 4};
inline constexpr BasisIndex S11{Sector::Singlet, 5};
inline constexpr BasisIndex T12{Sector::Triplet, 0};
inline constexpr BasisIndex T13{Sector::Triplet, 1};
inline constexpr BasisIndex T23{Sector::Triplet, 2};
}  // namespace basis

template <typename Scalar = std::complex<double>>
struct HamiltonianBlocks {
  using SingletMatrix = Eigen::Matrix<Scalar, kSingletDim, kSingletDim>;
  using TripletMatrix = Eigen::Matrix<Scalar, kTripletDim, kTripletDim>;
  using FullMatrix = Eigen::Matrix<Scalar, kStateDim, kStateDim>;

  SingletMatrix singlet;
  TripletMatrix triplet;

  /// 9x9 matrix with exact zeros between the sectors.
  FullMatrix assemble() const {
    FullMatrix h = FullMatrix::Zero();
    h.template topLeftCorner<kSingletDim, kSingletDim>() = singlet;
    h.template bottomRightCorner<kTripletDim, kTripletDim>() = triplet;
    return h;
  }

  HamiltonianBlocks operator-() const { return {-singlet, -triplet}; }
};

namespace detail {
void check_finite_inputs(const DeviceParams& params, const DetuningVector& eps);
}

/// Exact block Hamiltonian at detunings `eps`. The nearest-neighbour Coulomb
/// energy U_12 is identified with `params.k`.
template <typename Scalar = std::complex<double>>
HamiltonianBlocks<Scalar> build_hamiltonian(const DeviceParams& params,
                                            const DetuningVector& eps) {
  detail::check_finite_inputs(params, eps);

  const double t = params.t;
  const double st = std::sqrt(2.0) * t;
  const double mu2 = 2.0 * params.mu;
  const double e1 = eps(0), e2 = eps(1), e3 = eps(2);

  HamiltonianBlocks<Scalar> h;
  auto& s = h.singlet;
  s.setZero();
  s(0, 0) = params.u - 2.0 * (e3 + params.mu);
  s(1, 1) = params.j_e + params.k - e2 - e3 - mu2;
  s(2, 2) = -(e1 + e3 + mu2);
  s(3, 3) = params.u - 2.0 * (e2 + params.mu);
  s(4, 4) = params.j_e + params.k - e1 - e2 - mu2;
  s(5, 5) = params.u - 2.0 * (e1 + params.mu);
  s(0, 1) = s(1, 0) = -st;
  s(1, 2) = s(2, 1) = -t;
  s(1, 3) = s(3, 1) = -st;
  s(2, 4) = s(4, 2) = -t;
  s(3, 4) = s(4, 3) = -st;
  s(4, 5) = s(5, 4) = -st;

  auto& tr = h.triplet;
  tr.setZero();
  tr(0, 0) = -params.j_e + params.k - e1 - e2 - mu2;
  tr(1, 1) = -(e1 + e3 + mu2);
  tr(2, 2) = -params.j_e + params.k - e2 - e3 - mu2;
  tr(0, 1) = tr(1, 0) = -t;
  tr(1, 2) = tr(2, 1) = -t;
  return h;
}

inline constexpr double kDefaultDenominatorFloor = 1e-9;

struct EffectiveCouplings {
  double j_s;  // |S>12 <-> |S>23
  double j_t;  // |T0>12 <-> |T0>23
};

/// Second-order Schrieffer-Wolff couplings at the resonance eps_1 = eps_3 = eps:
///   j_s = -t^2 (-4/(U-K+eps) + 2/(K+eps)),   j_t = -t^2 * 2/(K+eps).
/// Throws SingularDenominator if |U-K+eps| or |K+eps| is below `floor`.
EffectiveCouplings sw_effective_couplings(const DeviceParams& params, double eps_resonant,
                                          double floor = kDefaultDenominatorFloor);

struct CouplingError {
  double approx;  // -4 t^2 dU / (K+eps)^2
  double exact;   // j_s(U = 2K + dU) + j_t
};

/// Deviation of j_s from -j_t when U = 2K + delta_u. `params.u` is ignored.
CouplingError leading_order_coupling_error(const DeviceParams& params, double eps_resonant,
                                           double delta_u,
                                           double floor = kDefaultDenominatorFloor);

}  // namespace dotchain
