#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dotchain/hamiltonian.hpp"
#include "dotchain/units.hpp"

namespace dotchain {

using Complex = std::complex<double>;
using StateVector = Eigen::Matrix<Complex, kStateDim, 1>;

struct QubitState {
  StateVector amps = StateVector::Zero();
  double time_ps = 0.0;

  Complex& operator[](BasisIndex b) { return amps(b.full_index()); }
  Complex operator[](BasisIndex b) const { return amps(b.full_index()); }
  double population(BasisIndex b) const { return std::norm(amps(b.full_index())); }
  double norm() const { return amps.norm(); }

  auto singlet() { return amps.head<kSingletDim>(); }
  auto singlet() const { return amps.head<kSingletDim>(); }
  auto triplet() { return amps.tail<kTripletDim>(); }
  auto triplet() const { return amps.tail<kTripletDim>(); }
};

/// cos(theta) |S> + e^{i phi} sin(theta) |T0> on a chosen dot pair.
struct LogicalState {
  double theta = 0.0;
  double phi = 0.0;

  void validate() const;
  /// Encoded on dots (1,2): the transfer input.
  QubitState initial() const;
  /// Encoded on dots (2,3): the transfer target.
  QubitState target() const;
};

enum class SegmentKind { Constant, LinearRamp };

struct ScheduleSegment {
  double duration_ps = 0.0;
  DetuningVector eps_start = DetuningVector::Zero();
  DetuningVector eps_end = DetuningVector::Zero();
  SegmentKind kind = SegmentKind::Constant;

  static ScheduleSegment constant(const DetuningVector& eps, double duration_ps);
  static ScheduleSegment ramp(const DetuningVector& from, const DetuningVector& to,
                              double duration_ps);

  /// Detuning at fraction s in [0, 1] of the segment.
  DetuningVector at(double s) const;
  void validate() const;
};

class DetuningSchedule {
 public:
  DetuningSchedule() = default;
  explicit DetuningSchedule(std::vector<ScheduleSegment> segments);

  DetuningSchedule& append(const ScheduleSegment& segment);

  const std::vector<ScheduleSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  double total_duration_ps() const;
  /// Detuning at the end of the last segment; throws on an empty schedule.
  DetuningVector final_detuning() const;

 private:
  std::vector<ScheduleSegment> segments_;
};

/// Applies exp(-i H dt / hbar) blockwise. Built once per Hamiltonian, so a
/// constant segment can be applied for many durations without re-diagonalizing.
template <typename Scalar = Complex>
class BlockPropagator {
 public:
  explicit BlockPropagator(const HamiltonianBlocks<Scalar>& h);

  /// Any real duration is accepted; negative values run the dynamics backwards.
  void apply(StateVector& amps, double duration_ps) const;

  const Eigen::Matrix<double, kSingletDim, 1>& singlet_energies() const { return s_energy_; }
  const Eigen::Matrix<double, kTripletDim, 1>& triplet_energies() const { return t_energy_; }
  const Eigen::Matrix<Scalar, kSingletDim, kSingletDim>& singlet_vectors() const { return s_vec_; }
  const Eigen::Matrix<Scalar, kTripletDim, kTripletDim>& triplet_vectors() const { return t_vec_; }

 private:
  Eigen::Matrix<Scalar, kSingletDim, kSingletDim> s_vec_;
  Eigen::Matrix<Scalar, kTripletDim, kTripletDim> t_vec_;
  Eigen::Matrix<double, kSingletDim, 1> s_energy_;
  Eigen::Matrix<double, kTripletDim, 1> t_energy_;
};

extern template class BlockPropagator<Complex>;
extern template class BlockPropagator<double>;

inline constexpr double kDefaultRampTol = 1e-8;
inline constexpr std::uint64_t kMaxRampSubsteps = std::uint64_t{1} << 24;

/// exp(-i H(eps) duration / hbar) |state>, duration >= 0.
QubitState propagate_constant(const QubitState& state, const DeviceParams& params,
                              const DetuningVector& eps, double duration_ps);

/// One linear ramp with a fixed number of exponential-midpoint substeps.
QubitState propagate_ramp_fixed(const QubitState& state, const DeviceParams& params,
                                const ScheduleSegment& segment, std::uint64_t substeps);

struct RampReport {
  std::uint64_t substeps = 0;
  double last_change = 0.0;
};

/// Ramp with substep doubling until successive results differ by < tol in 2-norm.
/// Throws NonConvergence once the substep count would exceed 2^24.
QubitState propagate_ramp(const QubitState& state, const DeviceParams& params,
                          const ScheduleSegment& segment, double tol = kDefaultRampTol,
                          RampReport* report = nullptr);

/// Runs every segment in order; ramps use propagate_ramp with `tol`.
QubitState propagate_schedule(const QubitState& state, const DeviceParams& params,
                              const DetuningSchedule& schedule, double tol = kDefaultRampTol);

}  // namespace dotchain
