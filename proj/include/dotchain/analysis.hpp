#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dotchain/fidelity.hpp"
#include "dotchain/protocols.hpp"

namespace dotchain {

/// (1/2) * integral_0^pi F(theta) sin(theta) dtheta by composite Simpson on
/// uniformly spaced samples covering [0, pi]. Needs an odd count >= 3.
double average_fidelity(std::span<const double> samples_on_0_pi);

/// Same integral for a callable, doubling the interval count from two until
/// successive Simpson estimates differ by less than `tol`.
double average_fidelity(const std::function<double(double)>& f_of_theta, double tol = 1e-6);

/// Evolution at fixed detunings for a fixed time (no control pulses).
struct FreeEvolutionConfig {
  double duration_ps = 0.0;
  DetuningVector eps = DetuningVector::Zero();
};

using ProtocolConfig = std::variant<PulseGatedConfig, AdiabaticConfig, FreeEvolutionConfig>;

/// Schedule for `config`, resolving automatic durations against `params`.
DetuningSchedule build_schedule(const DeviceParams& params, const ProtocolConfig& config);
double ramp_tolerance(const ProtocolConfig& config);

struct SweepSpec {
  int theta_points = kDefaultThetaPoints;
  double theta_min = 0.0;
  double theta_max = kPi;
  std::vector<double> phi_values{0.0};
  /// Offsets with U = 2K + delta. Empty runs the device's own U once.
  std::vector<double> delta_u_values;

  void validate() const;
};

struct SweepRecord {
  double theta = 0.0;
  double phi = 0.0;
  double delta_u = 0.0;
  double fidelity = 0.0;
  double infidelity = 0.0;
  double leakage_total = 0.0;
  double transfer_time_ns = 0.0;
  std::string error;  // non-empty marks a failed grid point

  bool ok() const { return error.empty(); }
};

struct SweepTable {
  std::vector<SweepRecord> records;  // theta outer, phi middle, delta inner
};

/// Runs every grid point. The schedule is resolved once against `params`
/// (so an automatic gate duration stays at its unperturbed value) and each
/// delta is propagated independently; failures become flagged rows.
SweepTable sweep(const SweepSpec& spec, const DeviceParams& params, const ProtocolConfig& config,
                 int workers = 1);

struct Peak {
  double time_ps = 0.0;
  double value = 0.0;
};

struct FreeEvolutionTrace {
  std::vector<double> times_ps;
  std::vector<double> average_fidelity;
  std::vector<double> min_fidelity;  // over the theta grid
  std::vector<Peak> peaks;           // sorted by time
  std::optional<double> earliest_coherent_ps;

  std::optional<Peak> highest_peak() const;
};

/// Indices strictly above the previous sample and above the sample that ends
/// a plateau; a plateau reports its first sample. Endpoints are never peaks.
std::vector<std::size_t> find_peaks(std::span<const double> values);

inline constexpr double kCoherentThreshold = 0.7;

/// Free evolution with every dot on resonance (eps = 0).
FreeEvolutionTrace free_evolution_study(const DeviceParams& params, double duration_ns,
                                        double sample_dt_ps, double threshold = kCoherentThreshold,
                                        int theta_points = kDefaultThetaPoints);

}  // namespace dotchain
