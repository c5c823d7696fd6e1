#pragma once

// Detuning-control recipes for moving a singlet-triplet qubit from dots (1,2)
// to dots (2,3), plus numerical calibration of their free timing parameters.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dotchain/evolution.hpp"

namespace dotchain {

struct PulseGatedConfig {
  double eps_resonant = 5.0;              // meV, regime II detuning of dots 1 and 3
  double d_p = 10.0;                      // meV, far-detuning amplitude
  std::optional<double> gate_duration_ps; // nullopt: hbar*pi/J
  std::optional<double> wait_time_ps;     // nullopt: 3*hbar/eps
  double pre_hold_ps = 0.0;               // regime I
  double post_hold_ps = 0.0;              // regime III, after the wait

  void validate() const;
};

struct AdiabaticConfig {
  double d_ad = 8.0;                   // meV
  double ramp_duration_ns = 65.8;      // R
  double eps_mid = -1.0;               // meV, fixed eps_2 and ramp endpoint
  double eps_resonant = 5.0;           // meV, sets the automatic wait 12*hbar/eps
  std::optional<double> wait_time_ps;  // nullopt: 12*hbar/eps_resonant
  double ramp_tol = kDefaultRampTol;

  void validate() const;
};

/// Regime I, II and III detunings of the pulse-gated sequence.
struct PulseGatedRegimes {
  DetuningVector loading;   // (+D_p, 0, -D_p)
  DetuningVector transfer;  // (eps, 0, eps)
  DetuningVector unloading; // (-D_p, 0, +D_p)
};
PulseGatedRegimes pulse_gated_regimes(const PulseGatedConfig& cfg);

/// hbar*pi/J with J = 2t^2/(K+eps); requires U = 2K.
double auto_gate_duration_ps(const DeviceParams& params, double eps_resonant);
double auto_pulse_wait_ps(double eps_resonant);      // 3 hbar / eps
double auto_adiabatic_wait_ps(double eps_resonant);  // 12 hbar / eps

/// Zero-length holds are omitted, so a default config yields the transfer
/// segment followed by the wait segment.
DetuningSchedule pulse_gated_schedule(const DeviceParams& params, const PulseGatedConfig& cfg);

/// The pulse-gated schedule without its wait and post-hold segments.
DetuningSchedule pulse_gated_template(const DeviceParams& params, const PulseGatedConfig& cfg);

DetuningSchedule adiabatic_schedule(const DeviceParams& params, const AdiabaticConfig& cfg);
DetuningSchedule adiabatic_template(const DeviceParams& params, const AdiabaticConfig& cfg);

/// Appends a constant hold at the schedule's final detuning (no-op for 0).
DetuningSchedule with_wait(DetuningSchedule schedule, double wait_ps);

struct LeakageEntry {
  BasisIndex state;
  double population;
};

struct TransferResult {
  QubitState final_state;
  double fidelity = 0.0;
  std::vector<LeakageEntry> leakage;  // the seven non-target basis states
  double transfer_time_ns = 0.0;
  DetuningSchedule schedule_used;

  double leakage_total() const;
};

/// Evaluates fidelity and leakage of an already propagated state.
TransferResult summarize_transfer(const LogicalState& logical, QubitState final_state,
                                  const DetuningSchedule& schedule);

TransferResult run_transfer(const LogicalState& initial, const DeviceParams& params,
                            const DetuningSchedule& schedule, double tol = kDefaultRampTol);

/// Images of |S>12 and |T0>12 under a schedule. The dynamics are linear and
/// never mix sectors, so any logical input is a superposition of these two.
struct LogicalPropagation {
  QubitState from_singlet;
  QubitState from_triplet;

  QubitState apply(const LogicalState& logical) const;
  /// Continues both images through a constant hold.
  LogicalPropagation hold(const BlockPropagator<Complex>& propagator, double duration_ps) const;
};

LogicalPropagation propagate_logical_basis(const DeviceParams& params,
                                           const DetuningSchedule& schedule,
                                           double tol = kDefaultRampTol);

/// Uniform theta grid on [0, pi] with phi = 0.
std::vector<LogicalState> theta_grid(int points, double phi = 0.0);
inline constexpr int kDefaultThetaPoints = 33;

struct SearchWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct GridSearchResult {
  double argmax = 0.0;
  double value = 0.0;
};

/// Deterministic two-stage grid search: `points` uniform candidates on the
/// window, then a tenfold finer grid spanning one coarse spacing either side
/// of the best. Ties go to the smaller argument.
GridSearchResult two_stage_grid_search(const std::function<double(double)>& objective,
                                       SearchWindow window, int points, int workers = 1);

struct WaitCalibration {
  double best_wait_ps = 0.0;
  double worst_case_fidelity = 0.0;
};

/// Maximizes the minimum fidelity over `initial_grid` of the template followed
/// by a hold at its final detuning.
WaitCalibration calibrate_wait_time(const std::vector<LogicalState>& initial_grid,
                                    const DeviceParams& params,
                                    const DetuningSchedule& schedule_template,
                                    SearchWindow window_ps, int grid_points,
                                    double tol = kDefaultRampTol, int workers = 1);

/// Same, reusing an already propagated template.
WaitCalibration calibrate_wait_time(const std::vector<LogicalState>& initial_grid,
                                    const DeviceParams& params,
                                    const LogicalPropagation& propagated_template,
                                    const DetuningVector& hold_detuning, SearchWindow window_ps,
                                    int grid_points, int workers = 1);

struct GateCalibration {
  double best_duration_ps = 0.0;
  double best_wait_ps = 0.0;
  double worst_case_fidelity = 0.0;

  double transfer_time_ps() const { return best_duration_ps + best_wait_ps; }
};

/// One full singlet-triplet relative-phase period in the unloading regime,
/// pi*hbar/J_e: the natural search window for the nested wait.
SearchWindow default_wait_window(const DeviceParams& params);

/// Grid search over the regime II duration; each candidate gets its own
/// nested wait calibration on `wait_window_ps`.
GateCalibration calibrate_gate_duration(const DeviceParams& params, const PulseGatedConfig& cfg,
                                        SearchWindow window_ps, int grid_points,
                                        SearchWindow wait_window_ps, int wait_grid_points,
                                        const std::vector<LogicalState>& initial_grid,
                                        int workers = 1);

}  // namespace dotchain
