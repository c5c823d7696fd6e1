#include "dotchain/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <string>

#include "dotchain/fidelity.hpp"
#include "dotchain/parallel.hpp"

namespace dotchain {

int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("DOTCHAIN_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void require_duration(const std::optional<double>& d, const char* what) {
  if (d && (!std::isfinite(*d) || *d < 0.0)) {
    throw InvalidArgument(std::string(what) + " must be non-negative");
  }
}

}  // namespace

void PulseGatedConfig::validate() const {
  if (!std::isfinite(eps_resonant) || !std::isfinite(d_p) || !(d_p > eps_resonant) ||
      !(eps_resonant > 0.0)) {
    throw InvalidArgument("pulse-gated config requires d_p > eps_resonant > 0");
  }
  require_duration(gate_duration_ps, "gate duration");
  require_duration(wait_time_ps, "wait time");
  require_duration(pre_hold_ps, "pre hold");
  require_duration(post_hold_ps, "post hold");
}

void AdiabaticConfig::validate() const {
  if (!std::isfinite(d_ad) || !std::isfinite(eps_mid) || !(d_ad > std::abs(eps_mid))) {
    throw InvalidArgument("adiabatic config requires d_ad > |eps_mid|");
  }
  if (!std::isfinite(ramp_duration_ns) || !(ramp_duration_ns > 0.0)) {
    throw InvalidArgument("ramp duration must be positive");
  }
  if (!std::isfinite(eps_resonant) || !(eps_resonant > 0.0)) {
    throw InvalidArgument("eps_resonant must be positive");
  }
  require_duration(wait_time_ps, "wait time");
  if (!(ramp_tol > 0.0)) throw InvalidArgument("ramp tolerance must be positive");
}

PulseGatedRegimes pulse_gated_regimes(const PulseGatedConfig& cfg) {
  return {DetuningVector(cfg.d_p, 0.0, -cfg.d_p),
          DetuningVector(cfg.eps_resonant, 0.0, cfg.eps_resonant),
          DetuningVector(-cfg.d_p, 0.0, cfg.d_p)};
}

double auto_gate_duration_ps(const DeviceParams& params, double eps_resonant) {
  if (!params.coulomb_ratio_is_two()) {
    throw InvalidArgument(
        "automatic gate duration needs U = 2K; supply an explicit or calibrated duration");
  }
  const double j = -sw_effective_couplings(params, eps_resonant).j_t;
  if (!(j > 0.0)) throw InvalidArgument("automatic gate duration needs a nonzero coupling");
  return kPi * kHbar / j;
}

double auto_pulse_wait_ps(double eps_resonant) { return 3.0 * kHbar / eps_resonant; }
double auto_adiabatic_wait_ps(double eps_resonant) { return 12.0 * kHbar / eps_resonant; }

DetuningSchedule with_wait(DetuningSchedule schedule, double wait_ps) {
  if (wait_ps > 0.0) {
    schedule.append(ScheduleSegment::constant(schedule.final_detuning(), wait_ps));
  }
  return schedule;
}

DetuningSchedule pulse_gated_template(const DeviceParams& params, const PulseGatedConfig& cfg) {
  cfg.validate();
  const auto regimes = pulse_gated_regimes(cfg);
  const double gate = cfg.gate_duration_ps ? *cfg.gate_duration_ps
                                           : auto_gate_duration_ps(params, cfg.eps_resonant);

  DetuningSchedule s;
  s.append(ScheduleSegment::constant(regimes.loading, cfg.pre_hold_ps));
  s.append(ScheduleSegment::constant(regimes.transfer, gate));
  // Zero-length marker: the template ends in regime III, where the wait is held.
  s.append(ScheduleSegment::constant(regimes.unloading, 0.0));
  return s;
}

DetuningSchedule pulse_gated_schedule(const DeviceParams& params, const PulseGatedConfig& cfg) {
  const DetuningSchedule tmpl = pulse_gated_template(params, cfg);
  const auto regimes = pulse_gated_regimes(cfg);
  const double wait = cfg.wait_time_ps.value_or(auto_pulse_wait_ps(cfg.eps_resonant));
  std::vector<ScheduleSegment> segs = tmpl.segments();
  segs.back() = ScheduleSegment::constant(regimes.unloading, wait + cfg.post_hold_ps);
  return DetuningSchedule(std::move(segs));
}

DetuningSchedule adiabatic_template(const DeviceParams& params, const AdiabaticConfig& cfg) {
  params.validate(true);
  cfg.validate();
  const DetuningVector start(cfg.eps_mid, cfg.eps_mid, -cfg.d_ad);
  const DetuningVector end(-cfg.d_ad, cfg.eps_mid, cfg.eps_mid);
  DetuningSchedule s;
  s.append(ScheduleSegment::ramp(start, end, ps_from_ns(cfg.ramp_duration_ns)));
  return s;
}

DetuningSchedule adiabatic_schedule(const DeviceParams& params, const AdiabaticConfig& cfg) {
  return with_wait(adiabatic_template(params, cfg),
                   cfg.wait_time_ps.value_or(auto_adiabatic_wait_ps(cfg.eps_resonant)));
}

double TransferResult::leakage_total() const {
  double total = 0.0;
  for (const auto& e : leakage) total += e.population;
  return total;
}

TransferResult summarize_transfer(const LogicalState& logical, QubitState final_state,
                                  const DetuningSchedule& schedule) {
  TransferResult r;
  r.fidelity = std::min(1.0, fidelity(final_state, logical.target()));
  for (int i = 0; i < kStateDim; ++i) {
    if (i == basis::S23.full_index() || i == basis::T23.full_index()) continue;
    const auto b = BasisIndex::from_full(i);
    r.leakage.push_back({b, final_state.population(b)});
  }
  r.transfer_time_ns = ns_from_ps(schedule.total_duration_ps());
  r.final_state = std::move(final_state);
  r.schedule_used = schedule;
  return r;
}

TransferResult run_transfer(const LogicalState& initial, const DeviceParams& params,
                            const DetuningSchedule& schedule, double tol) {
  initial.validate();
  params.validate(true);
  if (schedule.empty()) throw InvalidArgument("transfer schedule is empty");
  return summarize_transfer(initial,
                            propagate_schedule(initial.initial(), params, schedule, tol),
                            schedule);
}

QubitState LogicalPropagation::apply(const LogicalState& logical) const {
  QubitState out;
  out.amps = std::cos(logical.theta) * from_singlet.amps +
             std::polar(std::sin(logical.theta), logical.phi) * from_triplet.amps;
  out.time_ps = from_singlet.time_ps;
  return out;
}

LogicalPropagation LogicalPropagation::hold(const BlockPropagator<Complex>& propagator,
                                            double duration_ps) const {
  LogicalPropagation out = *this;
  propagator.apply(out.from_singlet.amps, duration_ps);
  propagator.apply(out.from_triplet.amps, duration_ps);
  out.from_singlet.time_ps += duration_ps;
  out.from_triplet.time_ps += duration_ps;
  return out;
}

LogicalPropagation propagate_logical_basis(const DeviceParams& params,
                                           const DetuningSchedule& schedule, double tol) {
  params.validate(true);
  // One propagation of |S>12 + |T0>12; the sectors separate exactly.
  QubitState both;
  both[basis::S12] = 1.0;
  both[basis::T12] = 1.0;
  const QubitState out = propagate_schedule(both, params, schedule, tol);
  LogicalPropagation p;
  p.from_singlet.amps.head<kSingletDim>() = out.singlet();
  p.from_triplet.amps.tail<kTripletDim>() = out.triplet();
  p.from_singlet.time_ps = p.from_triplet.time_ps = out.time_ps;
  return p;
}

std::vector<LogicalState> theta_grid(int points, double phi) {
  if (points < 2) throw InvalidArgument("theta grid needs at least two points");
  std::vector<LogicalState> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid.push_back({kPi * static_cast<double>(i) / static_cast<double>(points - 1), phi});
  }
  grid.back().theta = kPi;
  return grid;
}

namespace {

// Values this close to the maximum are round-off ties.
constexpr double kTieTolerance = 1e-12;

GridSearchResult best_of(const std::vector<double>& xs, const std::vector<double>& values) {
  const double top = *std::max_element(values.begin(), values.end());
  GridSearchResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (values[i] >= top - kTieTolerance && xs[i] < best.argmax) best = {xs[i], values[i]};
  }
  return best;
}

GridSearchResult evaluate_all(const std::function<double(double)>& objective,
                              const std::vector<double>& xs, int workers) {
  std::vector<double> values(xs.size());
  parallel_for(xs.size(), workers, [&](std::size_t i) { values[i] = objective(xs[i]); });
  return best_of(xs, values);
}

double worst_fidelity(const LogicalPropagation& p, const std::vector<LogicalState>& grid) {
  double worst = 1.0;
  for (const auto& s : grid) worst = std::min(worst, fidelity(p.apply(s), s.target()));
  return worst;
}

}  // namespace

GridSearchResult two_stage_grid_search(const std::function<double(double)>& objective,
                                       SearchWindow window, int points, int workers) {
  if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || window.hi < window.lo) {
    throw InvalidArgument("search window must satisfy lo <= hi");
  }
  if (window.hi == window.lo) return {window.lo, objective(window.lo)};
  if (points < 3) throw InvalidArgument("grid search needs at least three points");

  const double h = (window.hi - window.lo) / static_cast<double>(points - 1);
  std::vector<double> coarse;
  for (int i = 0; i < points; ++i) coarse.push_back(window.lo + h * static_cast<double>(i));
  coarse.back() = window.hi;
  const GridSearchResult first = evaluate_all(objective, coarse, workers);

  constexpr int kRefine = 10;
  const double h2 = h / kRefine;
  std::vector<double> fine;
  for (int j = -kRefine; j <= kRefine; ++j) {
    const double x = first.argmax + h2 * static_cast<double>(j);
    if (j == 0 || (x >= window.lo && x <= window.hi)) fine.push_back(j == 0 ? first.argmax : x);
  }
  return evaluate_all(objective, fine, workers);
}

WaitCalibration calibrate_wait_time(const std::vector<LogicalState>& initial_grid,
                                    const DeviceParams& params,
                                    const LogicalPropagation& propagated_template,
                                    const DetuningVector& hold_detuning, SearchWindow window_ps,
                                    int grid_points, int workers) {
  if (initial_grid.empty()) throw InvalidArgument("calibration needs at least one initial state");
  if (window_ps.lo < 0.0) throw InvalidArgument("wait window must be non-negative");
  const BlockPropagator<Complex> hold(build_hamiltonian<Complex>(params, hold_detuning));
  const auto objective = [&](double wait) {
    return worst_fidelity(propagated_template.hold(hold, wait), initial_grid);
  };
  const auto best = two_stage_grid_search(objective, window_ps, grid_points, workers);
  return {best.argmax, best.value};
}

WaitCalibration calibrate_wait_time(const std::vector<LogicalState>& initial_grid,
                                    const DeviceParams& params,
                                    const DetuningSchedule& schedule_template,
                                    SearchWindow window_ps, int grid_points, double tol,
                                    int workers) {
  return calibrate_wait_time(initial_grid, params,
                             propagate_logical_basis(params, schedule_template, tol),
                             schedule_template.final_detuning(), window_ps, grid_points, workers);
}

SearchWindow default_wait_window(const DeviceParams& params) {
  if (!(params.j_e > 0.0)) throw InvalidArgument("default wait window needs j_e > 0");
  return {0.0, kPi * kHbar / params.j_e};
}

GateCalibration calibrate_gate_duration(const DeviceParams& params, const PulseGatedConfig& cfg,
                                        SearchWindow window_ps, int grid_points,
                                        SearchWindow wait_window_ps, int wait_grid_points,
                                        const std::vector<LogicalState>& initial_grid,
                                        int workers) {
  cfg.validate();
  if (window_ps.lo < 0.0) throw InvalidArgument("gate window must be non-negative");
  const auto regimes = pulse_gated_regimes(cfg);
  const BlockPropagator<Complex> loading(build_hamiltonian<Complex>(params, regimes.loading));
  const BlockPropagator<Complex> transfer(build_hamiltonian<Complex>(params, regimes.transfer));

  LogicalPropagation start;
  start.from_singlet[basis::S12] = 1.0;
  start.from_triplet[basis::T12] = 1.0;
  if (cfg.pre_hold_ps > 0.0) start = start.hold(loading, cfg.pre_hold_ps);

  const auto nested = [&](double gate) {
    return calibrate_wait_time(initial_grid, params, start.hold(transfer, gate),
                               regimes.unloading, wait_window_ps, wait_grid_points);
  };
  const auto best = two_stage_grid_search(
      [&](double gate) { return nested(gate).worst_case_fidelity; }, window_ps, grid_points,
      workers);
  const auto wait = nested(best.argmax);
  return {best.argmax, wait.best_wait_ps, wait.worst_case_fidelity};
}

}  // namespace dotchain
