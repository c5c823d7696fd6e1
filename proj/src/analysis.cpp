#include "dotchain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "dotchain/parallel.hpp"

namespace dotchain {

namespace {

// (1/2) * Simpson sum of f(theta_i) sin(theta_i) over n intervals.
template <typename Sample>
double weighted_simpson(std::size_t intervals, Sample&& sample) {
  const double h = kPi / static_cast<double>(intervals);
  double sum = 0.0;
  // sin(0) = sin(pi) = 0, so the endpoints drop out of the weighted integrand.
  for (std::size_t i = 1; i < intervals; ++i) {
    const double theta = h * static_cast<double>(i);
    sum += (i % 2 == 1 ? 4.0 : 2.0) * sample(i, theta) * std::sin(theta);
  }
  return 0.5 * h / 3.0 * sum;
}

}  // namespace

double average_fidelity(std::span<const double> samples) {
  if (samples.size() < 3 || samples.size() % 2 == 0) {
    throw InvalidArgument("Simpson quadrature needs an odd number (>= 3) of samples");
  }
  return weighted_simpson(samples.size() - 1,
                          [&](std::size_t i, double) { return samples[i]; });
}

double average_fidelity(const std::function<double(double)>& f, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  constexpr std::size_t kMaxIntervals = std::size_t{1} << 22;
  const auto eval = [&](std::size_t, double theta) { return f(theta); };
  std::size_t n = 2;
  double prev = weighted_simpson(n, eval);
  for (n *= 2; n <= kMaxIntervals; n *= 2) {
    const double cur = weighted_simpson(n, eval);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw NonConvergence("average fidelity quadrature did not converge");
}

DetuningSchedule build_schedule(const DeviceParams& params, const ProtocolConfig& config) {
  return std::visit(
      [&](const auto& cfg) -> DetuningSchedule {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, PulseGatedConfig>) {
          return pulse_gated_schedule(params, cfg);
        } else if constexpr (std::is_same_v<T, AdiabaticConfig>) {
          return adiabatic_schedule(params, cfg);
        } else {
          DetuningSchedule s;
          s.append(ScheduleSegment::constant(cfg.eps, cfg.duration_ps));
          return s;
        }
      },
      config);
}

double ramp_tolerance(const ProtocolConfig& config) {
  if (const auto* a = std::get_if<AdiabaticConfig>(&config)) return a->ramp_tol;
  return kDefaultRampTol;
}

void SweepSpec::validate() const {
  if (theta_points < 2) throw InvalidArgument("sweep needs at least two theta points");
  if (!(theta_min >= 0.0) || !(theta_max <= kPi) || !(theta_min < theta_max)) {
    throw InvalidArgument("theta range must be an increasing subrange of [0, pi]");
  }
  if (phi_values.empty()) throw InvalidArgument("sweep needs at least one phi value");
  for (double v : phi_values) {
    if (!std::isfinite(v)) throw InvalidArgument("phi values must be finite");
  }
  for (double v : delta_u_values) {
    if (!std::isfinite(v)) throw InvalidArgument("delta_u values must be finite");
  }
}

SweepTable sweep(const SweepSpec& spec, const DeviceParams& params, const ProtocolConfig& config,
                 int workers) {
  spec.validate();
  const DetuningSchedule schedule = build_schedule(params, config);
  const double tol = ramp_tolerance(config);
  const double time_ns = ns_from_ps(schedule.total_duration_ps());

  std::vector<double> deltas = spec.delta_u_values;
  const bool own_u = deltas.empty();
  if (own_u) deltas.push_back(params.u - 2.0 * params.k);

  struct Outcome {
    LogicalPropagation map;
    std::string error;
  };
  std::vector<Outcome> outcomes(deltas.size());
  parallel_for(deltas.size(), workers, [&](std::size_t d) {
    try {
      const DeviceParams p = own_u ? params : params.with_u(2.0 * params.k + deltas[d]);
      outcomes[d].map = propagate_logical_basis(p, schedule, tol);
    } catch (const std::exception& e) {
      outcomes[d].error = e.what();
    }
  });

  SweepTable table;
  const double step = (spec.theta_max - spec.theta_min) / static_cast<double>(spec.theta_points - 1);
  for (int i = 0; i < spec.theta_points; ++i) {
    const double theta =
        i + 1 == spec.theta_points ? spec.theta_max : spec.theta_min + step * static_cast<double>(i);
    for (double phi : spec.phi_values) {
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        SweepRecord r;
        r.theta = theta;
        r.phi = phi;
        r.delta_u = deltas[d];
        r.transfer_time_ns = time_ns;
        if (!outcomes[d].error.empty()) {
          r.error = outcomes[d].error;
          r.fidelity = r.infidelity = r.leakage_total = std::nan("");
        } else {
          const LogicalState logical{theta, phi};
          const auto res = summarize_transfer(logical, outcomes[d].map.apply(logical), schedule);
          r.fidelity = res.fidelity;
          r.infidelity = 1.0 - res.fidelity;
          r.leakage_total = res.leakage_total();
        }
        table.records.push_back(std::move(r));
      }
    }
  }
  return table;
}

std::optional<Peak> FreeEvolutionTrace::highest_peak() const {
  if (peaks.empty()) return std::nullopt;
  // Earliest wins on ties.
  return *std::max_element(peaks.begin(), peaks.end(),
                           [](const Peak& a, const Peak& b) { return a.value < b.value; });
}

std::vector<std::size_t> find_peaks(std::span<const double> v) {
  std::vector<std::size_t> out;
  std::size_t i = 1;
  while (i + 1 < v.size()) {
    std::size_t end = i;
    while (end + 1 < v.size() && v[end + 1] == v[i]) ++end;
    if (v[i] > v[i - 1] && end + 1 < v.size() && v[end + 1] < v[i]) out.push_back(i);
    i = end + 1;
  }
  return out;
}

FreeEvolutionTrace free_evolution_study(const DeviceParams& params, double duration_ns,
                                        double sample_dt_ps, double threshold, int theta_points) {
  params.validate(true);
  if (!std::isfinite(duration_ns) || duration_ns < 0.0) {
    throw InvalidArgument("free evolution duration must be non-negative");
  }
  if (!(sample_dt_ps > 0.0) || sample_dt_ps > 1.0) {
    throw InvalidArgument("free evolution sample spacing must lie in (0, 1] ps");
  }
  const auto grid = theta_grid(theta_points);
  const BlockPropagator<Complex> propagator(
      build_hamiltonian<Complex>(params, DetuningVector::Zero()));

  const double duration_ps = ps_from_ns(duration_ns);
  const auto samples = static_cast<std::size_t>(std::floor(duration_ps / sample_dt_ps + 1e-9)) + 1;

  FreeEvolutionTrace trace;
  trace.times_ps.reserve(samples);
  const int s12 = basis::S12.full_index(), s23 = basis::S23.full_index();
  const int t12 = basis::T12.full_index(), t23 = basis::T23.full_index();
  for (std::size_t k = 0; k < samples; ++k) {
    const double tau = sample_dt_ps * static_cast<double>(k);
    StateVector v = StateVector::Zero();
    v(s12) = 1.0;
    v(t12) = 1.0;
    propagator.apply(v, tau);
    // Transfer amplitudes of the two logical basis states.
    const Complex a = v(s23), b = v(t23);
    const auto f = [&](double theta) {
      const double c = std::cos(theta), s = std::sin(theta);
      return std::norm(c * c * a + s * s * b);
    };
    double worst = 1.0;
    for (const auto& g : grid) worst = std::min(worst, f(g.theta));

    trace.times_ps.push_back(tau);
    trace.average_fidelity.push_back(std::clamp(average_fidelity(f), 0.0, 1.0));
    trace.min_fidelity.push_back(worst);
    if (!trace.earliest_coherent_ps && worst > threshold) trace.earliest_coherent_ps = tau;
  }
  for (std::size_t i : find_peaks(trace.average_fidelity)) {
    trace.peaks.push_back({trace.times_ps[i], trace.average_fidelity[i]});
  }
  return trace;
}

}  // namespace dotchain
