#include "dotchain/io.hpp"

#include <cmath>
#include <cstdio>

namespace dotchain {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_json(const DetuningVector& v) { return Json::array({v(0), v(1), v(2)}); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : table.records) {
    out << format_double(r.theta) << ',' << format_double(r.phi) << ','
        << format_double(r.delta_u) << ',' << format_double(r.fidelity) << ','
        << format_double(r.infidelity) << ',' << format_double(r.leakage_total) << ','
        << format_double(r.transfer_time_ns) << '\n';
  }
}

Json to_json(const SweepTable& table) {
  Json records = Json::array();
  for (const auto& r : table.records) {
    Json row = {{"theta", r.theta},
                {"phi", r.phi},
                {"delta_u_mev", r.delta_u},
                {"fidelity", number(r.fidelity)},
                {"infidelity", number(r.infidelity)},
                {"leakage_total", number(r.leakage_total)},
                {"transfer_time_ns", r.transfer_time_ns}};
    if (!r.ok()) row["error"] = r.error;
    records.push_back(std::move(row));
  }
  return {{"records", std::move(records)}};
}

void write_trace_csv(std::ostream& out, const FreeEvolutionTrace& trace) {
  out << "time_ns,average_fidelity,min_fidelity\n";
  for (std::size_t i = 0; i < trace.times_ps.size(); ++i) {
    out << format_double(ns_from_ps(trace.times_ps[i])) << ','
        << format_double(trace.average_fidelity[i]) << ','
        << format_double(trace.min_fidelity[i]) << '\n';
  }
}

Json to_json(const FreeEvolutionTrace& trace) {
  Json times = Json::array(), ave = Json::array(), worst = Json::array(), peaks = Json::array();
  for (std::size_t i = 0; i < trace.times_ps.size(); ++i) {
    times.push_back(ns_from_ps(trace.times_ps[i]));
    ave.push_back(trace.average_fidelity[i]);
    worst.push_back(trace.min_fidelity[i]);
  }
  for (const auto& p : trace.peaks) {
    peaks.push_back({{"time_ns", ns_from_ps(p.time_ps)}, {"value", p.value}});
  }
  Json j = {{"times_ns", std::move(times)},
            {"average_fidelity", std::move(ave)},
            {"min_fidelity", std::move(worst)},
            {"peaks", std::move(peaks)}};
  j["earliest_coherent_ns"] =
      trace.earliest_coherent_ps ? Json(ns_from_ps(*trace.earliest_coherent_ps)) : Json(nullptr);
  if (const auto best = trace.highest_peak()) {
    j["highest_peak"] = {{"time_ns", ns_from_ps(best->time_ps)}, {"value", best->value}};
  } else {
    j["highest_peak"] = nullptr;
  }
  return j;
}

Json to_json(const DeviceParams& p) {
  return {{"t_mev", p.t}, {"je_mev", p.j_e}, {"u_mev", p.u}, {"k_mev", p.k}, {"mu_mev", p.mu}};
}

Json to_json(const DetuningSchedule& schedule) {
  Json segments = Json::array();
  for (const auto& s : schedule.segments()) {
    segments.push_back({{"kind", s.kind == SegmentKind::Constant ? "constant" : "linear_ramp"},
                        {"duration_ns", ns_from_ps(s.duration_ps)},
                        {"eps_start_mev", vector_json(s.eps_start)},
                        {"eps_end_mev", vector_json(s.eps_end)}});
  }
  return {{"segments", std::move(segments)},
          {"total_duration_ns", ns_from_ps(schedule.total_duration_ps())}};
}

Json to_json(const QubitState& state) {
  Json amps = Json::array();
  for (int i = 0; i < kStateDim; ++i) {
    amps.push_back({{"state", BasisIndex::from_full(i).label()},
                    {"re", state.amps(i).real()},
                    {"im", state.amps(i).imag()}});
  }
  return {{"amps", std::move(amps)}, {"time_ns", ns_from_ps(state.time_ps)}};
}

Json to_json(const TransferResult& r, const LogicalState& logical) {
  Json leakage = Json::object();
  for (const auto& e : r.leakage) leakage[std::string(e.state.label())] = e.population;
  return {{"theta", logical.theta},
          {"phi", logical.phi},
          {"fidelity", r.fidelity},
          {"infidelity", 1.0 - r.fidelity},
          {"leakage", std::move(leakage)},
          {"leakage_total", r.leakage_total()},
          {"transfer_time_ns", r.transfer_time_ns},
          {"final_state", to_json(r.final_state)},
          {"schedule_used", to_json(r.schedule_used)}};
}

Json to_json(const ChainResult& r) {
  Json steps = Json::array();
  for (std::size_t k = 0; k < r.per_step.size(); ++k) {
    steps.push_back({{"step", k + 1},
                     {"fidelity", r.per_step[k].fidelity},
                     {"leakage_total", r.per_step[k].leakage_total()},
                     {"retained_weight", r.retained_weight[k]},
                     {"transfer_time_ns", r.per_step[k].transfer_time_ns}});
  }
  return {{"per_step", std::move(steps)},
          {"composed_fidelity", r.composed_fidelity},
          {"product_fidelity", r.product_fidelity},
          {"total_time_ns", r.total_time_ns}};
}

Json to_json(const EffectiveCouplings& c) { return {{"j_s", c.j_s}, {"j_t", c.j_t}}; }

}  // namespace dotchain
