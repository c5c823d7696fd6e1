#include "dotchain/cli.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dotchain/config.hpp"
#include "dotchain/io.hpp"
#include "dotchain/parallel.hpp"

namespace dotchain {

namespace {

struct Options {
  std::string config_path;
  double theta = 0.0;
  double phi = 0.0;
  int workers = 0;
  bool timestamp = false;
  std::string output_path;
  std::string format;
  int n_dots = 0;
  // sw
  double t = 0.12, je = 0.1, u = 6.1, k = 3.05, eps = 5.0, floor = kDefaultDenominatorFloor;
};

/// Usage-class failures raised after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json metadata(const std::string& command, const Options& opt) {
  Json m = {{"command", command}, {"config", opt.config_path}};
  if (opt.timestamp) {
    m["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
  }
  return m;
}

OutputSpec resolve_output(const RunConfig& cfg, const Options& opt) {
  OutputSpec spec = cfg.output;
  if (!opt.output_path.empty()) spec.path = opt.output_path;
  if (opt.format == "csv") spec.format = OutputFormat::Csv;
  if (opt.format == "json") spec.format = OutputFormat::Json;
  return spec;
}

template <typename Writer>
void emit(const OutputSpec& spec, std::ostream& out, Writer&& write) {
  if (spec.path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(spec.path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + spec.path);
  write(file);
  if (!file) throw std::runtime_error("failed writing output file " + spec.path);
}

void print_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt.config_path);
  const LogicalState logical{opt.theta, opt.phi};
  try {
    logical.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto schedule = build_schedule(cfg.device, cfg.protocol);
  const auto result = run_transfer(logical, cfg.device, schedule, ramp_tolerance(cfg.protocol));
  Json doc = to_json(result, logical);
  doc["device"] = to_json(cfg.device);
  doc["metadata"] = metadata("simulate", opt);
  print_json(out, doc);
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt.config_path);
  const SweepTable table = sweep(cfg.sweep, cfg.device, cfg.protocol, resolve_workers(opt.workers));
  const OutputSpec spec = resolve_output(cfg, opt);
  emit(spec, out, [&](std::ostream& os) {
    if (spec.format == OutputFormat::Csv) {
      write_sweep_csv(os, table);
    } else {
      Json doc = to_json(table);
      doc["device"] = to_json(cfg.device);
      doc["metadata"] = metadata("sweep", opt);
      print_json(os, doc);
    }
  });
  for (const auto& r : table.records) {
    if (!r.ok()) return kExitRuntime;
  }
  return kExitOk;
}

int cmd_free_evolution(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt.config_path);
  const auto& fe = cfg.free_evolution;
  const auto trace = free_evolution_study(cfg.device, fe.duration_ns, ps_from_ns(fe.sample_dt_ns),
                                          fe.threshold, fe.theta_points);
  const OutputSpec spec = resolve_output(cfg, opt);
  emit(spec, out, [&](std::ostream& os) {
    if (spec.format == OutputFormat::Csv) {
      write_trace_csv(os, trace);
    } else {
      Json doc = to_json(trace);
      doc["device"] = to_json(cfg.device);
      doc["metadata"] = metadata("free-evolution", opt);
      print_json(os, doc);
    }
  });
  return kExitOk;
}

int cmd_calibrate(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt.config_path);
  const auto& cal = cfg.calibration;
  const int workers = resolve_workers(opt.workers);
  const auto grid = theta_grid(cal.theta_points);
  const SearchWindow wait_window =
      cal.wait_window_ps ? *cal.wait_window_ps : default_wait_window(cfg.device);

  Json report = {{"device", to_json(cfg.device)}};
  if (cal.target == CalibrationTarget::Gate) {
    const auto* pulse = std::get_if<PulseGatedConfig>(&cfg.protocol);
    if (!pulse) throw UsageError("gate calibration needs scheme = pulse_gated");
    const double nominal = kPi * kHbar / std::abs(sw_effective_couplings(cfg.device, pulse->eps_resonant).j_t);
    const SearchWindow window = cal.window_ps.value_or(SearchWindow{0.5 * nominal, 1.5 * nominal});
    const auto g = calibrate_gate_duration(cfg.device, *pulse, window, cal.grid_points, wait_window,
                                           cal.wait_grid_points, grid, workers);
    report["target"] = "gate";
    report["best_gate_duration_ns"] = ns_from_ps(g.best_duration_ps);
    report["best_wait_ns"] = ns_from_ps(g.best_wait_ps);
    report["transfer_time_ns"] = ns_from_ps(g.transfer_time_ps());
    report["worst_case_fidelity"] = g.worst_case_fidelity;
    report["closed_form_gate_ns"] = ns_from_ps(nominal);
  } else {
    DetuningSchedule tmpl;
    double eps_resonant = 5.0;
    double tol = kDefaultRampTol;
    if (const auto* pulse = std::get_if<PulseGatedConfig>(&cfg.protocol)) {
      tmpl = pulse_gated_template(cfg.device, *pulse);
      eps_resonant = pulse->eps_resonant;
    } else if (const auto* ad = std::get_if<AdiabaticConfig>(&cfg.protocol)) {
      tmpl = adiabatic_template(cfg.device, *ad);
      eps_resonant = ad->eps_resonant;
      tol = ad->ramp_tol;
    } else {
      throw UsageError("wait calibration needs scheme = pulse_gated or adiabatic");
    }
    const SearchWindow window = cal.window_ps.value_or(wait_window);
    const auto w = calibrate_wait_time(grid, cfg.device, tmpl, window, cal.grid_points, tol, workers);
    report["target"] = "wait";
    report["best_wait_ns"] = ns_from_ps(w.best_wait_ps);
    report["best_wait_hbar_over_eps"] = w.best_wait_ps * eps_resonant / kHbar;
    report["worst_case_fidelity"] = w.worst_case_fidelity;
    report["window_ns"] = {ns_from_ps(window.lo), ns_from_ps(window.hi)};
  }
  report["metadata"] = metadata("calibrate", opt);
  emit(OutputSpec{OutputFormat::Json, resolve_output(cfg, opt).path}, out,
       [&](std::ostream& os) { print_json(os, report); });
  return kExitOk;
}

int cmd_sw(const Options& opt, std::ostream& out, std::ostream& err) {
  DeviceParams p{opt.t, opt.je, opt.u, opt.k, 0.0};
  try {
    p.validate(true);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto c = sw_effective_couplings(p, opt.eps, opt.floor);
  Json doc = to_json(c);
  doc["pulse_gated_condition"] = p.coulomb_ratio_is_two();
  if (p.coulomb_ratio_is_two()) err << "pulse-gated condition satisfied (U = 2K)\n";
  print_json(out, doc);
  return kExitOk;
}

int cmd_chain(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt.config_path);
  ChainSpec spec;
  spec.n_dots = opt.n_dots > 0 ? opt.n_dots : cfg.chain_n_dots;
  if (const auto* pulse = std::get_if<PulseGatedConfig>(&cfg.protocol)) {
    spec.scheme = *pulse;
  } else if (const auto* ad = std::get_if<AdiabaticConfig>(&cfg.protocol)) {
    spec.scheme = *ad;
  } else {
    throw UsageError("chain needs scheme = pulse_gated or adiabatic");
  }
  const LogicalState logical{opt.theta, opt.phi};
  try {
    logical.validate();
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  Json doc = to_json(n_dot_transfer(spec, logical, cfg.device));
  doc["n_dots"] = spec.n_dots;
  doc["metadata"] = metadata("chain", opt);
  print_json(out, doc);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Singlet-triplet qubit transfer across a quantum-dot chain"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--workers", opt.workers, "worker threads (overrides DOTCHAIN_WORKERS)");
  app.add_flag("--timestamp", opt.timestamp, "add a timestamp to JSON metadata");

  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", opt.config_path, "run configuration file")->required();
  };
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", opt.output_path, "output file (overrides [output] path)");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* simulate = app.add_subcommand("simulate", "run one transfer and print the result");
  add_config(simulate);
  simulate->add_option("--theta", opt.theta, "mixing angle (rad)");
  simulate->add_option("--phi", opt.phi, "relative phase (rad)");

  auto* sweep_cmd = app.add_subcommand("sweep", "fidelity over a (theta, phi, delta_u) grid");
  add_config(sweep_cmd);
  add_output(sweep_cmd);

  auto* free_cmd = app.add_subcommand("free-evolution", "average fidelity under free evolution");
  add_config(free_cmd);
  add_output(free_cmd);

  auto* calibrate = app.add_subcommand("calibrate", "grid-search the wait or gate duration");
  add_config(calibrate);
  calibrate->add_option("-o,--output", opt.output_path, "report file");

  auto* sw = app.add_subcommand("sw", "Schrieffer-Wolff effective couplings");
  sw->add_option("--t", opt.t, "tunnel coupling (meV)");
  sw->add_option("--je", opt.je, "exchange energy (meV)");
  sw->add_option("--u", opt.u, "intradot Coulomb energy (meV)");
  sw->add_option("--k", opt.k, "interdot Coulomb energy (meV)");
  sw->add_option("--eps", opt.eps, "resonant detuning (meV)");
  sw->add_option("--floor", opt.floor, "singular-denominator floor (meV)");

  auto* chain = app.add_subcommand("chain", "sequential transfer along an N-dot chain");
  add_config(chain);
  chain->add_option("--theta", opt.theta, "mixing angle (rad)");
  chain->add_option("--phi", opt.phi, "relative phase (rad)");
  chain->add_option("--n-dots", opt.n_dots, "chain length (overrides [chain] n_dots)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(opt, out);
    if (*sweep_cmd) return cmd_sweep(opt, out);
    if (*free_cmd) return cmd_free_evolution(opt, out);
    if (*calibrate) return cmd_calibrate(opt, out);
    if (*sw) return cmd_sw(opt, out, err);
    if (*chain) return cmd_chain(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "simulation failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace dotchain
