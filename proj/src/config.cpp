#include "dotchain/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace dotchain {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<double> plain_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

class Document {
 public:
  Document(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string raw;
    std::string current;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find_first_of("#;");
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        current = lower(trim(line.substr(1, line.size() - 2)));
        if (sections_.count(current)) fail(line_no, "duplicate section [" + current + "]");
        sections_[current].line = line_no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      if (current.empty()) fail(line_no, "key outside of any section");
      const std::string key = lower(trim(line.substr(0, eq)));
      if (key.empty()) fail(line_no, "empty key");
      auto& entries = sections_[current].entries;
      if (entries.count(key)) fail(line_no, "duplicate key '" + key + "'");
      entries[key] = {trim(line.substr(eq + 1)), line_no, false};
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_, line, msg);
  }

  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }
  int section_line(const std::string& name) const {
    const auto it = sections_.find(name);
    return it == sections_.end() ? 0 : it->second.line;
  }

  Entry* find(const std::string& section, const std::string& key) {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.entries.find(key);
    if (e == s->second.entries.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  std::optional<double> real(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return std::nullopt;
    const auto v = parse_real(e->value);
    if (!v) fail(e->line, "'" + key + "' expects a number, got '" + e->value + "'");
    return v;
  }

  void real_into(const std::string& section, const std::string& key, double& out,
                 double scale = 1.0) {
    if (const auto v = real(section, key)) out = *v * scale;
  }

  void integer_into(const std::string& section, const std::string& key, int& out) {
    Entry* e = find(section, key);
    if (!e) return;
    const auto v = plain_number(e->value);
    if (!v || *v != std::floor(*v) || std::abs(*v) > 1e9) {
      fail(e->line, "'" + key + "' expects an integer, got '" + e->value + "'");
    }
    out = static_cast<int>(*v);
  }

  /// `auto` maps to nullopt.
  void duration_into(const std::string& section, const std::string& key,
                     std::optional<double>& out_ps) {
    Entry* e = find(section, key);
    if (!e) return;
    if (lower(e->value) == "auto") {
      out_ps.reset();
      return;
    }
    const auto v = parse_real(e->value);
    if (!v || *v < 0.0) fail(e->line, "'" + key + "' expects 'auto' or a non-negative time in ns");
    out_ps = ps_from_ns(*v);
  }

  std::optional<std::vector<double>> list(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return std::nullopt;
    std::vector<double> values;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto v = parse_real(item);
      if (!v) fail(e->line, "'" + key + "' has a non-numeric entry '" + item + "'");
      values.push_back(*v);
    }
    return values;
  }

  std::optional<std::string> word(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return lower(e->value);
  }

  int line_of(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return 0;
    const auto e = s->second.entries.find(key);
    return e == s->second.entries.end() ? s->second.line : e->second.line;
  }

  void reject_unused() const {
    for (const auto& [name, section] : sections_) {
      for (const auto& [key, entry] : section.entries) {
        if (!entry.used) fail(entry.line, "unknown key '" + key + "' in [" + name + "]");
      }
    }
  }

  /// Runs `check`, re-anchoring InvalidArgument at `line`.
  void validate_at(int line, const std::function<void()>& check) const {
    try {
      check();
    } catch (const InvalidArgument& e) {
      fail(line, e.what());
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
};

void read_pulse(Document& doc, PulseGatedConfig& cfg) {
  doc.real_into("protocol", "eps_resonant_mev", cfg.eps_resonant);
  doc.real_into("protocol", "d_p_mev", cfg.d_p);
  doc.duration_into("protocol", "gate_duration_ns", cfg.gate_duration_ps);
  doc.duration_into("protocol", "wait_time_ns", cfg.wait_time_ps);
  doc.real_into("protocol", "pre_hold_ns", cfg.pre_hold_ps, 1000.0);
  doc.real_into("protocol", "post_hold_ns", cfg.post_hold_ps, 1000.0);
}

void read_adiabatic(Document& doc, AdiabaticConfig& cfg) {
  doc.real_into("protocol", "d_ad_mev", cfg.d_ad);
  doc.real_into("protocol", "ramp_duration_ns", cfg.ramp_duration_ns);
  doc.real_into("protocol", "eps_mid_mev", cfg.eps_mid);
  doc.real_into("protocol", "eps_resonant_mev", cfg.eps_resonant);
  doc.duration_into("protocol", "wait_time_ns", cfg.wait_time_ps);
  doc.real_into("protocol", "ramp_tol", cfg.ramp_tol);
}

std::optional<SearchWindow> window(Document& doc, const std::string& lo_key,
                                   const std::string& hi_key) {
  const auto lo = doc.real("calibrate", lo_key);
  const auto hi = doc.real("calibrate", hi_key);
  if (!lo && !hi) return std::nullopt;
  if (!lo || !hi) {
    doc.fail(doc.line_of("calibrate", lo ? lo_key : hi_key),
             "'" + lo_key + "' and '" + hi_key + "' must be given together");
  }
  if (*lo < 0.0 || *hi < *lo) {
    doc.fail(doc.line_of("calibrate", hi_key), "window must satisfy 0 <= min <= max");
  }
  return SearchWindow{ps_from_ns(*lo), ps_from_ns(*hi)};
}

}  // namespace

std::optional<double> parse_real(const std::string& raw) {
  const std::string text = lower(trim(raw));
  if (auto v = plain_number(text)) return v;
  // [coef*]pi[/div]
  const auto pi_pos = text.find("pi");
  if (pi_pos == std::string::npos) return std::nullopt;
  double coef = 1.0, div = 1.0;
  std::string head = trim(text.substr(0, pi_pos));
  if (!head.empty()) {
    if (head == "-") {
      coef = -1.0;
    } else {
      if (head.back() != '*') return std::nullopt;
      const auto c = plain_number(trim(head.substr(0, head.size() - 1)));
      if (!c) return std::nullopt;
      coef = *c;
    }
  }
  const std::string tail = trim(text.substr(pi_pos + 2));
  if (!tail.empty()) {
    if (tail.front() != '/') return std::nullopt;
    const auto d = plain_number(trim(tail.substr(1)));
    if (!d || *d == 0.0) return std::nullopt;
    div = *d;
  }
  return coef * kPi / div;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  Document doc(in, source);
  RunConfig cfg;

  if (!doc.has_section("device")) doc.fail(1, "missing [device] section");
  doc.real_into("device", "t_mev", cfg.device.t);
  doc.real_into("device", "je_mev", cfg.device.j_e);
  doc.real_into("device", "u_mev", cfg.device.u);
  doc.real_into("device", "k_mev", cfg.device.k);
  doc.real_into("device", "mu_mev", cfg.device.mu);
  doc.validate_at(doc.section_line("device"), [&] { cfg.device.validate(); });

  const std::string scheme = doc.word("protocol", "scheme").value_or("pulse_gated");
  const int protocol_line = doc.line_of("protocol", "scheme");
  if (scheme == "pulse_gated") {
    PulseGatedConfig p;
    read_pulse(doc, p);
    doc.validate_at(doc.section_line("protocol"), [&] {
      p.validate();
      // A config without [protocol] may be meant for free evolution only.
      if (!p.gate_duration_ps && doc.has_section("protocol")) {
        auto_gate_duration_ps(cfg.device, p.eps_resonant);
      }
    });
    cfg.protocol = p;
  } else if (scheme == "adiabatic") {
    AdiabaticConfig a;
    read_adiabatic(doc, a);
    doc.validate_at(doc.section_line("protocol"), [&] { a.validate(); });
    cfg.protocol = a;
  } else if (scheme == "free_evolution") {
    FreeEvolutionConfig f;
    doc.real_into("protocol", "duration_ns", f.duration_ps, 1000.0);
    if (f.duration_ps < 0.0) doc.fail(doc.line_of("protocol", "duration_ns"), "duration must be >= 0");
    cfg.protocol = f;
  } else {
    doc.fail(protocol_line, "unknown scheme '" + scheme + "'");
  }

  doc.integer_into("sweep", "theta_points", cfg.sweep.theta_points);
  doc.real_into("sweep", "theta_min", cfg.sweep.theta_min);
  doc.real_into("sweep", "theta_max", cfg.sweep.theta_max);
  if (auto phis = doc.list("sweep", "phi_list")) cfg.sweep.phi_values = *phis;
  if (auto deltas = doc.list("sweep", "delta_u_list")) cfg.sweep.delta_u_values = *deltas;
  doc.validate_at(doc.section_line("sweep"), [&] { cfg.sweep.validate(); });

  auto& fe = cfg.free_evolution;
  doc.real_into("free_evolution", "duration_ns", fe.duration_ns);
  doc.real_into("free_evolution", "sample_dt_ns", fe.sample_dt_ns);
  doc.real_into("free_evolution", "threshold", fe.threshold);
  doc.integer_into("free_evolution", "theta_points", fe.theta_points);
  if (fe.duration_ns < 0.0) doc.fail(doc.line_of("free_evolution", "duration_ns"), "duration must be >= 0");
  if (!(fe.sample_dt_ns > 0.0) || fe.sample_dt_ns > 0.001) {
    doc.fail(doc.line_of("free_evolution", "sample_dt_ns"), "sample_dt_ns must lie in (0, 0.001]");
  }
  if (fe.theta_points < 2) doc.fail(doc.line_of("free_evolution", "theta_points"), "theta_points must be >= 2");

  auto& cal = cfg.calibration;
  if (const auto target = doc.word("calibrate", "target")) {
    if (*target == "wait") {
      cal.target = CalibrationTarget::Wait;
    } else if (*target == "gate") {
      cal.target = CalibrationTarget::Gate;
    } else {
      doc.fail(doc.line_of("calibrate", "target"), "target must be 'wait' or 'gate'");
    }
  }
  cal.window_ps = window(doc, "window_min_ns", "window_max_ns");
  cal.wait_window_ps = window(doc, "wait_window_min_ns", "wait_window_max_ns");
  doc.integer_into("calibrate", "grid_points", cal.grid_points);
  doc.integer_into("calibrate", "wait_grid_points", cal.wait_grid_points);
  doc.integer_into("calibrate", "theta_points", cal.theta_points);
  if (cal.grid_points < 3) doc.fail(doc.line_of("calibrate", "grid_points"), "grid_points must be >= 3");
  if (cal.wait_grid_points < 3) {
    doc.fail(doc.line_of("calibrate", "wait_grid_points"), "wait_grid_points must be >= 3");
  }
  if (cal.theta_points < 2) doc.fail(doc.line_of("calibrate", "theta_points"), "theta_points must be >= 2");

  doc.integer_into("chain", "n_dots", cfg.chain_n_dots);
  if (cfg.chain_n_dots < 3) doc.fail(doc.line_of("chain", "n_dots"), "n_dots must be >= 3");

  if (const auto format = doc.word("output", "format")) {
    if (*format == "csv") {
      cfg.output.format = OutputFormat::Csv;
    } else if (*format == "json") {
      cfg.output.format = OutputFormat::Json;
    } else {
      doc.fail(doc.line_of("output", "format"), "format must be 'csv' or 'json'");
    }
  }
  if (Entry* e = doc.find("output", "path")) cfg.output.path = e->value;

  doc.reject_unused();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  return parse_config(in, path.string());
}

}  // namespace dotchain
