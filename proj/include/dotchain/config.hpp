#pragma once

// Sectioned key = value run configuration. Energies are meV and times are ns;
// conversion to the internal picosecond unit happens here.
//
//   [device]      t_mev je_mev u_mev k_mev mu_mev
//   [protocol]    scheme = pulse_gated | adiabatic | free_evolution, plus
//                 scheme fields (durations accept `auto`)
//   [sweep]       theta_points theta_min theta_max phi_list delta_u_list
//   [free_evolution] duration_ns sample_dt_ns threshold theta_points
//   [calibrate]   target = wait | gate, window/grid settings
//   [chain]       n_dots
//   [output]      format = csv | json, path

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "dotchain/analysis.hpp"
#include "dotchain/chain.hpp"

namespace dotchain {

/// Parse or validation failure; what() is prefixed with "source:line: ".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

enum class OutputFormat { Csv, Json };

struct OutputSpec {
  OutputFormat format = OutputFormat::Json;
  std::string path;  // empty: standard output
};

struct FreeEvolutionSpec {
  double duration_ns = 1.2;
  double sample_dt_ns = 0.0005;
  double threshold = kCoherentThreshold;
  int theta_points = kDefaultThetaPoints;
};

enum class CalibrationTarget { Wait, Gate };

struct CalibrationSpec {
  CalibrationTarget target = CalibrationTarget::Wait;
  std::optional<SearchWindow> window_ps;       // wait or gate window
  int grid_points = 201;
  std::optional<SearchWindow> wait_window_ps;  // nested wait window (gate target)
  int wait_grid_points = 201;
  int theta_points = kDefaultThetaPoints;
};

struct RunConfig {
  DeviceParams device = pulse_gated_device();
  ProtocolConfig protocol = PulseGatedConfig{};
  SweepSpec sweep;
  FreeEvolutionSpec free_evolution;
  CalibrationSpec calibration;
  int chain_n_dots = 3;
  OutputSpec output;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Accepts plain numbers and multiples of pi such as `pi`, `pi/6`, `2*pi/3`.
std::optional<double> parse_real(const std::string& text);

}  // namespace dotchain
