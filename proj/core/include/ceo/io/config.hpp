#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceo/model.hpp"
#include "ceo/pulse.hpp"

namespace ceo::io {

// Config file rejected: carries the exhaustive list of problems.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> problems)
      : std::runtime_error(what), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct SweepSettings {
  ProbeMode probe = ProbeMode::Microwave;
  double freq_start = 0.0;  // [rad/s]
  double freq_stop = 0.0;   // [rad/s]
  int points = 201;
  std::vector<double> c_values;
  std::vector<double> powers_w;

  std::vector<double> omega_grid() const;
};

struct DetectionSettings {
  double if_freq = hz_to_angular(40e6);  // [rad/s]
  double sample_rate = 1e9;              // [S/s]
  double gain = 1.0;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
  int repeats = 1;
  double ddc_window = 250e-9;  // [s]
};

// Phenomenological delayed-back-action injection for pulse runs.
struct ExcessSettings {
  double r_peak = 0.0;   // peak on-resonance R_e deviation above 1
  double t_ex = 6e-6;    // bounce delay after pulse end [s]
  double tau_ex = 1.6e-6;  // recovery constant [s]
};

struct RunConfig {
  SystemConfig system;
  PumpDrive pump;                    // resolved at load (photon number or power)
  std::optional<PulseSpec> pulse;    // absent = stationary-only run
  std::optional<ExcessSettings> excess;
  SweepSettings sweep;
  DetectionSettings detection;
  std::string output_dir = "out";
  double fsr = 0.0;             // [rad/s], optional metadata
  double microwave_freq = 0.0;  // [rad/s], optional; with fsr sets the detunings
  std::string digest;           // digest of the canonical file content
};

// Strict-schema load: unknown keys rejected, all violations reported at once,
// frequencies converted Hz -> rad/s exactly once. Throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

// Canonical JSON for a system block (used by tests and `validate`).
std::string system_config_to_json(const SystemConfig& cfg);

}  // namespace ceo::io
