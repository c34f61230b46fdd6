#include "ceo/io/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ceo/io/csv.hpp"

namespace ceo::io {

using nlohmann::json;

std::vector<double> SweepSettings::omega_grid() const {
  if (points < 2) throw std::invalid_argument("sweep: points must be >= 2");
  if (!(freq_stop > freq_start))
    throw std::invalid_argument("sweep: freq_stop must exceed freq_start");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (freq_stop - freq_start) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = freq_start + step * i;
  return grid;
}

namespace {

struct Problems {
  std::vector<std::string> list;
  void add(const std::string& where, const std::string& what) {
    list.push_back(where + ": " + what);
  }
};

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> known, Problems& problems) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) problems.add(where + "." + it.key(), "unknown key (strict schema)");
  }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  Problems& problems, bool required, double fallback = 0.0) {
  if (!obj.contains(key)) {
    if (required) problems.add(where + "." + key, "missing required key");
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    problems.add(where + "." + key, "expected a number");
    return fallback;
  }
  return v.get<double>();
}

ModeSpec parse_mode(const json& obj, const std::string& where, ModeLabel label,
                    Problems& problems, bool* detuning_given = nullptr) {
  check_keys(obj, where, {"kappa_hz", "kappa_ext_hz", "detuning_hz"}, problems);
  ModeSpec mode;
  mode.label = label;
  mode.kappa_total = hz_to_angular(get_number(obj, where, "kappa_hz", problems, true));
  mode.kappa_ext = hz_to_angular(get_number(obj, where, "kappa_ext_hz", problems, true));
  if (detuning_given) *detuning_given = obj.contains("detuning_hz");
  mode.detuning = hz_to_angular(get_number(obj, where, "detuning_hz", problems, false));
  return mode;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream out;
  out << "line " << line << ", column " << col;
  return out.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError("config parse error in " + origin,
                      {origin + " (" + line_col(text, err.byte) + "): " + err.what()});
  }
  if (!root.is_object())
    throw ConfigError("config parse error in " + origin, {origin + ": not a JSON object"});

  Problems problems;
  RunConfig config;
  config.digest = digest(text);

  check_keys(root, "$",
             {"system", "pump_drive", "pulse", "excess", "sweep", "detection", "outputs"},
             problems);

  bool ds_given = false, das_given = false, dstm_given = false, dastm_given = false;
  if (!root.contains("system") || !root["system"].is_object()) {
    problems.add("$.system", "missing required object");
  } else {
    const json& sys = root["system"];
    check_keys(sys, "system",
               {"stokes", "pump", "anti_stokes", "stokes_tm", "anti_stokes_tm", "microwave",
                "g0_hz", "j_s_hz", "j_as_hz", "configuration", "fsr_hz",
                "microwave_freq_hz"},
               problems);

    auto mode = [&](const char* key, ModeLabel label, bool* given) -> ModeSpec {
      if (!sys.contains(key) || !sys[key].is_object()) {
        problems.add(std::string("system.") + key, "missing required object");
        return ModeSpec{0, 0, 0, label};
      }
      return parse_mode(sys[key], std::string("system.") + key, label, problems, given);
    };
    config.system.stokes = mode("stokes", ModeLabel::Stokes, &ds_given);
    config.system.pump_mode = mode("pump", ModeLabel::Pump, nullptr);
    config.system.anti_stokes = mode("anti_stokes", ModeLabel::AntiStokes, &das_given);
    config.system.stokes_tm = mode("stokes_tm", ModeLabel::StokesTm, &dstm_given);
    config.system.anti_stokes_tm =
        mode("anti_stokes_tm", ModeLabel::AntiStokesTm, &dastm_given);
    config.system.microwave = mode("microwave", ModeLabel::Microwave, nullptr);

    config.system.g0 = hz_to_angular(get_number(sys, "system", "g0_hz", problems, true));
    config.system.j_s = hz_to_angular(get_number(sys, "system", "j_s_hz", problems, false));
    config.system.j_as =
        hz_to_angular(get_number(sys, "system", "j_as_hz", problems, false));
    config.fsr = hz_to_angular(get_number(sys, "system", "fsr_hz", problems, false));
    config.microwave_freq =
        hz_to_angular(get_number(sys, "system", "microwave_freq_hz", problems, false));

    if (!sys.contains("configuration") || !sys["configuration"].is_string()) {
      problems.add("system.configuration", "missing required string");
    } else {
      const std::string c = sys["configuration"].get<std::string>();
      if (c == "symmetric")
        config.system.configuration = PumpConfiguration::Symmetric;
      else if (c == "stokes")
        config.system.configuration = PumpConfiguration::StokesCase;
      else if (c == "anti_stokes")
        config.system.configuration = PumpConfiguration::AntiStokesCase;
      else
        problems.add("system.configuration",
                     "must be one of symmetric|stokes|anti_stokes, got '" + c + "'");
    }

    // zero-dispersion default: sideband-from-mode detunings from FSR mismatch
    if (config.fsr > 0.0 && config.microwave_freq > 0.0) {
      const double mismatch = config.fsr - config.microwave_freq;
      if (!ds_given) config.system.stokes.detuning = mismatch;
      if (!das_given) config.system.anti_stokes.detuning = -mismatch;
    }
    // TM partners sit at their TE mode's frequency unless stated
    if (!dstm_given) config.system.stokes_tm.detuning = config.system.stokes.detuning;
    if (!dastm_given)
      config.system.anti_stokes_tm.detuning = config.system.anti_stokes.detuning;
  }

  if (root.contains("pump_drive")) {
    const json& pd = root["pump_drive"];
    check_keys(pd, "pump_drive", {"peak_power_w", "wavelength_m", "photon_number"},
               problems);
    config.pump.peak_power = get_number(pd, "pump_drive", "peak_power_w", problems, false);
    config.pump.wavelength =
        get_number(pd, "pump_drive", "wavelength_m", problems, false, 1550e-9);
    if (pd.contains("photon_number")) {
      config.pump.photon_number =
          get_number(pd, "pump_drive", "photon_number", problems, false);
    } else if (config.pump.peak_power > 0.0 && problems.list.empty()) {
      config.pump.photon_number =
          intracavity_pump_photons(config.pump.peak_power, config.pump.wavelength,
                                   config.system.pump_mode.kappa_total,
                                   config.system.pump_mode.kappa_ext);
    }
    if (config.pump.photon_number >= 0.0 && config.system.g0 >= 0.0)
      config.pump.g_enhanced = enhanced_coupling(config.system.g0, config.pump.photon_number);
  } else {
    config.pump.wavelength = 1550e-9;
  }

  if (root.contains("pulse")) {
    const json& pl = root["pulse"];
    check_keys(pl, "pulse",
               {"duration_s", "peak_power_w", "rise_time_s", "shape", "t_start_s"},
               problems);
    PulseSpec pulse;
    pulse.duration = get_number(pl, "pulse", "duration_s", problems, true);
    pulse.peak_power = get_number(pl, "pulse", "peak_power_w", problems, true);
    pulse.rise_time = get_number(pl, "pulse", "rise_time_s", problems, false, 30e-9);
    pulse.t_start = get_number(pl, "pulse", "t_start_s", problems, false, 1e-6);
    if (pl.contains("shape")) {
      const std::string s = pl["shape"].is_string() ? pl["shape"].get<std::string>() : "";
      if (s == "rectangular")
        pulse.shape = PulseShape::Rectangular;
      else if (s == "smoothed_rectangular")
        pulse.shape = PulseShape::SmoothedRectangular;
      else
        problems.add("pulse.shape", "must be rectangular|smoothed_rectangular");
    }
    try {
      pulse.validate();
    } catch (const std::exception& err) {
      problems.add("pulse", err.what());
    }
    config.pulse = pulse;
  }

  if (root.contains("excess")) {
    const json& ex = root["excess"];
    check_keys(ex, "excess", {"r_peak", "t_ex_s", "tau_ex_s"}, problems);
    ExcessSettings excess;
    excess.r_peak = get_number(ex, "excess", "r_peak", problems, true);
    excess.t_ex = get_number(ex, "excess", "t_ex_s", problems, false, 6e-6);
    excess.tau_ex = get_number(ex, "excess", "tau_ex_s", problems, false, 1.6e-6);
    if (excess.r_peak < 0.0) problems.add("excess.r_peak", "must be >= 0");
    if (excess.t_ex <= 0.0) problems.add("excess.t_ex_s", "must be > 0");
    if (excess.tau_ex <= 0.0) problems.add("excess.tau_ex_s", "must be > 0");
    config.excess = excess;
  }

  if (root.contains("sweep")) {
    const json& sw = root["sweep"];
    check_keys(sw, "sweep",
               {"probe", "freq_start_hz", "freq_stop_hz", "points", "c_values", "powers_w"},
               problems);
    if (sw.contains("probe")) {
      const std::string p = sw["probe"].is_string() ? sw["probe"].get<std::string>() : "";
      if (p == "microwave")
        config.sweep.probe = ProbeMode::Microwave;
      else if (p == "stokes")
        config.sweep.probe = ProbeMode::Stokes;
      else if (p == "anti_stokes")
        config.sweep.probe = ProbeMode::AntiStokes;
      else
        problems.add("sweep.probe", "must be microwave|stokes|anti_stokes");
    }
    config.sweep.freq_start =
        hz_to_angular(get_number(sw, "sweep", "freq_start_hz", problems, false));
    config.sweep.freq_stop =
        hz_to_angular(get_number(sw, "sweep", "freq_stop_hz", problems, false));
    config.sweep.points =
        static_cast<int>(get_number(sw, "sweep", "points", problems, false, 201));
    if (config.sweep.points < 2) problems.add("sweep.points", "must be >= 2");
    for (const char* key : {"c_values", "powers_w"}) {
      if (!sw.contains(key)) continue;
      if (!sw[key].is_array()) {
        problems.add(std::string("sweep.") + key, "expected an array of numbers");
        continue;
      }
      auto& target = std::string(key) == "c_values" ? config.sweep.c_values
                                                    : config.sweep.powers_w;
      for (const auto& v : sw[key]) {
        if (!v.is_number()) {
          problems.add(std::string("sweep.") + key, "expected an array of numbers");
          break;
        }
        target.push_back(v.get<double>());
      }
    }
  }

  if (root.contains("detection")) {
    const json& det = root["detection"];
    check_keys(det, "detection",
               {"if_freq_hz", "sample_rate_hz", "gain", "noise_std", "seed", "repeats",
                "ddc_window_s"},
               problems);
    config.detection.if_freq =
        hz_to_angular(get_number(det, "detection", "if_freq_hz", problems, false, 40e6));
    config.detection.sample_rate =
        get_number(det, "detection", "sample_rate_hz", problems, false, 1e9);
    config.detection.gain = get_number(det, "detection", "gain", problems, false, 1.0);
    config.detection.noise_std =
        get_number(det, "detection", "noise_std", problems, false, 0.0);
    config.detection.seed = static_cast<std::uint64_t>(
        get_number(det, "detection", "seed", problems, false, 1.0));
    config.detection.repeats =
        static_cast<int>(get_number(det, "detection", "repeats", problems, false, 1.0));
    config.detection.ddc_window =
        get_number(det, "detection", "ddc_window_s", problems, false, 250e-9);
    if (config.detection.repeats < 1) problems.add("detection.repeats", "must be >= 1");
  }

  if (root.contains("outputs")) {
    const json& out = root["outputs"];
    check_keys(out, "outputs", {"directory"}, problems);
    if (out.contains("directory")) {
      if (out["directory"].is_string())
        config.output_dir = out["directory"].get<std::string>();
      else
        problems.add("outputs.directory", "expected a string");
    }
  }

  if (problems.list.empty()) {
    const ValidationReport report = validate_config(config.system, config.pump.g_enhanced);
    for (const auto& issue : report.issues)
      if (issue.severity == ValidationIssue::Severity::Error)
        problems.add("system." + issue.field, issue.message);
  }

  if (!problems.list.empty()) {
    std::ostringstream what;
    what << "invalid config " << origin << " (" << problems.list.size() << " problem"
         << (problems.list.size() == 1 ? "" : "s") << ")";
    throw ConfigError(what.str(), problems.list);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'", {path + ": cannot open"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string system_config_to_json(const SystemConfig& cfg) {
  json mode_json;
  auto mode = [](const ModeSpec& m) {
    return json{{"kappa_hz", angular_to_hz(m.kappa_total)},
                {"kappa_ext_hz", angular_to_hz(m.kappa_ext)},
                {"detuning_hz", angular_to_hz(m.detuning)}};
  };
  json out{{"stokes", mode(cfg.stokes)},
           {"pump", mode(cfg.pump_mode)},
           {"anti_stokes", mode(cfg.anti_stokes)},
           {"stokes_tm", mode(cfg.stokes_tm)},
           {"anti_stokes_tm", mode(cfg.anti_stokes_tm)},
           {"microwave", mode(cfg.microwave)},
           {"g0_hz", angular_to_hz(cfg.g0)},
           {"j_s_hz", angular_to_hz(cfg.j_s)},
           {"j_as_hz", angular_to_hz(cfg.j_as)},
           {"configuration", to_string(cfg.configuration)}};
  return out.dump(2);
}

}  // namespace ceo::io
