#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ceo/constants.hpp"
#include "ceo/detection.hpp"
#include "ceo/errors.hpp"
#include "ceo/fit/recipes.hpp"
#include "ceo/io/config.hpp"
#include "ceo/io/csv.hpp"
#include "ceo/io/report.hpp"
#include "ceo/model.hpp"
#include "ceo/response.hpp"
#include "ceo/time_domain.hpp"

namespace fs = std::filesystem;
using namespace ceo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitFitNonconvergence = 3;

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return io::digest(buffer.str());
}

fs::path resolve_out_dir(const io::RunConfig& config, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CEO_OUT_DIR"); env && *env) return env;
  return config.output_dir;
}

io::Metadata base_metadata(const io::RunConfig& config, const std::string& command) {
  return {{"tool", std::string("ceosim ") + kVersion},
          {"command", command},
          {"config_digest", config.digest},
          {"freq_unit", "Hz (nu = omega/2pi)"}};
}

ProbeMode parse_probe(const std::string& text, ProbeMode fallback) {
  if (text.empty()) return fallback;
  if (text == "microwave") return ProbeMode::Microwave;
  if (text == "stokes") return ProbeMode::Stokes;
  if (text == "anti_stokes") return ProbeMode::AntiStokes;
  throw std::invalid_argument("unknown probe '" + text + "'");
}

std::vector<double> probe_grid(const io::RunConfig& config, ProbeMode probe) {
  io::SweepSettings sweep = config.sweep;
  if (sweep.freq_start == 0.0 && sweep.freq_stop == 0.0) {
    const double kappa = probe_mode_spec(config.system, probe).kappa_total;
    sweep.freq_start = -3.0 * kappa;
    sweep.freq_stop = 3.0 * kappa;
  }
  return sweep.omega_grid();
}

double resolve_coupling(const io::RunConfig& config, std::optional<double> c_value,
                        std::optional<double> power) {
  if (c_value) return coupling_for_cooperativity(config.system, *c_value);
  if (power) {
    const double n = intracavity_pump_photons(*power, config.pump.wavelength,
                                              config.system.pump_mode.kappa_total,
                                              config.system.pump_mode.kappa_ext);
    return enhanced_coupling(config.system.g0, n);
  }
  return config.pump.g_enhanced;
}

int cmd_validate(const std::string& config_path) {
  const io::RunConfig config = io::load_config(config_path);
  const ValidationReport report = validate_config(config.system, config.pump.g_enhanced);
  if (report.issues.empty()) {
    std::cout << "ok: " << config_path << " (digest " << config.digest << ")\n";
  } else {
    std::cout << report.to_string();
  }
  return report.valid() ? kExitOk : kExitValidation;
}

int cmd_simulate(const std::string& config_path, const std::string& probe_flag,
                 std::optional<double> c_value, std::optional<double> power,
                 const std::string& out_flag, const std::string& out_dir_flag) {
  const io::RunConfig config = io::load_config(config_path);
  const ProbeMode probe = parse_probe(probe_flag, config.sweep.probe);
  const double g = resolve_coupling(config, c_value, power);
  const auto grid = probe_grid(config, probe);

  const Spectrum spectrum = spectrum_sweep(config.system, g, grid, probe);

  const fs::path dir = resolve_out_dir(config, out_dir_flag);
  fs::create_directories(dir);
  const fs::path out = out_flag.empty() ? dir / "spectrum.csv" : fs::path(out_flag);

  io::Metadata meta = base_metadata(config, "simulate");
  meta.emplace_back("probe", to_string(probe));
  meta.emplace_back("g_hz", io::format_double(angular_to_hz(g)));
  meta.emplace_back("cooperativity",
                    io::format_double(cooperativity(g, config.system.active_optical_kappa(),
                                                    config.system.microwave.kappa_total)));
  io::write_spectrum_csv(out.string(), spectrum, meta);
  std::cout << "wrote " << out.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& probe_flag,
              const std::vector<double>& c_list_flag, const std::string& out_dir_flag) {
  const io::RunConfig config = io::load_config(config_path);
  const ProbeMode probe = parse_probe(probe_flag, config.sweep.probe);
  std::vector<double> c_list = c_list_flag.empty() ? config.sweep.c_values : c_list_flag;
  if (c_list.empty())
    throw std::invalid_argument("sweep: no C values (use --c-list or sweep.c_values)");
  const auto grid = probe_grid(config, probe);

  const fs::path dir = resolve_out_dir(config, out_dir_flag);
  fs::create_directories(dir);

  std::vector<DbaShift> shifts;
  for (std::size_t i = 0; i < c_list.size(); ++i) {
    const double g = coupling_for_cooperativity(config.system, c_list[i]);
    const Spectrum spectrum = spectrum_sweep(config.system, g, grid, probe);
    io::Metadata meta = base_metadata(config, "sweep");
    meta.emplace_back("probe", to_string(probe));
    meta.emplace_back("cooperativity", io::format_double(c_list[i]));
    meta.emplace_back("g_hz", io::format_double(angular_to_hz(g)));
    std::ostringstream name;
    name << "spectrum_c" << i << ".csv";
    io::write_spectrum_csv((dir / name.str()).string(), spectrum, meta);

    if (config.system.configuration == PumpConfiguration::Symmetric)
      shifts.push_back({0.0, 0.0});  // back-action evaded by construction
    else
      shifts.push_back(dba_shifts(config.system, g));
  }
  io::write_dba_summary_csv((dir / "dba_summary.csv").string(), c_list, shifts,
                            base_metadata(config, "sweep"));
  std::cout << "wrote " << c_list.size() << " spectra and dba_summary.csv under "
            << dir.string() << "\n";
  return kExitOk;
}

int cmd_pulse(const std::string& config_path, const std::string& probe_flag,
              const std::string& out_dir_flag, double store_dt) {
  const io::RunConfig config = io::load_config(config_path);
  if (!config.pulse)
    throw std::invalid_argument("pulse: config has no pulse section (stationary-only)");
  const PulseSpec& pulse = *config.pulse;
  const ProbeMode probe = parse_probe(probe_flag, config.sweep.probe);
  const SystemConfig& sys = config.system;

  double t_total = pulse.t_end() + std::max({10.0 / sys.microwave.kappa_total,
                                             10.0 / sys.pump_mode.kappa_total, 1e-6});
  if (config.excess)
    t_total = std::max(t_total,
                       pulse.t_end() + config.excess->t_ex + 6.0 * config.excess->tau_ex);

  // pump loading and quasi-static coupling envelope
  const double dt_pump = 0.02 / sys.pump_mode.kappa_total;
  const TimeGrid pump_grid{dt_pump, 0.0, static_cast<std::size_t>(t_total / dt_pump) + 1};
  PumpDrive drive = config.pump;
  drive.peak_power = pulse.peak_power;
  const RealTrace photons = pump_loading(sys, drive, pulse, pump_grid);
  const RealTrace g_t = coupling_trace(sys.g0, photons);

  Timeline timeline = make_timeline(sys, g_t);
  if (config.excess && config.excess->r_peak > 0.0) {
    timeline.excess = delayed_backaction_profile(
        1.0 + config.excess->r_peak, pulse.t_end(), config.excess->t_ex,
        config.excess->tau_ex, sys.microwave.kappa_total, sys.microwave.kappa_ext);
  }

  const auto grid = probe_grid(config, probe);
  const auto& det = config.detection;
  PropagationOptions popt;
  popt.sample_dt = 1.0 / det.sample_rate;
  popt.t_end = t_total;

  // baseline window inside the guaranteed-quiet pre-pulse span
  const double base_t0 = 0.55 * pulse.t_start;
  const double base_t1 = 0.90 * pulse.t_start;

  const auto stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(store_dt * det.sample_rate + 0.5));

  fit::SpectralTimeSeries series;
  series.frequencies = grid;
  RealTrace onres_r;
  double best_onres = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PropagationResult result =
        propagate(timeline, probe, grid[k], cplx(1.0, 0.0), popt);
    const ComplexTrace envelope = output_envelope(result, sys);
    std::vector<RealTrace> repeats;
    for (int rep = 0; rep < det.repeats; ++rep) {
      const std::uint64_t seed = det.seed + 1000003ULL * k + static_cast<std::uint64_t>(rep);
      repeats.push_back(heterodyne_signal(envelope, det.if_freq, det.gain, det.noise_std,
                                          det.sample_rate, seed));
    }
    const RealTrace power = digital_downconvert(repeats, det.if_freq, det.ddc_window);
    const RealTrace r_t = temporal_normalized_reflection(power, base_t0, base_t1);

    if (series.times.empty()) {
      for (std::size_t i = 0; i + 1 < r_t.samples.size(); i += stride)
        series.times.push_back(r_t.grid.time(i));
      series.r.resize(static_cast<Eigen::Index>(grid.size()),
                      static_cast<Eigen::Index>(series.times.size()));
    }
    for (std::size_t c = 0; c < series.times.size(); ++c)
      series.r(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          r_t.samples[c * stride];
    if (std::abs(grid[k]) < best_onres) {
      best_onres = std::abs(grid[k]);
      onres_r = r_t;
    }
  }

  const fs::path dir = resolve_out_dir(config, out_dir_flag);
  fs::create_directories(dir);
  io::Metadata meta = base_metadata(config, "pulse");
  meta.emplace_back("probe", to_string(probe));
  meta.emplace_back("pulse_t_start_s", io::format_double(pulse.t_start));
  meta.emplace_back("pulse_duration_s", io::format_double(pulse.duration));
  io::write_trace_csv((dir / "pump_photons.csv").string(), photons, meta);
  io::write_time_series_csv((dir / "r_matrix.csv").string(), series, meta);
  io::write_trace_csv((dir / "onres_r.csv").string(), onres_r, meta);
  std::cout << "wrote pump_photons.csv, r_matrix.csv, onres_r.csv under " << dir.string()
            << "\n";
  return kExitOk;
}

int fit_exit_code(const fit::FitResult& result) {
  return result.status == fit::FitStatus::MaxIterations ? kExitFitNonconvergence : kExitOk;
}

int cmd_fit(const std::string& recipe, const std::string& config_path,
            const std::vector<std::string>& data_paths, const std::string& probe_flag,
            double pulse_end, const std::string& out_flag, const std::string& out_dir_flag) {
  const io::RunConfig config = io::load_config(config_path);
  if (data_paths.empty()) throw std::invalid_argument("fit: no data files given");

  std::vector<std::pair<std::string, std::string>> inputs{{"config", config.digest}};
  for (const auto& path : data_paths) inputs.emplace_back(path, file_digest(path));

  const fs::path dir = resolve_out_dir(config, out_dir_flag);
  fs::create_directories(dir);
  const fs::path out =
      out_flag.empty() ? dir / (recipe + "_report.json") : fs::path(out_flag);

  auto write = [&](const fit::FitResult& result,
                   const std::vector<std::pair<std::string, double>>& derived) {
    io::write_fit_report(out.string(), recipe, result, derived, inputs);
    std::cout << "wrote " << out.string() << " (" << fit::to_string(result.status) << ")\n";
  };

  if (recipe == "lorentzian") {
    const Spectrum spectrum = io::read_spectrum_csv(data_paths[0]);
    const fit::LorentzianFit fit = fit::lorentzian_reflection_fit(spectrum);
    write(fit.raw, {{"kappa_hz", angular_to_hz(fit.kappa_total)},
                    {"kappa_ext_hz", angular_to_hz(fit.kappa_ext)},
                    {"center_hz", angular_to_hz(fit.center)},
                    {"background", fit.background}});
    return fit_exit_code(fit.raw);
  }
  if (recipe == "split-mode") {
    const Spectrum spectrum = io::read_spectrum_csv(data_paths[0]);
    const fit::SplitModeFit fit = fit::split_mode_fit(spectrum);
    write(fit.raw, {{"kappa_te_hz", angular_to_hz(fit.te.kappa_total)},
                    {"kappa_te_ext_hz", angular_to_hz(fit.te.kappa_ext)},
                    {"center_te_hz", angular_to_hz(fit.te.detuning)},
                    {"kappa_tm_hz", angular_to_hz(fit.tm.kappa_total)},
                    {"center_tm_hz", angular_to_hz(fit.tm.detuning)},
                    {"j_hz", angular_to_hz(fit.j)}});
    return fit_exit_code(fit.raw);
  }
  if (recipe == "joint-microwave") {
    std::vector<Spectrum> spectra;
    for (const auto& path : data_paths) spectra.push_back(io::read_spectrum_csv(path));
    const fit::JointMicrowaveFit fit = fit::joint_stationary_microwave_fit(
        spectra, config.system.microwave.kappa_total, config.system.microwave.kappa_ext);
    std::vector<std::pair<std::string, double>> derived{
        {"kappa_e_hz", angular_to_hz(fit.kappa_e)},
        {"kappa_e_ext_hz", angular_to_hz(fit.kappa_e_ext)}};
    for (std::size_t p = 0; p < fit.shifts.size(); ++p) {
      derived.emplace_back("dOmega_hz_" + std::to_string(p),
                           angular_to_hz(fit.shifts[p].delta_omega_e));
      derived.emplace_back("dKappa_hz_" + std::to_string(p),
                           angular_to_hz(fit.shifts[p].delta_kappa_e));
    }
    write(fit.raw, derived);
    return fit_exit_code(fit.raw);
  }
  if (recipe == "joint-optical") {
    std::vector<Spectrum> spectra;
    for (const auto& path : data_paths) spectra.push_back(io::read_spectrum_csv(path));
    const ProbeMode probe = parse_probe(probe_flag, config.sweep.probe);
    const fit::JointOpticalFit fit =
        fit::joint_stationary_optical_fit(spectra, config.system, probe);
    std::vector<std::pair<std::string, double>> derived{
        {"kappa_o_hz", angular_to_hz(fit.kappa_o)},
        {"kappa_o_ext_hz", angular_to_hz(fit.kappa_o_ext)},
        {"delta_s_hz", angular_to_hz(fit.delta_s)},
        {"delta_as_hz", angular_to_hz(fit.delta_as)}};
    for (std::size_t p = 0; p < fit.c_values.size(); ++p)
      derived.emplace_back("c_" + std::to_string(p), fit.c_values[p]);
    write(fit.raw, derived);
    return fit_exit_code(fit.raw);
  }
  if (recipe == "transient") {
    const fit::SpectralTimeSeries series = io::read_time_series_csv(data_paths[0]);
    const ProbeMode probe = parse_probe(probe_flag, config.sweep.probe);
    const fit::TransientFit fit = fit::transient_fit(series, config.system, probe);
    nlohmann::json report{{"tool", "ceosim"},  {"version", kVersion},
                          {"recipe", recipe},  {"times_s", fit.times},
                          {"c", fit.c_of_t},   {"slice_ok", fit.slice_ok}};
    std::vector<double> delta_hz;
    for (double d : fit.delta_of_t) delta_hz.push_back(angular_to_hz(d));
    report["delta_hz"] = delta_hz;
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [k, v] : inputs) in[k] = v;
    report["inputs"] = in;
    std::ofstream stream(out);
    if (!stream) throw std::runtime_error("cannot write '" + out.string() + "'");
    stream << report.dump(2) << "\n";
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
  }
  if (recipe == "delayed-backaction") {
    if (pulse_end <= 0.0)
      throw std::invalid_argument("fit delayed-backaction: --pulse-end is required");
    const RealTrace trace = io::read_trace_csv(data_paths[0]);
    const fit::DelayedBackactionFit fit = fit::delayed_backaction_fit(trace, pulse_end);
    std::vector<std::pair<std::string, double>> derived{
        {"tau_ex_s", fit.tau_ex},
        {"amplitude", fit.amplitude},
        {"bounce_time_s", fit.bounce_time},
        {"bounce_found", fit.t_ex.has_value() ? 1.0 : 0.0}};
    if (fit.t_ex) derived.emplace_back("t_ex_s", *fit.t_ex);
    write(fit.raw, derived);
    return fit_exit_code(fit.raw);
  }
  throw std::invalid_argument("unknown fit recipe '" + recipe + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ceosim - multimode cavity electro-optic simulator and fit toolkit"};
  app.require_subcommand(1);

  std::string config_path, probe_flag, out_flag, out_dir_flag, recipe;
  std::vector<double> c_list;
  std::vector<std::string> data_paths;
  double pulse_end = 0.0;
  double store_dt = 10e-9;
  double c_tmp = 0.0, p_tmp = 0.0;

  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("config", config_path, "config JSON")->required();

  auto* simulate = app.add_subcommand("simulate", "stationary spectrum at one pump level");
  simulate->add_option("config", config_path)->required();
  simulate->add_option("--probe", probe_flag, "microwave|stokes|anti_stokes");
  auto* copt = simulate->add_option("--c-value", c_tmp, "cooperativity");
  auto* powopt = simulate->add_option("--power", p_tmp, "pump power [W]");
  simulate->add_option("--out", out_flag, "output CSV path");
  simulate->add_option("--out-dir", out_dir_flag, "output directory");

  auto* sweep = app.add_subcommand("sweep", "per-C spectra plus DBA summary");
  sweep->add_option("config", config_path)->required();
  sweep->add_option("--probe", probe_flag);
  sweep->add_option("--c-list", c_list, "cooperativity list")->delimiter(',');
  sweep->add_option("--out-dir", out_dir_flag);

  auto* pulse = app.add_subcommand("pulse", "pulsed pipeline: R(omega, t) via DDC");
  pulse->add_option("config", config_path)->required();
  pulse->add_option("--probe", probe_flag);
  pulse->add_option("--out-dir", out_dir_flag);
  pulse->add_option("--store-dt", store_dt, "time resolution of the stored R matrix [s]");

  auto* fitcmd = app.add_subcommand("fit", "run an estimation recipe");
  fitcmd
      ->add_option("recipe", recipe,
                   "lorentzian|split-mode|joint-microwave|joint-optical|transient|"
                   "delayed-backaction")
      ->required();
  fitcmd->add_option("--config", config_path, "config JSON")->required();
  fitcmd->add_option("--data", data_paths, "input CSV file(s)")->required();
  fitcmd->add_option("--probe", probe_flag);
  fitcmd->add_option("--pulse-end", pulse_end, "pulse end time [s] (delayed-backaction)");
  fitcmd->add_option("--out", out_flag, "report path");
  fitcmd->add_option("--out-dir", out_dir_flag);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(config_path);
    if (app.got_subcommand(simulate)) {
      std::optional<double> c_value, power;
      if (copt->count()) c_value = c_tmp;
      if (powopt->count()) power = p_tmp;
      return cmd_simulate(config_path, probe_flag, c_value, power, out_flag, out_dir_flag);
    }
    if (app.got_subcommand(sweep))
      return cmd_sweep(config_path, probe_flag, c_list, out_dir_flag);
    if (app.got_subcommand(pulse))
      return cmd_pulse(config_path, probe_flag, out_dir_flag, store_dt);
    if (app.got_subcommand(fitcmd))
      return cmd_fit(recipe, config_path, data_paths, probe_flag, pulse_end, out_flag,
                     out_dir_flag);
  } catch (const io::ConfigError& err) {
    std::cerr << io::error_json("config", err.what(), err.problems()) << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& err) {
    std::cerr << io::error_json("validation", err.what()) << "\n";
    return kExitValidation;
  } catch (const std::domain_error& err) {
    std::cerr << io::error_json("validation", err.what()) << "\n";
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << io::error_json("runtime", err.what()) << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
