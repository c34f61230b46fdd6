#include "ceo/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ceo/constants.hpp"
#include "ceo/errors.hpp"

namespace ceo {

void PulseSpec::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("PulseSpec: duration must be positive");
  if (rise_time < 0.0) throw std::invalid_argument("PulseSpec: rise_time must be >= 0");
  if (shape == PulseShape::SmoothedRectangular && !(rise_time < 0.5 * duration))
    throw std::invalid_argument("PulseSpec: rise_time must be < duration/2");
  if (peak_power < 0.0) throw std::invalid_argument("PulseSpec: peak_power must be >= 0");
}

double PulseSpec::power_at(double t) const {
  const double x = t - t_start;
  if (x < 0.0 || x > duration) return 0.0;
  if (shape == PulseShape::Rectangular || rise_time <= 0.0) return peak_power;
  // raised-cosine edges inside the on-interval
  if (x < rise_time) return peak_power * 0.5 * (1.0 - std::cos(kTwoPi * 0.5 * x / rise_time));
  if (x > duration - rise_time) {
    const double y = (duration - x) / rise_time;
    return peak_power * 0.5 * (1.0 - std::cos(kTwoPi * 0.5 * y));
  }
  return peak_power;
}

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (n == 0) throw std::invalid_argument("TimeGrid: empty grid");
}

std::size_t TimeGrid::nearest_index(double t) const {
  if (n == 0) return 0;
  const double x = (t - t0) / dt;
  if (x <= 0.0) return 0;
  const auto i = static_cast<std::size_t>(x + 0.5);
  return std::min(i, n - 1);
}

void RealTrace::validate() const {
  grid.validate();
  if (samples.size() != grid.n) throw std::invalid_argument("RealTrace: size mismatch");
}

void ComplexTrace::validate() const {
  grid.validate();
  if (samples.size() != grid.n) throw std::invalid_argument("ComplexTrace: size mismatch");
}

double RealTrace::at(double t) const {
  if (samples.empty()) return 0.0;
  const double x = (t - grid.t0) / grid.dt;
  if (x <= 0.0) return samples.front();
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= samples.size()) return samples.back();
  const double frac = x - static_cast<double>(i);
  return samples[i] + frac * (samples[i + 1] - samples[i]);
}

RealTrace pump_loading(const SystemConfig& cfg, const PumpDrive& drive,
                       const PulseSpec& pulse, const TimeGrid& grid) {
  pulse.validate();
  grid.validate();
  const double kappa = cfg.pump_mode.kappa_total;
  const double kappa_ext = cfg.pump_mode.kappa_ext;
  if (!(kappa > 0.0)) throw std::domain_error("pump_loading: pump mode loss must be positive");
  if (grid.dt > 0.05 / kappa) {
    std::ostringstream msg;
    msg << "pump_loading: grid dt = " << grid.dt << " s does not resolve the pump mode"
        << " (need dt <= " << 0.05 / kappa << " s)";
    throw ConfigurationError(msg.str());
  }
  if (!(drive.wavelength > 0.0))
    throw std::domain_error("pump_loading: pump wavelength must be positive");

  const double omega_p = kTwoPi * kSpeedOfLight / drive.wavelength;
  const double sqrt_kex = std::sqrt(kappa_ext);
  // input amplitude in sqrt(photon flux): |s_in|^2 = P(t)/(hbar omega_p)
  auto input = [&](double t) { return std::sqrt(pulse.power_at(t) / (kHbar * omega_p)); };

  RealTrace trace;
  trace.grid = grid;
  trace.kind = TraceKind::PhotonNumber;
  trace.samples.resize(grid.n);

  // integrating-factor update, exact for input held constant over the step
  // (midpoint-sampled); rectangular edges aligned to grid nodes incur no error
  const double h = grid.dt;
  const double lambda = 0.5 * kappa;
  const double decay = std::exp(-lambda * h);
  const double phi = (1.0 - decay) / lambda;
  double a = 0.0;
  trace.samples[0] = 0.0;
  for (std::size_t i = 1; i < grid.n; ++i) {
    const double drive_mid = sqrt_kex * input(grid.time(i - 1) + 0.5 * h);
    a = decay * a + phi * drive_mid;
    trace.samples[i] = a * a;
  }
  return trace;
}

RealTrace coupling_trace(double g0, const RealTrace& photon_number) {
  photon_number.validate();
  if (g0 < 0.0) throw std::domain_error("coupling_trace: g0 must be non-negative");
  RealTrace g;
  g.grid = photon_number.grid;
  g.kind = TraceKind::Coupling;
  g.samples.resize(photon_number.samples.size());
  for (std::size_t i = 0; i < g.samples.size(); ++i)
    g.samples[i] = g0 * std::sqrt(std::max(photon_number.samples[i], 0.0));
  return g;
}

Timeline make_timeline(const SystemConfig& cfg, RealTrace coupling) {
  coupling.validate();
  const ValidationReport report = validate_config(cfg);
  if (!report.valid())
    throw std::domain_error("make_timeline: invalid configuration:\n" + report.to_string());
  return Timeline{cfg, std::move(coupling), std::nullopt};
}

void inject_excess_backaction(Timeline& timeline, ExcessBackaction model) {
  if (!model.delta_omega_e) model.delta_omega_e = [](double) { return 0.0; };
  if (!model.delta_kappa_e) model.delta_kappa_e = [](double) { return 0.0; };
  timeline.excess = std::move(model);
}

ExcessBackaction delayed_backaction_profile(double r_peak, double pulse_end, double t_ex,
                                            double tau_ex, double kappa_e,
                                            double kappa_e_ext) {
  if (!(r_peak > 1.0)) throw std::domain_error("delayed_backaction_profile: r_peak <= 1");
  if (!(t_ex > 0.0) || !(tau_ex > 0.0))
    throw std::domain_error("delayed_backaction_profile: time constants must be positive");

  auto target_r = [=](double t) {
    if (t < pulse_end) return 1.0;
    const double t_bounce = pulse_end + t_ex;
    if (t < t_bounce) {
      const double x = (t - pulse_end) / t_ex;  // smooth sin^2 ramp to the bounce
      const double s = std::sin(0.25 * kTwoPi * x);
      return 1.0 + (r_peak - 1.0) * s * s;
    }
    return 1.0 + (r_peak - 1.0) * std::exp(-(t - t_bounce) / tau_ex);
  };

  ExcessBackaction model;
  model.delta_omega_e = [=](double t) {
    const double r = target_r(t);
    if (r <= 1.0) return 0.0;
    return onres_shift_for_reflection(r, kappa_e, kappa_e_ext);
  };
  model.delta_kappa_e = [](double) { return 0.0; };
  return model;
}

namespace {

double max_system_rate(const SystemConfig& cfg, double g_max, double omega) {
  double rate = std::abs(omega);
  for (const ModeSpec* mode : {&cfg.stokes, &cfg.anti_stokes, &cfg.stokes_tm,
                               &cfg.anti_stokes_tm, &cfg.microwave}) {
    rate = std::max(rate, mode->kappa_total);
    rate = std::max(rate, std::abs(mode->detuning));
  }
  return std::max({rate, cfg.j_s, cfg.j_as, g_max});
}

}  // namespace

PropagationResult propagate(const Timeline& timeline, ProbeMode probe, double probe_detuning,
                            cplx probe_amplitude, const PropagationOptions& options) {
  timeline.coupling.validate();
  const SystemConfig& cfg = timeline.cfg;
  const ModeSpec& mode = probe_mode_spec(cfg, probe);
  if (!(mode.kappa_ext > 0.0))
    throw std::domain_error("propagate: probe mode has no external coupling");

  const double t_start = options.t_start;
  const double t_end = options.t_end > 0.0 ? options.t_end : timeline.coupling.grid.t_end();
  if (!(t_end > t_start)) throw std::invalid_argument("propagate: empty time span");
  const double sample_dt = options.sample_dt;
  if (!(sample_dt > 0.0)) throw std::invalid_argument("propagate: sample_dt must be positive");

  double g_max = 0.0;
  for (double g : timeline.coupling.samples) g_max = std::max(g_max, g);

  double dt = options.dt;
  if (dt <= 0.0) {
    const double rate = max_system_rate(cfg, g_max, probe_detuning);
    dt = 0.02 / rate;
    if (probe_detuning != 0.0)
      dt = std::min(dt, 1.0 / (40.0 * std::abs(probe_detuning) / kTwoPi));
  }
  const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(sample_dt / dt)));
  const double h = sample_dt / static_cast<double>(substeps);

  const auto n_samples =
      static_cast<std::size_t>(std::floor((t_end - t_start) / sample_dt + 1e-9)) + 1;

  // Base generator at g = 0; time dependence touches 8 coupling entries and,
  // with excess injection, the two microwave diagonals.
  Matrix10 a0 = build_system_matrix(cfg, 0.0, 0.0);
  const cplx de8 = a0(8, 8);
  const cplx de9 = a0(9, 9);
  const bool has_excess = timeline.excess.has_value();
  Matrix10 a = a0;

  auto load_generator = [&](double t) {
    const double g = timeline.coupling.at(t);
    const cplx ig(0.0, g);
    a(0, 9) = ig;
    a(1, 8) = -ig;
    a(2, 8) = ig;
    a(3, 9) = -ig;
    a(8, 1) = ig;
    a(8, 2) = ig;
    a(9, 0) = -ig;
    a(9, 3) = -ig;
    if (has_excess) {
      const double dw = timeline.excess->delta_omega_e(t);
      const double dk = timeline.excess->delta_kappa_e(t);
      if (cfg.microwave.kappa_total + dk <= 0.0) {
        std::ostringstream msg;
        msg << "propagate: injected linewidth change drives kappa_e non-positive at t = "
            << t << " s";
        throw std::domain_error(msg.str());
      }
      a(8, 8) = de8 + cplx(0.5 * dk, dw);
      a(9, 9) = de9 + cplx(0.5 * dk, -dw);
    }
  };

  const int row = probe_row(probe);
  const cplx b_amp = std::sqrt(mode.kappa_ext) * probe_amplitude;
  auto drive = [&](double t) {
    return b_amp * std::exp(cplx(0.0, -probe_detuning * (t - t_start)));
  };

  PropagationResult result;
  result.grid = TimeGrid{sample_dt, t_start, n_samples};
  result.envelopes.resize(10, static_cast<Eigen::Index>(n_samples));
  result.probe_detuning = probe_detuning;
  result.probe_amplitude = probe_amplitude;
  result.probe = probe;

  Vector10 state = Vector10::Zero();
  Vector10 k1, k2, k3, k4, tmp;
  const double scale = std::max(std::abs(probe_amplitude), 1e-300);
  const double bound = options.instability_factor * scale;

  auto rhs = [&](const Vector10& d, double t, Vector10& out) {
    out.noalias() = -(a * d);
    out(row) += drive(t);
  };

  result.envelopes.col(0) = state;
  double t = t_start;
  for (std::size_t i = 1; i < n_samples; ++i) {
    for (std::size_t s = 0; s < substeps; ++s) {
      // generator is frozen per RK4 substage time, matching g(t) resolution
      load_generator(t);
      rhs(state, t, k1);
      tmp = state + (0.5 * h) * k1;
      load_generator(t + 0.5 * h);
      rhs(tmp, t + 0.5 * h, k2);
      tmp = state + (0.5 * h) * k2;
      rhs(tmp, t + 0.5 * h, k3);
      tmp = state + h * k3;
      load_generator(t + h);
      rhs(tmp, t + h, k4);
      state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
    double amp_max = 0.0;
    for (int c = 0; c < 10; ++c) amp_max = std::max(amp_max, std::abs(state(c)));
    if (!(amp_max < bound) || !std::isfinite(amp_max)) {
      std::ostringstream msg;
      msg << "propagate: state exceeded " << options.instability_factor
          << "x the input scale at t = " << t << " s (parametric instability)";
      throw InstabilityError(t, msg.str());
    }
    result.envelopes.col(static_cast<Eigen::Index>(i)) = state;
  }
  return result;
}

ComplexTrace output_envelope(const PropagationResult& result, const SystemConfig& cfg,
                             bool derotate) {
  const ModeSpec& mode = probe_mode_spec(cfg, result.probe);
  const double sqrt_kex = std::sqrt(mode.kappa_ext);
  const int row = probe_row(result.probe);

  ComplexTrace out;
  out.grid = result.grid;
  out.kind = TraceKind::ComplexEnvelope;
  out.samples.resize(result.grid.n);
  for (std::size_t i = 0; i < result.grid.n; ++i) {
    const double t = result.grid.time(i) - result.grid.t0;
    const cplx rot = std::exp(cplx(0.0, -result.probe_detuning * t));
    const cplx a_in = result.probe_amplitude * rot;
    const cplx a_out = a_in - sqrt_kex * result.envelopes(row, static_cast<Eigen::Index>(i));
    out.samples[i] = derotate ? a_out / rot : a_out;
  }
  return out;
}

}  // namespace ceo
