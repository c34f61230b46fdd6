#include "ceo/response.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ceo/errors.hpp"

namespace ceo {

namespace {

constexpr cplx kI{0.0, 1.0};

// kappa/2 - i x
inline cplx chi_inv(double kappa, double x) { return cplx(0.5 * kappa, -x); }

void require_valid(const SystemConfig& cfg) {
  const ValidationReport report = validate_config(cfg);
  if (!report.valid())
    throw std::domain_error("invalid system configuration:\n" + report.to_string());
}

}  // namespace

void Spectrum::validate() const {
  for (size_t i = 1; i < frequencies.size(); ++i)
    if (!(frequencies[i] > frequencies[i - 1]))
      throw std::invalid_argument("Spectrum: frequency axis must be strictly increasing");
  if (!s_values.empty() && s_values.size() != frequencies.size())
    throw std::invalid_argument("Spectrum: S array length mismatch");
  if (!r_values.empty() && r_values.size() != frequencies.size())
    throw std::invalid_argument("Spectrum: R array length mismatch");
  if (!sigma.empty() && sigma.size() != frequencies.size())
    throw std::invalid_argument("Spectrum: sigma array length mismatch");
}

int probe_row(ProbeMode probe) {
  switch (probe) {
    case ProbeMode::Stokes: return kStokesRow;
    case ProbeMode::AntiStokes: return kAntiStokesRow;
    case ProbeMode::Microwave: return kMicrowaveRow;
  }
  return -1;
}

int probe_input_column(ProbeMode probe) {
  switch (probe) {
    case ProbeMode::Stokes: return kStokesInCol;
    case ProbeMode::AntiStokes: return kAntiStokesInCol;
    case ProbeMode::Microwave: return kMicrowaveInCol;
  }
  return -1;
}

const ModeSpec& probe_mode_spec(const SystemConfig& cfg, ProbeMode probe) {
  switch (probe) {
    case ProbeMode::Stokes: return cfg.stokes;
    case ProbeMode::AntiStokes: return cfg.anti_stokes;
    case ProbeMode::Microwave: return cfg.microwave;
  }
  return cfg.microwave;
}

cplx bare_susceptibility(double kappa, double omega) {
  if (!(kappa > 0.0)) throw std::domain_error("bare_susceptibility: kappa must be positive");
  return 1.0 / chi_inv(kappa, omega);
}

Matrix10 build_system_matrix(const SystemConfig& cfg, double g, double omega) {
  require_valid(cfg);
  Matrix10 m = Matrix10::Zero();

  const double ds = cfg.stokes.detuning;
  const double das = cfg.anti_stokes.detuning;
  const double dstm = cfg.stokes_tm.detuning;
  const double dastm = cfg.anti_stokes_tm.detuning;
  const double de = cfg.microwave.detuning;

  m(0, 0) = chi_inv(cfg.stokes.kappa_total, ds + omega);
  m(1, 1) = chi_inv(cfg.stokes.kappa_total, omega - ds);
  m(2, 2) = chi_inv(cfg.anti_stokes.kappa_total, das + omega);
  m(3, 3) = chi_inv(cfg.anti_stokes.kappa_total, omega - das);
  m(4, 4) = chi_inv(cfg.stokes_tm.kappa_total, dstm + omega);
  m(5, 5) = chi_inv(cfg.stokes_tm.kappa_total, omega - dstm);
  m(6, 6) = chi_inv(cfg.anti_stokes_tm.kappa_total, dastm + omega);
  m(7, 7) = chi_inv(cfg.anti_stokes_tm.kappa_total, omega - dastm);
  m(8, 8) = chi_inv(cfg.microwave.kappa_total, de + omega);
  m(9, 9) = chi_inv(cfg.microwave.kappa_total, omega - de);

  const cplx ijs = kI * cfg.j_s;
  const cplx ijas = kI * cfg.j_as;
  const cplx ig = kI * g;

  m(0, 4) = -ijs;
  m(4, 0) = -ijs;
  m(1, 5) = ijs;
  m(5, 1) = ijs;
  m(2, 6) = -ijas;
  m(6, 2) = -ijas;
  m(3, 7) = ijas;
  m(7, 3) = ijas;

  m(0, 9) = ig;
  m(1, 8) = -ig;
  m(2, 8) = ig;
  m(3, 9) = -ig;
  m(8, 1) = ig;
  m(8, 2) = ig;
  m(9, 0) = -ig;
  m(9, 3) = -ig;
  return m;
}

Matrix10x16 build_input_matrix(const SystemConfig& cfg) {
  require_valid(cfg);
  Matrix10x16 l = Matrix10x16::Zero();

  const double s_ex = std::sqrt(cfg.stokes.kappa_ext);
  const double s_0 = std::sqrt(cfg.stokes.kappa_intrinsic());
  const double as_ex = std::sqrt(cfg.anti_stokes.kappa_ext);
  const double as_0 = std::sqrt(cfg.anti_stokes.kappa_intrinsic());
  const double stm = std::sqrt(cfg.stokes_tm.kappa_total);
  const double astm = std::sqrt(cfg.anti_stokes_tm.kappa_total);
  const double e_ex = std::sqrt(cfg.microwave.kappa_ext);
  const double e_0 = std::sqrt(cfg.microwave.kappa_intrinsic());

  l(0, 0) = s_ex;
  l(0, 2) = s_0;
  l(1, 1) = s_ex;
  l(1, 3) = s_0;
  l(2, 4) = as_ex;
  l(2, 6) = as_0;
  l(3, 5) = as_ex;
  l(3, 7) = as_0;
  l(4, 8) = stm;
  l(5, 9) = stm;
  l(6, 10) = astm;
  l(7, 11) = astm;
  l(8, 12) = e_ex;
  l(8, 14) = e_0;
  l(9, 13) = e_ex;
  l(9, 15) = e_0;
  return l;
}

cplx effective_susceptibility_matrix(const SystemConfig& cfg, double g, double omega,
                                     ProbeMode probe) {
  const ModeSpec& mode = probe_mode_spec(cfg, probe);
  if (!(mode.kappa_ext > 0.0))
    throw std::domain_error(std::string("effective_susceptibility_matrix: probe mode '") +
                            to_string(probe) + "' has no external coupling");

  const Matrix10 m = build_system_matrix(cfg, g, omega);
  const double sqrt_kex = std::sqrt(mode.kappa_ext);
  Vector10 rhs = Vector10::Zero();
  rhs(probe_row(probe)) = sqrt_kex;

  Eigen::PartialPivLU<Matrix10> lu(m);
  const auto diag = lu.matrixLU().diagonal();
  double min_pivot = std::abs(diag(0));
  double max_pivot = min_pivot;
  for (int i = 1; i < 10; ++i) {
    const double p = std::abs(diag(i));
    min_pivot = std::min(min_pivot, p);
    max_pivot = std::max(max_pivot, p);
  }
  const double det_mag = std::abs(lu.determinant());

  auto raise = [&](const char* reason) {
    std::ostringstream msg;
    msg << "singular response matrix (" << reason << ") for probe '" << to_string(probe)
        << "' at omega/2pi = " << angular_to_hz(omega) << " Hz";
    throw SingularSystemError(to_string(probe), omega, msg.str());
  };

  if (!(max_pivot > 0.0) || !std::isfinite(max_pivot)) raise("non-finite factorization");
  if (det_mag < 1e-300) raise("vanishing determinant");
  if (min_pivot / max_pivot < 1e-12) raise("pivot collapse");

  const Vector10 x = lu.solve(rhs);
  const cplx a_probe = x(probe_row(probe));
  if (!std::isfinite(a_probe.real()) || !std::isfinite(a_probe.imag()))
    raise("non-finite solution");
  return a_probe / sqrt_kex;
}

namespace {

// Exact chain elimination of the doubled system. The d-values mirror the
// matrix diagonal; suppressed branches fold the TM partner in through
// J^2/d_tm, the microwave line folds both optical branches in through g^2.
struct Chain {
  cplx d0, d1, d2, d3, d4, d5, d6, d7, d8, d9;
  double js2, jas2, g2;

  Chain(const SystemConfig& cfg, double g, double omega) {
    const double ds = cfg.stokes.detuning;
    const double das = cfg.anti_stokes.detuning;
    const double dstm = cfg.stokes_tm.detuning;
    const double dastm = cfg.anti_stokes_tm.detuning;
    const double de = cfg.microwave.detuning;
    d0 = chi_inv(cfg.stokes.kappa_total, ds + omega);
    d1 = chi_inv(cfg.stokes.kappa_total, omega - ds);
    d2 = chi_inv(cfg.anti_stokes.kappa_total, das + omega);
    d3 = chi_inv(cfg.anti_stokes.kappa_total, omega - das);
    d4 = chi_inv(cfg.stokes_tm.kappa_total, dstm + omega);
    d5 = chi_inv(cfg.stokes_tm.kappa_total, omega - dstm);
    d6 = chi_inv(cfg.anti_stokes_tm.kappa_total, dastm + omega);
    d7 = chi_inv(cfg.anti_stokes_tm.kappa_total, omega - dastm);
    d8 = chi_inv(cfg.microwave.kappa_total, de + omega);
    d9 = chi_inv(cfg.microwave.kappa_total, omega - de);
    js2 = cfg.j_s * cfg.j_s;
    jas2 = cfg.j_as * cfg.j_as;
    g2 = g * g;
  }

  cplx chi_e_inv() const { return d8 - g2 / (d1 + js2 / d5) + g2 / (d2 + jas2 / d6); }
  cplx chi_os_inv() const { return d0 + js2 / d4 - g2 / (d9 + g2 / (d3 + jas2 / d7)); }
  cplx chi_oas_inv() const { return d2 + jas2 / d6 + g2 / (d8 - g2 / (d1 + js2 / d5)); }
};

}  // namespace

cplx closed_form_chi_e(const SystemConfig& cfg, double g, double omega) {
  require_valid(cfg);
  return 1.0 / Chain(cfg, g, omega).chi_e_inv();
}

cplx closed_form_chi_o(const SystemConfig& cfg, ProbeMode probe, double g, double omega) {
  require_valid(cfg);
  const Chain chain(cfg, g, omega);
  switch (probe) {
    case ProbeMode::Stokes: return 1.0 / chain.chi_os_inv();
    case ProbeMode::AntiStokes: return 1.0 / chain.chi_oas_inv();
    case ProbeMode::Microwave:
      throw std::domain_error("closed_form_chi_o: probe must be an optical mode");
  }
  return {};
}

cplx reflection(cplx chi_eff, double kappa_total, double kappa_ext) {
  if (!(kappa_total > 0.0) || kappa_ext < 0.0 || kappa_ext > kappa_total)
    throw std::domain_error("reflection: invalid mode rates");
  const double eta = kappa_ext / kappa_total;
  return 1.0 - eta * kappa_total * chi_eff;
}

cplx reflection_off(const SystemConfig& cfg, double omega, ProbeMode probe) {
  const ModeSpec& mode = probe_mode_spec(cfg, probe);
  const Chain chain(cfg, 0.0, omega);
  cplx chi;
  switch (probe) {
    case ProbeMode::Stokes: chi = 1.0 / chain.chi_os_inv(); break;
    case ProbeMode::AntiStokes: chi = 1.0 / chain.chi_oas_inv(); break;
    case ProbeMode::Microwave: chi = 1.0 / chain.chi_e_inv(); break;
  }
  return reflection(chi, mode.kappa_total, mode.kappa_ext);
}

double normalized_reflection(const SystemConfig& cfg, double g, double omega,
                             ProbeMode probe) {
  const ModeSpec& mode = probe_mode_spec(cfg, probe);
  const cplx s_off = reflection_off(cfg, omega, probe);
  if (std::abs(s_off) == 0.0) {
    std::ostringstream msg;
    msg << "normalized_reflection: pump-off reflection vanishes for probe '"
        << to_string(probe) << "' at omega/2pi = " << angular_to_hz(omega)
        << " Hz (critically coupled probe); R is undefined";
    throw std::domain_error(msg.str());
  }
  const cplx chi = effective_susceptibility_matrix(cfg, g, omega, probe);
  const cplx s_on = reflection(chi, mode.kappa_total, mode.kappa_ext);
  const double ratio = std::abs(s_on / s_off);
  return ratio * ratio;
}

DbaShift dba_shifts(PumpConfiguration config, double g, double kappa_o, double kappa_o_tm,
                    double j, double delta_s, double delta_as) {
  if (!(kappa_o > 0.0) || !(kappa_o_tm > 0.0))
    throw std::domain_error("dba_shifts: loss rates must be positive");
  if (config == PumpConfiguration::Symmetric)
    throw std::domain_error("dba_shifts: defined for the Stokes and anti-Stokes cases");

  const double g2 = g * g;
  const double ko2 = kappa_o * kappa_o;
  const double ktm2 = kappa_o_tm * kappa_o_tm;
  const double j2 = j * j;

  // Suppressed branch evaluated at detuning d; shared two-term denominator.
  auto branch = [&](double d) {
    const double d2 = 4.0 * d * d;
    const double den = 8.0 * j2 * (kappa_o * kappa_o_tm - d2) + (d2 + ko2) * (ktm2 + d2) +
                       16.0 * j2 * j2;
    const double omega_term = 4.0 * g2 * d * (ktm2 - 4.0 * j2 + d2) / den;
    const double kappa_term =
        4.0 * g2 * (kappa_o_tm * (kappa_o * kappa_o_tm + 4.0 * j2) + d2 * kappa_o) / den;
    return std::pair<double, double>{omega_term, kappa_term};
  };

  DbaShift shift;
  if (config == PumpConfiguration::StokesCase) {
    const double lor = ko2 + 4.0 * delta_s * delta_s;
    const auto [w2, k2] = branch(delta_as);
    shift.delta_omega_e = 4.0 * g2 * delta_s / lor + w2;
    shift.delta_kappa_e = -4.0 * g2 * kappa_o / lor + k2;
  } else {
    const double lor = ko2 + 4.0 * delta_as * delta_as;
    const auto [w2, k2] = branch(delta_s);
    shift.delta_omega_e = 4.0 * g2 * delta_as / lor + w2;
    shift.delta_kappa_e = 4.0 * g2 * kappa_o / lor - k2;
  }
  return shift;
}

DbaShift dba_shifts(const SystemConfig& cfg, double g) {
  const bool stokes_case = cfg.configuration == PumpConfiguration::StokesCase;
  const double kappa_tm =
      stokes_case ? cfg.anti_stokes_tm.kappa_total : cfg.stokes_tm.kappa_total;
  const double j = stokes_case ? cfg.j_as : cfg.j_s;
  return dba_shifts(cfg.configuration, g, cfg.active_optical_kappa(), kappa_tm, j,
                    cfg.stokes.detuning, cfg.anti_stokes.detuning);
}

double onres_microwave_reflection(double delta_omega_e, double delta_kappa_e, double kappa_e,
                                  double kappa_e_ext) {
  const double kappa_eff = kappa_e + delta_kappa_e;
  if (!(kappa_eff > 0.0))
    throw std::domain_error("onres_microwave_reflection: effective linewidth vanished");
  if (!(kappa_e > 0.0) || kappa_e_ext < 0.0 || kappa_e_ext > kappa_e)
    throw std::domain_error("onres_microwave_reflection: invalid microwave rates");
  const double eta = kappa_e_ext / kappa_e;
  if (eta == 0.5)
    throw std::domain_error(
        "onres_microwave_reflection: critically coupled probe, pump-off reflection is zero");
  const cplx s_on = 1.0 - kappa_e_ext / cplx(0.5 * kappa_eff, delta_omega_e);
  const double ratio = std::abs(s_on) / std::abs(1.0 - 2.0 * eta);
  return ratio * ratio;
}

double onres_shift_for_reflection(double r_target, double kappa_e, double kappa_e_ext) {
  if (!(kappa_e > 0.0) || kappa_e_ext <= 0.0 || kappa_e_ext > kappa_e)
    throw std::domain_error("onres_shift_for_reflection: invalid microwave rates");
  const double eta = kappa_e_ext / kappa_e;
  if (eta == 0.5)
    throw std::domain_error("onres_shift_for_reflection: critically coupled probe");
  const double r_max = 1.0 / ((1.0 - 2.0 * eta) * (1.0 - 2.0 * eta));
  if (r_target < 1.0 || r_target >= r_max)
    throw std::domain_error(
        "onres_shift_for_reflection: target outside the reachable range [1, 1/(1-2eta)^2)");
  // with u = 1/(1 + x^2), x = 2 dOmega/kappa:  R (1-2eta)^2 = 1 - 4 eta (1-eta) u
  const double u =
      (1.0 - r_target * (1.0 - 2.0 * eta) * (1.0 - 2.0 * eta)) / (4.0 * eta * (1.0 - eta));
  const double x2 = 1.0 / u - 1.0;
  return 0.5 * kappa_e * std::sqrt(std::max(x2, 0.0));
}

Spectrum spectrum_sweep(const SystemConfig& cfg, double g, std::span<const double> omega_grid,
                        ProbeMode probe) {
  Spectrum spectrum;
  spectrum.frame = FrequencyFrame::RotatingProbe;
  spectrum.frequencies.assign(omega_grid.begin(), omega_grid.end());
  spectrum.validate();
  spectrum.s_values.resize(omega_grid.size());
  spectrum.r_values.resize(omega_grid.size());

  const ModeSpec& mode = probe_mode_spec(cfg, probe);
  for (size_t i = 0; i < omega_grid.size(); ++i) {
    try {
      const cplx chi = effective_susceptibility_matrix(cfg, g, omega_grid[i], probe);
      spectrum.s_values[i] = reflection(chi, mode.kappa_total, mode.kappa_ext);
      const cplx s_off = reflection_off(cfg, omega_grid[i], probe);
      if (std::abs(s_off) == 0.0)
        throw std::domain_error("pump-off reflection vanishes (critically coupled probe)");
      const double ratio = std::abs(spectrum.s_values[i] / s_off);
      spectrum.r_values[i] = ratio * ratio;
    } catch (const SingularSystemError& err) {
      std::ostringstream msg;
      msg << "spectrum_sweep: grid index " << i << ": " << err.what();
      throw SingularSystemError(err.probe(), err.omega(), msg.str());
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "spectrum_sweep: grid index " << i << " (omega/2pi = "
          << angular_to_hz(omega_grid[i]) << " Hz): " << err.what();
      throw std::runtime_error(msg.str());
    }
  }
  return spectrum;
}

}  // namespace ceo
