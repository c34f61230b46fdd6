#include "ceo/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ceo {

const char* to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::Stokes: return "stokes";
    case ModeLabel::Pump: return "pump";
    case ModeLabel::AntiStokes: return "anti_stokes";
    case ModeLabel::StokesTm: return "stokes_tm";
    case ModeLabel::AntiStokesTm: return "anti_stokes_tm";
    case ModeLabel::Microwave: return "microwave";
  }
  return "?";
}

const char* to_string(PumpConfiguration cfg) {
  switch (cfg) {
    case PumpConfiguration::Symmetric: return "symmetric";
    case PumpConfiguration::StokesCase: return "stokes";
    case PumpConfiguration::AntiStokesCase: return "anti_stokes";
  }
  return "?";
}

const char* to_string(ProbeMode probe) {
  switch (probe) {
    case ProbeMode::Stokes: return "stokes";
    case ProbeMode::AntiStokes: return "anti_stokes";
    case ProbeMode::Microwave: return "microwave";
  }
  return "?";
}

double cooperativity(double g, double kappa_o, double kappa_e) {
  if (kappa_o <= 0.0 || kappa_e <= 0.0)
    throw std::domain_error("cooperativity: loss rates must be positive");
  if (g < 0.0) throw std::domain_error("cooperativity: g must be non-negative");
  return 4.0 * g * g / (kappa_o * kappa_e);
}

double intracavity_pump_photons(double power, double wavelength, double kappa_total,
                                double kappa_ext) {
  if (power < 0.0) throw std::domain_error("intracavity_pump_photons: negative power");
  if (wavelength <= 0.0)
    throw std::domain_error("intracavity_pump_photons: wavelength must be positive");
  if (kappa_total <= 0.0)
    throw std::domain_error("intracavity_pump_photons: kappa_total must be positive");
  if (kappa_ext < 0.0 || kappa_ext > kappa_total)
    throw std::domain_error("intracavity_pump_photons: kappa_ext outside [0, kappa_total]");
  const double omega_p = kTwoPi * kSpeedOfLight / wavelength;
  return 4.0 * kappa_ext * power / (kHbar * omega_p * kappa_total * kappa_total);
}

double enhanced_coupling(double g0, double photon_number) {
  if (photon_number < 0.0)
    throw std::domain_error("enhanced_coupling: photon number must be non-negative");
  return g0 * std::sqrt(photon_number);
}

PumpDrive make_pump_drive(const SystemConfig& cfg, double power, double wavelength) {
  PumpDrive drive;
  drive.peak_power = power;
  drive.wavelength = wavelength;
  drive.photon_number = intracavity_pump_photons(power, wavelength, cfg.pump_mode.kappa_total,
                                                 cfg.pump_mode.kappa_ext);
  drive.g_enhanced = enhanced_coupling(cfg.g0, drive.photon_number);
  return drive;
}

double coupling_for_cooperativity(const SystemConfig& cfg, double c_value) {
  if (c_value < 0.0) throw std::domain_error("coupling_for_cooperativity: C must be >= 0");
  return 0.5 * std::sqrt(c_value * cfg.active_optical_kappa() * cfg.microwave.kappa_total);
}

bool ValidationReport::valid() const {
  for (const auto& issue : issues)
    if (issue.severity == ValidationIssue::Severity::Error) return false;
  return true;
}

bool ValidationReport::has_warnings() const {
  for (const auto& issue : issues)
    if (issue.severity == ValidationIssue::Severity::Warning) return true;
  return false;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << (issue.severity == ValidationIssue::Severity::Error ? "error" : "warning") << " ["
        << issue.field << "]: " << issue.message << "\n";
  }
  return out.str();
}

namespace {

void check_mode(const ModeSpec& mode, const char* name, std::vector<ValidationIssue>& issues) {
  using Severity = ValidationIssue::Severity;
  if (!(mode.kappa_total > 0.0))
    issues.push_back({Severity::Error, std::string(name) + ".kappa_total",
                      "total loss rate must be positive"});
  if (mode.kappa_ext < 0.0)
    issues.push_back({Severity::Error, std::string(name) + ".kappa_ext",
                      "external coupling must be non-negative"});
  if (mode.kappa_ext > mode.kappa_total)
    issues.push_back({Severity::Error, std::string(name) + ".kappa_ext",
                      "external coupling exceeds total loss"});
  if (!std::isfinite(mode.detuning))
    issues.push_back({Severity::Error, std::string(name) + ".detuning", "must be finite"});
}

}  // namespace

ValidationReport validate_config(const SystemConfig& cfg, double g) {
  using Severity = ValidationIssue::Severity;
  ValidationReport report;
  auto& issues = report.issues;

  check_mode(cfg.stokes, "stokes", issues);
  check_mode(cfg.pump_mode, "pump", issues);
  check_mode(cfg.anti_stokes, "anti_stokes", issues);
  check_mode(cfg.stokes_tm, "stokes_tm", issues);
  check_mode(cfg.anti_stokes_tm, "anti_stokes_tm", issues);
  check_mode(cfg.microwave, "microwave", issues);

  if (cfg.g0 < 0.0) issues.push_back({Severity::Error, "g0", "must be non-negative"});
  if (cfg.j_s < 0.0) issues.push_back({Severity::Error, "j_s", "must be non-negative"});
  if (cfg.j_as < 0.0) issues.push_back({Severity::Error, "j_as", "must be non-negative"});

  switch (cfg.configuration) {
    case PumpConfiguration::Symmetric:
      if (cfg.j_s != 0.0 || cfg.j_as != 0.0)
        issues.push_back({Severity::Error, "configuration",
                          "symmetric configuration requires j_s = j_as = 0"});
      break;
    case PumpConfiguration::StokesCase:
      if (cfg.j_s != 0.0)
        issues.push_back({Severity::Error, "configuration", "Stokes case requires j_s = 0"});
      if (!(cfg.j_as > 0.0))
        issues.push_back({Severity::Error, "configuration", "Stokes case requires j_as > 0"});
      break;
    case PumpConfiguration::AntiStokesCase:
      if (cfg.j_as != 0.0)
        issues.push_back(
            {Severity::Error, "configuration", "anti-Stokes case requires j_as = 0"});
      if (!(cfg.j_s > 0.0))
        issues.push_back(
            {Severity::Error, "configuration", "anti-Stokes case requires j_s > 0"});
      break;
  }

  if (cfg.configuration == PumpConfiguration::StokesCase && g > 0.0 &&
      cfg.stokes.kappa_total > 0.0 && cfg.microwave.kappa_total > 0.0) {
    const double c = cooperativity(g, cfg.stokes.kappa_total, cfg.microwave.kappa_total);
    if (c >= 1.0) {
      std::ostringstream msg;
      msg << "parametric instability: Stokes-case cooperativity C = " << c << " >= 1";
      issues.push_back({Severity::Warning, "g", msg.str()});
    }
  }
  return report;
}

}  // namespace ceo
