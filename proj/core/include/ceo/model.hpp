#pragma once

#include <string>
#include <vector>

#include "ceo/constants.hpp"

namespace ceo {

enum class ModeLabel { Stokes, Pump, AntiStokes, StokesTm, AntiStokesTm, Microwave };

// Pump placement relative to the split (TM-coupled) mode.
//   Symmetric:      J_s = J_as = 0, balanced Stokes/anti-Stokes scattering
//   StokesCase:     J_s = 0, J_as > 0 (anti-Stokes suppressed, TMS active)
//   AntiStokesCase: J_as = 0, J_s > 0 (Stokes suppressed, BS active)
enum class PumpConfiguration { Symmetric, StokesCase, AntiStokesCase };

enum class ProbeMode { Stokes, AntiStokes, Microwave };

const char* to_string(ModeLabel label);
const char* to_string(PumpConfiguration cfg);
const char* to_string(ProbeMode probe);

// One resonator mode. The prism overlap factor is folded into kappa_ext.
struct ModeSpec {
  double kappa_total = 0.0;  // total loss rate [rad/s]
  double kappa_ext = 0.0;    // external coupling rate [rad/s]
  double detuning = 0.0;     // sideband/probe-frame offset from mode resonance [rad/s]
  ModeLabel label = ModeLabel::Stokes;

  double kappa_intrinsic() const { return kappa_total - kappa_ext; }
  double coupling_efficiency() const { return kappa_ext / kappa_total; }  // eta = kappa_ext/kappa
};

// The five-mode electro-optic triplet (Stokes/pump/anti-Stokes TE plus the two
// TM partners) and the microwave mode, with the vacuum coupling and the TE-TM
// hybridization rates.
struct SystemConfig {
  ModeSpec stokes{0, 0, 0, ModeLabel::Stokes};
  ModeSpec pump_mode{0, 0, 0, ModeLabel::Pump};
  ModeSpec anti_stokes{0, 0, 0, ModeLabel::AntiStokes};
  ModeSpec stokes_tm{0, 0, 0, ModeLabel::StokesTm};
  ModeSpec anti_stokes_tm{0, 0, 0, ModeLabel::AntiStokesTm};
  ModeSpec microwave{0, 0, 0, ModeLabel::Microwave};
  double g0 = 0.0;    // vacuum electro-optic coupling rate [rad/s]
  double j_s = 0.0;   // Stokes TE-TM coupling [rad/s]
  double j_as = 0.0;  // anti-Stokes TE-TM coupling [rad/s]
  PumpConfiguration configuration = PumpConfiguration::Symmetric;

  // Optical loss entering the cooperativity: the TE mode carrying the active
  // scattering branch (Stokes for TMS, anti-Stokes for BS).
  double active_optical_kappa() const {
    return configuration == PumpConfiguration::AntiStokesCase ? anti_stokes.kappa_total
                                                              : stokes.kappa_total;
  }
};

// Optical pump drive; photon_number may be supplied directly so fits can treat
// g or C as the free parameter.
struct PumpDrive {
  double peak_power = 0.0;       // [W]
  double wavelength = 1550e-9;   // [m]
  double photon_number = 0.0;    // mean intracavity pump photons
  double g_enhanced = 0.0;       // g = g0 sqrt(n_p) [rad/s]
};

// C = 4 g^2 / (kappa_o kappa_e), with g the pump-enhanced coupling.
double cooperativity(double g, double kappa_o, double kappa_e);

// On-resonance steady-state loading: n_p = 4 kappa_ext P / (hbar omega_p kappa_total^2).
double intracavity_pump_photons(double power, double wavelength, double kappa_total,
                                double kappa_ext);

// g = g0 sqrt(n_p)
double enhanced_coupling(double g0, double photon_number);

PumpDrive make_pump_drive(const SystemConfig& cfg, double power, double wavelength);

// g for a requested cooperativity against cfg's active optical mode.
double coupling_for_cooperativity(const SystemConfig& cfg, double c_value);

struct ValidationIssue {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const;        // no Error-severity issues
  bool has_warnings() const;
  std::string to_string() const;
};

// Report-style invariant check; never throws. A pump-enhanced coupling g may be
// supplied to flag Stokes-case C >= 1 as a parametric-instability warning.
ValidationReport validate_config(const SystemConfig& cfg, double g = 0.0);

}  // namespace ceo
