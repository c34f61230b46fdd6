#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ceo/constants.hpp"
#include "ceo/model.hpp"

namespace ceo::testing {

// Device values from the characterization tables: all TE modes at
// kappa_o/2pi = 26 MHz with kappa_ext/2pi = 10 MHz, microwave at 10/4 MHz.
inline SystemConfig device_base() {
  SystemConfig cfg;
  const double ko = hz_to_angular(26e6);
  const double kex = hz_to_angular(10e6);
  cfg.stokes = {ko, kex, 0.0, ModeLabel::Stokes};
  cfg.pump_mode = {ko, kex, 0.0, ModeLabel::Pump};
  cfg.anti_stokes = {ko, kex, 0.0, ModeLabel::AntiStokes};
  cfg.stokes_tm = {hz_to_angular(7.6e6), 0.0, 0.0, ModeLabel::StokesTm};
  cfg.anti_stokes_tm = {hz_to_angular(7.6e6), 0.0, 0.0, ModeLabel::AntiStokesTm};
  cfg.microwave = {hz_to_angular(10e6), hz_to_angular(4e6), 0.0, ModeLabel::Microwave};
  cfg.g0 = hz_to_angular(500.0);
  cfg.configuration = PumpConfiguration::Symmetric;
  return cfg;
}

inline SystemConfig symmetric_ideal() { return device_base(); }

// Stokes case: anti-Stokes branch suppressed through its TM partner.
inline SystemConfig stokes_case(double j_as = hz_to_angular(26e6)) {
  SystemConfig cfg = device_base();
  cfg.configuration = PumpConfiguration::StokesCase;
  cfg.j_as = j_as;
  return cfg;
}

inline SystemConfig anti_stokes_case(double j_s = hz_to_angular(26e6)) {
  SystemConfig cfg = device_base();
  cfg.configuration = PumpConfiguration::AntiStokesCase;
  cfg.j_s = j_s;
  return cfg;
}

// Large-J limit standing in for complete sideband suppression.
inline double full_suppression_j(const SystemConfig& cfg) {
  return 1e6 * cfg.stokes.kappa_total;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> grid(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
  return grid;
}

// Random valid configuration for property suites. TM detunings track their TE
// partner; distinct values (as in the split-mode table) are exercised by the
// dedicated fixtures.
inline SystemConfig random_config(std::mt19937_64& rng, PumpConfiguration configuration) {
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };
  auto mode = [&](ModeLabel label) {
    const double kappa = hz_to_angular(uniform(5e6, 40e6));
    const double eta = uniform(0.05, 0.95);
    const double detuning = hz_to_angular(uniform(-10e6, 10e6));
    return ModeSpec{kappa, eta * kappa, detuning, label};
  };
  SystemConfig cfg;
  cfg.stokes = mode(ModeLabel::Stokes);
  cfg.pump_mode = mode(ModeLabel::Pump);
  cfg.anti_stokes = mode(ModeLabel::AntiStokes);
  cfg.stokes_tm = {hz_to_angular(uniform(3e6, 35e6)), 0.0, cfg.stokes.detuning,
                   ModeLabel::StokesTm};
  cfg.anti_stokes_tm = {hz_to_angular(uniform(3e6, 35e6)), 0.0, cfg.anti_stokes.detuning,
                        ModeLabel::AntiStokesTm};
  cfg.microwave = mode(ModeLabel::Microwave);
  cfg.microwave.detuning = 0.0;
  cfg.configuration = configuration;
  if (configuration == PumpConfiguration::StokesCase)
    cfg.j_as = hz_to_angular(uniform(5e6, 40e6));
  if (configuration == PumpConfiguration::AntiStokesCase)
    cfg.j_s = hz_to_angular(uniform(5e6, 40e6));
  return cfg;
}

inline double rel_diff(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace ceo::testing
