#include "ceo/fit/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "ceo/response.hpp"
#include "ceo/rng.hpp"

namespace ceo::fit {

NoiseModel NoiseModel::from_snr_db(double snr_db) {
  return NoiseModel{std::pow(10.0, -snr_db / 20.0)};
}

SyntheticStationarySweep generate_stationary_sweep(const SystemConfig& cfg,
                                                   std::span<const double> c_values,
                                                   std::span<const double> omega_grid,
                                                   ProbeMode probe, const NoiseModel& noise,
                                                   std::uint64_t seed) {
  if (c_values.empty())
    throw std::invalid_argument("generate_stationary_sweep: empty C list");

  SyntheticStationarySweep sweep;
  sweep.cfg = cfg;
  sweep.probe = probe;
  sweep.seed = seed;
  GaussianSampler sampler(seed);

  for (double c : c_values) {
    const double g = coupling_for_cooperativity(cfg, c);
    Spectrum spectrum = spectrum_sweep(cfg, g, omega_grid, probe);
    if (noise.relative_sigma > 0.0) {
      spectrum.sigma.reserve(spectrum.r_values.size());
      for (double& r : spectrum.r_values) {
        spectrum.sigma.push_back(noise.relative_sigma * r);
        r *= 1.0 + noise.relative_sigma * sampler();
      }
      spectrum.s_values.clear();  // noisy data carries power only
    }
    sweep.spectra.push_back(std::move(spectrum));
    sweep.c_values.push_back(c);
    sweep.g_values.push_back(g);
    if (cfg.configuration != PumpConfiguration::Symmetric)
      sweep.dba.push_back(dba_shifts(cfg, g));
  }
  return sweep;
}

std::vector<Spectrum> generate_microwave_shift_spectra(double kappa_e, double kappa_e_ext,
                                                       std::span<const DbaShift> shifts,
                                                       std::span<const double> omega_grid,
                                                       const NoiseModel& noise,
                                                       std::uint64_t seed) {
  if (!(kappa_e > 0.0) || !(kappa_e_ext > 0.0) || kappa_e_ext > kappa_e)
    throw std::invalid_argument("generate_microwave_shift_spectra: bad rates");
  GaussianSampler sampler(seed);
  std::vector<Spectrum> spectra;
  for (const DbaShift& shift : shifts) {
    Spectrum s;
    s.frequencies.assign(omega_grid.begin(), omega_grid.end());
    s.validate();
    s.r_values.resize(omega_grid.size());
    const double kappa_on = kappa_e + shift.delta_kappa_e;
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
      const double w = omega_grid[i];
      const cplx on = 1.0 - kappa_e_ext / cplx(0.5 * kappa_on, -(w - shift.delta_omega_e));
      const cplx off = 1.0 - kappa_e_ext / cplx(0.5 * kappa_e, -w);
      double value = std::norm(on) / std::norm(off);
      if (noise.relative_sigma > 0.0) {
        s.sigma.push_back(noise.relative_sigma * value);
        value *= 1.0 + noise.relative_sigma * sampler();
      }
      s.r_values[i] = value;
    }
    spectra.push_back(std::move(s));
  }
  return spectra;
}

Spectrum generate_reflection_spectrum(const SystemConfig& cfg, ProbeMode probe,
                                      std::span<const double> omega_grid,
                                      const NoiseModel& noise, std::uint64_t seed) {
  Spectrum spectrum;
  spectrum.frequencies.assign(omega_grid.begin(), omega_grid.end());
  spectrum.validate();
  spectrum.r_values.resize(omega_grid.size());
  GaussianSampler sampler(seed);
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    const cplx s = reflection_off(cfg, omega_grid[i], probe);
    double value = std::norm(s);
    if (noise.relative_sigma > 0.0) value *= 1.0 + noise.relative_sigma * sampler();
    spectrum.r_values[i] = value;
  }
  return spectrum;
}

}  // namespace ceo::fit
