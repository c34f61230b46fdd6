#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ceo/model.hpp"
#include "ceo/spectrum.hpp"

namespace ceo::fit {

// Multiplicative Gaussian noise on R: R -> R (1 + sigma xi). sigma = 0 gives
// the exact forward model. An SNR in dB maps to sigma = 10^(-snr/20).
struct NoiseModel {
  double relative_sigma = 0.0;
  static NoiseModel from_snr_db(double snr_db);
};

struct SyntheticStationarySweep {
  std::vector<Spectrum> spectra;       // one per C value, r_values filled
  std::vector<double> c_values;        // ground truth
  std::vector<double> g_values;        // ground truth [rad/s]
  std::vector<DbaShift> dba;           // analytic shifts per C (asymmetric cases)
  SystemConfig cfg;
  ProbeMode probe = ProbeMode::Microwave;
  std::uint64_t seed = 0;
};

// Deterministic synthetic power sweep: normalized-reflection spectra over
// omega_grid for each cooperativity, with recorded ground truth.
SyntheticStationarySweep generate_stationary_sweep(const SystemConfig& cfg,
                                                   std::span<const double> c_values,
                                                   std::span<const double> omega_grid,
                                                   ProbeMode probe, const NoiseModel& noise,
                                                   std::uint64_t seed);

// Single noisy |S|^2 reflection dip for the Lorentzian/split-mode recipes.
Spectrum generate_reflection_spectrum(const SystemConfig& cfg, ProbeMode probe,
                                      std::span<const double> omega_grid,
                                      const NoiseModel& noise, std::uint64_t seed);

// R_e(Omega) datasets drawn from the shifted-Lorentzian family itself (one per
// requested shift); the model-consistent ground truth for joint-fit identity
// and confidence-interval calibration.
std::vector<Spectrum> generate_microwave_shift_spectra(double kappa_e, double kappa_e_ext,
                                                       std::span<const DbaShift> shifts,
                                                       std::span<const double> omega_grid,
                                                       const NoiseModel& noise,
                                                       std::uint64_t seed);

}  // namespace ceo::fit
