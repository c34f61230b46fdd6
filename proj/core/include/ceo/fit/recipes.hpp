#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ceo/fit/least_squares.hpp"
#include "ceo/model.hpp"
#include "ceo/pulse.hpp"
#include "ceo/response.hpp"
#include "ceo/spectrum.hpp"

namespace ceo::fit {

// ---- single-mode Lorentzian reflection fit (|S|^2 dip) -----------------------

struct LorentzianFit {
  double kappa_total = 0.0;  // [rad/s]
  double kappa_ext = 0.0;    // [rad/s], eta <= 1/2 branch by convention
  double center = 0.0;       // dip position on the spectrum axis [rad/s]
  double background = 1.0;
  FitResult raw;
};

// Fits background * |1 - eta kappa chi(omega - center)|^2 to spectrum.r_values.
LorentzianFit lorentzian_reflection_fit(const Spectrum& spectrum,
                                        const FitOptions& options = {});

// ---- two-coupled-mode (TE-TM split) reflection fit ---------------------------

struct SplitModeFit {
  ModeSpec te;     // externally coupled TE mode (detuning = center on the axis)
  ModeSpec tm;     // dark TM partner
  double j = 0.0;  // TE-TM coupling [rad/s]
  double background = 1.0;
  FitResult raw;
};

SplitModeFit split_mode_fit(const Spectrum& spectrum, const FitOptions& options = {});

// ---- joint stationary microwave fit (shared linewidth) -----------------------

struct JointMicrowaveFit {
  double kappa_e = 0.0;      // shared [rad/s]
  double kappa_e_ext = 0.0;  // shared [rad/s]
  std::vector<DbaShift> shifts;  // per dataset
  FitResult raw;
};

// Joint fit of R_e(Omega) datasets: shifted-Lorentzian on-state over the
// analytic off-state, with (kappa_e, kappa_e_ext) shared across datasets and
// per-dataset (delta_omega, delta_kappa).
JointMicrowaveFit joint_stationary_microwave_fit(std::span<const Spectrum> spectra,
                                                 double kappa_e_init, double kappa_ext_init,
                                                 const FitOptions& options = {});

// Single-dataset (delta_omega, delta_kappa) fit with the pump-off rates
// pinned; multi-started over both width branches (R(0) alone cannot tell
// narrowing from broadening). Used per power to extract Lorentzian widths.
DbaShift fit_microwave_shift(const Spectrum& spectrum, double kappa_e, double kappa_e_ext,
                             const FitOptions& options = {});

// ---- joint stationary optical fit (full back-action model) -------------------

struct JointOpticalFit {
  double kappa_o = 0.0;      // shared TE loss [rad/s]
  double kappa_o_ext = 0.0;  // shared probe external coupling [rad/s]
  double delta_s = 0.0;      // shared Stokes-sideband detuning [rad/s]
  double delta_as = 0.0;     // shared anti-Stokes-sideband detuning [rad/s]
  std::vector<double> c_values;  // per dataset
  FitResult raw;
};

// Joint fit of R_o(omega) per pump power against the full matrix model. The
// base config supplies the fixed microwave/TM/J parameters; both TE modes share
// the fitted kappa_o. Per-power C is initialized linearly in dataset order.
JointOpticalFit joint_stationary_optical_fit(std::span<const Spectrum> spectra,
                                             const SystemConfig& base, ProbeMode probe,
                                             const FitOptions& options = {});

// ---- transient C(t) extraction -----------------------------------------------

struct SpectralTimeSeries {
  std::vector<double> frequencies;  // [rad/s]
  std::vector<double> times;        // [s]
  // r(i, k): normalized reflection at frequencies[i], times[k]
  Eigen::MatrixXd r;

  void validate() const;
};

struct TransientFit {
  std::vector<double> times;
  std::vector<double> c_of_t;
  std::vector<double> delta_of_t;  // per-slice detuning offset d: delta_s - d, delta_as + d
  std::vector<bool> slice_ok;
  std::vector<FitResult> slices;
};

// Per-time-slice (C, delta) fits of R_o(omega, t), warm-started from the
// previous slice; static parameters come from `base` (e.g. a stationary fit).
TransientFit transient_fit(const SpectralTimeSeries& series, const SystemConfig& base,
                           ProbeMode probe, const FitOptions& options = {});

// ---- delayed excess back-action (bounce + exponential recovery) --------------

struct DelayedBackactionFit {
  std::optional<double> t_ex;  // bounce delay after pulse end [s]
  double tau_ex = 0.0;         // recovery constant [s]
  double amplitude = 0.0;      // fitted A in 1 + A exp(-(t - t_bounce)/tau)
  double bounce_time = 0.0;    // absolute time of the bounce (or fit start)
  FitResult raw;
};

// Detects the post-pulse bounce in R_e(Omega_e, t) on a moving-average-smoothed
// trace (5-point local-extremum test) and fits the exponential recovery to 1.
// With no bounce found, t_ex is empty and the decay is fitted from pulse_end.
DelayedBackactionFit delayed_backaction_fit(const RealTrace& r_onres, double pulse_end,
                                            double smoothing_window = 100e-9,
                                            double min_prominence = 5e-3,
                                            const FitOptions& options = {});

}  // namespace ceo::fit
