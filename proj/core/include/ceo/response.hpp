#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

#include "ceo/model.hpp"
#include "ceo/spectrum.hpp"

namespace ceo {

using Matrix10 = Eigen::Matrix<cplx, 10, 10>;
using Matrix10x16 = Eigen::Matrix<cplx, 10, 16>;
using Vector10 = Eigen::Matrix<cplx, 10, 1>;

// Mode ordering of the doubled state vector
//   (a_s, a_s+, a_as, a_as+, a_stm, a_stm+, a_astm, a_astm+, b, b+)
// and of the 16 input ports
//   (s_in, s_in+, s_0, s_0+, as_in, as_in+, as_0, as_0+,
//    stm_vac, stm_vac+, astm_vac, astm_vac+, b_in, b_in+, b_0, b_0+).
inline constexpr int kStokesRow = 0;
inline constexpr int kAntiStokesRow = 2;
inline constexpr int kMicrowaveRow = 8;
inline constexpr int kStokesInCol = 0;
inline constexpr int kAntiStokesInCol = 4;
inline constexpr int kMicrowaveInCol = 12;

int probe_row(ProbeMode probe);
int probe_input_column(ProbeMode probe);
const ModeSpec& probe_mode_spec(const SystemConfig& cfg, ProbeMode probe);

// chi(Omega) = 1 / (kappa/2 - i Omega)
cplx bare_susceptibility(double kappa, double omega);

// Inverse-susceptibility diagonal plus coupling pattern of the Fourier-space
// coupled-mode system; satisfies M(Omega) = M(0) - i Omega I.
Matrix10 build_system_matrix(const SystemConfig& cfg, double g, double omega);

// Input-rate matrix: sqrt(kappa_ext)/sqrt(kappa_0) on the TE and microwave
// ports, single sqrt(kappa_tm) vacuum port per TM quadrature.
Matrix10x16 build_input_matrix(const SystemConfig& cfg);

// Solves M(Omega) x = L e_in for a unit coherent input on the probe's external
// port (dense LU) and returns chi_eff with a_probe = sqrt(kappa_ext) chi_eff a_in.
// Throws SingularSystemError instead of returning garbage near threshold.
cplx effective_susceptibility_matrix(const SystemConfig& cfg, double g, double omega,
                                     ProbeMode probe);

// Closed-form effective susceptibilities by chain elimination of the same
// system; exact for arbitrary J and detunings, reducing to the textbook
// 1/(chi^-1 -+ g^2 chi) forms at ideal detuning and full suppression.
cplx closed_form_chi_e(const SystemConfig& cfg, double g, double omega);
cplx closed_form_chi_o(const SystemConfig& cfg, ProbeMode probe, double g, double omega);

// S = 1 - eta kappa chi_eff, eta = kappa_ext/kappa.
cplx reflection(cplx chi_eff, double kappa_total, double kappa_ext);

// Pump-off reflection of the probe mode (g = 0 analytic model).
cplx reflection_off(const SystemConfig& cfg, double omega, ProbeMode probe);

// R = |S_on/S_off|^2 with S_off evaluated at g = 0.
double normalized_reflection(const SystemConfig& cfg, double g, double omega,
                             ProbeMode probe);

// Analytic two-term dynamical back-action shifts (resonant branch plus
// TM-suppressed branch). kappa_o is the TE loss of both branches, kappa_o_tm
// the TM partner loss, j the TE-TM coupling of the suppressed branch.
DbaShift dba_shifts(PumpConfiguration config, double g, double kappa_o, double kappa_o_tm,
                    double j, double delta_s, double delta_as);
DbaShift dba_shifts(const SystemConfig& cfg, double g);

// On-resonance microwave normalized reflection under (delta_omega, delta_kappa).
double onres_microwave_reflection(double delta_omega_e, double delta_kappa_e,
                                  double kappa_e, double kappa_e_ext);

// Inverse of the pure-frequency-shift branch: the |delta_omega| producing a
// given on-resonance R >= 1 at delta_kappa = 0. Closed form; used to inject
// excess-back-action profiles with exact R(t) ground truth.
double onres_shift_for_reflection(double r_target, double kappa_e, double kappa_e_ext);

// Vectorized reflection + normalized reflection over a frequency grid.
Spectrum spectrum_sweep(const SystemConfig& cfg, double g, std::span<const double> omega_grid,
                        ProbeMode probe);

}  // namespace ceo
