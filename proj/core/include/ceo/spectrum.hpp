#pragma once

#include <complex>
#include <vector>

namespace ceo {

using cplx = std::complex<double>;

enum class FrequencyFrame { RotatingProbe, Lab };

// Sampled frequency axis with complex amplitude reflection S and/or real
// normalized reflection R. Frequencies are angular [rad/s]; in the
// RotatingProbe frame they are the probe detuning Omega.
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<cplx> s_values;   // empty = absent
  std::vector<double> r_values; // empty = absent
  std::vector<double> sigma;    // optional per-point standard deviation of R
  FrequencyFrame frame = FrequencyFrame::RotatingProbe;

  // Throws std::invalid_argument on non-increasing axis or length mismatch.
  void validate() const;
};

// Analytic dynamical back-action on the microwave mode.
struct DbaShift {
  double delta_omega_e = 0.0;  // frequency shift [rad/s]
  double delta_kappa_e = 0.0;  // linewidth change [rad/s]
};

}  // namespace ceo
