#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "ceo/model.hpp"
#include "ceo/pulse.hpp"
#include "ceo/response.hpp"

namespace ceo {

// Pump cavity loading: integrates da/dt = -(kappa_o/2) a + sqrt(kappa_ext) s_in(t)
// with |s_in|^2 the instantaneous input photon flux, and returns |a(t)|^2.
// Requires grid.dt <= 0.05/kappa_o (ConfigurationError otherwise).
RealTrace pump_loading(const SystemConfig& cfg, const PumpDrive& drive,
                       const PulseSpec& pulse, const TimeGrid& grid);

// Quasi-static pump-enhanced coupling g(t) = g0 sqrt(n_p(t)).
RealTrace coupling_trace(double g0, const RealTrace& photon_number);

// User-supplied phenomenological perturbations of the microwave line,
// added to the time-dependent generator (frequency shift and linewidth change).
struct ExcessBackaction {
  std::function<double(double)> delta_omega_e;  // [rad/s] vs t
  std::function<double(double)> delta_kappa_e;  // [rad/s] vs t
};

// Time-dependent system: static configuration, coupling envelope g(t), and an
// optional excess-back-action injection (ground truth for estimation tests).
struct Timeline {
  SystemConfig cfg;
  RealTrace coupling;  // g(t) [rad/s]
  std::optional<ExcessBackaction> excess;
};

Timeline make_timeline(const SystemConfig& cfg, RealTrace coupling);
void inject_excess_backaction(Timeline& timeline, ExcessBackaction model);

// Phenomenological delayed back-action: a pure microwave frequency shift whose
// on-resonance R(t) ramps from 1 up to r_peak at pulse_end + t_ex and then
// recovers as 1 + (r_peak - 1) exp(-(t - bounce)/tau_ex). Built by closed-form
// inversion, so the injected ground truth is exact.
ExcessBackaction delayed_backaction_profile(double r_peak, double pulse_end, double t_ex,
                                            double tau_ex, double kappa_e,
                                            double kappa_e_ext);

struct PropagationOptions {
  double dt = 0.0;          // integrator step [s]; 0 = auto from rates and probe detuning
  double sample_dt = 1e-9;  // output sampling period [s]
  double t_start = 0.0;
  double t_end = 0.0;       // 0 = end of the coupling trace
  double instability_factor = 1e6;  // abort when |state| exceeds this times the input scale
};

struct PropagationResult {
  TimeGrid grid;
  // One column per output sample; rows follow the 10-component mode ordering.
  Eigen::Matrix<cplx, 10, Eigen::Dynamic> envelopes;
  double probe_detuning = 0.0;
  cplx probe_amplitude{0.0, 0.0};
  ProbeMode probe = ProbeMode::Microwave;
};

// Fixed-step RK4 on dD/dt = -M(0; g(t), excess(t)) D + L u(t), with a coherent
// probe u(t) = a_in e^{-i Omega t} on the probe's external port. Deterministic;
// throws InstabilityError on divergence (expected for Stokes case past C = 1).
PropagationResult propagate(const Timeline& timeline, ProbeMode probe,
                            double probe_detuning, cplx probe_amplitude,
                            const PropagationOptions& options = {});

// Input-output relation a_out = a_in - sqrt(kappa_ext) a_probe. With derotate
// the e^{-i Omega t} probe rotation is removed (the LO tracks the probe), so a
// steady state is a constant equal to a_in S_jj(Omega).
ComplexTrace output_envelope(const PropagationResult& result, const SystemConfig& cfg,
                             bool derotate = true);

}  // namespace ceo
