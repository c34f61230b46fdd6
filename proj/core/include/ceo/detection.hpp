#pragma once

#include <cstdint>
#include <span>

#include "ceo/pulse.hpp"

namespace ceo {

// Heterodyne detector current I(t) = gain Re[a_out(t) e^{-i omega_if t}] plus
// additive Gaussian noise, sampled at sample_rate. Requires
// sample_rate >= 10 * if_freq/2pi (ConfigurationError otherwise).
RealTrace heterodyne_signal(const ComplexTrace& envelope, double if_freq, double gain,
                            double noise_std, double sample_rate, std::uint64_t seed);

// Digital down-conversion: mix by e^{+i omega_if t}, moving-average over
// `window` seconds, return averaged power P(t) = 2 |z(t)|^2 (a pure sinusoid of
// amplitude A gives A^2/2). Window must cover at least one IF period.
RealTrace digital_downconvert(const RealTrace& detector, double if_freq, double window);

// Same, averaged over repeated traces (powers are averaged, matching a
// phase-insensitive pulsed measurement).
RealTrace digital_downconvert(std::span<const RealTrace> repeats, double if_freq,
                              double window);

// R(t) = P(t) / mean(P over the pre-pulse baseline window [t0, t1]).
RealTrace temporal_normalized_reflection(const RealTrace& power, double baseline_t0,
                                         double baseline_t1);

}  // namespace ceo
