#pragma once

namespace ceo {

inline constexpr double kHbar = 1.054571817e-34;        // reduced Planck constant [J s]
inline constexpr double kSpeedOfLight = 299792458.0;    // [m/s]
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// All internal rates and frequencies are angular [rad/s]; files and the CLI
// carry ordinary frequencies [Hz] (nu = kappa/2pi) and convert exactly once.
inline constexpr double hz_to_angular(double hz) { return kTwoPi * hz; }
inline constexpr double angular_to_hz(double w) { return w / kTwoPi; }

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ceo
