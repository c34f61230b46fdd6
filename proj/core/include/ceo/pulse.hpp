#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ceo {

enum class PulseShape { Rectangular, SmoothedRectangular };

// Optical pump pulse. SmoothedRectangular uses raised-cosine edges of width
// rise_time inside the on-interval [t_start, t_start + duration].
struct PulseSpec {
  double duration = 250e-9;   // [s]
  double peak_power = 0.5;    // [W]
  double rise_time = 30e-9;   // [s], per edge
  PulseShape shape = PulseShape::SmoothedRectangular;
  double t_start = 0.0;       // [s]

  void validate() const;  // throws std::invalid_argument
  double t_end() const { return t_start + duration; }
  // Instantaneous input power [W] at time t.
  double power_at(double t) const;
};

enum class TraceKind { DetectorCurrent, ComplexEnvelope, PhotonNumber, Power, Coupling };

struct TimeGrid {
  double dt = 0.0;  // [s]
  double t0 = 0.0;  // [s]
  std::size_t n = 0;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double t_end() const { return n == 0 ? t0 : time(n - 1); }
  void validate() const;  // throws std::invalid_argument
  // Index of the sample nearest to t, clamped to [0, n-1].
  std::size_t nearest_index(double t) const;
};

struct RealTrace {
  TimeGrid grid;
  std::vector<double> samples;
  TraceKind kind = TraceKind::DetectorCurrent;

  void validate() const;
  // Linear interpolation, clamped at the ends.
  double at(double t) const;
};

struct ComplexTrace {
  TimeGrid grid;
  std::vector<std::complex<double>> samples;
  TraceKind kind = TraceKind::ComplexEnvelope;

  void validate() const;
};

}  // namespace ceo
