#include "ceo/detection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ceo/constants.hpp"
#include "ceo/errors.hpp"
#include "ceo/rng.hpp"
#include "ceo/spectrum.hpp"

namespace ceo {

RealTrace heterodyne_signal(const ComplexTrace& envelope, double if_freq, double gain,
                            double noise_std, double sample_rate, std::uint64_t seed) {
  envelope.validate();
  if (!(if_freq > 0.0)) throw std::invalid_argument("heterodyne_signal: if_freq must be > 0");
  if (!(sample_rate >= 10.0 * if_freq / kTwoPi)) {
    std::ostringstream msg;
    msg << "heterodyne_signal: sample rate " << sample_rate
        << " S/s undersamples the IF tone at " << angular_to_hz(if_freq)
        << " Hz (need >= 10x)";
    throw ConfigurationError(msg.str());
  }
  if (noise_std < 0.0)
    throw std::invalid_argument("heterodyne_signal: noise_std must be >= 0");

  const double dt = 1.0 / sample_rate;
  const double span = envelope.grid.t_end() - envelope.grid.t0;
  const auto n = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;

  RealTrace out;
  out.grid = TimeGrid{dt, envelope.grid.t0, n};
  out.kind = TraceKind::DetectorCurrent;
  out.samples.resize(n);

  GaussianSampler noise(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = out.grid.time(i);
    // complex linear interpolation of the envelope onto the detector clock
    const double x = (t - envelope.grid.t0) / envelope.grid.dt;
    const auto j = std::min(static_cast<std::size_t>(std::max(x, 0.0)),
                            envelope.grid.n - 1);
    const auto j1 = std::min(j + 1, envelope.grid.n - 1);
    const double frac = std::clamp(x - static_cast<double>(j), 0.0, 1.0);
    const cplx env = envelope.samples[j] + frac * (envelope.samples[j1] - envelope.samples[j]);

    const cplx lo = std::exp(cplx(0.0, -if_freq * t));
    double value = gain * (env * lo).real();
    if (noise_std > 0.0) value += noise_std * noise();
    out.samples[i] = value;
  }
  return out;
}

RealTrace digital_downconvert(const RealTrace& detector, double if_freq, double window) {
  detector.validate();
  if (!(if_freq > 0.0))
    throw std::invalid_argument("digital_downconvert: if_freq must be > 0");
  const double period = kTwoPi / if_freq;
  if (!(window >= period)) {
    std::ostringstream msg;
    msg << "digital_downconvert: window " << window << " s is shorter than one IF period ("
        << period << " s)";
    throw ConfigurationError(msg.str());
  }

  const std::size_t n = detector.grid.n;
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(
                                              std::floor(window / detector.grid.dt + 0.5)));
  // mix down and box-average via prefix sums
  std::vector<cplx> prefix(n + 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detector.grid.time(i);
    prefix[i + 1] = prefix[i] + detector.samples[i] * std::exp(cplx(0.0, if_freq * t));
  }

  RealTrace out;
  out.grid = detector.grid;
  out.kind = TraceKind::Power;
  out.samples.resize(n);
  const std::size_t half = w / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(lo + w, n);
    const std::size_t lo2 = hi >= w ? hi - w : 0;  // keep full windows away from edges
    const cplx mean = (prefix[hi] - prefix[lo2]) / static_cast<double>(hi - lo2);
    out.samples[i] = 2.0 * std::norm(mean);
  }
  return out;
}

RealTrace digital_downconvert(std::span<const RealTrace> repeats, double if_freq,
                              double window) {
  if (repeats.empty())
    throw std::invalid_argument("digital_downconvert: no traces to average");
  RealTrace mean = digital_downconvert(repeats[0], if_freq, window);
  for (std::size_t k = 1; k < repeats.size(); ++k) {
    const RealTrace p = digital_downconvert(repeats[k], if_freq, window);
    if (p.samples.size() != mean.samples.size())
      throw std::invalid_argument("digital_downconvert: repeat length mismatch");
    for (std::size_t i = 0; i < mean.samples.size(); ++i) mean.samples[i] += p.samples[i];
  }
  const double inv = 1.0 / static_cast<double>(repeats.size());
  for (double& v : mean.samples) v *= inv;
  return mean;
}

RealTrace temporal_normalized_reflection(const RealTrace& power, double baseline_t0,
                                         double baseline_t1) {
  power.validate();
  if (!(baseline_t1 > baseline_t0))
    throw std::invalid_argument("temporal_normalized_reflection: empty baseline window");
  const std::size_t i0 = power.grid.nearest_index(baseline_t0);
  const std::size_t i1 = power.grid.nearest_index(baseline_t1);
  if (i1 <= i0)
    throw std::invalid_argument("temporal_normalized_reflection: baseline window too short");
  double baseline = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) baseline += power.samples[i];
  baseline /= static_cast<double>(i1 - i0 + 1);
  if (!(baseline > 0.0))
    throw std::domain_error("temporal_normalized_reflection: baseline power is zero");

  RealTrace out;
  out.grid = power.grid;
  out.kind = TraceKind::Power;
  out.samples.resize(power.samples.size());
  const double inv = 1.0 / baseline;
  for (std::size_t i = 0; i < power.samples.size(); ++i)
    out.samples[i] = power.samples[i] * inv;
  return out;
}

}  // namespace ceo
