#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ceo/detection.hpp"
#include "ceo/errors.hpp"
#include "ceo/spectrum.hpp"
#include "support/fixtures.hpp"

using namespace ceo;
using namespace ceo::testing;

namespace {

ComplexTrace constant_envelope(cplx value, double span, double dt = 1e-9) {
  ComplexTrace env;
  env.grid = TimeGrid{dt, 0.0, static_cast<std::size_t>(span / dt) + 1};
  env.samples.assign(env.grid.n, value);
  return env;
}

const double kIf = hz_to_angular(40e6);

}  // namespace

TEST_CASE("heterodyne: constant envelope gives a pure IF sinusoid") {
  const double gain = 2.5;
  const cplx amp{0.3, -0.4};  // |amp| = 0.5
  const RealTrace current =
      heterodyne_signal(constant_envelope(amp, 2e-6), kIf, gain, 0.0, 1e9, 1);
  for (std::size_t i = 0; i < current.samples.size(); ++i) {
    const double t = current.grid.time(i);
    const double expected = gain * (amp * std::exp(cplx(0.0, -kIf * t))).real();
    CHECK(std::abs(current.samples[i] - expected) < 1e-12);
  }
  // amplitude is gain |amp| (to within the 1 ns sampling of the 40 MHz crest)
  double peak = 0.0;
  for (double v : current.samples) peak = std::max(peak, std::abs(v));
  CHECK(rel_diff(peak, gain * std::abs(amp)) < 1e-2);
}

TEST_CASE("heterodyne: undersampling is rejected, seeded noise replays bit-exactly") {
  CHECK_THROWS_AS(heterodyne_signal(constant_envelope({1, 0}, 1e-6), kIf, 1.0, 0.0, 3e8, 1),
                  ConfigurationError);

  const RealTrace a =
      heterodyne_signal(constant_envelope({1, 0}, 1e-6), kIf, 1.0, 0.1, 1e9, 42);
  const RealTrace b =
      heterodyne_signal(constant_envelope({1, 0}, 1e-6), kIf, 1.0, 0.1, 1e9, 42);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);

  const RealTrace c =
      heterodyne_signal(constant_envelope({1, 0}, 1e-6), kIf, 1.0, 0.1, 1e9, 43);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i] != c.samples[i]) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("ddc: pure sinusoid of amplitude A recovers A^2/2 within 0.1%") {
  // oracle: I(t) = A cos(w t + phi) mixed by e^{+iwt} and box-averaged over
  // 10 IF periods leaves A/2 e^{-i phi}; the power estimate is 2 |A/2|^2
  const double a_mag = 0.7;
  const cplx amp = a_mag * std::exp(cplx(0.0, 0.9));
  const RealTrace current =
      heterodyne_signal(constant_envelope(amp, 4e-6), kIf, 1.0, 0.0, 1e9, 1);
  const RealTrace power = digital_downconvert(current, kIf, 10.0 * kTwoPi / kIf);
  const std::size_t mid = power.samples.size() / 2;
  CHECK(std::abs(power.samples[mid] - 0.5 * a_mag * a_mag) < 1e-3 * 0.5 * a_mag * a_mag);

  // zero input stays zero
  const RealTrace none =
      digital_downconvert(heterodyne_signal(constant_envelope({0, 0}, 2e-6), kIf, 1.0, 0.0,
                                            1e9, 1),
                          kIf, 10.0 * kTwoPi / kIf);
  CHECK(std::abs(none.samples[none.samples.size() / 2]) < 1e-20);

  CHECK_THROWS_AS(digital_downconvert(current, kIf, 0.5 * kTwoPi / kIf),
                  ConfigurationError);
}

TEST_CASE("ddc: averaging two repeats roughly halves the power variance") {
  const cplx amp{1.0, 0.0};
  const double window = 10.0 * kTwoPi / kIf;
  const std::size_t mid = 1000;

  std::vector<double> single, averaged;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const RealTrace t1 = heterodyne_signal(constant_envelope(amp, 2.5e-6), kIf, 1.0, 0.2,
                                           1e9, 2 * seed + 1);
    const RealTrace t2 = heterodyne_signal(constant_envelope(amp, 2.5e-6), kIf, 1.0, 0.2,
                                           1e9, 2 * seed + 2);
    single.push_back(digital_downconvert(t1, kIf, window).samples[mid]);
    const std::vector<RealTrace> pair{t1, t2};
    averaged.push_back(digital_downconvert(std::span(pair), kIf, window).samples[mid]);
  }
  auto variance = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / static_cast<double>(xs.size() - 1);
  };
  const double ratio = variance(single) / variance(averaged);
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.6);
}

TEST_CASE("temporal normalization: flat power gives R = 1, zero baseline throws") {
  RealTrace power;
  power.grid = TimeGrid{1e-9, 0.0, 2000};
  power.kind = TraceKind::Power;
  power.samples.assign(2000, 0.37);
  const RealTrace r = temporal_normalized_reflection(power, 100e-9, 900e-9);
  for (double v : r.samples) CHECK(std::abs(v - 1.0) < 1e-12);

  power.samples.assign(2000, 0.0);
  CHECK_THROWS_AS(temporal_normalized_reflection(power, 100e-9, 900e-9), std::domain_error);
}
