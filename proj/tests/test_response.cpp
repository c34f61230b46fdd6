#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "ceo/errors.hpp"
#include "ceo/response.hpp"
#include "support/fixtures.hpp"

using namespace ceo;
using namespace ceo::testing;

TEST_CASE("bare susceptibility: on-resonance, asymptotic, frozen value") {
  const double kappa = hz_to_angular(10e6);
  CHECK(rel_diff(bare_susceptibility(kappa, 0.0), cplx(2.0 / kappa, 0.0)) < 1e-14);
  CHECK(std::abs(bare_susceptibility(kappa, hz_to_angular(1e12))) < 1e-3 * 2.0 / kappa);
  CHECK(std::abs(bare_susceptibility(kappa, -hz_to_angular(1e12))) < 1e-3 * 2.0 / kappa);

  // oracle: hand-evaluated 1/(pi 1e7 - i pi 1e7), frozen
  const cplx chi = bare_susceptibility(kappa, hz_to_angular(5e6));
  CHECK(rel_diff(chi, cplx(1.5915494309189534e-8, 1.5915494309189534e-8)) < 1e-14);
  CHECK_THROWS_AS(bare_susceptibility(0.0, 1.0), std::domain_error);
}

TEST_CASE("system matrix: uncoupled limit is diagonal") {
  const SystemConfig cfg = symmetric_ideal();
  const Matrix10 m = build_system_matrix(cfg, 0.0, hz_to_angular(3e6));
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c)
      if (r != c) CHECK(std::abs(m(r, c)) == 0.0);
}

TEST_CASE("system matrix: M(Omega) = M(0) - i Omega I") {
  std::mt19937_64 rng(11);
  for (PumpConfiguration pc : {PumpConfiguration::Symmetric, PumpConfiguration::StokesCase,
                               PumpConfiguration::AntiStokesCase}) {
    const SystemConfig cfg = random_config(rng, pc);
    const double g = coupling_for_cooperativity(cfg, 0.4);
    const double omega = hz_to_angular(17.3e6);
    const Matrix10 m0 = build_system_matrix(cfg, g, 0.0);
    const Matrix10 m = build_system_matrix(cfg, g, omega);
    const Matrix10 expect = m0 - cplx(0.0, omega) * Matrix10::Identity();
    for (int r = 0; r < 10; ++r)
      for (int c = 0; c < 10; ++c) CHECK(std::abs(m(r, c) - expect(r, c)) < 1e-6);
  }
}

TEST_CASE("system matrix: coupling pattern sits exactly on the documented entries") {
  SystemConfig cfg = stokes_case();
  cfg.configuration = PumpConfiguration::StokesCase;
  const double j = cfg.j_as;
  const double g = hz_to_angular(5e6);
  // make the Stokes-TM coupling visible too
  cfg.j_s = hz_to_angular(9e6);
  cfg.configuration = PumpConfiguration::AntiStokesCase;  // j_s > 0 requires this case
  cfg.j_as = 0.0;
  // use a hand-rolled config carrying both couplings via two builds
  const Matrix10 m_as = build_system_matrix(cfg, g, 0.0);
  SystemConfig cfg2 = stokes_case(j);
  const Matrix10 m_s = build_system_matrix(cfg2, g, 0.0);

  const cplx ig(0.0, g);
  // 1-based (9,2) and (1,10) entries of the stated mode ordering
  CHECK(m_s(8, 1) == ig);
  CHECK(m_s(0, 9) == ig);
  CHECK(m_s(8, 2) == ig);
  CHECK(m_s(9, 0) == -ig);
  CHECK(m_s(9, 3) == -ig);
  CHECK(m_s(1, 8) == -ig);
  CHECK(m_s(2, 8) == ig);
  CHECK(m_s(3, 9) == -ig);
  // TE-TM hybridization blocks
  const cplx ijas(0.0, j);
  CHECK(m_s(2, 6) == -ijas);
  CHECK(m_s(6, 2) == -ijas);
  CHECK(m_s(3, 7) == ijas);
  CHECK(m_s(7, 3) == ijas);
  const cplx ijs(0.0, cfg.j_s);
  CHECK(m_as(0, 4) == -ijs);
  CHECK(m_as(4, 0) == -ijs);
  CHECK(m_as(1, 5) == ijs);
  CHECK(m_as(5, 1) == ijs);

  // nothing else off-diagonal is populated
  int nonzero = 0;
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c)
      if (r != c && std::abs(m_s(r, c)) != 0.0) ++nonzero;
  CHECK(nonzero == 12);  // 8 g entries + 4 J entries

  SystemConfig bad = symmetric_ideal();
  bad.microwave.kappa_total = -1.0;
  CHECK_THROWS_AS(build_system_matrix(bad, 0.0, 0.0), std::domain_error);
}

TEST_CASE("input matrix: row occupancy and values") {
  std::mt19937_64 rng(13);
  const SystemConfig cfg = random_config(rng, PumpConfiguration::StokesCase);
  const Matrix10x16 l = build_input_matrix(cfg);

  for (int r = 0; r < 10; ++r) {
    int nonzero = 0;
    for (int c = 0; c < 16; ++c)
      if (std::abs(l(r, c)) != 0.0) ++nonzero;
    if (r >= 4 && r <= 7)
      CHECK(nonzero == 1);  // TM rows carry a single vacuum port
    else
      CHECK(nonzero <= 2);
  }

  CHECK(rel_diff(l(0, 0), cplx(std::sqrt(cfg.stokes.kappa_ext), 0)) < 1e-14);
  CHECK(rel_diff(l(0, 2), cplx(std::sqrt(cfg.stokes.kappa_intrinsic()), 0)) < 1e-14);
  CHECK(rel_diff(l(2, 4), cplx(std::sqrt(cfg.anti_stokes.kappa_ext), 0)) < 1e-14);
  CHECK(rel_diff(l(4, 8), cplx(std::sqrt(cfg.stokes_tm.kappa_total), 0)) < 1e-14);
  CHECK(rel_diff(l(8, 12), cplx(std::sqrt(cfg.microwave.kappa_ext), 0)) < 1e-14);
  CHECK(rel_diff(l(9, 15), cplx(std::sqrt(cfg.microwave.kappa_intrinsic()), 0)) < 1e-14);

  SystemConfig overcoupled = symmetric_ideal();
  overcoupled.stokes.kappa_ext = overcoupled.stokes.kappa_total;
  const Matrix10x16 l2 = build_input_matrix(overcoupled);
  CHECK(std::abs(l2(0, 2)) == 0.0);
  CHECK(std::abs(l2(1, 3)) == 0.0);
}

TEST_CASE("effective susceptibility: decoupled limit equals the bare mode") {
  SystemConfig cfg = symmetric_ideal();
  cfg.stokes.detuning = hz_to_angular(1.7e6);
  cfg.anti_stokes.detuning = hz_to_angular(-1.7e6);
  for (double f : {-9e6, -2e6, 0.0, 4.4e6, 11e6}) {
    const double omega = hz_to_angular(f);
    const cplx chi = effective_susceptibility_matrix(cfg, 0.0, omega, ProbeMode::Stokes);
    const cplx bare = 1.0 / cplx(0.5 * cfg.stokes.kappa_total,
                                 -(cfg.stokes.detuning + omega));
    CHECK(rel_diff(chi, bare) < 1e-13);
  }
}

TEST_CASE("effective susceptibility: symmetric ideal case evades microwave back-action") {
  const SystemConfig cfg = symmetric_ideal();
  const double g = coupling_for_cooperativity(cfg, 0.5);
  for (double omega : linspace(-3.0 * cfg.microwave.kappa_total,
                               3.0 * cfg.microwave.kappa_total, 101)) {
    const cplx chi = effective_susceptibility_matrix(cfg, g, omega, ProbeMode::Microwave);
    const cplx bare = bare_susceptibility(cfg.microwave.kappa_total, omega);
    CHECK(rel_diff(chi, bare) < 1e-12);
  }
}

TEST_CASE("effective susceptibility: split-mode fixture matches the closed form") {
  // Stokes case with the split-mode table row as the suppressed partner,
  // including the distinct TM detuning offset
  SystemConfig cfg = stokes_case(hz_to_angular(26e6));
  cfg.anti_stokes = {hz_to_angular(34.6e6), hz_to_angular(8.9e6), hz_to_angular(0.4e6),
                     ModeLabel::AntiStokes};
  cfg.anti_stokes_tm = {hz_to_angular(7.6e6), 0.0, hz_to_angular(-0.3e6),
                        ModeLabel::AntiStokesTm};
  const double g = coupling_for_cooperativity(cfg, 0.45);
  for (double omega : linspace(-3.0 * cfg.stokes.kappa_total, 3.0 * cfg.stokes.kappa_total,
                               201)) {
    const cplx matrix_chi = effective_susceptibility_matrix(cfg, g, omega,
                                                            ProbeMode::Microwave);
    const cplx closed = closed_form_chi_e(cfg, g, omega);
    CHECK(rel_diff(matrix_chi, closed) < 1e-10);
  }
}

TEST_CASE("effective susceptibility: threshold singularity raises instead of garbage") {
  SystemConfig cfg = stokes_case(full_suppression_j(symmetric_ideal()));
  // g tuned so chi_e,eff^-1(0) cancels exactly up to rounding (C = 1 at the
  // residual anti-Stokes suppression)
  const double r_as =
      1.0 / (1.0 + 4.0 * cfg.j_as * cfg.j_as /
                       (cfg.anti_stokes.kappa_total * cfg.anti_stokes_tm.kappa_total));
  const double g = std::sqrt(cfg.microwave.kappa_total * cfg.stokes.kappa_total /
                             (4.0 * (1.0 - r_as)));
  CHECK_THROWS_AS(effective_susceptibility_matrix(cfg, g, 0.0, ProbeMode::Microwave),
                  SingularSystemError);
}

TEST_CASE("closed forms: g = 0 reduces to the bare susceptibilities") {
  std::mt19937_64 rng(17);
  const SystemConfig cfg = random_config(rng, PumpConfiguration::Symmetric);
  const double omega = hz_to_angular(2.5e6);
  CHECK(rel_diff(closed_form_chi_e(cfg, 0.0, omega),
                 1.0 / cplx(0.5 * cfg.microwave.kappa_total, -omega)) < 1e-13);
  CHECK(rel_diff(closed_form_chi_o(cfg, ProbeMode::Stokes, 0.0, omega),
                 1.0 / cplx(0.5 * cfg.stokes.kappa_total,
                            -(cfg.stokes.detuning + omega))) < 1e-13);
}

TEST_CASE("closed forms: full-suppression limit reaches 1/(chi_e^-1 - g^2 chi_o)") {
  SystemConfig cfg = stokes_case(full_suppression_j(symmetric_ideal()));
  const double g = coupling_for_cooperativity(cfg, 0.5);
  for (double omega : linspace(-2e8, 2e8, 41)) {
    const cplx chi_e = bare_susceptibility(cfg.microwave.kappa_total, omega);
    const cplx chi_o = bare_susceptibility(cfg.stokes.kappa_total, omega);
    const cplx limit = 1.0 / (1.0 / chi_e - g * g * chi_o);
    CHECK(rel_diff(closed_form_chi_e(cfg, g, omega), limit) < 1e-6);
    // optical side mirrors it
    const cplx limit_o = 1.0 / (1.0 / chi_o - g * g * chi_e);
    CHECK(rel_diff(closed_form_chi_o(cfg, ProbeMode::Stokes, g, omega), limit_o) < 1e-6);
  }
}

TEST_CASE("closed forms: interchange symmetry at full suppression") {
  // swapping the microwave and Stokes-mode rates maps chi_e,s onto chi_o,s
  SystemConfig cfg = stokes_case(full_suppression_j(symmetric_ideal()));
  SystemConfig swapped = cfg;
  std::swap(swapped.stokes.kappa_total, swapped.microwave.kappa_total);
  std::swap(swapped.stokes.kappa_ext, swapped.microwave.kappa_ext);
  const double g = coupling_for_cooperativity(cfg, 0.35);
  for (double omega : linspace(-1.5e8, 1.5e8, 41)) {
    CHECK(rel_diff(closed_form_chi_e(cfg, g, omega),
                   closed_form_chi_o(swapped, ProbeMode::Stokes, g, omega)) < 1e-9);
  }

  SystemConfig cfg_as = anti_stokes_case(full_suppression_j(symmetric_ideal()));
  SystemConfig swapped_as = cfg_as;
  std::swap(swapped_as.anti_stokes.kappa_total, swapped_as.microwave.kappa_total);
  std::swap(swapped_as.anti_stokes.kappa_ext, swapped_as.microwave.kappa_ext);
  for (double omega : linspace(-1.5e8, 1.5e8, 41)) {
    CHECK(rel_diff(closed_form_chi_e(cfg_as, g, omega),
                   closed_form_chi_o(swapped_as, ProbeMode::AntiStokes, g, omega)) < 1e-9);
  }
}

TEST_CASE("closed forms: symmetric anti-Stokes reflection exceeds unity at C = 3") {
  // theory-curve parameters: kappa_o/2pi = 30 MHz, eta_o = 0.3, kappa_e/2pi = 10 MHz
  SystemConfig cfg = symmetric_ideal();
  cfg.stokes.kappa_total = hz_to_angular(30e6);
  cfg.stokes.kappa_ext = 0.3 * cfg.stokes.kappa_total;
  cfg.anti_stokes = cfg.stokes;
  cfg.anti_stokes.label = ModeLabel::AntiStokes;
  const double g = coupling_for_cooperativity(cfg, 3.0);
  const cplx chi = closed_form_chi_o(cfg, ProbeMode::AntiStokes, g, 0.0);
  const cplx s = reflection(chi, cfg.anti_stokes.kappa_total, cfg.anti_stokes.kappa_ext);
  CHECK(std::norm(s) > 1.0);
  CHECK(rel_diff(std::norm(s), 4.84) < 1e-10);  // (1 + 4 eta)^2
}

TEST_CASE("oracle equivalence: closed forms match the matrix solver over random configs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> c_dist(0.0, 0.85);
  int checked = 0;
  for (PumpConfiguration pc : {PumpConfiguration::Symmetric, PumpConfiguration::StokesCase,
                               PumpConfiguration::AntiStokesCase}) {
    for (int trial = 0; trial < 100; ++trial) {
      const SystemConfig cfg = random_config(rng, pc);
      const double g = coupling_for_cooperativity(cfg, c_dist(rng));
      const auto grid = linspace(-3.0 * cfg.stokes.kappa_total,
                                 3.0 * cfg.stokes.kappa_total, 201);
      double worst = 0.0;
      for (double omega : grid) {
        worst = std::max(worst,
                         rel_diff(effective_susceptibility_matrix(cfg, g, omega,
                                                                  ProbeMode::Microwave),
                                  closed_form_chi_e(cfg, g, omega)));
        worst = std::max(worst, rel_diff(effective_susceptibility_matrix(
                                             cfg, g, omega, ProbeMode::Stokes),
                                         closed_form_chi_o(cfg, ProbeMode::Stokes, g,
                                                           omega)));
        worst = std::max(worst, rel_diff(effective_susceptibility_matrix(
                                             cfg, g, omega, ProbeMode::AntiStokes),
                                         closed_form_chi_o(cfg, ProbeMode::AntiStokes, g,
                                                           omega)));
      }
      CHECK(worst < 1e-10);
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("reflection: critical coupling, eta = 0.4, far detuning") {
  const double kappa = hz_to_angular(10e6);
  CHECK(std::abs(reflection(cplx(2.0 / kappa, 0.0), kappa, 0.5 * kappa)) < 1e-14);
  const cplx s = reflection(cplx(2.0 / kappa, 0.0), kappa, 0.4 * kappa);
  CHECK(rel_diff(s, cplx(0.2, 0.0)) < 1e-12);
  CHECK(rel_diff(std::norm(s), 0.04) < 1e-12);
  const cplx far = reflection(bare_susceptibility(kappa, 1e4 * kappa), kappa, 0.4 * kappa);
  CHECK(std::abs(far - 1.0) < 1e-3);
  CHECK_THROWS_AS(reflection(cplx(0, 0), -1.0, 0.0), std::domain_error);
}

TEST_CASE("normalized reflection: pump off gives R = 1 everywhere") {
  const SystemConfig cfg = symmetric_ideal();
  for (double f : {-20e6, -3e6, 0.0, 5e6, 18e6})
    CHECK(rel_diff(normalized_reflection(cfg, 0.0, hz_to_angular(f), ProbeMode::Stokes),
                   1.0) < 1e-12);
}

TEST_CASE("normalized reflection: symmetric ideal microwave probe stays at 1") {
  const SystemConfig cfg = symmetric_ideal();
  const double g = coupling_for_cooperativity(cfg, 0.5);
  for (double omega :
       linspace(-3.0 * cfg.microwave.kappa_total, 3.0 * cfg.microwave.kappa_total, 201))
    CHECK(std::abs(normalized_reflection(cfg, g, omega, ProbeMode::Microwave) - 1.0) <
          1e-12);
}

TEST_CASE("normalized reflection: Stokes case at C = 0.5 gives R_e(0) = 9") {
  // oracle: kappa_eff = kappa_e (1 - C), eta_eff = eta/(1 - C),
  // R = |1 - 2 eta_eff|^2 / |1 - 2 eta|^2 = 0.36/0.04
  SystemConfig cfg = stokes_case(full_suppression_j(symmetric_ideal()));
  const double g = coupling_for_cooperativity(cfg, 0.5);
  CHECK(rel_diff(normalized_reflection(cfg, g, 0.0, ProbeMode::Microwave), 9.0) < 1e-9);
}

TEST_CASE("normalized reflection: critically coupled probe raises a domain error") {
  SystemConfig cfg = symmetric_ideal();
  cfg.microwave.kappa_ext = 0.5 * cfg.microwave.kappa_total;
  CHECK_THROWS_AS(normalized_reflection(cfg, 0.0, 0.0, ProbeMode::Microwave),
                  std::domain_error);
}

TEST_CASE("dba shifts: full-suppression limits reach -+ C kappa_e") {
  const SystemConfig base = symmetric_ideal();
  const double ko = base.stokes.kappa_total;
  const double ke = base.microwave.kappa_total;
  const double ktm = base.anti_stokes_tm.kappa_total;
  const double j = full_suppression_j(base);
  for (double c : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    const double g = 0.5 * std::sqrt(c * ko * ke);
    const DbaShift s =
        dba_shifts(PumpConfiguration::StokesCase, g, ko, ktm, j, 0.0, 0.0);
    CHECK(rel_diff(s.delta_kappa_e, -c * ke) < 1e-9);
    CHECK(std::abs(s.delta_omega_e) < 1e-9 * c * ke);
    const DbaShift a =
        dba_shifts(PumpConfiguration::AntiStokesCase, g, ko, ktm, j, 0.0, 0.0);
    CHECK(rel_diff(a.delta_kappa_e, c * ke) < 1e-9);
    CHECK(std::abs(a.delta_omega_e) < 1e-9 * c * ke);
  }
}

TEST_CASE("dba shifts: resonant-branch frequency term is odd in its detuning") {
  const SystemConfig base = symmetric_ideal();
  const double ko = base.stokes.kappa_total;
  const double ktm = base.anti_stokes_tm.kappa_total;
  const double j = full_suppression_j(base);
  const double g = hz_to_angular(4e6);
  const double ds = hz_to_angular(0.8e6);
  const DbaShift plus = dba_shifts(PumpConfiguration::StokesCase, g, ko, ktm, j, ds, 0.0);
  const DbaShift minus = dba_shifts(PumpConfiguration::StokesCase, g, ko, ktm, j, -ds, 0.0);
  CHECK(plus.delta_omega_e != 0.0);
  CHECK(rel_diff(plus.delta_omega_e, -minus.delta_omega_e) < 1e-12);
  CHECK(rel_diff(plus.delta_kappa_e, minus.delta_kappa_e) < 1e-12);
}

TEST_CASE("dba shifts: two-term expressions equal the exact on-resonance chain") {
  // delta_kappa/2 + i delta_omega must equal chi_e,eff^-1(0) - kappa_e/2 for
  // any J and detunings; this pins every sign against the matrix model
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (PumpConfiguration pc :
       {PumpConfiguration::StokesCase, PumpConfiguration::AntiStokesCase}) {
    for (int trial = 0; trial < 50; ++trial) {
      SystemConfig cfg = random_config(rng, pc);
      cfg.anti_stokes.kappa_total = cfg.stokes.kappa_total;  // single kappa_o form
      cfg.anti_stokes.kappa_ext = 0.5 * cfg.anti_stokes.kappa_total;
      const double ktm_common = hz_to_angular(5e6 + 20e6 * uni(rng));
      cfg.stokes_tm.kappa_total = ktm_common;
      cfg.anti_stokes_tm.kappa_total = ktm_common;
      cfg.stokes_tm.detuning = cfg.stokes.detuning;
      cfg.anti_stokes_tm.detuning = cfg.anti_stokes.detuning;
      const double g = coupling_for_cooperativity(cfg, 0.05 + 0.5 * uni(rng));

      const DbaShift s = dba_shifts(cfg, g);
      const cplx chain_inv = 1.0 / closed_form_chi_e(cfg, g, 0.0);
      const cplx expected = chain_inv - 0.5 * cfg.microwave.kappa_total;
      CHECK(rel_diff(cplx(0.5 * s.delta_kappa_e, s.delta_omega_e), expected) < 1e-10);
    }
  }
}

TEST_CASE("on-resonance microwave R: identity, frozen 9.0, shift-vs-width sensitivity") {
  const double ke = hz_to_angular(10e6);
  const double kex = 0.4 * ke;
  CHECK(rel_diff(onres_microwave_reflection(0.0, 0.0, ke, kex), 1.0) < 1e-14);
  CHECK(rel_diff(onres_microwave_reflection(0.0, -0.5 * ke, ke, kex), 9.0) < 1e-12);

  // finite equal-magnitude changes at h = 0.2 kappa_e: the frequency shift
  // moves R further than the linewidth change (computed by direct evaluation;
  // for h -> 0 the linewidth term dominates instead, R being even in the shift)
  const double h = 0.2 * ke;
  const double from_shift = std::abs(onres_microwave_reflection(h, 0.0, ke, kex) - 1.0);
  const double from_width = std::abs(onres_microwave_reflection(0.0, h, ke, kex) - 1.0);
  CHECK(from_shift > from_width);

  CHECK_THROWS_AS(onres_microwave_reflection(0.0, -ke, ke, kex), std::domain_error);
}

TEST_CASE("EOIA zero: on-resonance Stokes reflection vanishes at C = 1 - 2 eta_o") {
  SystemConfig cfg = stokes_case(full_suppression_j(symmetric_ideal()));
  const double eta = cfg.stokes.coupling_efficiency();
  const double c_zero = 1.0 - 2.0 * eta;
  const double g = coupling_for_cooperativity(cfg, c_zero);
  const cplx s = reflection(closed_form_chi_o(cfg, ProbeMode::Stokes, g, 0.0),
                            cfg.stokes.kappa_total, cfg.stokes.kappa_ext);
  CHECK(std::abs(s) < 1e-10);

  // |S|^2 decreases towards the zero and increases past it
  auto s2_at = [&](double c) {
    const double gc = coupling_for_cooperativity(cfg, c);
    return std::norm(reflection(closed_form_chi_o(cfg, ProbeMode::Stokes, gc, 0.0),
                                cfg.stokes.kappa_total, cfg.stokes.kappa_ext));
  };
  CHECK(s2_at(c_zero - 0.1) > s2_at(c_zero - 0.05));
  CHECK(s2_at(c_zero + 0.05) < s2_at(c_zero + 0.1));
}

TEST_CASE("passivity: anti-Stokes full suppression keeps |S|^2 <= 1 everywhere") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    SystemConfig cfg = random_config(rng, PumpConfiguration::AntiStokesCase);
    cfg.j_s = full_suppression_j(cfg);
    const double c = 5.0 * uni(rng);
    const double g = coupling_for_cooperativity(cfg, c);
    for (double omega : linspace(-3.0 * cfg.anti_stokes.kappa_total,
                                 3.0 * cfg.anti_stokes.kappa_total, 41)) {
      const cplx s = reflection(closed_form_chi_o(cfg, ProbeMode::AntiStokes, g, omega),
                                cfg.anti_stokes.kappa_total, cfg.anti_stokes.kappa_ext);
      CHECK(std::norm(s) <= 1.0 + 1e-9);
    }
    // on-resonance EOIT grows monotonically with C for under-coupled probes
    if (cfg.anti_stokes.coupling_efficiency() <= 0.5 &&
        cfg.anti_stokes.detuning == 0.0) {
      // exercised separately below with ideal detunings
    }
  }
}

TEST_CASE("EOIT monotonicity: on-resonance |S|^2 increases with C (under-coupled)") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> uni(0.05, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    SystemConfig cfg = anti_stokes_case(full_suppression_j(symmetric_ideal()));
    const double eta = uni(rng);
    cfg.anti_stokes.kappa_ext = eta * cfg.anti_stokes.kappa_total;
    double previous = -1.0;
    for (double c : linspace(0.0, 3.0, 31)) {
      const double g = coupling_for_cooperativity(cfg, c);
      const double s2 =
          std::norm(reflection(closed_form_chi_o(cfg, ProbeMode::AntiStokes, g, 0.0),
                               cfg.anti_stokes.kappa_total, cfg.anti_stokes.kappa_ext));
      CHECK(s2 >= previous - 1e-12);
      CHECK(s2 <= 1.0 + 1e-12);
      previous = s2;
    }
  }
}

namespace {

// outermost |omega| where the R feature still deviates by 10% of its
// on-resonance deviation (R - 1 changes sign in the wings, so a half-width
// would be ill-defined)
double feature_outer_width(const SystemConfig& cfg, double g, ProbeMode probe,
                           double omega_max) {
  const double dev0 = std::abs(normalized_reflection(cfg, g, 0.0, probe) - 1.0);
  for (int i = 4000; i >= 1; --i) {
    const double omega = omega_max * static_cast<double>(i) / 4000.0;
    if (std::abs(normalized_reflection(cfg, g, omega, probe) - 1.0) >= 0.1 * dev0)
      return omega;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("reversed dissipation regime: feature widths swap between probes") {
  // normal regime: kappa_o/2pi = 30 MHz >> kappa_e/2pi = 10 MHz, eta = 0.3
  SystemConfig normal = stokes_case(full_suppression_j(symmetric_ideal()));
  normal.stokes.kappa_total = hz_to_angular(30e6);
  normal.stokes.kappa_ext = 0.3 * normal.stokes.kappa_total;
  normal.anti_stokes = normal.stokes;
  normal.anti_stokes.label = ModeLabel::AntiStokes;
  normal.microwave.kappa_ext = 0.3 * normal.microwave.kappa_total;
  normal.j_as = full_suppression_j(normal);

  // reversed regime: kappa_o/2pi = 1 MHz << kappa_e/2pi = 10 MHz
  SystemConfig reversed = normal;
  reversed.stokes.kappa_total = hz_to_angular(1e6);
  reversed.stokes.kappa_ext = 0.3 * reversed.stokes.kappa_total;
  reversed.anti_stokes = reversed.stokes;
  reversed.anti_stokes.label = ModeLabel::AntiStokes;
  reversed.j_as = full_suppression_j(reversed);

  const double g_n = coupling_for_cooperativity(normal, 0.5);
  const double g_r = coupling_for_cooperativity(reversed, 0.5);

  // on-resonance R is identical in both regimes (interchange symmetry), so
  // the regimes are told apart by the spectral scale of the R feature
  CHECK(rel_diff(normalized_reflection(normal, g_n, 0.0, ProbeMode::Microwave),
                 normalized_reflection(reversed, g_r, 0.0, ProbeMode::Microwave)) < 1e-9);

  const double ke = normal.microwave.kappa_total;
  const double ko_n = normal.stokes.kappa_total;
  const double ko_r = reversed.stokes.kappa_total;

  // microwave probe: linewidth-scale change normally, narrow EOIA feature
  // (set by kappa_o << kappa_e) in the reversed regime
  const double w_mw_normal =
      feature_outer_width(normal, g_n, ProbeMode::Microwave, 8.0 * ke);
  const double w_mw_reversed =
      feature_outer_width(reversed, g_r, ProbeMode::Microwave, 8.0 * ke);
  CHECK(w_mw_normal > 0.9 * ke);
  CHECK(w_mw_reversed < 0.5 * ke);
  CHECK(w_mw_reversed < 0.5 * w_mw_normal);

  // optical probe: narrow EOIA feature inside the broad line normally,
  // whole-linewidth narrowing in the reversed regime
  const double w_opt_normal =
      feature_outer_width(normal, g_n, ProbeMode::Stokes, 3.0 * ko_n);
  const double w_opt_reversed =
      feature_outer_width(reversed, g_r, ProbeMode::Stokes, 30.0 * ko_r);
  CHECK(w_opt_normal < 0.75 * ko_n);
  CHECK(w_opt_reversed > ko_r);
}

TEST_CASE("spectrum sweep: delegates pointwise and annotates failures") {
  const SystemConfig cfg = stokes_case(full_suppression_j(symmetric_ideal()));
  const double g = coupling_for_cooperativity(cfg, 0.5);
  const auto grid = linspace(-2e8, 2e8, 41);
  const Spectrum spectrum = spectrum_sweep(cfg, g, grid, ProbeMode::Microwave);
  REQUIRE(spectrum.r_values.size() == grid.size());
  REQUIRE(spectrum.s_values.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(rel_diff(spectrum.r_values[i],
                   normalized_reflection(cfg, g, grid[i], ProbeMode::Microwave)) < 1e-12);
  }
  // R = 1 sanity when pump is off
  const Spectrum off = spectrum_sweep(cfg, 0.0, grid, ProbeMode::Microwave);
  for (double r : off.r_values) CHECK(std::abs(r - 1.0) < 1e-12);

  SystemConfig critical = symmetric_ideal();
  critical.microwave.kappa_ext = 0.5 * critical.microwave.kappa_total;
  try {
    spectrum_sweep(critical, 0.0, grid, ProbeMode::Microwave);
    CHECK(false);
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("grid index") != std::string::npos);
  }
}

TEST_CASE("spectrum validation rejects bad axes") {
  Spectrum s;
  s.frequencies = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.frequencies = {1.0, 2.0};
  s.r_values = {1.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
