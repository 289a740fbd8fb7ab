#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lccool/model.hpp"
#include "lccool/units.hpp"
#include "support.hpp"

using namespace lccool;
using namespace lccool::model;
using testsupport::rel_err;

namespace {

QubitParams fig_qubit() {
  QubitParams q;
  q.delta = hz_to_angular(3.0e9);
  q.epsilon = 0.01 * q.delta;
  q.gamma = hz_to_angular(1.0e5);
  return q;
}

DriveParams locked(double x, double omega_c) {
  DriveParams d;
  d.mode = DriveMode::LockRabiToCavity;
  d.delta_omega = x * omega_c;
  return d;
}

const double kOmegaC = hz_to_angular(1.0e7);
const double kG = hz_to_angular(1.0e6);

}  // namespace

TEST_CASE("symmetry point delta_omega = 0") {
  const auto q = fig_qubit();
  const auto fr = derive_dressed_frame(q, locked(0.0, kOmegaC), kG, kOmegaC);
  CHECK(fr.cos_sq_xi == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fr.sin_sq_xi == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rel_err(fr.gamma_plus, 0.25 * q.gamma) < 1e-14);
  CHECK(rel_err(fr.gamma_minus, 0.25 * q.gamma) < 1e-14);
  CHECK(rel_err(fr.gamma_zero, 0.25 * q.gamma) < 1e-14);
  CHECK(rel_err(fr.gamma_perp, 1.5 * q.gamma) < 1e-14);
  CHECK(rel_err(fr.f, 1.0) < 1e-14);
  CHECK(rel_err(fr.omega_rabi, kOmegaC) < 1e-14);
  CHECK(rel_err(fr.rabi_bare, kOmegaC) < 1e-14);
}

TEST_CASE("dressed rates at delta_omega/Omega = 0.6") {
  // direct substitution, written out independently of the library
  const double x = 0.6;
  const double cos_sq = (1.0 + x) / 2.0;  // 0.8
  const double sin_sq = (1.0 - x) / 2.0;  // 0.2
  const auto q = fig_qubit();
  const auto fr = derive_dressed_frame(q, locked(x, kOmegaC), kG, kOmegaC);

  CHECK(rel_err(fr.gamma_plus, q.gamma * cos_sq * cos_sq) < 1e-13);       // 0.64 gamma
  CHECK(rel_err(fr.gamma_minus, q.gamma * sin_sq * sin_sq) < 1e-13);      // 0.04 gamma
  CHECK(rel_err(fr.gamma_zero, q.gamma * 0.16) < 1e-13);
  CHECK(rel_err(fr.gamma_perp, q.gamma * 1.32) < 1e-13);
  CHECK(rel_err(fr.f, 16.0) < 1e-13);
  CHECK(rel_err(fr.sin2xi, 0.8) < 1e-13);
  CHECK(fr.cos2xi == doctest::Approx(0.6).epsilon(1e-13));

  // g~ = g cos2theta sin2xi; cos2theta = 0.01/sqrt(1.0001)
  const double cos2theta = 0.01 / std::sqrt(1.0001);
  CHECK(rel_err(fr.cos2theta, cos2theta) < 1e-13);
  CHECK(rel_err(fr.g_tilde, kG * cos2theta * 0.8) < 1e-13);
  CHECK(rel_err(angular_to_hz(fr.g_tilde), 8.0e3) < 1e-4);  // ~7999.6 Hz

  // g0 = 2 g^2 cos2xi sin^2 2theta / DeltaE
  const double delta_e = std::sqrt(q.delta * q.delta + q.epsilon * q.epsilon);
  const double sin2theta = q.delta / delta_e;
  CHECK(rel_err(fr.g0, 2.0 * kG * kG * 0.6 * sin2theta * sin2theta / delta_e) < 1e-13);
}

TEST_CASE("dressed-rate identities and parity over random detunings") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xs(-0.999, 0.999);
  const auto q = fig_qubit();
  for (int i = 0; i < 10000; ++i) {
    const double x = xs(rng);
    const auto fr = derive_dressed_frame(q, locked(x, kOmegaC), kG, kOmegaC);
    // algebraic identities of the dressed rates
    CHECK(rel_err(fr.gamma_zero * fr.gamma_zero, fr.gamma_plus * fr.gamma_minus) < 1e-12);
    CHECK(rel_err(fr.gamma_perp, q.gamma * (1.0 + fr.sin2xi * fr.sin2xi / 2.0)) < 1e-12);
    CHECK(rel_err(fr.sin2xi * fr.sin2xi, 4.0 * fr.sin_sq_xi * fr.cos_sq_xi) < 1e-12);
    CHECK(rel_err(fr.cos_sq_xi + fr.sin_sq_xi, 1.0) < 1e-12);
    CHECK(fr.gamma_perp >= q.gamma * (1.0 - 1e-12));
    CHECK(fr.gamma_perp <= 1.5 * q.gamma * (1.0 + 1e-12));

    // delta_omega -> -delta_omega swaps gamma_+ <-> gamma_-
    const auto mirrored = derive_dressed_frame(q, locked(-x, kOmegaC), kG, kOmegaC);
    CHECK(rel_err(mirrored.gamma_plus, fr.gamma_minus) < 1e-12);
    CHECK(rel_err(mirrored.gamma_minus, fr.gamma_plus) < 1e-12);
    CHECK(rel_err(mirrored.gamma_zero, fr.gamma_zero) < 1e-12);
    CHECK(rel_err(mirrored.gamma_perp, fr.gamma_perp) < 1e-12);
    CHECK(rel_err(std::abs(mirrored.g_tilde), std::abs(fr.g_tilde)) < 1e-12);
  }
  const auto at_zero = derive_dressed_frame(q, locked(0.0, kOmegaC), kG, kOmegaC);
  CHECK(rel_err(at_zero.gamma_perp, 1.5 * q.gamma) < 1e-14);
}

TEST_CASE("locked mode rejects |delta_omega| >= Omega") {
  const auto q = fig_qubit();
  CHECK_THROWS_AS(derive_dressed_frame(q, locked(1.2, kOmegaC), kG, kOmegaC),
                  DetuningOutOfRange);
  CHECK_THROWS_AS(derive_dressed_frame(q, locked(-1.0, kOmegaC), kG, kOmegaC),
                  DetuningOutOfRange);
}

TEST_CASE("explicit drive with zero bare Rabi reports infinite f") {
  const auto q = fig_qubit();
  DriveParams d;
  d.mode = DriveMode::Explicit;
  d.delta_omega = 0.3 * kOmegaC;
  d.rabi_bare = 0.0;
  const auto fr = derive_dressed_frame(q, d, kG, kOmegaC);
  CHECK(std::isinf(fr.f));
  CHECK(fr.gamma_minus == 0.0);
  CHECK(rel_err(fr.gamma_plus, q.gamma) < 1e-13);
}

TEST_CASE("thermal occupation") {
  const double omega = hz_to_angular(1.0e7);

  SUBCASE("Rayleigh-Jeans limit") {
    const double t_hot = 1.0;  // nbar ~ 2e3 at 10 MHz
    const double n = thermal_occupation(omega, t_hot);
    CHECK(n > 50);
    CHECK(rel_err(n, kBoltzmann * t_hot / (kHbar * omega)) < 0.01);
  }

  SUBCASE("hbar omega / kB T = ln 2 gives nbar = 1") {
    const double t = kHbar * omega / (kBoltzmann * std::log(2.0));
    CHECK(rel_err(thermal_occupation(omega, t), 1.0) < 1e-12);
  }

  SUBCASE("nbar = 4 corresponds to about 2.15 mK") {
    // invert Bose-Einstein independently
    const double t = kHbar * omega / (kBoltzmann * std::log(1.25));
    CHECK(rel_err(thermal_occupation(omega, t), 4.0) < 1e-12);
    CHECK(rel_err(t, 2.15e-3) < 5e-3);
  }

  SUBCASE("nonpositive temperature") {
    CHECK_THROWS_AS(thermal_occupation(omega, 0.0), NonPositiveTemperature);
    CHECK_THROWS_AS(thermal_occupation(omega, -1.0), NonPositiveTemperature);
  }
}

TEST_CASE("circuit parameter derivation") {
  SUBCASE("LC product fixes omega_c") {
    RawCircuitParams a{1e-9, 1e-12, 1e-11, 5e-7};
    RawCircuitParams b{2e-9, 0.5e-12, 1e-11, 5e-7};
    CHECK(rel_err(derive_circuit_params(a).omega_c, derive_circuit_params(b).omega_c) < 1e-12);
  }

  SUBCASE("zero mutual inductance decouples") {
    RawCircuitParams raw{1e-9, 1e-12, 0.0, 5e-7};
    CHECK(derive_circuit_params(raw).g == 0.0);
  }

  SUBCASE("round-trips the reference point") {
    // synthesize raw parameters for omega_c/2pi = 1e7 Hz, g/2pi = 1e6 Hz
    const double omega_c = hz_to_angular(1.0e7);
    const double g = hz_to_angular(1.0e6);
    const double inductance = 2.5e-10;
    const double capacitance = 1.0 / (omega_c * omega_c * inductance);
    const double i_p = 4.2e-7;
    const double mutual = g / (i_p * std::sqrt(omega_c / (2.0 * inductance)));
    RawCircuitParams raw{inductance, capacitance, mutual, i_p};
    const auto d = derive_circuit_params(raw);
    CHECK(rel_err(d.omega_c, omega_c) < 1e-12);
    CHECK(rel_err(d.g, g) < 1e-12);
  }

  SUBCASE("rejects nonpositive parameters") {
    CHECK_THROWS_AS(derive_circuit_params({0, 1e-12, 1e-11, 5e-7}), DomainError);
  }
}

TEST_CASE("regime check on the reference parameters") {
  const auto q = fig_qubit();
  const auto fr = derive_dressed_frame(q, locked(0.6, kOmegaC), kG, kOmegaC);
  OscillatorParams osc{kOmegaC, hz_to_angular(1.0e3), 4.0};

  SUBCASE("independent, N = 30: marginal overall") {
    const auto rep = regime_check(fr, {30, EnsembleMode::Independent}, osc);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rel_err(rep.entries[0].ratio, 100.0) < 1e-12);
    CHECK(rep.entries[0].status == RegimeStatus::Ok);
    CHECK(rel_err(rep.entries[1].ratio, 2.28) < 5e-3);  // gamma/(g~ sqrt 30) ~ 2.2823
    CHECK(rep.entries[1].status == RegimeStatus::Marginal);
    CHECK(rel_err(rep.entries[2].ratio, 43.8) < 5e-3);
    CHECK(rep.entries[2].status == RegimeStatus::Ok);
    CHECK(rep.overall == RegimeStatus::Marginal);

    // cross-check against a direct evaluation
    const double g_coll = fr.g_tilde * std::sqrt(30.0);
    CHECK(rel_err(rep.entries[1].ratio, q.gamma / g_coll) < 1e-12);
    CHECK(rel_err(rep.entries[2].ratio, g_coll / osc.kappa) < 1e-12);
  }

  SUBCASE("N = 1 passes the qubit-dominance inequality") {
    const auto rep = regime_check(fr, {1, EnsembleMode::Independent}, osc);
    CHECK(rel_err(rep.entries[1].ratio, 12.5) < 1e-3);
    CHECK(rep.entries[1].status == RegimeStatus::Ok);
  }

  SUBCASE("decoupled system is violated") {
    const auto fr0 = derive_dressed_frame(q, locked(0.6, kOmegaC), 0.0, kOmegaC);
    const auto rep = regime_check(fr0, {30, EnsembleMode::Independent}, osc);
    CHECK(rep.entries[2].ratio == 0.0);
    CHECK(rep.entries[2].status == RegimeStatus::Violated);
    CHECK(rep.overall == RegimeStatus::Violated);
  }

  SUBCASE("collective entries use N gamma") {
    const auto rep = regime_check(fr, {30, EnsembleMode::Collective}, osc);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rel_err(rep.entries[0].ratio, kOmegaC / (30.0 * q.gamma)) < 1e-12);
    CHECK(rep.entries[0].status == RegimeStatus::Marginal);  // 3.33
    CHECK(rep.overall == RegimeStatus::Marginal);
  }
}
