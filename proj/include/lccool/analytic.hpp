#pragma once

#include <vector>

#include "lccool/model.hpp"

namespace lccool::analytic {

// Closed-form steady-state pipeline for the adiabatically eliminated resonator
// equation: pump rates A/B, effective rates Gamma+-, geometric photon steady
// state, saturation number and cooling-time bounds.

struct PumpRates {
  double a_rate = 0;                // photon pump rate A
  double b_rate = 0;                // photon drain rate B
  model::EnsembleMode mode = model::EnsembleMode::Independent;
  double gamma_perp_effective = 0;  // Gamma_perp (independent) or Gamma~_perp
};

struct CollectiveMoments {
  double rz = 0;     // <R_z>
  double pm_mp = 0;  // <R_+- R_-+>
  double mp_pm = 0;  // <R_-+ R_+->
};

struct EffectiveRates {
  double gamma_down = 0;  // Gamma_- = kappa (1 + nbar) + B
  double gamma_up = 0;    // Gamma_+ = kappa nbar + A
  double eta = 0;         // Gamma_- / Gamma_+
};

struct PhotonStats {
  bool above_threshold = false;  // eta <= 1: no normalizable steady state
  double n_mean = 0;             // 1/(eta - 1); NaN above threshold
  double n2 = 0;                 // <a^t2 a^2> = 2 n_mean^2
  double g2 = 0;                 // exactly 2 below threshold
  double alpha = 0;              // ln eta
  double n_saturation = 0;       // validity bound n0 (+inf when g~ = 0)
  bool below_saturation = false;
  bool regime_ok = false;        // regime report not violated
};

struct CoolingRate {
  double model_rate = 0;      // 2 (Gamma_- - Gamma_+), relaxation rate of <n>
  double physical_bound = 0;  // gamma (independent) or N gamma (collective)
  double reported = 0;        // min of the two
};

// A = (g~^2 N / Gamma_perp) <R_++>, B = (g~^2 N / Gamma_perp) <R_-->, with the
// single-qubit steady populations <R_++> = gamma_-/(gamma_- + gamma_+).
PumpRates pump_rates_independent(const model::DressedFrame& frame, int n_qubits);

// Steady-state collective correlators of N driven qubits decaying through a
// shared reservoir, evaluated from the closed form in a cancellation- and
// overflow-free reformulation (see analytic.cpp). Exact limits at f = 1
// (<R_z> = 0, correlators N(N+2)/6), f = 0 and f = +infinity.
CollectiveMoments collective_moments(double f, int n_qubits);

// A = (g~^2 / Gamma~_perp) <R_+- R_-+>, B = (g~^2 / Gamma~_perp) <R_-+ R_+->,
// Gamma~_perp = Gamma_perp + (gamma_- - gamma_+) <R_z>. Throws
// NonPositiveEffectiveLinewidth when Gamma~_perp <= 0.
PumpRates pump_rates_collective(const model::DressedFrame& frame, int n_qubits);

// Dispatch on the ensemble mode.
PumpRates pump_rates(const model::DressedFrame& frame, const model::EnsembleConfig& ensemble);

EffectiveRates effective_rates(const PumpRates& pump, const model::OscillatorParams& oscillator);

PhotonStats steady_photon_stats(const EffectiveRates& eff, const model::DressedFrame& frame,
                                const model::EnsembleConfig& ensemble,
                                const model::OscillatorParams& oscillator,
                                const model::RegimeThresholds& thresholds = {});

// P(n) = (1 - 1/eta) eta^-n for n = 0..n_max. Throws AboveThresholdError when
// eta <= 1.
std::vector<double> photon_distribution(const EffectiveRates& eff, int n_max);

// n0 = Gamma_perp (gamma_+ + gamma_-) / (g~^2 N); uses the single-particle
// Gamma_perp in both ensemble modes, as written. Throws DivisionByZeroCoupling
// when g~ = 0.
double saturation_number(const model::DressedFrame& frame, int n_qubits);

// Relaxation rate of <n> under the reduced equation plus the physical bound
// set by qubit spontaneous emission. Throws AboveThresholdError for eta < 1;
// eta = 1 returns a zero model rate (critical slowdown).
CoolingRate cooling_time_scale(const EffectiveRates& eff, const model::DressedFrame& frame,
                               const model::EnsembleConfig& ensemble);

}  // namespace lccool::analytic
