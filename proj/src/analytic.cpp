#include "lccool/analytic.hpp"

#include <cmath>
#include <limits>

namespace lccool::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// coth(x) - 1/x. Series below |x| = 0.01 (the direct form loses ~4 digits
// there and diverges as x -> 0), direct evaluation elsewhere. Saturates to
// sign(x) at large |x| and handles x = +-infinity.
double coth_minus_inv(double x) {
  const double ax = std::abs(x);
  if (ax < 0.01) {
    const double x2 = x * x;
    return x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)));
  }
  if (ax > 350.0) return (x > 0 ? 1.0 : -1.0) - 1.0 / x;
  const double coth = 1.0 + 2.0 / std::expm1(2.0 * x);
  return coth - 1.0 / x;
}

// csch^2(x) - 1/x^2, same branch structure.
double cschsq_minus_inv2(double x) {
  const double ax = std::abs(x);
  if (ax < 0.01) {
    const double x2 = x * x;
    return -1.0 / 3.0 + x2 * (1.0 / 15.0 + x2 * (-2.0 / 189.0 + x2 / 675.0));
  }
  if (ax > 350.0) return -1.0 / (x * x);
  const double s = std::sinh(x);
  return 1.0 / (s * s) - 1.0 / (x * x);
}

}  // namespace

PumpRates pump_rates_independent(const model::DressedFrame& frame, int n_qubits) {
  if (n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  const double sum = frame.gamma_plus + frame.gamma_minus;
  if (!(sum > 0)) throw DomainError("gamma_plus + gamma_minus must be positive");
  const double c = frame.g_tilde * frame.g_tilde * n_qubits / frame.gamma_perp;
  PumpRates pr;
  pr.mode = model::EnsembleMode::Independent;
  pr.gamma_perp_effective = frame.gamma_perp;
  pr.a_rate = c * frame.gamma_minus / sum;  // <R_++> = gamma_-/(gamma_-+gamma_+)
  pr.b_rate = c * frame.gamma_plus / sum;
  return pr;
}

CollectiveMoments collective_moments(double f, int n_qubits) {
  if (n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  if (!(f >= 0)) throw DomainError("f must be non-negative");

  // With L = ln f the ladder distribution P(m) ~ f^-m gives
  //   <R_z>  = coth(L/2) - (N+1) coth((N+1)L/2)
  //   Var(m) = [csch^2(L/2) - (N+1)^2 csch^2((N+1)L/2)] / 4
  // and the 1/x and 1/x^2 poles cancel pairwise, so both are evaluated through
  // the regular parts g(x) = coth x - 1/x and s(x) = csch^2 x - 1/x^2. This is
  // an exact rewrite of the printed rational closed form, finite for every
  // f >= 0 (including 0, 1 and infinity) and every N.
  const double scale = n_qubits + 1.0;
  const double h = 0.5 * std::log(f);
  const double big = scale * h;

  const double rz = coth_minus_inv(h) - scale * coth_minus_inv(big);
  const double var = 0.25 * (cschsq_minus_inv2(h) - scale * scale * cschsq_minus_inv2(big));

  const double j = 0.5 * n_qubits;
  const double m_mean = 0.5 * rz;
  const double m_sq = var + m_mean * m_mean;
  const double jj1 = j * (j + 1.0);

  CollectiveMoments mom;
  mom.rz = rz;
  mom.pm_mp = std::max(0.0, jj1 - m_sq + m_mean);  // <J+ J-> = j(j+1) - <m^2> + <m>
  mom.mp_pm = std::max(0.0, jj1 - m_sq - m_mean);
  return mom;
}

PumpRates pump_rates_collective(const model::DressedFrame& frame, int n_qubits) {
  if (n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  const CollectiveMoments mom = collective_moments(frame.f, n_qubits);
  const double gpe =
      frame.gamma_perp + (frame.gamma_minus - frame.gamma_plus) * mom.rz;
  if (!(gpe > 0)) {
    throw NonPositiveEffectiveLinewidth("collective decay rate Gamma~_perp <= 0");
  }
  const double g2 = frame.g_tilde * frame.g_tilde;
  PumpRates pr;
  pr.mode = model::EnsembleMode::Collective;
  pr.gamma_perp_effective = gpe;
  pr.a_rate = g2 * mom.pm_mp / gpe;
  pr.b_rate = g2 * mom.mp_pm / gpe;
  return pr;
}

PumpRates pump_rates(const model::DressedFrame& frame, const model::EnsembleConfig& ensemble) {
  return ensemble.mode == model::EnsembleMode::Independent
             ? pump_rates_independent(frame, ensemble.n_qubits)
             : pump_rates_collective(frame, ensemble.n_qubits);
}

EffectiveRates effective_rates(const PumpRates& pump, const model::OscillatorParams& oscillator) {
  EffectiveRates eff;
  eff.gamma_down = oscillator.kappa * (1.0 + oscillator.nbar) + pump.b_rate;
  eff.gamma_up = oscillator.kappa * oscillator.nbar + pump.a_rate;
  eff.eta = eff.gamma_up > 0 ? eff.gamma_down / eff.gamma_up : kInf;
  return eff;
}

PhotonStats steady_photon_stats(const EffectiveRates& eff, const model::DressedFrame& frame,
                                const model::EnsembleConfig& ensemble,
                                const model::OscillatorParams& oscillator,
                                const model::RegimeThresholds& thresholds) {
  PhotonStats st;
  st.n_saturation =
      frame.g_tilde != 0 ? saturation_number(frame, ensemble.n_qubits) : kInf;
  st.regime_ok = regime_check(frame, ensemble, oscillator, thresholds).overall !=
                 model::RegimeStatus::Violated;
  if (!(eff.eta > 1.0)) {
    st.above_threshold = true;
    st.n_mean = st.n2 = st.g2 = st.alpha = kNaN;
    st.below_saturation = false;
    return st;
  }
  st.above_threshold = false;
  st.n_mean = 1.0 / (eff.eta - 1.0);
  st.n2 = 2.0 * st.n_mean * st.n_mean;
  st.g2 = 2.0;  // exact for the geometric steady state
  st.alpha = std::log(eff.eta);
  st.below_saturation = st.n_mean < st.n_saturation;
  return st;
}

std::vector<double> photon_distribution(const EffectiveRates& eff, int n_max) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  if (!(eff.eta > 1.0)) {
    throw AboveThresholdError("eta <= 1: no normalizable photon distribution");
  }
  std::vector<double> p(static_cast<size_t>(n_max) + 1);
  const double ratio = 1.0 / eff.eta;
  double w = 1.0 - ratio;  // P(0) = 1 - 1/eta
  for (auto& v : p) {
    v = w;
    w *= ratio;
  }
  return p;
}

double saturation_number(const model::DressedFrame& frame, int n_qubits) {
  if (n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  if (frame.g_tilde == 0) {
    throw DivisionByZeroCoupling("saturation number undefined for g_tilde = 0");
  }
  return frame.gamma_perp * (frame.gamma_plus + frame.gamma_minus) /
         (frame.g_tilde * frame.g_tilde * n_qubits);
}

CoolingRate cooling_time_scale(const EffectiveRates& eff, const model::DressedFrame& frame,
                               const model::EnsembleConfig& ensemble) {
  if (eff.eta < 1.0) {
    throw AboveThresholdError("eta < 1: system heats, no cooling rate");
  }
  CoolingRate cr;
  cr.model_rate = 2.0 * (eff.gamma_down - eff.gamma_up);
  cr.physical_bound = ensemble.mode == model::EnsembleMode::Independent
                          ? frame.gamma
                          : ensemble.n_qubits * frame.gamma;
  cr.reported = std::min(cr.model_rate, cr.physical_bound);
  return cr;
}

}  // namespace lccool::analytic
