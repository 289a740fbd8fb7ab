#include "lccool/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lccool/units.hpp"

namespace lccool::model {

namespace {

RegimeStatus classify(double ratio, const RegimeThresholds& t) {
  if (ratio >= t.ok) return RegimeStatus::Ok;
  if (ratio >= t.marginal) return RegimeStatus::Marginal;
  return RegimeStatus::Violated;
}

RegimeEntry make_entry(std::string name, double left, double right,
                       const RegimeThresholds& t) {
  RegimeEntry e;
  e.name = std::move(name);
  e.left = left;
  e.right = right;
  if (right > 0) {
    e.ratio = left / right;
  } else {
    e.ratio = left > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  e.status = classify(e.ratio, t);
  return e;
}

}  // namespace

DressedFrame derive_dressed_frame(const QubitParams& qubit, const DriveParams& drive,
                                  double g, double omega_c) {
  if (!(qubit.delta > 0)) throw DomainError("qubit delta must be positive");
  if (qubit.epsilon < 0) throw DomainError("qubit epsilon must be non-negative");
  if (!(qubit.gamma > 0)) throw DomainError("qubit gamma must be positive");

  DressedFrame fr;
  fr.drive_mode = drive.mode;
  fr.delta_e = std::hypot(qubit.delta, qubit.epsilon);
  fr.cos2theta = qubit.epsilon / fr.delta_e;
  fr.sin2theta = qubit.delta / fr.delta_e;
  fr.g = g;
  fr.gamma = qubit.gamma;

  if (drive.mode == DriveMode::LockRabiToCavity) {
    if (!(omega_c > 0)) throw DomainError("omega_c must be positive");
    fr.omega_rabi = omega_c;
    fr.delta_omega = drive.delta_omega;
    if (!(std::abs(fr.delta_omega) < fr.omega_rabi)) {
      std::ostringstream msg;
      msg << "locked drive requires |delta_omega| < Omega = omega_c; got "
          << fr.delta_omega << " vs " << fr.omega_rabi;
      throw DetuningOutOfRange(msg.str());
    }
    fr.rabi_bare = std::sqrt((fr.omega_rabi - fr.delta_omega) *
                             (fr.omega_rabi + fr.delta_omega));
  } else {
    fr.delta_omega = drive.delta_omega;
    if (drive.rabi_bare < 0) throw DomainError("bare Rabi amplitude must be non-negative");
    fr.rabi_bare = drive.rabi_bare;
    fr.omega_rabi = std::hypot(fr.delta_omega, fr.rabi_bare);
    if (!(fr.omega_rabi > 0)) throw DomainError("drive has zero generalized Rabi frequency");
  }

  const double x = fr.delta_omega / fr.omega_rabi;  // = cos 2xi
  fr.cos2xi = x;
  fr.cos_sq_xi = 0.5 * (1.0 + x);
  fr.sin_sq_xi = 0.5 * (1.0 - x);
  fr.sin2xi = 2.0 * std::sqrt(fr.cos_sq_xi * fr.sin_sq_xi);

  fr.g_tilde = g * fr.cos2theta * fr.sin2xi;
  fr.g0 = 2.0 * g * g * fr.cos2xi * fr.sin2theta * fr.sin2theta / fr.delta_e;

  fr.gamma_plus = qubit.gamma * fr.cos_sq_xi * fr.cos_sq_xi;
  fr.gamma_minus = qubit.gamma * fr.sin_sq_xi * fr.sin_sq_xi;
  fr.gamma_zero = qubit.gamma * fr.cos_sq_xi * fr.sin_sq_xi;
  fr.gamma_perp = 4.0 * fr.gamma_zero + fr.gamma_plus + fr.gamma_minus;
  fr.f = fr.gamma_minus > 0 ? fr.gamma_plus / fr.gamma_minus
                            : std::numeric_limits<double>::infinity();
  return fr;
}

double thermal_occupation(double omega_c, double temperature) {
  if (!(omega_c > 0)) throw DomainError("omega_c must be positive");
  if (!(temperature > 0)) throw NonPositiveTemperature("temperature must be positive");
  const double x = kHbar * omega_c / (kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

CircuitDerivation derive_circuit_params(const RawCircuitParams& raw) {
  if (!(raw.inductance > 0) || !(raw.capacitance > 0) ||
      !(raw.mutual_inductance >= 0) || !(raw.persistent_current > 0)) {
    throw DomainError("circuit parameters must be positive (mutual inductance >= 0)");
  }
  CircuitDerivation out;
  out.omega_c = 1.0 / std::sqrt(raw.inductance * raw.capacitance);
  const double i_c0 = std::sqrt(out.omega_c / (2.0 * raw.inductance));
  out.g = raw.mutual_inductance * raw.persistent_current * i_c0;
  return out;
}

RegimeReport regime_check(const DressedFrame& frame, const EnsembleConfig& ensemble,
                          const OscillatorParams& oscillator,
                          const RegimeThresholds& thresholds) {
  if (ensemble.n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  const double n = static_cast<double>(ensemble.n_qubits);
  const double g_coll = std::abs(frame.g_tilde) * std::sqrt(n);

  RegimeReport report;
  if (ensemble.mode == EnsembleMode::Independent) {
    report.entries.push_back(
        make_entry("Omega >> gamma", frame.omega_rabi, frame.gamma, thresholds));
    report.entries.push_back(
        make_entry("gamma >> g_tilde*sqrt(N)", frame.gamma, g_coll, thresholds));
  } else {
    report.entries.push_back(
        make_entry("Omega >> N*gamma", frame.omega_rabi, n * frame.gamma, thresholds));
    report.entries.push_back(
        make_entry("N*gamma >> g_tilde*sqrt(N)", n * frame.gamma, g_coll, thresholds));
  }
  report.entries.push_back(
      make_entry("g_tilde*sqrt(N) >> kappa", g_coll, oscillator.kappa, thresholds));
  if (frame.drive_mode == DriveMode::Explicit) {
    report.entries.push_back(make_entry("Gamma_perp >> |Omega - omega_c|", frame.gamma_perp,
                                        std::abs(frame.omega_rabi - oscillator.omega_c),
                                        thresholds));
  }

  report.overall = RegimeStatus::Ok;
  for (const auto& e : report.entries) {
    if (static_cast<int>(e.status) > static_cast<int>(report.overall)) {
      report.overall = e.status;
    }
  }
  return report;
}

const char* to_string(RegimeStatus status) {
  switch (status) {
    case RegimeStatus::Ok: return "ok";
    case RegimeStatus::Marginal: return "marginal";
    default: return "violated";
  }
}

const char* to_string(EnsembleMode mode) {
  return mode == EnsembleMode::Independent ? "independent" : "collective";
}

const char* to_string(DriveMode mode) {
  return mode == DriveMode::LockRabiToCavity ? "lock_rabi_to_cavity" : "explicit";
}

}  // namespace lccool::model
