#pragma once

#include <string>
#include <vector>

#include "lccool/errors.hpp"

namespace lccool::model {

// Raw circuit/drive parameters and their dressed-frame derivatives. All
// quantities are angular frequencies (rad/s) unless stated otherwise.

struct QubitParams {
  double delta = 0;    // tunnel splitting, > 0
  double epsilon = 0;  // energy bias, >= 0 (sign convention fixed positive)
  double gamma = 0;    // single-qubit spontaneous decay rate, > 0
};

enum class DriveMode {
  LockRabiToCavity,  // generalized Rabi frequency locked to omega_c
  Explicit,          // detuning and bare Rabi amplitude given directly
};

struct DriveParams {
  DriveMode mode = DriveMode::LockRabiToCavity;
  double delta_omega = 0;  // drive detuning from the qubit transition
  double rabi_bare = 0;    // bare drive amplitude (Explicit mode only)
};

struct OscillatorParams {
  double omega_c = 0;  // resonator frequency, > 0
  double kappa = 0;    // resonator decay rate, > 0
  double nbar = 0;     // mean thermal occupation at omega_c, >= 0
};

enum class EnsembleMode { Independent, Collective };

struct EnsembleConfig {
  int n_qubits = 1;
  EnsembleMode mode = EnsembleMode::Independent;
};

// Optional raw-circuit input path, SI units.
struct RawCircuitParams {
  double inductance = 0;          // H
  double capacitance = 0;         // F
  double mutual_inductance = 0;   // H
  double persistent_current = 0;  // A
};

// Everything the closed-form pipeline consumes. The mixing angle theta refers
// to the flux basis (cos 2theta = epsilon/DeltaE), xi to the drive dressing
// (cos^2 xi = [1 + delta_omega/Omega]/2).
struct DressedFrame {
  double delta_e = 0;       // qubit transition frequency sqrt(delta^2+epsilon^2)
  double cos2theta = 0;
  double sin2theta = 0;
  double omega_rabi = 0;    // generalized Rabi frequency Omega
  double delta_omega = 0;
  double rabi_bare = 0;
  double cos2xi = 0;        // equals delta_omega/Omega
  double sin2xi = 0;        // >= 0 for 2xi in (0, pi)
  double cos_sq_xi = 0;
  double sin_sq_xi = 0;
  double g = 0;             // bare qubit-oscillator coupling
  double g_tilde = 0;       // effective coupling g cos2theta sin2xi
  double g0 = 0;            // dispersive shift 2 g^2 cos2xi sin^2 2theta / DeltaE
  double gamma = 0;         // bare decay rate, carried for downstream formulas
  double gamma_plus = 0;    // gamma cos^4 xi
  double gamma_minus = 0;   // gamma sin^4 xi
  double gamma_zero = 0;    // gamma sin^2 2xi / 4
  double gamma_perp = 0;    // 4 gamma_zero + gamma_plus + gamma_minus
  double f = 0;             // gamma_plus/gamma_minus, +infinity when gamma_minus = 0
  DriveMode drive_mode = DriveMode::LockRabiToCavity;
};

enum class RegimeStatus { Ok, Marginal, Violated };

struct RegimeEntry {
  std::string name;  // "left >> right"
  double left = 0;
  double right = 0;
  double ratio = 0;  // left/right
  RegimeStatus status = RegimeStatus::Ok;
};

struct RegimeReport {
  std::vector<RegimeEntry> entries;
  RegimeStatus overall = RegimeStatus::Ok;
};

// ">>" cut-offs: ratio >= ok is fine, >= marginal is borderline, below is
// violated. Defaults chosen so the reference figure parameters come out
// marginal-but-not-violated.
struct RegimeThresholds {
  double ok = 10.0;
  double marginal = 2.0;
};

// Derives every dressed-frame quantity from raw parameters. In locked mode
// Omega := omega_c and the bare Rabi amplitude is synthesized as
// sqrt(omega_c^2 - delta_omega^2); |delta_omega| >= omega_c throws
// DetuningOutOfRange. In explicit mode any detuning is allowed and
// f = +infinity is reported (not an error) when sin^2 xi = 0.
DressedFrame derive_dressed_frame(const QubitParams& qubit, const DriveParams& drive,
                                  double g, double omega_c);

// Bose-Einstein occupation 1/(exp(hbar omega_c / kB T) - 1). omega_c in rad/s,
// temperature in K. Throws NonPositiveTemperature for T <= 0.
double thermal_occupation(double omega_c, double temperature);

struct CircuitDerivation {
  double omega_c = 0;  // 1/sqrt(LC)
  double g = 0;        // M I_p sqrt(omega_c / 2L), in the hbar = 1 convention
};

// omega_c = 1/sqrt(LC) and g = M I_p I_c0 with I_c0 = sqrt(omega_c/2L). The
// coupling formula is applied in energy/hbar units (hbar = 1), i.e. the raw
// M I_p product must already be expressed in the matching rescaled units; the
// operation is the exact inverse of that synthesis.
CircuitDerivation derive_circuit_params(const RawCircuitParams& raw);

// Evaluates the validity inequalities of the good-cavity regime as ratios:
// independent ensembles check Omega >> gamma, gamma >> g~ sqrt(N) >> kappa;
// collective ensembles check Omega >> N gamma, N gamma >> g~ sqrt(N) >> kappa.
// In explicit drive mode an extra resonance entry Gamma_perp >> |Omega-omega_c|
// is evaluated (locked mode guarantees it exactly).
RegimeReport regime_check(const DressedFrame& frame, const EnsembleConfig& ensemble,
                          const OscillatorParams& oscillator,
                          const RegimeThresholds& thresholds = {});

const char* to_string(RegimeStatus status);
const char* to_string(EnsembleMode mode);
const char* to_string(DriveMode mode);

}  // namespace lccool::model
