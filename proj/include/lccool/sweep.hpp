#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lccool/analytic.hpp"
#include "lccool/config.hpp"
#include "lccool/model.hpp"

namespace lccool::sweep {

enum class SweepVariable { DeltaOmegaOverOmega, NQubits, Kappa };

// Cross product of ensemble modes x qubit numbers x kappa values x the primary
// grid. The (min, max, steps) grid populates the axis selected by `variable`;
// the other axes default to the base configuration unless widened by the
// n_list / kappa_list keys.
struct SweepSpec {
  cli::SystemConfig base;
  SweepVariable variable = SweepVariable::DeltaOmegaOverOmega;
  std::vector<double> grid;            // values of the swept variable
  std::vector<int> n_list;             // qubit numbers to run
  std::vector<double> kappa_list;      // kappa values to run (rad/s)
  std::vector<model::EnsembleMode> modes;
};

// Builds and validates a SweepSpec from the configuration's sweep.* block.
// Throws UsageError for steps < 2 (a degenerate min == max grid collapses to
// one point) or a detuning grid outside |delta_omega/Omega| < 1.
SweepSpec make_sweep_spec(const cli::SystemConfig& config);

struct SweepRecord {
  model::EnsembleMode mode = model::EnsembleMode::Independent;
  int n_qubits = 1;
  // echoed inputs
  double delta_omega = 0;
  double delta_omega_over_omega = 0;
  double kappa = 0;
  double nbar = 0;
  double gamma = 0;
  // dressed-frame scalars
  double gamma_plus = 0, gamma_minus = 0, gamma_zero = 0, gamma_perp = 0, g_tilde = 0;
  // reduced-equation quantities
  double a_rate = 0, b_rate = 0, gamma_up = 0, gamma_down = 0, eta = 0;
  double n_mean = 0;        // NaN when above threshold or errored
  double n_saturation = 0;  // +inf when g_tilde = 0
  bool regime_ok = false;
  bool saturation_ok = false;
  bool above_threshold = false;
  // per-point failures are data, not exceptions
  bool error = false;
  std::string error_message;
};

std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

// Fixed column order:
//   mode,n_qubits,delta_omega_hz,delta_omega_over_omega,gamma_plus_hz,
//   gamma_minus_hz,gamma_zero_hz,gamma_perp_hz,g_tilde_hz,a_rate_hz,b_rate_hz,
//   gamma_up_hz,gamma_down_hz,eta,n_mean,n_saturation,regime_ok,saturation_ok,
//   above_threshold
// All *_hz columns are omega/2pi. Numbers carry 12 significant digits, flags
// are 0/1, an absent n_mean (above threshold) is an empty field.
std::size_t emit_csv(const std::vector<SweepRecord>& table, std::ostream& out);
std::size_t emit_csv_file(const std::vector<SweepRecord>& table, const std::string& path);

struct ModeComparison {
  int points_compared = 0;       // mutual cooling points found
  int ordering_violations = 0;   // n_mean(independent) > n_mean(collective)
  int rate_bound_violations = 0; // N gamma < gamma
};

// Checks the independent-vs-collective ordering claims on grid points present
// in both modes: inside the mutual cooling region (both records below
// threshold, below saturation, regime not violated, n_mean < nbar) the
// independent ensemble must cool at least as deep, while the collective
// cooling-rate bound N gamma must dominate gamma. Throws MismatchedGrids when
// the table lacks one of the modes.
ModeComparison compare_modes(const std::vector<SweepRecord>& table);

}  // namespace lccool::sweep
