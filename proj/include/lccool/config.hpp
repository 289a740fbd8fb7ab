#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lccool/model.hpp"

namespace lccool::cli {

// Flat dotted-key configuration files:
//
//   qubit.delta_hz = 3.0e9        # frequencies are nu = omega/2pi, in Hz
//   oscillator.nbar = 4           # or oscillator.temperature_k (one of the two)
//   coupling.g_hz = 1.0e6         # or the circuit.* block (one of the two)
//   ...
//
// '#' starts a comment; unknown keys are rejected.

struct DriveConfig {
  model::DriveMode mode = model::DriveMode::LockRabiToCavity;
  double delta_omega_over_omega = 0;  // locked mode
  double omega = 0;                   // explicit mode: drive frequency (rad/s)
  double rabi = 0;                    // explicit mode: bare Rabi amplitude (rad/s)
};

struct OracleSettings {
  int n_max = 40;          // Fock truncation cap for oracle solves
  double tolerance = 1e-8; // adaptive-truncation tail target
};

struct SweepSettings {
  bool present = false;
  std::string variable = "delta_omega_over_omega";
  double min = 0;
  double max = 0;
  int steps = 0;
  std::vector<int> n_list;                     // optional extra axis
  std::vector<double> kappa_list;              // optional extra axis (rad/s)
  std::vector<model::EnsembleMode> modes;      // defaults to the base mode
};

struct SystemConfig {
  model::QubitParams qubit;
  model::OscillatorParams oscillator;
  double coupling_g = 0;  // rad/s
  model::EnsembleConfig ensemble;
  DriveConfig drive;
  OracleSettings oracle;
  SweepSettings sweep;
};

SystemConfig parse_config_text(const std::string& text);
SystemConfig parse_config_file(const std::string& path);

// Command-line overrides (--mode, --n, --detuning).
struct Overrides {
  std::optional<model::EnsembleMode> mode;
  std::optional<int> n_qubits;
  std::optional<double> detuning;  // delta_omega/Omega, locked mode
};

void apply_overrides(SystemConfig& config, const Overrides& overrides);

// DriveParams for the dressed-frame derivation (locked mode converts the
// delta_omega/Omega ratio with Omega = omega_c).
model::DriveParams drive_params(const SystemConfig& config);

model::DressedFrame frame_for(const SystemConfig& config);

}  // namespace lccool::cli
