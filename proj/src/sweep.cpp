#include "lccool/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "lccool/units.hpp"

namespace lccool::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double lo, double hi, int steps) {
  if (lo == hi) return {lo};  // degenerate variation: single-point table
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  }
  return g;
}

SweepRecord evaluate_point(const cli::SystemConfig& base, model::EnsembleMode mode, int n,
                           double kappa, SweepVariable var, double value) {
  cli::SystemConfig cfg = base;
  cfg.ensemble.mode = mode;
  cfg.ensemble.n_qubits = n;
  cfg.oscillator.kappa = kappa;
  if (var == SweepVariable::DeltaOmegaOverOmega) {
    cfg.drive.mode = model::DriveMode::LockRabiToCavity;
    cfg.drive.delta_omega_over_omega = value;
  } else if (var == SweepVariable::NQubits) {
    cfg.ensemble.n_qubits = static_cast<int>(std::lround(value));
  } else {
    cfg.oscillator.kappa = value;
  }

  SweepRecord rec;
  rec.mode = cfg.ensemble.mode;
  rec.n_qubits = cfg.ensemble.n_qubits;
  rec.kappa = cfg.oscillator.kappa;
  rec.nbar = cfg.oscillator.nbar;
  rec.gamma = cfg.qubit.gamma;
  try {
    const model::DressedFrame frame = cli::frame_for(cfg);
    rec.delta_omega = frame.delta_omega;
    rec.delta_omega_over_omega = frame.delta_omega / frame.omega_rabi;
    rec.gamma_plus = frame.gamma_plus;
    rec.gamma_minus = frame.gamma_minus;
    rec.gamma_zero = frame.gamma_zero;
    rec.gamma_perp = frame.gamma_perp;
    rec.g_tilde = frame.g_tilde;

    const analytic::PumpRates pump = analytic::pump_rates(frame, cfg.ensemble);
    const analytic::EffectiveRates eff = analytic::effective_rates(pump, cfg.oscillator);
    const analytic::PhotonStats stats =
        analytic::steady_photon_stats(eff, frame, cfg.ensemble, cfg.oscillator);

    rec.a_rate = pump.a_rate;
    rec.b_rate = pump.b_rate;
    rec.gamma_up = eff.gamma_up;
    rec.gamma_down = eff.gamma_down;
    rec.eta = eff.eta;
    rec.n_mean = stats.above_threshold ? kNaN : stats.n_mean;
    rec.n_saturation = stats.n_saturation;
    rec.regime_ok = stats.regime_ok;
    rec.saturation_ok = stats.below_saturation;
    rec.above_threshold = stats.above_threshold;
  } catch (const DomainError& e) {
    rec.error = true;
    rec.error_message = e.what();
    rec.n_mean = kNaN;
    rec.n_saturation = kNaN;
    rec.eta = kNaN;
  }
  return rec;
}

void append_number(std::string& line, double v) {
  if (std::isnan(v)) return;  // absent value -> empty field
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  line += buf;
}

}  // namespace

SweepSpec make_sweep_spec(const cli::SystemConfig& config) {
  if (!config.sweep.present) throw UsageError("config has no sweep.* block");
  SweepSpec spec;
  spec.base = config;

  if (config.sweep.variable == "delta_omega_over_omega") {
    spec.variable = SweepVariable::DeltaOmegaOverOmega;
  } else if (config.sweep.variable == "n_qubits") {
    spec.variable = SweepVariable::NQubits;
  } else if (config.sweep.variable == "kappa") {
    spec.variable = SweepVariable::Kappa;
  } else {
    throw UsageError("sweep.var: expected delta_omega_over_omega|n_qubits|kappa, got '" +
                     config.sweep.variable + "'");
  }

  if (config.sweep.min != config.sweep.max && config.sweep.steps < 2) {
    throw UsageError("sweep.steps must be at least 2");
  }
  if (spec.variable == SweepVariable::DeltaOmegaOverOmega) {
    if (!(std::abs(config.sweep.min) < 1.0) || !(std::abs(config.sweep.max) < 1.0)) {
      throw UsageError("detuning sweep grid must stay inside |delta_omega/Omega| < 1");
    }
  }
  spec.grid = linspace(config.sweep.min, config.sweep.max, config.sweep.steps);
  if (spec.variable == SweepVariable::Kappa) {
    // the config speaks Hz, like every other frequency key
    for (auto& v : spec.grid) v = hz_to_angular(v);
  }

  spec.n_list = config.sweep.n_list;
  if (spec.n_list.empty()) spec.n_list = {config.ensemble.n_qubits};
  spec.kappa_list = config.sweep.kappa_list;
  if (spec.kappa_list.empty()) spec.kappa_list = {config.oscillator.kappa};
  spec.modes = config.sweep.modes;
  if (spec.modes.empty()) spec.modes = {config.ensemble.mode};
  return spec;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw UsageError("sweep grid is empty");
  std::vector<SweepRecord> table;
  table.reserve(spec.modes.size() * spec.n_list.size() * spec.kappa_list.size() *
                spec.grid.size());
  for (const auto mode : spec.modes) {
    for (const int n : spec.n_list) {
      for (const double kappa : spec.kappa_list) {
        for (const double value : spec.grid) {
          table.push_back(evaluate_point(spec.base, mode, n, kappa, spec.variable, value));
        }
      }
    }
  }
  return table;
}

std::size_t emit_csv(const std::vector<SweepRecord>& table, std::ostream& out) {
  if (table.empty()) throw UsageError("refusing to emit an empty sweep table");
  static const char* header =
      "mode,n_qubits,delta_omega_hz,delta_omega_over_omega,gamma_plus_hz,gamma_minus_hz,"
      "gamma_zero_hz,gamma_perp_hz,g_tilde_hz,a_rate_hz,b_rate_hz,gamma_up_hz,gamma_down_hz,"
      "eta,n_mean,n_saturation,regime_ok,saturation_ok,above_threshold";
  std::size_t bytes = 0;
  auto write_line = [&](const std::string& line) {
    out << line << '\n';
    bytes += line.size() + 1;
  };
  write_line(header);
  for (const auto& r : table) {
    std::string line = model::to_string(r.mode);
    line += ',';
    line += std::to_string(r.n_qubits);
    line += ',';
    append_number(line, angular_to_hz(r.delta_omega));
    line += ',';
    append_number(line, r.delta_omega_over_omega);
    line += ',';
    append_number(line, angular_to_hz(r.gamma_plus));
    line += ',';
    append_number(line, angular_to_hz(r.gamma_minus));
    line += ',';
    append_number(line, angular_to_hz(r.gamma_zero));
    line += ',';
    append_number(line, angular_to_hz(r.gamma_perp));
    line += ',';
    append_number(line, angular_to_hz(r.g_tilde));
    line += ',';
    append_number(line, angular_to_hz(r.a_rate));
    line += ',';
    append_number(line, angular_to_hz(r.b_rate));
    line += ',';
    append_number(line, angular_to_hz(r.gamma_up));
    line += ',';
    append_number(line, angular_to_hz(r.gamma_down));
    line += ',';
    append_number(line, r.eta);
    line += ',';
    append_number(line, r.n_mean);
    line += ',';
    append_number(line, r.n_saturation);
    line += ',';
    line += r.regime_ok ? '1' : '0';
    line += ',';
    line += r.saturation_ok ? '1' : '0';
    line += ',';
    line += r.above_threshold ? '1' : '0';
    write_line(line);
  }
  return bytes;
}

std::size_t emit_csv_file(const std::vector<SweepRecord>& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const std::size_t bytes = emit_csv(table, out);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
  return bytes;
}

ModeComparison compare_modes(const std::vector<SweepRecord>& table) {
  struct Key {
    int n;
    double kappa, x;
    bool operator<(const Key& o) const {
      if (n != o.n) return n < o.n;
      if (kappa != o.kappa) return kappa < o.kappa;
      return x < o.x;
    }
  };
  std::map<Key, const SweepRecord*> indep, coll;
  for (const auto& r : table) {
    if (r.error) continue;
    const Key k{r.n_qubits, r.kappa, r.delta_omega_over_omega};
    (r.mode == model::EnsembleMode::Independent ? indep : coll)[k] = &r;
  }
  if (indep.empty() || coll.empty()) {
    throw MismatchedGrids("table must contain both ensemble modes");
  }

  auto cooling = [](const SweepRecord& r) {
    return !r.above_threshold && r.saturation_ok && r.regime_ok && !std::isnan(r.n_mean) &&
           r.n_mean < r.nbar;
  };

  ModeComparison cmp;
  int matched = 0;
  for (const auto& [key, ri] : indep) {
    auto it = coll.find(key);
    if (it == coll.end()) continue;
    ++matched;
    const SweepRecord& rc = *it->second;
    if (!cooling(*ri) || !cooling(rc)) continue;
    ++cmp.points_compared;
    if (ri->n_mean > rc.n_mean) ++cmp.ordering_violations;
    const double bound_i = ri->gamma;                      // gamma
    const double bound_c = rc.gamma * rc.n_qubits;         // N gamma
    if (bound_c < bound_i) ++cmp.rate_bound_violations;
  }
  if (matched == 0) throw MismatchedGrids("modes share no grid points");
  return cmp;
}

}  // namespace lccool::sweep
