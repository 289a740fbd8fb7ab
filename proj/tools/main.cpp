// Command-line front end: config ingestion, one subcommand per pipeline stage,
// and the analytic-vs-oracle validation harness.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lccool/analytic.hpp"
#include "lccool/config.hpp"
#include "lccool/lindblad.hpp"
#include "lccool/model.hpp"
#include "lccool/sweep.hpp"
#include "lccool/units.hpp"

using namespace lccool;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::string> mode;
  std::optional<int> n_qubits;
  std::optional<double> detuning;
  std::optional<int> n_max;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file")->required();
  cmd->add_option("--out", args.out_path, "machine-readable output path");
  cmd->add_option("--mode", args.mode, "ensemble mode override (independent|collective)");
  cmd->add_option("--n", args.n_qubits, "qubit number override");
  cmd->add_option("--detuning", args.detuning, "delta_omega/Omega override (locked mode)");
  cmd->add_option("--nmax", args.n_max, "Fock truncation override");
}

cli::SystemConfig load_config(const CommonArgs& args) {
  cli::SystemConfig cfg = cli::parse_config_file(args.config_path);
  cli::Overrides ov;
  if (args.mode) {
    if (*args.mode == "independent") {
      ov.mode = model::EnsembleMode::Independent;
    } else if (*args.mode == "collective") {
      ov.mode = model::EnsembleMode::Collective;
    } else {
      throw UsageError("--mode must be independent or collective");
    }
  }
  ov.n_qubits = args.n_qubits;
  ov.detuning = args.detuning;
  cli::apply_overrides(cfg, ov);
  if (args.n_max) {
    if (*args.n_max < 1) throw UsageError("--nmax must be at least 1");
    cfg.oracle.n_max = *args.n_max;
  }
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_keyvals(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

int cmd_dressed(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto fr = cli::frame_for(cfg);
  const auto report = model::regime_check(fr, cfg.ensemble, cfg.oscillator);
  const double g = fr.gamma;

  std::cout << "dressed frame (frequencies as omega/2pi in Hz)\n";
  std::cout << "  DeltaE      = " << fmt(angular_to_hz(fr.delta_e)) << " Hz\n";
  std::cout << "  cos2theta   = " << fmt(fr.cos2theta) << ", sin2theta = " << fmt(fr.sin2theta)
            << "\n";
  std::cout << "  Omega       = " << fmt(angular_to_hz(fr.omega_rabi)) << " Hz\n";
  std::cout << "  delta_omega = " << fmt(angular_to_hz(fr.delta_omega)) << " Hz ("
            << fmt(fr.delta_omega / fr.omega_rabi) << " Omega)\n";
  std::cout << "  Rabi_bare   = " << fmt(angular_to_hz(fr.rabi_bare)) << " Hz\n";
  std::cout << "  cos2xi      = " << fmt(fr.cos2xi) << ", sin2xi = " << fmt(fr.sin2xi) << "\n";
  std::cout << "  g_tilde     = " << fmt(angular_to_hz(fr.g_tilde)) << " Hz\n";
  std::cout << "  g0          = " << fmt(angular_to_hz(fr.g0)) << " Hz\n";
  std::cout << "  gamma_plus  = " << fmt(angular_to_hz(fr.gamma_plus)) << " Hz ("
            << fmt(fr.gamma_plus / g) << " gamma)\n";
  std::cout << "  gamma_minus = " << fmt(angular_to_hz(fr.gamma_minus)) << " Hz ("
            << fmt(fr.gamma_minus / g) << " gamma)\n";
  std::cout << "  gamma_zero  = " << fmt(angular_to_hz(fr.gamma_zero)) << " Hz ("
            << fmt(fr.gamma_zero / g) << " gamma)\n";
  std::cout << "  Gamma_perp  = " << fmt(angular_to_hz(fr.gamma_perp)) << " Hz ("
            << fmt(fr.gamma_perp / g) << " gamma)\n";
  std::cout << "  f           = " << fmt(fr.f) << "\n";
  std::cout << "regime (" << model::to_string(cfg.ensemble.mode)
            << ", N = " << cfg.ensemble.n_qubits << ")\n";
  for (const auto& e : report.entries) {
    std::cout << "  " << e.name << ": ratio " << fmt(e.ratio) << " -> "
              << model::to_string(e.status) << "\n";
  }
  std::cout << "  overall: " << model::to_string(report.overall) << "\n";

  std::vector<std::pair<std::string, std::string>> kv = {
      {"delta_e_hz", fmt(angular_to_hz(fr.delta_e))},
      {"cos2theta", fmt(fr.cos2theta)},
      {"sin2theta", fmt(fr.sin2theta)},
      {"omega_rabi_hz", fmt(angular_to_hz(fr.omega_rabi))},
      {"delta_omega_hz", fmt(angular_to_hz(fr.delta_omega))},
      {"rabi_bare_hz", fmt(angular_to_hz(fr.rabi_bare))},
      {"cos2xi", fmt(fr.cos2xi)},
      {"sin2xi", fmt(fr.sin2xi)},
      {"g_tilde_hz", fmt(angular_to_hz(fr.g_tilde))},
      {"g0_hz", fmt(angular_to_hz(fr.g0))},
      {"gamma_plus_hz", fmt(angular_to_hz(fr.gamma_plus))},
      {"gamma_minus_hz", fmt(angular_to_hz(fr.gamma_minus))},
      {"gamma_zero_hz", fmt(angular_to_hz(fr.gamma_zero))},
      {"gamma_perp_hz", fmt(angular_to_hz(fr.gamma_perp))},
      {"f", fmt(fr.f)},
      {"regime_overall", model::to_string(report.overall)},
  };
  write_keyvals(args.out_path, kv);
  return 0;
}

sweep::SweepRecord steady_record(const cli::SystemConfig& cfg) {
  // single-point sweep record reuses the tabular schema; sweeping kappa over
  // a degenerate grid leaves the configured drive (either mode) untouched
  cli::SystemConfig one = cfg;
  one.sweep.present = true;
  one.sweep.variable = "kappa";
  one.sweep.min = one.sweep.max = cfg.oscillator.kappa;
  one.sweep.steps = 2;
  one.sweep.n_list = {cfg.ensemble.n_qubits};
  one.sweep.kappa_list = {cfg.oscillator.kappa};
  one.sweep.modes = {cfg.ensemble.mode};
  return sweep::run_sweep(sweep::make_sweep_spec(one)).at(0);
}

int cmd_steady(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto fr = cli::frame_for(cfg);
  const auto eff = analytic::effective_rates(analytic::pump_rates(fr, cfg.ensemble),
                                             cfg.oscillator);
  const auto st = analytic::steady_photon_stats(eff, fr, cfg.ensemble, cfg.oscillator);

  std::cout << "steady state (" << model::to_string(cfg.ensemble.mode)
            << ", N = " << cfg.ensemble.n_qubits << ")\n";
  std::cout << "  eta          = " << fmt(eff.eta) << "\n";
  if (st.above_threshold) {
    std::cout << "  AboveThreshold: eta <= 1, no normalizable steady state\n";
  } else {
    std::cout << "  n_mean       = " << fmt(st.n_mean) << "\n";
    std::cout << "  nbar         = " << fmt(cfg.oscillator.nbar) << "\n";
    std::cout << "  n_saturation = " << fmt(st.n_saturation) << "\n";
    std::cout << "  g2           = " << fmt(st.g2) << "\n";
    std::cout << "  alpha        = " << fmt(st.alpha) << "\n";
    std::cout << "  below_saturation = " << (st.below_saturation ? "yes" : "no") << "\n";
    if (!st.below_saturation) {
      std::cout << "  warning: n_mean exceeds the saturation number; the reduced"
                   " equation is outside its validity range\n";
    }
  }
  std::cout << "  regime_ok    = " << (st.regime_ok ? "yes" : "no") << "\n";

  if (!args.out_path.empty()) {
    sweep::emit_csv_file({steady_record(cfg)}, args.out_path);
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  if (args.out_path.empty()) throw UsageError("sweep requires --out PATH");
  const auto cfg = load_config(args);
  const auto spec = sweep::make_sweep_spec(cfg);
  const auto table = sweep::run_sweep(spec);
  const auto bytes = sweep::emit_csv_file(table, args.out_path);
  std::cout << "wrote " << table.size() << " records (" << bytes << " bytes) to "
            << args.out_path << "\n";
  return 0;
}

int cmd_dist(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto fr = cli::frame_for(cfg);
  const auto eff = analytic::effective_rates(analytic::pump_rates(fr, cfg.ensemble),
                                             cfg.oscillator);
  const int n_max = cfg.oracle.n_max;
  std::vector<double> p;
  try {
    p = analytic::photon_distribution(eff, n_max);
  } catch (const AboveThresholdError&) {
    std::cout << "AboveThreshold: eta = " << fmt(eff.eta)
              << " <= 1, no normalizable distribution\n";
    return 0;
  }
  std::cout << "n,p,cumulative\n";
  std::ostringstream machine;
  machine << "n,p,cumulative\n";
  double cum = 0;
  for (size_t n = 0; n < p.size(); ++n) {
    cum += p[n];
    std::cout << n << "," << fmt(p[n]) << "," << fmt(cum) << "\n";
    machine << n << "," << fmt(p[n]) << "," << fmt(cum) << "\n";
  }
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw Error("cannot open '" + args.out_path + "' for writing");
    out << machine.str();
  }
  return 0;
}

struct ValidationRow {
  std::string name;
  double oracle = 0;
  double analytic_value = 0;
  double deviation = 0;
};

std::vector<ValidationRow> validate_point(const cli::SystemConfig& cfg, double tol_tail) {
  const auto fr = cli::frame_for(cfg);
  const auto eff = analytic::effective_rates(analytic::pump_rates(fr, cfg.ensemble),
                                             cfg.oscillator);
  const auto st = analytic::steady_photon_stats(eff, fr, cfg.ensemble, cfg.oscillator);

  lindblad::AdaptiveOptions opts;
  opts.tail_tol = tol_tail;
  opts.n_max_cap = std::max(cfg.oracle.n_max, 8);
  lindblad::AdaptiveResult res;
  try {
    res = lindblad::steady_state_adaptive(fr, cfg.ensemble, cfg.oscillator, opts);
  } catch (const DimensionTooLarge&) {
    // fall back to the configured cap even if the tail target was not reached
    auto model_ = lindblad::build_model(fr, cfg.ensemble, cfg.oscillator, cfg.oracle.n_max);
    res.state = lindblad::steady_state(model_);
    res.obs = lindblad::observables(model_, res.state, tol_tail);
    res.model = std::move(model_);
  }

  double rz_analytic;
  if (cfg.ensemble.mode == model::EnsembleMode::Independent) {
    rz_analytic = cfg.ensemble.n_qubits * (fr.gamma_minus - fr.gamma_plus) /
                  (fr.gamma_plus + fr.gamma_minus);
  } else {
    rz_analytic = analytic::collective_moments(fr.f, cfg.ensemble.n_qubits).rz;
  }

  auto dev = [](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
  };
  std::vector<ValidationRow> rows;
  const double n_analytic = st.above_threshold
                                ? std::numeric_limits<double>::quiet_NaN()
                                : st.n_mean;
  rows.push_back({"n_mean", res.obs.n_mean, n_analytic, dev(res.obs.n_mean, n_analytic)});
  rows.push_back({"g2", res.obs.g2, 2.0, dev(res.obs.g2, 2.0)});
  rows.push_back({"rz", res.obs.rz, rz_analytic, dev(res.obs.rz, rz_analytic)});
  return rows;
}

int cmd_validate(const CommonArgs& args) {
  const auto cfg = load_config(args);

  // scale-separated reference point: g~ -> 0.01 gamma, kappa -> 1e-4 gamma
  cli::SystemConfig sep = cfg;
  const auto fr0 = cli::frame_for(cfg);
  if (fr0.g_tilde != 0) {
    sep.coupling_g = cfg.coupling_g * (0.01 * cfg.qubit.gamma / std::abs(fr0.g_tilde));
  }
  sep.oscillator.kappa = 1e-4 * cfg.qubit.gamma;

  bool pass = true;
  std::cout << "validate: scale-separated point (g~ = 0.01 gamma, kappa = 1e-4 gamma)\n";
  for (const auto& row : validate_point(sep, cfg.oracle.tolerance)) {
    const bool ok = row.deviation <= 0.10;
    pass = pass && ok;
    std::cout << "  " << row.name << ": oracle " << fmt(row.oracle) << " vs analytic "
              << fmt(row.analytic_value) << " (rel dev " << fmt(row.deviation) << ") "
              << (ok ? "PASS" : "FAIL") << "\n";
  }
  std::cout << (pass ? "scale-separated comparison PASSED (tolerance 10%)\n"
                     : "scale-separated comparison FAILED (tolerance 10%)\n");

  std::cout << "validate: configured point (informational)\n";
  for (const auto& row : validate_point(cfg, cfg.oracle.tolerance)) {
    std::cout << "  " << row.name << ": oracle " << fmt(row.oracle) << " vs analytic "
              << fmt(row.analytic_value) << " (rel dev " << fmt(row.deviation) << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dressed-state sideband cooling of an LC resonator: closed-form pipeline "
               "and Lindblad oracle"};
  app.require_subcommand(1);

  CommonArgs dressed_args, steady_args, sweep_args, validate_args, dist_args;
  auto* dressed = app.add_subcommand("dressed", "derived dressed-frame quantities and regime");
  attach_common(dressed, dressed_args);
  auto* steady = app.add_subcommand("steady", "closed-form steady-state photon statistics");
  attach_common(steady, steady_args);
  auto* sweepc = app.add_subcommand("sweep", "parameter sweep to CSV");
  attach_common(sweepc, sweep_args);
  auto* validate = app.add_subcommand("validate", "analytic vs Lindblad-oracle comparison");
  attach_common(validate, validate_args);
  auto* dist = app.add_subcommand("dist", "photon-number distribution");
  attach_common(dist, dist_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (dressed->parsed()) return cmd_dressed(dressed_args);
    if (steady->parsed()) return cmd_steady(steady_args);
    if (sweepc->parsed()) return cmd_sweep(sweep_args);
    if (validate->parsed()) return cmd_validate(validate_args);
    if (dist->parsed()) return cmd_dist(dist_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
