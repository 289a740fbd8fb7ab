// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Quantitative anchors are recomputed here through straight-line
// formula chains kept deliberately independent of the library internals.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "lccool/analytic.hpp"
#include "lccool/lindblad.hpp"
#include "lccool/model.hpp"
#include "lccool/sweep.hpp"
#include "lccool/units.hpp"
#include "support.hpp"

using namespace lccool;
using testsupport::fit_decay_rate;
using testsupport::rel_err;

namespace {

int g_passed = 0;
int g_failed = 0;

class Criterion {
 public:
  Criterion(int number, std::string title, double budget_s)
      : number_(number), title_(std::move(title)), budget_s_(budget_s),
        start_(std::chrono::steady_clock::now()) {}

  void check(bool cond, const std::string& detail) {
    if (!cond) {
      ok_ = false;
      details_ += "    failed: " + detail + "\n";
    }
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (elapsed > budget_s_) {
      ok_ = false;
      details_ += "    failed: runtime " + std::to_string(elapsed) + " s exceeds budget " +
                  std::to_string(budget_s_) + " s\n";
    }
    std::printf("[%s] criterion %d: %s (%.2f s)\n", ok_ ? "PASS" : "FAIL", number_,
                title_.c_str(), elapsed);
    if (!details_.empty()) std::fputs(details_.c_str(), stdout);
    (ok_ ? g_passed : g_failed) += 1;
  }

 private:
  int number_;
  std::string title_;
  double budget_s_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
  std::string details_;
};

// ---- independent straight-line formula chains (reference parameters) -------
// Everything in units of gamma: g = 10, kappa = 0.01, nbar = 4,
// eps/delta = 0.01, Omega = omega_c.
namespace chain {

struct Rates {
  double gp, gm, g0, gperp, gt, f;
};

Rates rates(double x) {
  Rates r;
  r.gp = std::pow((1.0 + x) / 2.0, 2);
  r.gm = std::pow((1.0 - x) / 2.0, 2);
  r.g0 = (1.0 - x * x) / 4.0;
  r.gperp = 4.0 * r.g0 + r.gp + r.gm;
  const double cos2theta = 0.01 / std::hypot(1.0, 0.01);
  r.gt = 10.0 * cos2theta * std::sqrt(1.0 - x * x);
  r.f = r.gp / r.gm;
  return r;
}

struct Point {
  double a, b, gamma_up, gamma_down, eta, n_mean, n0;
};

Point finish(const Rates& r, double a, double b, double n_qubits) {
  Point p;
  p.a = a;
  p.b = b;
  p.gamma_up = 0.01 * 4.0 + a;
  p.gamma_down = 0.01 * 5.0 + b;
  p.eta = p.gamma_down / p.gamma_up;
  p.n_mean = 1.0 / (p.eta - 1.0);
  p.n0 = r.gperp * (r.gp + r.gm) / (r.gt * r.gt * n_qubits);
  return p;
}

Point independent(double x, double n_qubits) {
  const Rates r = rates(x);
  const double c = r.gt * r.gt * n_qubits / r.gperp;
  return finish(r, c * r.gm / (r.gp + r.gm), c * r.gp / (r.gp + r.gm), n_qubits);
}

Point collective(double x, int n_qubits) {
  const Rates r = rates(x);
  // printed rational closed form of the ladder correlators
  const double f = r.f;
  const double fn = std::pow(f, n_qubits);
  const double rz = (n_qubits * (1.0 - fn * f * f) + f * (n_qubits + 2) * (fn - 1.0)) /
                    ((f - 1.0) * (fn * f - 1.0));
  const double pm = rz / (1.0 - f);
  const double mp = f * rz / (1.0 - f);
  const double gpe = r.gperp + (r.gm - r.gp) * rz;
  return finish(r, r.gt * r.gt * pm / gpe, r.gt * r.gt * mp / gpe, n_qubits);
}

}  // namespace chain

// library-side reference objects
model::QubitParams ref_qubit() {
  model::QubitParams q;
  q.delta = hz_to_angular(3.0e9);
  q.epsilon = 0.01 * q.delta;
  q.gamma = hz_to_angular(1.0e5);
  return q;
}

const double kOmegaC = hz_to_angular(1.0e7);
const double kGRef = hz_to_angular(1.0e6);

model::DressedFrame ref_frame(double x, double g = kGRef) {
  model::DriveParams d;
  d.mode = model::DriveMode::LockRabiToCavity;
  d.delta_omega = x * kOmegaC;
  return model::derive_dressed_frame(ref_qubit(), d, g, kOmegaC);
}

model::OscillatorParams ref_osc() { return {kOmegaC, hz_to_angular(1.0e3), 4.0}; }

double pipeline_n_mean(double x, int n, model::EnsembleMode mode, double kappa_hz = 1.0e3) {
  const auto fr = ref_frame(x);
  model::OscillatorParams osc{kOmegaC, hz_to_angular(kappa_hz), 4.0};
  const auto eff = analytic::effective_rates(analytic::pump_rates(fr, {n, mode}), osc);
  const auto st = analytic::steady_photon_stats(eff, fr, {n, mode}, osc);
  return st.above_threshold ? std::numeric_limits<double>::quiet_NaN() : st.n_mean;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& cmd) {
  RunResult res;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  while (fgets(buf, sizeof buf, pipe)) res.output += buf;
  const int status = pclose(pipe);
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- criteria ---------------------------------------------------------------

void criterion1() {
  Criterion c(1, "dressed-rate identities over 1e4 random detunings", 1.0);
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> xs(-1.0 + 1e-9, 1.0 - 1e-9);
  const auto q = ref_qubit();
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto fr = ref_frame(xs(rng));
    worst = std::max(worst,
                     rel_err(fr.gamma_zero * fr.gamma_zero, fr.gamma_plus * fr.gamma_minus));
    worst = std::max(
        worst, rel_err(fr.gamma_perp, q.gamma * (1.0 + fr.sin2xi * fr.sin2xi / 2.0)));
  }
  c.check(worst <= 1e-12, "worst identity deviation " + std::to_string(worst));
  c.finish();
}

void criterion2() {
  Criterion c(2, "closed-form collective moments vs Dicke rate-ladder brute force", 5.0);
  const double fs[] = {0.1, 0.5, 1.0 - 1e-4, 1.0, 1.0 + 1e-4, 2.0, 16.0, 1000.0};
  double worst = 0;
  for (double f : fs) {
    for (int n = 1; n <= 100; ++n) {
      const auto closed = analytic::collective_moments(f, n);
      const auto ladder = lindblad::dicke_rate_ladder_steady(f, n).moments;
      worst = std::max(worst, std::abs(closed.rz - ladder.rz) / (1.0 + std::abs(ladder.rz)));
      worst = std::max(worst, rel_err(closed.pm_mp, ladder.pm_mp));
      worst = std::max(worst, rel_err(closed.mp_pm, ladder.mp_pm));
    }
  }
  c.check(worst <= 1e-9, "worst moment deviation " + std::to_string(worst));
  for (int n = 1; n <= 100; ++n) {
    const auto m = analytic::collective_moments(1.0, n);
    const double expect = n * (n + 2.0) / 6.0;
    if (rel_err(m.pm_mp, expect) > 1e-12 || rel_err(m.mp_pm, expect) > 1e-12 ||
        std::abs(m.rz) > 1e-12 * n) {
      c.check(false, "f = 1 limit N(N+2)/6 violated at N = " + std::to_string(n));
      break;
    }
  }
  c.finish();
}

void criterion3() {
  Criterion c(3, "independent-ensemble cooling anchors and N-ordering", 1.0);
  const double anchors[][2] = {{1, 2.82}, {10, 0.81}, {30, 0.351}};
  for (const auto& [n, anchor] : anchors) {
    const double expect = chain::independent(0.6, n).n_mean;
    const double got = pipeline_n_mean(0.6, static_cast<int>(n), model::EnsembleMode::Independent);
    c.check(rel_err(got, expect) <= 1e-6,
            "pipeline vs chain at N = " + std::to_string(static_cast<int>(n)) + ": " +
                std::to_string(got) + " vs " + std::to_string(expect));
    c.check(rel_err(expect, anchor) <= 5e-3,
            "chain misses the figure anchor " + std::to_string(anchor));
  }

  // strict ordering across the cooling region of the figure grid
  int cooling_points = 0;
  bool ordered = true;
  for (int i = 0; i < 96; ++i) {
    const double x = -0.95 + 1.9 * i / 95.0;
    const double n1 = pipeline_n_mean(x, 1, model::EnsembleMode::Independent);
    const double n10 = pipeline_n_mean(x, 10, model::EnsembleMode::Independent);
    const double n30 = pipeline_n_mean(x, 30, model::EnsembleMode::Independent);
    if (std::isnan(n1) || std::isnan(n10) || std::isnan(n30)) continue;
    if (!(n1 < 4.0 && n10 < 4.0 && n30 < 4.0)) continue;
    ++cooling_points;
    ordered = ordered && n1 > n10 && n10 > n30;
  }
  c.check(cooling_points > 20, "cooling region unexpectedly small");
  c.check(ordered, "N = 1 > N = 10 > N = 30 ordering violated in the cooling region");
  c.finish();
}

void criterion4() {
  Criterion c(4, "collective-ensemble anchor, mode ordering, kappa monotonicity", 1.0);
  const double expect = chain::collective(0.6, 30).n_mean;
  const double got = pipeline_n_mean(0.6, 30, model::EnsembleMode::Collective);
  c.check(rel_err(got, expect) <= 1e-6, "pipeline vs chain: " + std::to_string(got) + " vs " +
                                            std::to_string(expect));
  c.check(rel_err(expect, 2.04) <= 5e-3, "chain misses the 2.04 anchor");

  // mutual cooling region: both modes valid (below threshold and saturation,
  // regime not violated) and both below the thermal occupation
  int mutual = 0;
  bool ordered = true;
  const auto osc = ref_osc();
  for (int i = 0; i < 96; ++i) {
    const double x = -0.95 + 1.9 * i / 95.0;
    const auto fr = ref_frame(x);
    bool valid = true;
    double n_ind = 0, n_coll = 0;
    for (const auto mode : {model::EnsembleMode::Independent, model::EnsembleMode::Collective}) {
      const auto eff = analytic::effective_rates(analytic::pump_rates(fr, {30, mode}), osc);
      const auto st = analytic::steady_photon_stats(eff, fr, {30, mode}, osc);
      if (st.above_threshold || !st.below_saturation || !st.regime_ok || st.n_mean >= 4.0) {
        valid = false;
        break;
      }
      (mode == model::EnsembleMode::Independent ? n_ind : n_coll) = st.n_mean;
    }
    if (!valid) continue;
    ++mutual;
    ordered = ordered && n_coll >= n_ind;
  }
  c.check(mutual > 10, "mutual cooling region unexpectedly small");
  c.check(ordered, "collective n_mean fell below independent inside the valid region");

  // reducing kappa/2pi from 1e3 to 1e2 Hz strictly lowers the collective n_mean
  int compared = 0;
  bool monotone = true;
  for (int i = 0; i < 96; ++i) {
    const double x = -0.95 + 1.9 * i / 95.0;
    const double hi = pipeline_n_mean(x, 30, model::EnsembleMode::Collective, 1.0e3);
    const double lo = pipeline_n_mean(x, 30, model::EnsembleMode::Collective, 1.0e2);
    if (std::isnan(hi) || std::isnan(lo) || hi >= 4.0) continue;
    ++compared;
    monotone = monotone && lo < hi;
  }
  c.check(compared > 10, "kappa comparison region unexpectedly small");
  c.check(monotone, "lower kappa failed to cool deeper at some point");
  c.finish();
}

void criterion5() {
  Criterion c(5, "thermal sanity of the full Lindblad steady state", 30.0);
  const auto fr = ref_frame(0.6, 0.0);  // g = 0
  lindblad::AdaptiveOptions opts;
  opts.tail_tol = 1e-12;  // drive the truncation bias well below 1e-6
  const auto res = lindblad::steady_state_adaptive(fr, {1, model::EnsembleMode::Independent},
                                                   ref_osc(), opts);
  c.check(std::abs(res.obs.n_mean - 4.0) <= 1e-6,
          "oscillator n_mean " + std::to_string(res.obs.n_mean));
  c.check(std::abs(res.obs.g2 - 2.0) <= 1e-6, "g2 " + std::to_string(res.obs.g2));
  c.check(res.obs.truncation_safe, "truncation tail above target");
  c.finish();
}

void criterion6() {
  Criterion c(6, "adiabatic-elimination oracle at widened scale separation", 300.0);
  // g~ = 0.01 gamma, kappa = 1e-4 gamma, nbar = 4, x = 0.6, resonance
  const auto probe = ref_frame(0.6, kGRef);
  const double gamma = ref_qubit().gamma;
  const double g_scaled = kGRef * (0.01 * gamma / probe.g_tilde);
  const auto fr = ref_frame(0.6, g_scaled);
  model::OscillatorParams osc{kOmegaC, 1e-4 * gamma, 4.0};
  const model::EnsembleConfig ens{1, model::EnsembleMode::Independent};

  const auto eff = analytic::effective_rates(analytic::pump_rates_independent(fr, 1), osc);
  const double n_analytic = 1.0 / (eff.eta - 1.0);
  const double rate_analytic = 2.0 * (eff.gamma_down - eff.gamma_up);

  const auto m = lindblad::build_model(fr, ens, osc, 40);
  const auto ss = lindblad::steady_state(m);
  const auto obs = lindblad::observables(m, ss);
  c.check(rel_err(obs.n_mean, n_analytic) <= 0.10,
          "steady n_mean " + std::to_string(obs.n_mean) + " vs analytic " +
              std::to_string(n_analytic));

  const auto init = lindblad::diagonal_product_state(
      m, lindblad::thermal_fock_populations(4.0, 40),
      lindblad::dressed_qubit_populations(fr, m.basis));
  const double horizon = 2.5 / rate_analytic;
  const auto traj = lindblad::evolve(m, init, horizon, 40);
  std::vector<double> t, n;
  for (const auto& pt : traj) {
    t.push_back(pt.time);
    n.push_back(pt.obs.n_mean);
  }
  const double fitted = fit_decay_rate(t, n, obs.n_mean, 0.15 * horizon, horizon);
  c.check(rel_err(fitted, rate_analytic) <= 0.10,
          "cooling rate " + std::to_string(fitted) + " vs analytic " +
              std::to_string(rate_analytic));
  c.finish();
}

void criterion7() {
  Criterion c(7, "threshold only at negative detuning; saturation flag at resonance", 1.0);
  const auto osc = ref_osc();
  int flagged = 0;
  bool only_negative = true;
  for (int i = 0; i < 96; ++i) {
    const double x = -0.95 + 1.9 * i / 95.0;
    const auto fr = ref_frame(x);
    const auto eff = analytic::effective_rates(
        analytic::pump_rates(fr, {30, model::EnsembleMode::Independent}), osc);
    if (eff.eta <= 1.0) {
      ++flagged;
      only_negative = only_negative && x < 0.0;
    }
  }
  c.check(flagged > 0, "no above-threshold points found");
  c.check(only_negative, "above-threshold point at non-negative detuning");

  const auto fr0 = ref_frame(0.0);
  const auto eff0 = analytic::effective_rates(
      analytic::pump_rates(fr0, {30, model::EnsembleMode::Independent}), osc);
  const auto st0 = analytic::steady_photon_stats(eff0, fr0,
                                                 {30, model::EnsembleMode::Independent}, osc);
  c.check(rel_err(st0.n_mean, 14.0) <= 1e-3, "n_mean formula at x = 0");
  c.check(rel_err(st0.n_saturation, 2.5) <= 1e-3, "saturation number at x = 0");
  c.check(!st0.below_saturation, "saturation flag must fire at x = 0");
  c.finish();
}

void criterion8() {
  Criterion c(8, "large-N limit of the independent ensemble", 1.0);
  const double limit = 1.0 / 15.0;  // 1/(f-1) at x = 0.6
  const double got = pipeline_n_mean(0.6, 1000000, model::EnsembleMode::Independent);
  c.check(rel_err(got, limit) <= 1e-3,
          "n_mean(1e6) = " + std::to_string(got) + " vs " + std::to_string(limit));
  c.finish();
}

void criterion9(const std::string& cli_path, const std::string& configs_dir) {
  Criterion c(9, "byte-identical CSV across repeated sweep runs", 60.0);
  char tmpl[] = "/tmp/lccool_accept_XXXXXX";
  const char* tmp = mkdtemp(tmpl);
  if (!tmp) {
    c.check(false, "cannot create temp dir");
    c.finish();
    return;
  }
  const std::string dir = tmp;
  const std::string cfg = configs_dir + "/fig2.conf";
  const auto r1 = run(cli_path + " sweep --config " + cfg + " --out " + dir + "/a.csv");
  const auto r2 = run(cli_path + " sweep --config " + cfg + " --out " + dir + "/b.csv");
  c.check(r1.exit_code == 0 && r2.exit_code == 0, "sweep runs must exit 0");
  const std::string a = slurp(dir + "/a.csv");
  const std::string b = slurp(dir + "/b.csv");
  c.check(!a.empty(), "empty CSV");
  c.check(a == b, "CSV bytes differ between runs");
  c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli_path = argc > 1 ? argv[1] : "";
  const std::string configs_dir = argc > 2 ? argv[2] : "configs";

  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (cli_path.empty()) {
    std::printf("[FAIL] criterion 9: CLI binary path not supplied\n");
    ++g_failed;
  } else {
    criterion9(cli_path, configs_dir);
  }

  std::printf("ACCEPTANCE: %d/%d criteria passed\n", g_passed, g_passed + g_failed);
  return g_failed == 0 ? 0 : 1;
}
