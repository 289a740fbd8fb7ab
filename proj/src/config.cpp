#include "lccool/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lccool/units.hpp"

namespace lccool::cli {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) {
        throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
      }
      if (!values_.emplace(key, value).second) {
        throw ConfigError("duplicate key '" + key + "'");
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second;
  }

  std::optional<std::string> take_optional(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!consumed_.count(key)) throw ConfigError("unknown key '" + key + "'");
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse number '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse integer '" + v + "'");
  }
}

model::EnsembleMode to_mode(const std::string& key, const std::string& v) {
  if (v == "independent") return model::EnsembleMode::Independent;
  if (v == "collective") return model::EnsembleMode::Collective;
  throw ConfigError("key '" + key + "': expected independent|collective, got '" + v + "'");
}

}  // namespace

SystemConfig parse_config_text(const std::string& text) {
  KeyValues kv(text);
  SystemConfig cfg;

  cfg.qubit.delta = hz_to_angular(to_double("qubit.delta_hz", kv.take("qubit.delta_hz")));
  cfg.qubit.epsilon = hz_to_angular(to_double("qubit.epsilon_hz", kv.take("qubit.epsilon_hz")));
  cfg.qubit.gamma = hz_to_angular(to_double("qubit.gamma_hz", kv.take("qubit.gamma_hz")));
  if (!(cfg.qubit.delta > 0) || !(cfg.qubit.gamma > 0) || cfg.qubit.epsilon < 0) {
    throw ConfigError("qubit parameters must satisfy delta > 0, gamma > 0, epsilon >= 0");
  }

  // coupling: scalar g or raw circuit parameters, never both
  const bool has_g = kv.has("coupling.g_hz");
  const bool has_circuit = kv.has("circuit.inductance_h") || kv.has("circuit.capacitance_f") ||
                           kv.has("circuit.mutual_h") || kv.has("circuit.persistent_current_a");
  if (has_g == has_circuit) {
    throw ConfigError("specify exactly one of coupling.g_hz or the circuit.* block");
  }
  if (has_g) {
    cfg.oscillator.omega_c =
        hz_to_angular(to_double("oscillator.omega_c_hz", kv.take("oscillator.omega_c_hz")));
    cfg.coupling_g = hz_to_angular(to_double("coupling.g_hz", kv.take("coupling.g_hz")));
  } else {
    if (kv.has("oscillator.omega_c_hz")) {
      throw ConfigError("oscillator.omega_c_hz conflicts with the circuit.* block "
                        "(omega_c = 1/sqrt(LC) is derived)");
    }
    model::RawCircuitParams raw;
    raw.inductance = to_double("circuit.inductance_h", kv.take("circuit.inductance_h"));
    raw.capacitance = to_double("circuit.capacitance_f", kv.take("circuit.capacitance_f"));
    raw.mutual_inductance = to_double("circuit.mutual_h", kv.take("circuit.mutual_h"));
    raw.persistent_current =
        to_double("circuit.persistent_current_a", kv.take("circuit.persistent_current_a"));
    model::CircuitDerivation derived;
    try {
      derived = model::derive_circuit_params(raw);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("circuit.*: ") + e.what());
    }
    cfg.oscillator.omega_c = derived.omega_c;
    cfg.coupling_g = derived.g;
  }
  if (!(cfg.oscillator.omega_c > 0)) throw ConfigError("omega_c must be positive");
  if (cfg.coupling_g < 0) throw ConfigError("coupling g must be non-negative");

  cfg.oscillator.kappa =
      hz_to_angular(to_double("oscillator.kappa_hz", kv.take("oscillator.kappa_hz")));
  if (!(cfg.oscillator.kappa > 0)) throw ConfigError("kappa must be positive");

  const auto nbar = kv.take_optional("oscillator.nbar");
  const auto temp = kv.take_optional("oscillator.temperature_k");
  if (nbar.has_value() == temp.has_value()) {
    throw ConfigError("specify exactly one of oscillator.nbar or oscillator.temperature_k");
  }
  if (nbar) {
    cfg.oscillator.nbar = to_double("oscillator.nbar", *nbar);
    if (cfg.oscillator.nbar < 0) throw ConfigError("nbar must be non-negative");
  } else {
    try {
      cfg.oscillator.nbar = model::thermal_occupation(
          cfg.oscillator.omega_c, to_double("oscillator.temperature_k", *temp));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("oscillator.temperature_k: ") + e.what());
    }
  }

  cfg.ensemble.n_qubits = to_int("ensemble.n", kv.take("ensemble.n"));
  if (cfg.ensemble.n_qubits < 1) throw ConfigError("ensemble.n must be at least 1");
  cfg.ensemble.mode = to_mode("ensemble.mode", kv.take("ensemble.mode"));

  const std::string drive_mode = kv.take("drive.mode");
  if (drive_mode == "lock_rabi_to_cavity" || drive_mode == "locked") {
    cfg.drive.mode = model::DriveMode::LockRabiToCavity;
    cfg.drive.delta_omega_over_omega = to_double("drive.delta_omega_over_omega",
                                                 kv.take("drive.delta_omega_over_omega"));
    if (!(std::abs(cfg.drive.delta_omega_over_omega) < 1.0)) {
      throw ConfigError("drive.delta_omega_over_omega must lie in (-1, 1)");
    }
  } else if (drive_mode == "explicit") {
    cfg.drive.mode = model::DriveMode::Explicit;
    cfg.drive.omega = hz_to_angular(to_double("drive.omega_hz", kv.take("drive.omega_hz")));
    cfg.drive.rabi = hz_to_angular(to_double("drive.rabi_hz", kv.take("drive.rabi_hz")));
    if (cfg.drive.rabi < 0) throw ConfigError("drive.rabi_hz must be non-negative");
  } else {
    throw ConfigError("drive.mode: expected lock_rabi_to_cavity|explicit, got '" + drive_mode +
                      "'");
  }

  if (auto v = kv.take_optional("oracle.n_max")) {
    cfg.oracle.n_max = to_int("oracle.n_max", *v);
    if (cfg.oracle.n_max < 1) throw ConfigError("oracle.n_max must be at least 1");
  }
  if (auto v = kv.take_optional("oracle.tolerance")) {
    cfg.oracle.tolerance = to_double("oracle.tolerance", *v);
    if (!(cfg.oracle.tolerance > 0)) throw ConfigError("oracle.tolerance must be positive");
  }

  if (auto v = kv.take_optional("sweep.var")) {
    cfg.sweep.present = true;
    cfg.sweep.variable = *v;
    cfg.sweep.min = to_double("sweep.min", kv.take("sweep.min"));
    cfg.sweep.max = to_double("sweep.max", kv.take("sweep.max"));
    cfg.sweep.steps = to_int("sweep.steps", kv.take("sweep.steps"));
    if (auto lst = kv.take_optional("sweep.n_list")) {
      for (const auto& item : split(*lst, ',')) {
        cfg.sweep.n_list.push_back(to_int("sweep.n_list", item));
      }
    }
    if (auto lst = kv.take_optional("sweep.kappa_list_hz")) {
      for (const auto& item : split(*lst, ',')) {
        cfg.sweep.kappa_list.push_back(hz_to_angular(to_double("sweep.kappa_list_hz", item)));
      }
    }
    if (auto lst = kv.take_optional("sweep.modes")) {
      for (const auto& item : split(*lst, ',')) {
        cfg.sweep.modes.push_back(to_mode("sweep.modes", item));
      }
    }
  }

  kv.reject_unknown();
  return cfg;
}

SystemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_overrides(SystemConfig& config, const Overrides& overrides) {
  if (overrides.mode) config.ensemble.mode = *overrides.mode;
  if (overrides.n_qubits) {
    if (*overrides.n_qubits < 1) throw UsageError("--n must be at least 1");
    config.ensemble.n_qubits = *overrides.n_qubits;
  }
  if (overrides.detuning) {
    config.drive.mode = model::DriveMode::LockRabiToCavity;
    config.drive.delta_omega_over_omega = *overrides.detuning;
  }
}

model::DriveParams drive_params(const SystemConfig& config) {
  model::DriveParams dp;
  dp.mode = config.drive.mode;
  if (config.drive.mode == model::DriveMode::LockRabiToCavity) {
    dp.delta_omega = config.drive.delta_omega_over_omega * config.oscillator.omega_c;
  } else {
    const double delta_e = std::hypot(config.qubit.delta, config.qubit.epsilon);
    dp.delta_omega = delta_e - config.drive.omega;
    dp.rabi_bare = config.drive.rabi;
  }
  return dp;
}

model::DressedFrame frame_for(const SystemConfig& config) {
  return model::derive_dressed_frame(config.qubit, drive_params(config), config.coupling_g,
                                     config.oscillator.omega_c);
}

}  // namespace lccool::cli
