// Scenario configuration files: flat `key = value` text, `#` comments,
// unknown keys rejected, missing keys take the stock defaults. The
// resolved configuration serializes back to the same format, and the
// run manifest embeds it so that any output directory can be re-run
// verbatim.

#ifndef RPLSIM_CONFIG_HPP
#define RPLSIM_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rplsim/engine.hpp"
#include "rplsim/version.hpp"

namespace rplsim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_number(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "': not a number: '" + v + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return i;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "': not an integer: '" + v + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const unsigned long long i = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return i;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "': not an unsigned integer: '" + v + "'");
  }
}

}  // namespace config_detail

inline void validate_config(const ScenarioConfig& cfg);

// Parse configuration text. Unknown keys are rejected with the key name
// and line number; out-of-range values likewise.
inline ScenarioConfig parse_config_text(const std::string& text) {
  using config_detail::parse_int;
  using config_detail::parse_number;
  using config_detail::parse_u64;
  using config_detail::trim;

  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }

    if (key == "area_m") cfg.area_m = parse_number(key, val, line);
    else if (key == "n_sensors") cfg.n_sensors = static_cast<int>(parse_int(key, val, line));
    else if (key == "n_attackers") cfg.n_attackers = static_cast<int>(parse_int(key, val, line));
    else if (key == "sim_seconds") cfg.sim_seconds = parse_number(key, val, line);
    else if (key == "objective_function") {
      if (val == "MRHOF") cfg.objective_function = ObjFunc::MRHOF;
      else if (val == "OF0") cfg.objective_function = ObjFunc::OF0;
      else throw ConfigError("line " + std::to_string(line) +
                             ": objective_function must be MRHOF or OF0");
    }
    else if (key == "dio_imin_s") cfg.dio_imin_s = parse_number(key, val, line);
    else if (key == "dio_imax_s") cfg.dio_imax_s = parse_number(key, val, line);
    else if (key == "replay_interval_s") cfg.replay_interval_s = parse_number(key, val, line);
    else if (key == "data_interval_s") cfg.data_interval_s = parse_number(key, val, line);
    else if (key == "data_size_bytes")
      cfg.data_size_bytes = static_cast<int>(parse_int(key, val, line));
    else if (key == "tx_power_dbm") cfg.tx_power_dbm = parse_number(key, val, line);
    else if (key == "attacker_activation_s")
      cfg.attacker_activation_s = parse_number(key, val, line);
    else if (key == "attack_variant") {
      if (val == "NONE") cfg.attack_variant = AttackVariant::NONE;
      else if (val == "NON_SPOOFED") cfg.attack_variant = AttackVariant::NON_SPOOFED;
      else if (val == "SPOOFED") cfg.attack_variant = AttackVariant::SPOOFED;
      else throw ConfigError("line " + std::to_string(line) +
                             ": attack_variant must be NONE, NON_SPOOFED or SPOOFED");
    }
    else if (key == "seed") cfg.seed = parse_u64(key, val, line);
    else if (key == "replications")
      cfg.replications = static_cast<int>(parse_int(key, val, line));
    else if (key == "radio_comm_range_m") cfg.radio.comm_range_m = parse_number(key, val, line);
    else if (key == "radio_interference_range_m")
      cfg.radio.interference_range_m = parse_number(key, val, line);
    else if (key == "radio_bitrate_bps") cfg.radio.bitrate_bps = parse_number(key, val, line);
    else if (key == "radio_base_loss_prob")
      cfg.radio.base_loss_prob = parse_number(key, val, line);
    else if (key == "radio_csma_max_backoffs")
      cfg.radio.csma_max_backoffs = static_cast<int>(parse_int(key, val, line));
    else if (key == "radio_backoff_window_s")
      cfg.radio.backoff_window_s = parse_number(key, val, line);
    else if (key == "radio_wake_interval_s")
      cfg.radio.wake_interval_s = parse_number(key, val, line);
    else if (key == "radio_check_duration_s")
      cfg.radio.check_duration_s = parse_number(key, val, line);
    else if (key == "radio_mac_retries")
      cfg.radio.mac_retries = static_cast<int>(parse_int(key, val, line));
    else if (key == "radio_mac_retry_window_s")
      cfg.radio.mac_retry_window_s = parse_number(key, val, line);
    else if (key == "energy_volts") cfg.profile.volts = parse_number(key, val, line);
    else if (key == "energy_i_cpu_a") cfg.profile.i_cpu_a = parse_number(key, val, line);
    else if (key == "energy_i_lpm_a") cfg.profile.i_lpm_a = parse_number(key, val, line);
    else if (key == "energy_i_tx_a") cfg.profile.i_tx_a = parse_number(key, val, line);
    else if (key == "energy_i_rx_a") cfg.profile.i_rx_a = parse_number(key, val, line);
    else if (key == "detector_window_s") cfg.detector_window_s = parse_number(key, val, line);
    else if (key == "detector_fence_k") cfg.detector_fence_k = parse_number(key, val, line);
    else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

inline void validate_config(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (cfg.area_m <= 0) fail("area_m must be positive");
  if (cfg.n_sensors < 1) fail("n_sensors must be >= 1");
  if (cfg.n_attackers < 0 || cfg.n_attackers > cfg.n_sensors) {
    fail("n_attackers must be in [0, n_sensors]");
  }
  if (cfg.sim_seconds < 0) fail("sim_seconds must be >= 0");
  if (cfg.dio_imin_s <= 0 || cfg.dio_imax_s < cfg.dio_imin_s) {
    fail("DIO intervals must satisfy 0 < imin <= imax");
  }
  if (cfg.replay_interval_s <= 0) fail("replay_interval_s must be positive");
  if (cfg.data_interval_s <= 0) fail("data_interval_s must be positive");
  if (cfg.data_size_bytes <= 0) fail("data_size_bytes must be positive");
  if (cfg.attacker_activation_s < 0) fail("attacker_activation_s must be >= 0");
  if (cfg.replications < 1) fail("replications must be >= 1");
  if (cfg.radio.comm_range_m <= 0) fail("radio_comm_range_m must be positive");
  if (cfg.radio.interference_range_m < cfg.radio.comm_range_m) {
    fail("radio_interference_range_m must be >= radio_comm_range_m");
  }
  if (cfg.radio.bitrate_bps <= 0) fail("radio_bitrate_bps must be positive");
  if (cfg.radio.base_loss_prob < 0 || cfg.radio.base_loss_prob >= 1) {
    fail("radio_base_loss_prob must be in [0, 1)");
  }
  if (cfg.radio.csma_max_backoffs < 0) fail("radio_csma_max_backoffs must be >= 0");
  if (cfg.radio.backoff_window_s <= 0) fail("radio_backoff_window_s must be positive");
  if (cfg.radio.wake_interval_s <= 0) fail("radio_wake_interval_s must be positive");
  if (cfg.radio.check_duration_s <= 0) fail("radio_check_duration_s must be positive");
  if (cfg.radio.mac_retries < 0) fail("radio_mac_retries must be >= 0");
  if (cfg.radio.mac_retry_window_s <= 0) fail("radio_mac_retry_window_s must be positive");
  if (cfg.profile.volts <= 0 || cfg.profile.i_cpu_a <= 0 || cfg.profile.i_lpm_a <= 0 ||
      cfg.profile.i_tx_a <= 0 || cfg.profile.i_rx_a <= 0) {
    fail("electrical profile values must be positive");
  }
  if (cfg.detector_window_s <= 0) fail("detector_window_s must be positive");
  if (cfg.detector_fence_k < 0) fail("detector_fence_k must be >= 0");
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace config_detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace config_detail

// Serialize a resolved configuration; parse_config_text() of the result
// reproduces it exactly.
inline std::string serialize_config(const ScenarioConfig& cfg) {
  using config_detail::num;
  std::ostringstream os;
  os << "area_m = " << num(cfg.area_m) << "\n";
  os << "n_sensors = " << cfg.n_sensors << "\n";
  os << "n_attackers = " << cfg.n_attackers << "\n";
  os << "sim_seconds = " << num(cfg.sim_seconds) << "\n";
  os << "objective_function = "
     << (cfg.objective_function == ObjFunc::MRHOF ? "MRHOF" : "OF0") << "\n";
  os << "dio_imin_s = " << num(cfg.dio_imin_s) << "\n";
  os << "dio_imax_s = " << num(cfg.dio_imax_s) << "\n";
  os << "replay_interval_s = " << num(cfg.replay_interval_s) << "\n";
  os << "data_interval_s = " << num(cfg.data_interval_s) << "\n";
  os << "data_size_bytes = " << cfg.data_size_bytes << "\n";
  os << "tx_power_dbm = " << num(cfg.tx_power_dbm) << "\n";
  os << "attacker_activation_s = " << num(cfg.attacker_activation_s) << "\n";
  switch (cfg.attack_variant) {
    case AttackVariant::NONE: os << "attack_variant = NONE\n"; break;
    case AttackVariant::NON_SPOOFED: os << "attack_variant = NON_SPOOFED\n"; break;
    case AttackVariant::SPOOFED: os << "attack_variant = SPOOFED\n"; break;
  }
  os << "seed = " << cfg.seed << "\n";
  os << "replications = " << cfg.replications << "\n";
  os << "radio_comm_range_m = " << num(cfg.radio.comm_range_m) << "\n";
  os << "radio_interference_range_m = " << num(cfg.radio.interference_range_m) << "\n";
  os << "radio_bitrate_bps = " << num(cfg.radio.bitrate_bps) << "\n";
  os << "radio_base_loss_prob = " << num(cfg.radio.base_loss_prob) << "\n";
  os << "radio_csma_max_backoffs = " << cfg.radio.csma_max_backoffs << "\n";
  os << "radio_backoff_window_s = " << num(cfg.radio.backoff_window_s) << "\n";
  os << "radio_wake_interval_s = " << num(cfg.radio.wake_interval_s) << "\n";
  os << "radio_check_duration_s = " << num(cfg.radio.check_duration_s) << "\n";
  os << "radio_mac_retries = " << cfg.radio.mac_retries << "\n";
  os << "radio_mac_retry_window_s = " << num(cfg.radio.mac_retry_window_s) << "\n";
  os << "energy_volts = " << num(cfg.profile.volts) << "\n";
  os << "energy_i_cpu_a = " << num(cfg.profile.i_cpu_a) << "\n";
  os << "energy_i_lpm_a = " << num(cfg.profile.i_lpm_a) << "\n";
  os << "energy_i_tx_a = " << num(cfg.profile.i_tx_a) << "\n";
  os << "energy_i_rx_a = " << num(cfg.profile.i_rx_a) << "\n";
  os << "detector_window_s = " << num(cfg.detector_window_s) << "\n";
  os << "detector_fence_k = " << num(cfg.detector_fence_k) << "\n";
  return os.str();
}

// Reproducibility manifest: tool version, seed list and the full
// resolved configuration as parseable key = value lines.
struct RunManifest {
  std::string config_path;  // empty when defaults were used
  ScenarioConfig config;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
};

inline std::string manifest_text(const RunManifest& m) {
  std::ostringstream os;
  os << "# rplsim " << kVersion << " run manifest\n";
  os << "# config file: " << (m.config_path.empty() ? "<defaults>" : m.config_path) << "\n";
  os << "# output directory: " << m.out_dir << "\n";
  os << "# seeds:";
  for (auto s : m.seeds) os << " " << s;
  os << "\n";
  os << serialize_config(m.config);
  return os.str();
}

}  // namespace rplsim

#endif  // RPLSIM_CONFIG_HPP
