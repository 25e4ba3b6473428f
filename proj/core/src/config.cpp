#include "risbeam/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "risbeam/channel.hpp"
#include "risbeam/error.hpp"
#include "risbeam/metrics.hpp"

namespace risbeam {

using nlohmann::ordered_json;

std::string_view to_string(PartitionMode mode) {
  return mode == PartitionMode::whole ? "whole" : "subarray";
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::bcd ? "bcd" : "wmmse_ls";
}

std::string_view to_string(PowerMode mode) {
  return mode == PowerMode::normalized_snr ? "normalized_snr" : "physical_dbm";
}

std::string_view to_string(WeightsRule rule) {
  return rule == WeightsRule::uniform ? "uniform" : "inverse_pathloss";
}

double SystemConfig::noise_power() const {
  if (power_mode == PowerMode::normalized_snr) return 1.0;
  return noise_power_watts(noise_psd_dbm_hz, bandwidth_hz);
}

double SystemConfig::reference_loss_db() const {
  if (power_mode != PowerMode::normalized_snr) return 0.0;
  if (snr_reference_loss_db) return *snr_reference_loss_db;
  return pathloss_db(LinkKind::direct, distance(bs_position, zone_center),
                     carrier_ghz);
}

double SystemConfig::transmit_power() const {
  if (power_mode == PowerMode::normalized_snr) {
    return std::pow(10.0, snr_db.value_or(0.0) / 10.0);
  }
  return dbm_to_watts(tx_power_dbm.value_or(0.0));
}

namespace {

[[noreturn]] void field_error(std::string_view field, std::string_view what) {
  throw ConfigError("field '" + std::string(field) + "': " + std::string(what));
}

void require_at_least(std::string_view field, int value, int minimum) {
  if (value < minimum) {
    field_error(field, "must be at least " + std::to_string(minimum) +
                           ", got " + std::to_string(value));
  }
}

void require_positive(std::string_view field, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    field_error(field, "must be a positive finite number");
  }
}

}  // namespace

void SystemConfig::validate() const {
  require_at_least("bs_width", bs_width, 1);
  require_at_least("bs_height", bs_height, 1);
  require_at_least("user_width", user_width, 1);
  require_at_least("user_height", user_height, 1);
  require_at_least("ris_side", ris_side, 1);
  require_at_least("users", users, 1);
  require_positive("spacing_ratio", spacing_ratio);
  require_at_least("phase_bits", phase_bits, 1);
  if (phase_bits > 16) field_error("phase_bits", "must be at most 16");
  require_at_least("azimuth_bits", azimuth_bits, 0);
  require_at_least("elevation_bits", elevation_bits, 0);
  if (azimuth_bits > 16) field_error("azimuth_bits", "must be at most 16");
  if (elevation_bits > 16) field_error("elevation_bits", "must be at most 16");
  if (mode == PartitionMode::subarray && ris_elements() % users != 0) {
    field_error("users", "subarray mode needs ris_side^2 = " +
                             std::to_string(ris_elements()) +
                             " to be divisible by the user count " +
                             std::to_string(users));
  }
  if (power_mode == PowerMode::normalized_snr) {
    if (!snr_db) field_error("snr_db", "required when power_mode is normalized_snr");
    if (tx_power_dbm) {
      field_error("tx_power_dbm", "must be null when power_mode is normalized_snr");
    }
    if (!std::isfinite(*snr_db)) field_error("snr_db", "must be finite");
  } else {
    if (!tx_power_dbm) {
      field_error("tx_power_dbm", "required when power_mode is physical_dbm");
    }
    if (snr_db) field_error("snr_db", "must be null when power_mode is physical_dbm");
    if (!std::isfinite(*tx_power_dbm)) field_error("tx_power_dbm", "must be finite");
  }
  if (!(k1 >= 0.0)) field_error("k1", "Rician factor must be non-negative");
  if (!(k2 >= 0.0)) field_error("k2", "Rician factor must be non-negative");
  require_positive("carrier_ghz", carrier_ghz);
  require_positive("bandwidth_hz", bandwidth_hz);
  if (!std::isfinite(noise_psd_dbm_hz)) field_error("noise_psd_dbm_hz", "must be finite");
  if (snr_reference_loss_db && !std::isfinite(*snr_reference_loss_db)) {
    field_error("snr_reference_loss_db", "must be finite or null");
  }
  if (bs_position == zone_center) {
    field_error("zone_center", "must differ from bs_position");
  }
  if (!(zone_radius >= 0.0)) field_error("zone_radius", "must be non-negative");
  if (bs_position == ris_position) {
    field_error("ris_position", "must differ from bs_position");
  }
  require_at_least("trials", trials, 1);
  if (!(tol >= 0.0)) field_error("tol", "must be non-negative");
  require_at_least("max_iter", max_iter, 1);
  if (!(wmmse_tol >= 0.0)) field_error("wmmse_tol", "must be non-negative");
  require_at_least("wmmse_max_iter", wmmse_max_iter, 1);
  require_at_least("phase_sweeps", phase_sweeps, 1);
}

namespace {

ordered_json point_json(Point2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json to_json(const SystemConfig& c) {
  ordered_json j;
  j["bs_width"] = c.bs_width;
  j["bs_height"] = c.bs_height;
  j["user_width"] = c.user_width;
  j["user_height"] = c.user_height;
  j["ris_side"] = c.ris_side;
  j["users"] = c.users;
  j["spacing_ratio"] = c.spacing_ratio;
  j["phase_bits"] = c.phase_bits;
  j["azimuth_bits"] = c.azimuth_bits;
  j["elevation_bits"] = c.elevation_bits;
  j["mode"] = to_string(c.mode);
  j["algorithm"] = to_string(c.algorithm);
  j["power_mode"] = to_string(c.power_mode);
  j["snr_db"] = optional_json(c.snr_db);
  j["tx_power_dbm"] = optional_json(c.tx_power_dbm);
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["carrier_ghz"] = c.carrier_ghz;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["noise_psd_dbm_hz"] = c.noise_psd_dbm_hz;
  j["snr_reference_loss_db"] = optional_json(c.snr_reference_loss_db);
  j["bs_position"] = point_json(c.bs_position);
  j["ris_position"] = point_json(c.ris_position);
  j["zone_center"] = point_json(c.zone_center);
  j["zone_radius"] = c.zone_radius;
  j["weights_rule"] = to_string(c.weights_rule);
  j["seed_base"] = c.seed_base;
  j["trials"] = c.trials;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["wmmse_tol"] = c.wmmse_tol;
  j["wmmse_max_iter"] = c.wmmse_max_iter;
  j["phase_sweeps"] = c.phase_sweeps;
  return j;
}

class FieldReader {
 public:
  explicit FieldReader(const ordered_json& root) : root_(root) {
    if (!root_.is_object()) throw ConfigError("configuration must be a JSON object");
  }

  const ordered_json& at(const std::string& key) {
    seen_.insert(key);
    auto it = root_.find(key);
    if (it == root_.end()) field_error(key, "missing");
    return *it;
  }

  int integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_integer()) field_error(key, "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      field_error(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) field_error(key, "expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    const auto& v = at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) field_error(key, "expected a number or null");
    return v.get<double>();
  }

  Point2 point(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      field_error(key, "expected [x, y] in meters");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  template <class Enum>
  Enum choice(const std::string& key,
              std::initializer_list<std::pair<std::string_view, Enum>> options) {
    const auto& v = at(key);
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      for (const auto& [name, value] : options) {
        if (name == s) return value;
      }
    }
    std::string allowed;
    for (const auto& [name, value] : options) {
      allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    field_error(key, "expected one of: " + allowed);
  }

  void reject_unknown() const {
    for (auto it = root_.begin(); it != root_.end(); ++it) {
      if (!seen_.count(it.key())) field_error(it.key(), "unknown field");
    }
  }

 private:
  const ordered_json& root_;
  std::set<std::string> seen_;
};

}  // namespace

SystemConfig parse_config(std::string_view text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  FieldReader r(root);
  SystemConfig c;
  c.bs_width = r.integer("bs_width");
  c.bs_height = r.integer("bs_height");
  c.user_width = r.integer("user_width");
  c.user_height = r.integer("user_height");
  c.ris_side = r.integer("ris_side");
  c.users = r.integer("users");
  c.spacing_ratio = r.number("spacing_ratio");
  c.phase_bits = r.integer("phase_bits");
  c.azimuth_bits = r.integer("azimuth_bits");
  c.elevation_bits = r.integer("elevation_bits");
  c.mode = r.choice<PartitionMode>(
      "mode", {{"whole", PartitionMode::whole}, {"subarray", PartitionMode::subarray}});
  c.algorithm = r.choice<Algorithm>(
      "algorithm", {{"wmmse_ls", Algorithm::wmmse_ls}, {"bcd", Algorithm::bcd}});
  c.power_mode = r.choice<PowerMode>(
      "power_mode", {{"normalized_snr", PowerMode::normalized_snr},
                     {"physical_dbm", PowerMode::physical_dbm}});
  c.snr_db = r.optional_number("snr_db");
  c.tx_power_dbm = r.optional_number("tx_power_dbm");
  c.k1 = r.number("k1");
  c.k2 = r.number("k2");
  c.carrier_ghz = r.number("carrier_ghz");
  c.bandwidth_hz = r.number("bandwidth_hz");
  c.noise_psd_dbm_hz = r.number("noise_psd_dbm_hz");
  c.snr_reference_loss_db = r.optional_number("snr_reference_loss_db");
  c.bs_position = r.point("bs_position");
  c.ris_position = r.point("ris_position");
  c.zone_center = r.point("zone_center");
  c.zone_radius = r.number("zone_radius");
  c.weights_rule = r.choice<WeightsRule>(
      "weights_rule", {{"uniform", WeightsRule::uniform},
                       {"inverse_pathloss", WeightsRule::inverse_pathloss}});
  c.seed_base = r.unsigned_integer("seed_base");
  c.trials = r.integer("trials");
  c.tol = r.number("tol");
  c.max_iter = r.integer("max_iter");
  c.wmmse_tol = r.number("wmmse_tol");
  c.wmmse_max_iter = r.integer("wmmse_max_iter");
  c.phase_sweeps = r.integer("phase_sweeps");
  r.reject_unknown();
  c.validate();
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const SystemConfig& config) {
  return to_json(config).dump(2) + "\n";
}

void save_config(const SystemConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write configuration file '" + path + "'");
  out << dump_config(config);
}

std::uint64_t config_hash(const SystemConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace risbeam
