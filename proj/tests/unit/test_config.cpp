#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "risbeam/config.hpp"
#include "risbeam/error.hpp"

using namespace risbeam;
using nlohmann::ordered_json;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string with(const std::string& key, const ordered_json& value) {
  ordered_json j = ordered_json::parse(dump_config(SystemConfig{}));
  j[key] = value;
  return j.dump();
}

}  // namespace

TEST_CASE("defaults match the reference scenario") {
  const SystemConfig c;
  CHECK(c.bs_width == 2);
  CHECK(c.bs_height == 2);
  CHECK(c.user_width == 2);
  CHECK(c.user_height == 2);
  CHECK(c.ris_side == 10);
  CHECK(c.ris_elements() == 100);
  CHECK(c.users == 4);
  CHECK(c.phase_bits == 1);
  CHECK(c.azimuth_bits == 2);
  CHECK(c.elevation_bits == 1);
  CHECK(c.k1 == 10.0);
  CHECK(c.k2 == 10.0);
  CHECK(c.carrier_ghz == 100.0);
  CHECK(c.bandwidth_hz == 1e10);
  CHECK(c.noise_psd_dbm_hz == -220.0);
  CHECK(c.zone_center == Point2{100.0, 40.0});
  CHECK(c.zone_radius == 20.0);
  CHECK(c.tol == 1e-4);
  CHECK(c.max_iter == 200);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("default config round-trips through text and files") {
  const SystemConfig c;
  CHECK(parse_config(dump_config(c)) == c);

  SystemConfig d;
  d.mode = PartitionMode::whole;
  d.algorithm = Algorithm::wmmse_ls;
  d.power_mode = PowerMode::physical_dbm;
  d.snr_db.reset();
  d.tx_power_dbm = 33.5;
  d.snr_reference_loss_db = 120.0;
  d.weights_rule = WeightsRule::inverse_pathloss;
  d.seed_base = 18446744073709551615ULL;
  d.users = 3;
  CHECK(parse_config(dump_config(d)) == d);

  const auto path = std::filesystem::temp_directory_path() / "risbeam_config_roundtrip.json";
  save_config(d, path.string());
  CHECK(load_config(path.string()) == d);
  std::filesystem::remove(path);
  CHECK(config_hash(c) != config_hash(d));
  CHECK(config_hash(c) == config_hash(parse_config(dump_config(c))));
}

TEST_CASE("divisibility in subarray mode") {
  CHECK_NOTHROW(parse_config(with("users", 4)));
  const std::string err = error_of(with("users", 3));
  CHECK(err.find("users") != std::string::npos);
  CHECK(err.find("divisible") != std::string::npos);
  ordered_json j = ordered_json::parse(with("users", 3));
  j["mode"] = "whole";
  CHECK_NOTHROW(parse_config(j.dump()));
}

TEST_CASE("missing, unknown and invalid fields are named") {
  ordered_json j = ordered_json::parse(dump_config(SystemConfig{}));
  j.erase("k1");
  CHECK(error_of(j.dump()).find("'k1'") != std::string::npos);

  j = ordered_json::parse(dump_config(SystemConfig{}));
  j["colour"] = 1;
  CHECK(error_of(j.dump()).find("'colour'") != std::string::npos);

  CHECK(error_of(with("ris_side", 0)).find("'ris_side'") != std::string::npos);
  CHECK(error_of(with("mode", "diagonal")).find("'mode'") != std::string::npos);
  CHECK(error_of(with("carrier_ghz", -1.0)).find("'carrier_ghz'") != std::string::npos);
  CHECK(error_of(with("trials", "ten")).find("'trials'") != std::string::npos);
  CHECK(error_of(with("tx_power_dbm", 30.0)).find("'tx_power_dbm'") != std::string::npos);
  CHECK(error_of(with("snr_db", nullptr)).find("'snr_db'") != std::string::npos);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("power semantics") {
  SystemConfig c;
  c.snr_db = 7.0;
  CHECK(c.noise_power() == 1.0);
  CHECK(c.transmit_power() == doctest::Approx(std::pow(10.0, 0.7)));

  c.power_mode = PowerMode::physical_dbm;
  c.snr_db.reset();
  c.tx_power_dbm = 30.0;
  CHECK(c.noise_power() == doctest::Approx(1e-15).epsilon(1e-12));
  CHECK(c.transmit_power() == doctest::Approx(1.0));
  CHECK(c.reference_loss_db() == 0.0);
}

TEST_CASE("enum names") {
  CHECK(to_string(PartitionMode::subarray) == "subarray");
  CHECK(to_string(PartitionMode::whole) == "whole");
  CHECK(to_string(Algorithm::bcd) == "bcd");
  CHECK(to_string(Algorithm::wmmse_ls) == "wmmse_ls");
  CHECK(to_string(PowerMode::normalized_snr) == "normalized_snr");
  CHECK(to_string(WeightsRule::inverse_pathloss) == "inverse_pathloss");
}
