#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace risbeam {

enum class PartitionMode { whole, subarray };
enum class Algorithm { wmmse_ls, bcd };
enum class PowerMode { normalized_snr, physical_dbm };
enum class WeightsRule { uniform, inverse_pathloss };

std::string_view to_string(PartitionMode mode);
std::string_view to_string(Algorithm algorithm);
std::string_view to_string(PowerMode mode);
std::string_view to_string(WeightsRule rule);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Every knob of one simulated system. Defaults reproduce the reference
// scenario: 2x2 BS and user arrays, a 10x10 RIS, four users, 1-bit RIS
// phases, 2/1-bit receive grids, k1 = k2 = 10, 100 GHz carrier.
struct SystemConfig {
  // BS UPA, N_t horizontal x M_t vertical.
  int bs_width = 2;
  int bs_height = 2;
  // User UPA, N_r horizontal x M_r vertical.
  int user_width = 2;
  int user_height = 2;
  // RIS side length N; the surface has N*N elements.
  int ris_side = 10;
  int users = 4;
  double spacing_ratio = 0.5;

  int phase_bits = 1;
  int azimuth_bits = 2;
  int elevation_bits = 1;

  PartitionMode mode = PartitionMode::subarray;
  Algorithm algorithm = Algorithm::bcd;
  PowerMode power_mode = PowerMode::normalized_snr;
  std::optional<double> snr_db = 5.0;
  std::optional<double> tx_power_dbm;

  double k1 = 10.0;
  double k2 = 10.0;
  double carrier_ghz = 100.0;
  double bandwidth_hz = 10e9;
  double noise_psd_dbm_hz = -220.0;
  // normalized_snr only: user-side channels (direct and RIS -> user) are
  // scaled up by this loss, so the SNR axis reads as the receive SNR of a
  // link with this pathloss. Unset means the direct-link loss from the BS to
  // the zone center. Scaling only the user side keeps the direct/cascade
  // power ratio untouched.
  std::optional<double> snr_reference_loss_db;

  Point2 bs_position{0.0, 0.0};
  Point2 ris_position{100.0, 0.0};
  Point2 zone_center{100.0, 40.0};
  double zone_radius = 20.0;

  WeightsRule weights_rule = WeightsRule::uniform;

  std::uint64_t seed_base = 1;
  int trials = 10;
  // Outer-loop tolerance (bits/s/Hz) and iteration cap for BCD.
  double tol = 1e-4;
  int max_iter = 200;
  // Inner WMMSE tolerance and cap.
  double wmmse_tol = 1e-4;
  int wmmse_max_iter = 200;
  int phase_sweeps = 1;

  int ris_elements() const { return ris_side * ris_side; }
  int bs_antennas() const { return bs_width * bs_height; }
  int user_antennas() const { return user_width * user_height; }

  // Noise power and BS power budget implied by power_mode.
  double noise_power() const;
  double transmit_power() const;
  // Resolved snr_reference_loss_db; 0 in physical_dbm mode.
  double reference_loss_db() const;

  // Throws ConfigError naming the first violated field.
  void validate() const;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

// Structured-text (JSON) form. Every field is required; unknown keys and
// invariant violations raise ConfigError naming the field.
SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::string& path);
std::string dump_config(const SystemConfig& config);
void save_config(const SystemConfig& config, const std::string& path);

// FNV-1a over the canonical dump; stable across platforms.
std::uint64_t config_hash(const SystemConfig& config);

}  // namespace risbeam
