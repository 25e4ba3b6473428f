#pragma once

#include <cmath>
#include <vector>

#include "risbeam/config.hpp"
#include "risbeam/linalg.hpp"

namespace risbeam {

// Uniform planar array of width x height elements.
//
// Steering vectors are flattened horizontal-major: element (m, n), with m the
// horizontal index and n the vertical index, sits at position m * height + n.
struct UpaGeometry {
  int width = 1;
  int height = 1;
  double spacing_ratio = 0.5;  // d / lambda

  int size() const { return width * height; }
  void validate() const;
};

// Azimuth and elevation in radians. Elevation pi/2 is broadside.
struct Angles {
  double azimuth = 0.0;
  double elevation = kPi / 2.0;
};

struct ScenarioGeometry {
  Point2 bs;
  Point2 ris;
  std::vector<Point2> users;
  Point2 zone_center;
  double zone_radius = 0.0;

  void validate() const;
};

struct RicianParams {
  double k1 = 10.0;  // BS -> RIS
  double k2 = 10.0;  // RIS -> user
};

// Channel matrices use one fixed orientation:
//   direct[j]      user antennas x BS antennas
//   bs_to_ris      RIS elements  x BS antennas
//   ris_to_user[j] user antennas x RIS elements
// Pathloss entries are linear amplitude gains already folded into the
// matrices; they are kept for weighting and reporting. In normalized_snr mode
// direct[j] and ris_to_user[j] are additionally multiplied by
// user_side_scale, which scales every effective channel by the same factor.
struct ChannelSet {
  std::vector<CMatrix> direct;
  CMatrix bs_to_ris;
  std::vector<CMatrix> ris_to_user;
  std::vector<double> pathloss_direct;
  double pathloss_reflect_g = 1.0;
  std::vector<double> pathloss_reflect_r;
  double user_side_scale = 1.0;

  int users() const { return static_cast<int>(direct.size()); }
  int bs_antennas() const { return static_cast<int>(bs_to_ris.cols()); }
  int ris_elements() const { return static_cast<int>(bs_to_ris.rows()); }
  int user_antennas() const {
    return direct.empty() ? 0 : static_cast<int>(direct.front().rows());
  }
};

enum class LinkKind { reflect, direct };

double pathloss_db(LinkKind kind, double distance_m, double carrier_ghz);

inline double db_to_amplitude(double loss_db) {
  return std::pow(10.0, -loss_db / 20.0);
}

CVector steering_vector(const UpaGeometry& geom, Angles angles);

// a_rx(rx_angles) * a_tx(tx_angles)^H; rank one with unit-modulus entries.
CMatrix los_outer_product(const UpaGeometry& rx_geom, Angles rx_angles,
                          const UpaGeometry& tx_geom, Angles tx_angles);

// gain * (sqrt(k/(k+1)) * los + sqrt(1/(k+1)) * X), X i.i.d. CN(0,1).
CMatrix draw_rician(const CMatrix& los, double k, double pathloss_gain,
                    Rng& rng);

// gain * X, X i.i.d. CN(0,1).
CMatrix draw_rayleigh_direct(int rows, int cols, double pathloss_gain,
                             Rng& rng);

// Azimuth of the vector from `from` to `to`, measured from the +x axis
// (the BS -> RIS axis in the default layout).
double azimuth_between(Point2 from, Point2 to);
double distance(Point2 a, Point2 b);

// Three child seeds are taken from rng, one each for G, the direct channels
// and the RIS -> user channels; users are drawn in index order within each
// stream. The result depends only on the inputs and the rng state.
ChannelSet build_channel_set(const SystemConfig& config,
                             const ScenarioGeometry& geometry,
                             const RicianParams& rician, Rng& rng);

// Users uniform by area over the gathering disk.
std::vector<Point2> draw_user_positions(Point2 center, double radius,
                                        int count, Rng& rng);

// Scenario for `config` with freshly drawn user positions.
ScenarioGeometry make_scenario(const SystemConfig& config, Rng& rng);

}  // namespace risbeam
