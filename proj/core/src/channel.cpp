#include "risbeam/channel.hpp"

#include <cmath>
#include <string>

#include "risbeam/error.hpp"

namespace risbeam {

void UpaGeometry::validate() const {
  if (width < 1 || height < 1) {
    throw DomainError("UPA needs at least one element per dimension, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  if (!(spacing_ratio > 0.0)) {
    throw DomainError("UPA spacing ratio must be positive");
  }
}

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

double azimuth_between(Point2 from, Point2 to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

void ScenarioGeometry::validate() const {
  if (!(distance(bs, ris) > 0.0)) {
    throw DomainError("BS and RIS are co-located");
  }
  for (std::size_t j = 0; j < users.size(); ++j) {
    // Small slack for points generated exactly on the rim.
    if (distance(users[j], zone_center) > zone_radius * (1.0 + 1e-12)) {
      throw DomainError("user " + std::to_string(j + 1) +
                        " lies outside the gathering zone");
    }
  }
}

double pathloss_db(LinkKind kind, double distance_m, double carrier_ghz) {
  if (!(distance_m > 0.0) || !(carrier_ghz > 0.0)) {
    throw DomainError("pathloss needs positive distance and carrier frequency");
  }
  switch (kind) {
    case LinkKind::reflect:
      return 32.4 + 21.0 * std::log10(distance_m) +
             20.0 * std::log10(carrier_ghz);
    case LinkKind::direct:
      return 22.4 + 35.3 * std::log10(distance_m) +
             21.3 * std::log10(carrier_ghz);
  }
  return 0.0;
}

CVector steering_vector(const UpaGeometry& geom, Angles angles) {
  geom.validate();
  const double horizontal = std::sin(angles.azimuth) * std::sin(angles.elevation);
  const double vertical = std::cos(angles.elevation);
  const double k = 2.0 * kPi * geom.spacing_ratio;
  CVector a(geom.size());
  for (int m = 0; m < geom.width; ++m) {
    for (int n = 0; n < geom.height; ++n) {
      a[m * geom.height + n] = unit_phasor(k * (m * horizontal + n * vertical));
    }
  }
  return a;
}

CMatrix los_outer_product(const UpaGeometry& rx_geom, Angles rx_angles,
                          const UpaGeometry& tx_geom, Angles tx_angles) {
  return steering_vector(rx_geom, rx_angles) *
         steering_vector(tx_geom, tx_angles).adjoint();
}

CMatrix draw_rician(const CMatrix& los, double k, double pathloss_gain,
                    Rng& rng) {
  if (!(k >= 0.0)) throw DomainError("Rician factor must be non-negative");
  const double los_weight = std::sqrt(k / (k + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (k + 1.0));
  CMatrix out(los.rows(), los.cols());
  // Column-major fill keeps the draw order tied to storage order.
  for (Eigen::Index c = 0; c < los.cols(); ++c) {
    for (Eigen::Index r = 0; r < los.rows(); ++r) {
      out(r, c) = pathloss_gain * (los_weight * los(r, c) + nlos_weight * draw_cn(rng));
    }
  }
  return out;
}

CMatrix draw_rayleigh_direct(int rows, int cols, double pathloss_gain,
                             Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw DomainError("direct channel needs positive dimensions");
  }
  CMatrix out(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) out(r, c) = pathloss_gain * draw_cn(rng);
  }
  return out;
}

namespace {

constexpr double kBroadside = kPi / 2.0;

double link_gain(const SystemConfig& config, LinkKind kind, double d) {
  return db_to_amplitude(pathloss_db(kind, d, config.carrier_ghz));
}

}  // namespace

ChannelSet build_channel_set(const SystemConfig& config,
                             const ScenarioGeometry& geometry,
                             const RicianParams& rician, Rng& rng) {
  geometry.validate();
  if (static_cast<int>(geometry.users.size()) != config.users) {
    throw DomainError("scenario has " + std::to_string(geometry.users.size()) +
                      " users but the configuration expects " +
                      std::to_string(config.users));
  }
  const UpaGeometry bs{config.bs_width, config.bs_height, config.spacing_ratio};
  const UpaGeometry ris{config.ris_side, config.ris_side, config.spacing_ratio};
  const UpaGeometry user{config.user_width, config.user_height,
                         config.spacing_ratio};

  // Separate child streams per link family keep the direct channels of a
  // trial identical when only the RIS size changes.
  Rng g_rng(rng());
  Rng direct_rng(rng());
  Rng reflect_rng(rng());

  ChannelSet set;
  set.user_side_scale = 1.0 / db_to_amplitude(config.reference_loss_db());
  const double d_g = distance(geometry.bs, geometry.ris);
  set.pathloss_reflect_g = link_gain(config, LinkKind::reflect, d_g);
  const CMatrix g_los = los_outer_product(
      ris, {azimuth_between(geometry.ris, geometry.bs), kBroadside}, bs,
      {azimuth_between(geometry.bs, geometry.ris), kBroadside});
  set.bs_to_ris = draw_rician(g_los, rician.k1, set.pathloss_reflect_g, g_rng);

  for (int j = 0; j < config.users; ++j) {
    const Point2 u = geometry.users[j];
    const double d_direct = distance(geometry.bs, u);
    const double d_reflect = distance(geometry.ris, u);
    if (!(d_direct > 0.0) || !(d_reflect > 0.0)) {
      throw DomainError("user " + std::to_string(j + 1) +
                        " coincides with the BS or the RIS");
    }
    const double gain_direct = link_gain(config, LinkKind::direct, d_direct);
    const double gain_reflect = link_gain(config, LinkKind::reflect, d_reflect);
    set.pathloss_direct.push_back(gain_direct);
    set.pathloss_reflect_r.push_back(gain_reflect);
    set.direct.push_back(set.user_side_scale *
                         draw_rayleigh_direct(user.size(), bs.size(), gain_direct, direct_rng));
    const CMatrix r_los = los_outer_product(
        user, {azimuth_between(u, geometry.ris), kBroadside}, ris,
        {azimuth_between(geometry.ris, u), kBroadside});
    set.ris_to_user.push_back(set.user_side_scale *
                              draw_rician(r_los, rician.k2, gain_reflect, reflect_rng));
  }
  return set;
}

std::vector<Point2> draw_user_positions(Point2 center, double radius,
                                        int count, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> users;
  users.reserve(count);
  for (int j = 0; j < count; ++j) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * kPi * unit(rng);
    users.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return users;
}

ScenarioGeometry make_scenario(const SystemConfig& config, Rng& rng) {
  ScenarioGeometry geometry;
  geometry.bs = config.bs_position;
  geometry.ris = config.ris_position;
  geometry.zone_center = config.zone_center;
  geometry.zone_radius = config.zone_radius;
  geometry.users = draw_user_positions(config.zone_center, config.zone_radius,
                                       config.users, rng);
  return geometry;
}

}  // namespace risbeam
