#include "risbeam/ls_beamformer.hpp"

#include <cmath>
#include <limits>

#include "risbeam/error.hpp"
#include "risbeam/metrics.hpp"

namespace risbeam {

bool QuantizedPhaseSet::contains(Complex value, double tol) const {
  for (const Complex& v : values) {
    if (std::abs(v - value) <= tol) return true;
  }
  return false;
}

QuantizedPhaseSet make_phase_set(int bits) {
  if (bits < 1 || bits > 16) {
    throw ConfigError("RIS phase resolution must be between 1 and 16 bits");
  }
  QuantizedPhaseSet set;
  set.bits = bits;
  const int levels = 1 << bits;
  set.values.reserve(levels);
  for (int k = 0; k < levels; ++k) {
    set.values.push_back(k == 0 ? Complex(1.0, 0.0)
                                : unit_phasor(2.0 * kPi * k / levels));
  }
  return set;
}

Angles ReceiveGrid::angles(int candidate) const {
  const int per_azimuth = static_cast<int>(elevations.size());
  return {azimuths.at(candidate / per_azimuth),
          elevations.at(candidate % per_azimuth)};
}

ReceiveGrid make_receive_grid(int azimuth_bits, int elevation_bits) {
  if (azimuth_bits < 0 || elevation_bits < 0 || azimuth_bits > 16 ||
      elevation_bits > 16) {
    throw ConfigError("receive grid bits must be between 0 and 16");
  }
  ReceiveGrid grid;
  grid.azimuth_bits = azimuth_bits;
  grid.elevation_bits = elevation_bits;
  const int n_az = 1 << azimuth_bits;
  const int n_el = 1 << elevation_bits;
  for (int k = 1; k <= n_az; ++k) grid.azimuths.push_back(kPi * k / n_az);
  for (int k = 1; k <= n_el; ++k) {
    grid.elevations.push_back(-kPi / 2.0 + kPi * k / n_el);
  }
  return grid;
}

std::vector<CVector> receive_candidates(const UpaGeometry& user_array,
                                        const ReceiveGrid& grid) {
  std::vector<CVector> out;
  out.reserve(grid.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(user_array.size()));
  for (int c = 0; c < grid.size(); ++c) {
    out.push_back(scale * steering_vector(user_array, grid.angles(c)));
  }
  return out;
}

std::vector<CVector> search_receive_vectors(const ChannelSet& channels,
                                            const PartitionPlan& plan,
                                            const PhaseVector& theta,
                                            const UpaGeometry& user_array,
                                            const ReceiveGrid& grid,
                                            const ReceiveSearchParams& params,
                                            Rng& rng) {
  const std::vector<CVector> candidates = receive_candidates(user_array, grid);
  if (candidates.empty()) throw ConfigError("receive grid is empty");
  const int users = channels.users();
  const int count = static_cast<int>(candidates.size());
  std::uniform_int_distribution<int> pick(0, count - 1);

  // Every user's effective channel is fixed during the search.
  std::vector<CMatrix> effective;
  effective.reserve(users);
  for (int j = 0; j < users; ++j) {
    effective.push_back(effective_channel(j, channels, theta, plan));
  }
  std::vector<CMatrix> candidate_rows(users);
  for (int j = 0; j < users; ++j) {
    candidate_rows[j].resize(count, channels.bs_antennas());
    for (int c = 0; c < count; ++c) {
      candidate_rows[j].row(c) = candidates[c].adjoint() * effective[j];
    }
  }

  std::vector<int> choice(users);
  for (int j = 0; j < users; ++j) choice[j] = pick(rng);
  CMatrix rows(users, channels.bs_antennas());
  for (int j = 0; j < users; ++j) {
    for (int k = j + 1; k < users; ++k) choice[k] = pick(rng);
    for (int k = 0; k < users; ++k) rows.row(k) = candidate_rows[k].row(choice[k]);
    double best = -std::numeric_limits<double>::infinity();
    int best_index = 0;
    for (int c = 0; c < count; ++c) {
      rows.row(j) = candidate_rows[j].row(c);
      const double score =
          weighted_sum_rate(rows, mrt_precoder(rows, params.power),
                            params.weights, params.noise_power);
      if (score > best) {
        best = score;
        best_index = c;
      }
    }
    choice[j] = best_index;
  }

  std::vector<CVector> receive;
  receive.reserve(users);
  for (int j = 0; j < users; ++j) receive.push_back(candidates[choice[j]]);
  return receive;
}

LsResult ls_optimize(const ChannelSet& channels, const PartitionPlan& plan,
                     const std::vector<CVector>& receive,
                     const QuantizedPhaseSet& phase_set,
                     const LsParams& params, Rng& rng) {
  const auto lin = linearize_channels(channels, plan, receive);
  const int elements = channels.ris_elements();
  const int levels = phase_set.size();
  std::uniform_int_distribution<int> pick(0, levels - 1);

  CVector theta = CVector::Constant(elements, phase_set.values.front());
  LsResult best;
  best.wsr = -std::numeric_limits<double>::infinity();

  for (int n = 0; n < elements; ++n) {
    for (int m = n + 1; m < elements; ++m) theta[m] = phase_set.values[pick(rng)];
    double element_best = -std::numeric_limits<double>::infinity();
    int element_choice = 0;
    for (int c = 0; c < levels; ++c) {
      theta[n] = phase_set.values[c];
      const WmmseResult w =
          wmmse_precoder(rows_from_linearized(lin, theta), params.weights,
                         params.noise_power, params.power, params.wmmse);
      ++best.wmmse_calls;
      if (w.wsr > element_best) {
        element_best = w.wsr;
        element_choice = c;
      }
      if (w.wsr > best.wsr) {
        best.wsr = w.wsr;
        best.precoder = w.precoder;
        best.theta = PhaseVector(theta);
      }
    }
    theta[n] = phase_set.values[element_choice];
  }
  return best;
}

}  // namespace risbeam
