#pragma once

#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/linalg.hpp"
#include "risbeam/subarray.hpp"
#include "risbeam/wmmse.hpp"

namespace risbeam {

// The 2^r RIS phases e^{j 2 pi k / 2^r}, k = 0 .. 2^r - 1.
struct QuantizedPhaseSet {
  int bits = 1;
  std::vector<Complex> values;

  int size() const { return static_cast<int>(values.size()); }
  bool contains(Complex value, double tol = 1e-12) const;
};

QuantizedPhaseSet make_phase_set(int bits);

// Candidate receive directions. Azimuth points are k * pi / 2^q1 for
// k = 1 .. 2^q1 and elevation points are -pi/2 + k * pi / 2^q2 for
// k = 1 .. 2^q2. Candidates are enumerated azimuth-major.
struct ReceiveGrid {
  int azimuth_bits = 2;
  int elevation_bits = 1;
  std::vector<double> azimuths;
  std::vector<double> elevations;

  int size() const {
    return static_cast<int>(azimuths.size() * elevations.size());
  }
  Angles angles(int candidate) const;
};

ReceiveGrid make_receive_grid(int azimuth_bits, int elevation_bits);

// (1 / sqrt(W H)) a(phi, phi') for every grid candidate, in grid order.
std::vector<CVector> receive_candidates(const UpaGeometry& user_array,
                                        const ReceiveGrid& grid);

struct ReceiveSearchParams {
  RVector weights;
  double noise_power = 1.0;
  double power = 1.0;
};

// Greedy user-by-user choice of receive vectors. Undecided users hold
// random grid vectors; each candidate is scored by the WSR of an MRT
// precoder on the equivalent rows induced by `theta`. Lowest index wins
// ties.
std::vector<CVector> search_receive_vectors(const ChannelSet& channels,
                                            const PartitionPlan& plan,
                                            const PhaseVector& theta,
                                            const UpaGeometry& user_array,
                                            const ReceiveGrid& grid,
                                            const ReceiveSearchParams& params,
                                            Rng& rng);

struct LsParams {
  RVector weights;
  double noise_power = 1.0;
  double power = 1.0;
  WmmseOptions wmmse;
};

struct LsResult {
  PhaseVector theta;
  CMatrix precoder;
  double wsr = 0.0;
  int wmmse_calls = 0;
};

// Element-by-element local search over quantized RIS phases with WMMSE at
// the BS for every candidate. Returns the best configuration evaluated.
LsResult ls_optimize(const ChannelSet& channels, const PartitionPlan& plan,
                     const std::vector<CVector>& receive,
                     const QuantizedPhaseSet& phase_set,
                     const LsParams& params, Rng& rng);

}  // namespace risbeam
