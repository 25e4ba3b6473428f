#pragma once

#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/config.hpp"
#include "risbeam/linalg.hpp"

namespace risbeam {

// Half-open range [begin, begin + size) of RIS element indices (0-based).
struct ElementBlock {
  int begin = 0;
  int size = 0;

  int end() const { return begin + size; }
  friend bool operator==(const ElementBlock&, const ElementBlock&) = default;
};

// Partition of the RIS into contiguous blocks. In subarray mode there is one
// block per user and user j is paired with block j. Whole mode has a single
// block covering every element that serves all users.
class PartitionPlan {
 public:
  PartitionPlan(PartitionMode mode, int elements, int users);

  PartitionMode mode() const { return mode_; }
  int elements() const { return elements_; }
  int users() const { return users_; }
  const std::vector<ElementBlock>& blocks() const { return blocks_; }

  // Block whose phases act on user j's channel.
  const ElementBlock& active_block(int user) const;

 private:
  PartitionMode mode_;
  int elements_;
  int users_;
  std::vector<ElementBlock> blocks_;
};

// Throws ConfigError when subarray mode cannot split elements evenly.
PartitionPlan make_partition(int elements, int users, PartitionMode mode);

// Unit-modulus RIS reflection coefficients.
class PhaseVector {
 public:
  PhaseVector() = default;
  // Throws DomainError if any entry is off the unit circle by more than tol.
  explicit PhaseVector(CVector theta, double tol = 1e-9);

  static PhaseVector ones(int elements);
  static PhaseVector from_angles(const RVector& psi);
  static PhaseVector random(int elements, Rng& rng);

  int size() const { return static_cast<int>(theta_.size()); }
  const CVector& values() const { return theta_; }
  Complex operator[](int n) const { return theta_[n]; }

  // Renormalizes to exactly unit modulus.
  void set(int n, Complex value);
  void set_angle(int n, double psi) { theta_[n] = unit_phasor(psi); }

 private:
  CVector theta_;
};

// H_j = H_dj + H_rj[:, block] * diag(theta[block]) * G[block, :].
CMatrix effective_channel(int user, const ChannelSet& channels,
                          const PhaseVector& theta, const PartitionPlan& plan);

// v_j^H H_j, a 1 x (BS antennas) row.
CRowVector equivalent_row_channel(int user, const ChannelSet& channels,
                                  const PhaseVector& theta,
                                  const PartitionPlan& plan,
                                  const CVector& receive);

// All users' equivalent rows stacked into a J x (BS antennas) matrix.
CMatrix equivalent_channels(const ChannelSet& channels,
                            const PhaseVector& theta,
                            const PartitionPlan& plan,
                            const std::vector<CVector>& receive);

// diag(v_j^H H_rj[:, block]) * G[block, :], so that
//   v_j^H H_j = v_j^H H_dj + theta[block]^T * cascade.
CMatrix ris_cascade_matrix(int user, const ChannelSet& channels,
                           const CVector& receive, const PartitionPlan& plan);

// One user's equivalent channel split into the RIS-independent part and the
// cascade acting on its active block:  row = direct_row + theta[block]^T C.
struct LinearizedChannel {
  CRowVector direct_row;
  CMatrix cascade;
  ElementBlock block;
};

// Built from ris_cascade_matrix; rows_from_linearized then costs one small
// product per user instead of a full effective-channel rebuild.
std::vector<LinearizedChannel> linearize_channels(
    const ChannelSet& channels, const PartitionPlan& plan,
    const std::vector<CVector>& receive);

CMatrix rows_from_linearized(const std::vector<LinearizedChannel>& lin,
                             const CVector& theta);

inline CMatrix rows_from_linearized(const std::vector<LinearizedChannel>& lin,
                                    const PhaseVector& theta) {
  return rows_from_linearized(lin, theta.values());
}

}  // namespace risbeam
