#include "risbeam/subarray.hpp"

#include <cmath>
#include <string>

#include "risbeam/error.hpp"

namespace risbeam {

PartitionPlan::PartitionPlan(PartitionMode mode, int elements, int users)
    : mode_(mode), elements_(elements), users_(users) {
  if (elements < 1) throw ConfigError("RIS needs at least one element");
  if (users < 1) throw ConfigError("at least one user is required");
  if (mode == PartitionMode::whole) {
    blocks_.push_back({0, elements});
    return;
  }
  if (elements % users != 0) {
    throw ConfigError("subarray mode needs the element count (" +
                      std::to_string(elements) +
                      ") to be divisible by the user count (" +
                      std::to_string(users) + ")");
  }
  const int size = elements / users;
  for (int p = 0; p < users; ++p) blocks_.push_back({p * size, size});
}

const ElementBlock& PartitionPlan::active_block(int user) const {
  return mode_ == PartitionMode::whole ? blocks_.front() : blocks_.at(user);
}

PartitionPlan make_partition(int elements, int users, PartitionMode mode) {
  return PartitionPlan(mode, elements, users);
}

PhaseVector::PhaseVector(CVector theta, double tol) : theta_(std::move(theta)) {
  for (Eigen::Index n = 0; n < theta_.size(); ++n) {
    if (!(std::abs(std::abs(theta_[n]) - 1.0) <= tol)) {
      throw DomainError("phase entry " + std::to_string(n) +
                        " is not unit modulus");
    }
  }
}

PhaseVector PhaseVector::ones(int elements) {
  return PhaseVector(CVector::Ones(elements));
}

PhaseVector PhaseVector::from_angles(const RVector& psi) {
  CVector theta(psi.size());
  for (Eigen::Index n = 0; n < psi.size(); ++n) theta[n] = unit_phasor(psi[n]);
  return PhaseVector(std::move(theta));
}

PhaseVector PhaseVector::random(int elements, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  RVector psi(elements);
  for (int n = 0; n < elements; ++n) psi[n] = angle(rng);
  return from_angles(psi);
}

void PhaseVector::set(int n, Complex value) {
  const double mag = std::abs(value);
  theta_[n] = mag > 0.0 ? value / mag : Complex(1.0, 0.0);
}

CMatrix effective_channel(int user, const ChannelSet& channels,
                          const PhaseVector& theta, const PartitionPlan& plan) {
  const ElementBlock b = plan.active_block(user);
  const CMatrix& h_r = channels.ris_to_user.at(user);
  return channels.direct.at(user) +
         h_r.middleCols(b.begin, b.size) *
             theta.values().segment(b.begin, b.size).asDiagonal() *
             channels.bs_to_ris.middleRows(b.begin, b.size);
}

CRowVector equivalent_row_channel(int user, const ChannelSet& channels,
                                  const PhaseVector& theta,
                                  const PartitionPlan& plan,
                                  const CVector& receive) {
  return receive.adjoint() * effective_channel(user, channels, theta, plan);
}

CMatrix equivalent_channels(const ChannelSet& channels,
                            const PhaseVector& theta,
                            const PartitionPlan& plan,
                            const std::vector<CVector>& receive) {
  CMatrix rows(channels.users(), channels.bs_antennas());
  for (int j = 0; j < channels.users(); ++j) {
    rows.row(j) = equivalent_row_channel(j, channels, theta, plan, receive[j]);
  }
  return rows;
}

CMatrix ris_cascade_matrix(int user, const ChannelSet& channels,
                           const CVector& receive, const PartitionPlan& plan) {
  const ElementBlock b = plan.active_block(user);
  const CRowVector reflected =
      receive.adjoint() * channels.ris_to_user.at(user).middleCols(b.begin, b.size);
  return reflected.transpose().asDiagonal() *
         channels.bs_to_ris.middleRows(b.begin, b.size);
}

}  // namespace risbeam

namespace risbeam {

std::vector<LinearizedChannel> linearize_channels(
    const ChannelSet& channels, const PartitionPlan& plan,
    const std::vector<CVector>& receive) {
  std::vector<LinearizedChannel> lin;
  lin.reserve(channels.users());
  for (int j = 0; j < channels.users(); ++j) {
    lin.push_back({receive[j].adjoint() * channels.direct[j],
                   ris_cascade_matrix(j, channels, receive[j], plan),
                   plan.active_block(j)});
  }
  return lin;
}

CMatrix rows_from_linearized(const std::vector<LinearizedChannel>& lin,
                             const CVector& theta) {
  const Eigen::Index cols = lin.empty() ? 0 : lin.front().direct_row.size();
  CMatrix rows(static_cast<Eigen::Index>(lin.size()), cols);
  for (std::size_t j = 0; j < lin.size(); ++j) {
    const auto& l = lin[j];
    rows.row(j) = l.direct_row +
                  theta.segment(l.block.begin, l.block.size).transpose() * l.cascade;
  }
  return rows;
}

}  // namespace risbeam
