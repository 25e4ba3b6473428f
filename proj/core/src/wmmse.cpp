#include "risbeam/wmmse.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "risbeam/error.hpp"
#include "risbeam/metrics.hpp"

namespace risbeam {

double total_power(const CMatrix& precoder) { return precoder.squaredNorm(); }

CMatrix project_power(const CMatrix& precoder, double power) {
  const double current = total_power(precoder);
  if (current <= power) return precoder;
  return precoder * std::sqrt(power / current);
}

CMatrix mrt_precoder(const CMatrix& rows, double power) {
  const Eigen::Index users = rows.rows();
  CMatrix w = CMatrix::Zero(rows.cols(), users);
  int active = 0;
  for (Eigen::Index j = 0; j < users; ++j) {
    if (rows.row(j).norm() > 0.0) ++active;
  }
  if (active == 0) return w;
  const double per_user = std::sqrt(power / active);
  for (Eigen::Index j = 0; j < users; ++j) {
    const double n = rows.row(j).norm();
    if (n > 0.0) w.col(j) = rows.row(j).adjoint() * (per_user / n);
  }
  return w;
}

namespace {

// Solves w_j(mu) = (M + mu I)^+ r_j through the eigenbasis of M, choosing
// the smallest mu >= 0 that meets the power budget.
class PowerConstrainedSolve {
 public:
  PowerConstrainedSolve(const CMatrix& m, const CMatrix& rhs) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
    basis_ = eig.eigenvectors();
    values_ = eig.eigenvalues().cwiseMax(0.0);
    coeffs_ = basis_.adjoint() * rhs;
    const double top = values_.size() > 0 ? values_.maxCoeff() : 0.0;
    // Directions outside the range of M carry no right-hand side.
    null_ = values_.array() <= 1e-13 * top;
    row_energy_ = coeffs_.rowwise().squaredNorm();
  }

  double power(double mu) const {
    double p = 0.0;
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      const double denom = values_[k] + mu;
      if ((null_[k] && mu == 0.0) || denom <= 0.0) continue;
      p += row_energy_[k] / (denom * denom);
    }
    return p;
  }

  CMatrix solve(double mu) const {
    RVector inv(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      const double denom = values_[k] + mu;
      inv[k] = ((null_[k] && mu == 0.0) || denom <= 0.0) ? 0.0 : 1.0 / denom;
    }
    return basis_ * (inv.asDiagonal() * coeffs_);
  }

  double dual_for_budget(double budget) const {
    if (power(0.0) <= budget) return 0.0;
    // power(mu) <= ||coeffs||^2 / mu^2, so this bound is always feasible;
    // grow geometrically from a small start to keep the bracket tight.
    const double bound = std::sqrt(row_energy_.sum() / budget);
    double lo = 0.0;
    double hi = std::max(bound * 1e-6, 1e-300);
    while (power(hi) > budget && hi < bound) {
      lo = hi;
      hi *= 4.0;
    }
    hi = std::min(hi, bound);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (power(mid) > budget) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (std::abs(power(hi) - budget) <= 1e-12 * budget) break;
    }
    return hi;
  }

 private:
  CMatrix basis_;
  RVector values_;
  CMatrix coeffs_;
  Eigen::Array<bool, Eigen::Dynamic, 1> null_;
  RVector row_energy_;
};

}  // namespace

WmmseResult wmmse_precoder(const CMatrix& rows, const RVector& weights,
                           double noise_power, double power,
                           const WmmseOptions& options) {
  if (!(noise_power > 0.0)) throw DomainError("noise power must be positive");
  if (!(power > 0.0)) throw DomainError("power budget must be positive");
  WmmseResult result;
  const Eigen::Index users = rows.rows();
  result.precoder = mrt_precoder(rows, power);
  if (rows.isZero(0.0)) {
    result.history.push_back(0.0);
    return result;
  }
  result.wsr = weighted_sum_rate(rows, result.precoder, weights, noise_power);
  result.history.push_back(result.wsr);

  for (int it = 0; it < options.max_iter; ++it) {
    const CMatrix gains = rows * result.precoder;
    RVector mse_weight_gain(users);  // lambda_j |u_j|^2
    CMatrix rhs(rows.cols(), users);
    for (Eigen::Index j = 0; j < users; ++j) {
      const double total = gains.row(j).squaredNorm() + noise_power;
      const Complex u = gains(j, j) / total;
      const double mse = 1.0 - std::norm(gains(j, j)) / total;
      const double lambda = weights[j] / mse;
      mse_weight_gain[j] = lambda * std::norm(u);
      rhs.col(j) = lambda * std::conj(u) * rows.row(j).adjoint();
    }
    const CMatrix m = rows.adjoint() * mse_weight_gain.asDiagonal() * rows;
    const PowerConstrainedSolve solver(m, rhs);
    const CMatrix candidate =
        project_power(solver.solve(solver.dual_for_budget(power)), power);
    const double wsr = weighted_sum_rate(rows, candidate, weights, noise_power);
    // Exact WMMSE steps never lose rate; a drop is rounding in the dual
    // search, so keep the previous iterate.
    if (wsr < result.wsr) break;
    const double gain = wsr - result.wsr;
    result.precoder = candidate;
    result.wsr = wsr;
    result.iterations = it + 1;
    result.history.push_back(wsr);
    if (gain < options.tol) break;
  }
  return result;
}

}  // namespace risbeam
