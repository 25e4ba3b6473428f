#include "risbeam/metrics.hpp"

#include <cmath>

#include "risbeam/error.hpp"

namespace risbeam {

RateReport rates_from_equivalent(const CMatrix& rows, const CMatrix& precoder,
                                 const RVector& weights, double noise_power) {
  if (!(noise_power > 0.0)) throw DomainError("noise power must be positive");
  const Eigen::Index users = rows.rows();
  // gains(j, i) = |h_j w_i|^2
  const Eigen::MatrixXd gains = (rows * precoder).cwiseAbs2();
  RateReport report;
  report.sinr.resize(users);
  report.rate.resize(users);
  report.weights.assign(weights.data(), weights.data() + weights.size());
  for (Eigen::Index j = 0; j < users; ++j) {
    const double signal = gains(j, j);
    double interference = 0.0;
    for (Eigen::Index i = 0; i < users; ++i) {
      if (i != j) interference += gains(j, i);
    }
    report.sinr[j] = signal / (interference + noise_power);
    report.rate[j] = std::log2(1.0 + report.sinr[j]);
    report.wsr += weights[j] * report.rate[j];
  }
  return report;
}

double weighted_sum_rate(const CMatrix& rows, const CMatrix& precoder,
                         const RVector& weights, double noise_power) {
  return rates_from_equivalent(rows, precoder, weights, noise_power).wsr;
}

RateReport evaluate(const ChannelSet& channels, const PhaseVector& theta,
                    const CMatrix& precoder,
                    const std::vector<CVector>& receive,
                    const PartitionPlan& plan, const RVector& weights,
                    double noise_power) {
  return rates_from_equivalent(
      equivalent_channels(channels, theta, plan, receive), precoder, weights,
      noise_power);
}

double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
  return dbm_to_watts(psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

}  // namespace risbeam
