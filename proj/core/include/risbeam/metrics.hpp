#pragma once

#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/linalg.hpp"
#include "risbeam/subarray.hpp"

namespace risbeam {

struct RateReport {
  std::vector<double> sinr;
  std::vector<double> rate;  // bits/s/Hz
  std::vector<double> weights;
  double wsr = 0.0;
};

// SINR and rates from stacked equivalent rows (J x BS antennas) and a
// precoder whose column j serves user j. Throws DomainError if noise <= 0.
RateReport rates_from_equivalent(const CMatrix& rows, const CMatrix& precoder,
                                 const RVector& weights, double noise_power);

double weighted_sum_rate(const CMatrix& rows, const CMatrix& precoder,
                         const RVector& weights, double noise_power);

RateReport evaluate(const ChannelSet& channels, const PhaseVector& theta,
                    const CMatrix& precoder,
                    const std::vector<CVector>& receive,
                    const PartitionPlan& plan, const RVector& weights,
                    double noise_power);

// Noise power in watts for a PSD (dBm/Hz) over a bandwidth (Hz).
double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz);

inline double dbm_to_watts(double dbm) {
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

}  // namespace risbeam
