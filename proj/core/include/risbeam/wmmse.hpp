#pragma once

#include <vector>

#include "risbeam/linalg.hpp"

namespace risbeam {

// Precoders are BS-antennas x J matrices; column j is w_j.
double total_power(const CMatrix& precoder);

// Scales every column by sqrt(P / total) when the budget is exceeded.
CMatrix project_power(const CMatrix& precoder, double power);

// Columns along h_j^H with equal power P / J; zero rows get zero columns.
CMatrix mrt_precoder(const CMatrix& rows, double power);

struct WmmseOptions {
  double tol = 1e-4;
  int max_iter = 200;
};

struct WmmseResult {
  CMatrix precoder;
  double wsr = 0.0;
  int iterations = 0;
  // WSR of the MRT start followed by every accepted iteration.
  std::vector<double> history;
};

// Weighted MMSE precoding for single-stream users seen through their
// equivalent rows (J x BS antennas), under sum_j ||w_j||^2 <= power.
WmmseResult wmmse_precoder(const CMatrix& rows, const RVector& weights,
                           double noise_power, double power,
                           const WmmseOptions& options = {});

}  // namespace risbeam
