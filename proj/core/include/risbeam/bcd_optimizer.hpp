#pragma once

#include <optional>
#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/linalg.hpp"
#include "risbeam/subarray.hpp"
#include "risbeam/wmmse.hpp"

namespace risbeam {

// Fractional-programming auxiliaries of the quadratic-transform objective.
struct FpAuxiliaries {
  RVector alpha;
  CVector beta;
};

// Objective shared by every block update, for stacked equivalent rows
// (J x BS antennas) and precoder W (BS antennas x J):
//
//   f = sum_j w_j (log2(1 + a_j) - a_j)
//       + 2 sqrt(w_j (1 + a_j)) Re(b_j^* h_j w_j)
//       - |b_j|^2 (sum_i |h_j w_i|^2 + sigma^2)
//
// At a_j = SINR_j and the matching b_j it equals the weighted sum-rate.
double fp_objective(const FpAuxiliaries& aux, const CMatrix& rows,
                    const CMatrix& precoder, const RVector& weights,
                    double noise_power);

// eta_j = Re(b_j^* h_j w_j) / sqrt(w_j).
RVector eta_bar(const CVector& beta, const CMatrix& rows,
                const CMatrix& precoder, const RVector& weights);

// a_j = (eta^2 + eta sqrt(eta^2 + 4)) / 2, clamped at zero for eta < 0.
RVector update_alpha(const FpAuxiliaries& aux, const CMatrix& rows,
                     const CMatrix& precoder, const RVector& weights);

// b_j = sqrt(w_j (1 + a_j)) h_j w_j / (sum_i |h_j w_i|^2 + sigma^2).
CVector update_beta(const RVector& alpha, const CMatrix& rows,
                    const CMatrix& precoder, const RVector& weights,
                    double noise_power);

// Joint maximizer over (alpha, beta): alpha = SINR, beta from update_beta.
FpAuxiliaries optimal_auxiliaries(const CMatrix& rows, const CMatrix& precoder,
                                  const RVector& weights, double noise_power);

// f_psi(theta) = theta^H A theta - 2 Re(theta^H B) over all RIS elements.
// Users only populate their own block, so A is block diagonal in subarray
// mode.
struct QuadraticForm {
  CMatrix A;
  CVector B;

  double value(const CVector& theta) const;
};

QuadraticForm build_quadratic_form(const std::vector<LinearizedChannel>& lin,
                                   int elements, const CMatrix& precoder,
                                   const FpAuxiliaries& aux,
                                   const RVector& weights);

// Cyclic coordinate minimization of f_psi restricted to `range` (all
// elements by default):  theta_n <- exp(j arg(B_n - sum_{m != n} A_nm theta_m)).
PhaseVector update_phases(const PhaseVector& theta, const QuadraticForm& form,
                          int sweeps = 1,
                          std::optional<ElementBlock> range = std::nullopt);

// Gradient of -f with respect to w_j (Wirtinger convention, 2 d/dw^*), at
// the point `at`.
CMatrix precoder_gradient(const CMatrix& at, const CMatrix& rows,
                          const RVector& weights, const FpAuxiliaries& aux);

// 2 || sum_i |b_i|^2 h_i^H h_i ||_2.
double precoder_lipschitz(const CMatrix& rows, const FpAuxiliaries& aux);

// w = Proj_P(w_hat - Gra / L), w_hat = w_bar + tau (w_bar - w_prev).
// Returns w_bar unchanged when both L and the gradient vanish, and throws
// DegenerateAuxiliaryError when L = 0 but the gradient does not.
CMatrix update_precoder_proxlinear(const CMatrix& w_bar, const CMatrix& w_prev,
                                   double tau, const CMatrix& rows,
                                   const RVector& weights,
                                   const FpAuxiliaries& aux, double power);

struct BcdOptions {
  double tol = 1e-4;
  int max_outer = 200;
  int phase_sweeps = 1;
  // Accelerated extrapolation with restart; false pins tau = 0.
  bool extrapolate = true;
  WmmseOptions wmmse;
};

struct BcdResult {
  PhaseVector theta;
  CMatrix precoder;
  double wsr = 0.0;
  double initial_wsr = 0.0;
  int iterations = 0;
  int restarts = 0;
  // Entry 0 is the initialization; entry i the WSR after outer iteration i.
  std::vector<double> wsr_history;
  std::vector<double> best_history;
  // Per-user rates of the best iterate after each entry of best_history.
  std::vector<std::vector<double>> best_rate_history;
};

// Alternating updates of phases, beta, precoder, then alpha and beta, from
// a random unit-modulus start and a WMMSE precoder. Returns the best
// iterate seen.
BcdResult bcd_solve(const ChannelSet& channels, const PartitionPlan& plan,
                    const std::vector<CVector>& receive,
                    const RVector& weights, double noise_power, double power,
                    const BcdOptions& options, Rng& rng);

}  // namespace risbeam
