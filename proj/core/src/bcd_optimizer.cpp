#include "risbeam/bcd_optimizer.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "risbeam/error.hpp"
#include "risbeam/metrics.hpp"

namespace risbeam {

double fp_objective(const FpAuxiliaries& aux, const CMatrix& rows,
                    const CMatrix& precoder, const RVector& weights,
                    double noise_power) {
  const CMatrix gains = rows * precoder;
  double f = 0.0;
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    const double a = aux.alpha[j];
    const Complex b = aux.beta[j];
    f += weights[j] * (std::log2(1.0 + a) - a);
    f += 2.0 * std::sqrt(weights[j] * (1.0 + a)) *
         std::real(std::conj(b) * gains(j, j));
    f -= std::norm(b) * (gains.row(j).squaredNorm() + noise_power);
  }
  return f;
}

RVector eta_bar(const CVector& beta, const CMatrix& rows,
                const CMatrix& precoder, const RVector& weights) {
  RVector eta(rows.rows());
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    const Complex signal = (rows.row(j) * precoder.col(j)).value();
    eta[j] = std::real(std::conj(beta[j]) * signal) / std::sqrt(weights[j]);
  }
  return eta;
}

RVector update_alpha(const FpAuxiliaries& aux, const CMatrix& rows,
                     const CMatrix& precoder, const RVector& weights) {
  const RVector eta = eta_bar(aux.beta, rows, precoder, weights);
  RVector alpha(eta.size());
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double e = eta[j];
    // Negative eta puts the root below zero; alpha lives on [0, inf).
    alpha[j] = e <= 0.0 ? 0.0 : 0.5 * (e * e + e * std::sqrt(e * e + 4.0));
  }
  return alpha;
}

CVector update_beta(const RVector& alpha, const CMatrix& rows,
                    const CMatrix& precoder, const RVector& weights,
                    double noise_power) {
  const CMatrix gains = rows * precoder;
  CVector beta(rows.rows());
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    const double denom = gains.row(j).squaredNorm() + noise_power;
    beta[j] = std::sqrt(weights[j] * (1.0 + alpha[j])) * gains(j, j) / denom;
  }
  return beta;
}

FpAuxiliaries optimal_auxiliaries(const CMatrix& rows, const CMatrix& precoder,
                                  const RVector& weights, double noise_power) {
  const RateReport report =
      rates_from_equivalent(rows, precoder, weights, noise_power);
  FpAuxiliaries aux;
  aux.alpha = Eigen::Map<const RVector>(report.sinr.data(),
                                        static_cast<Eigen::Index>(report.sinr.size()));
  aux.beta = update_beta(aux.alpha, rows, precoder, weights, noise_power);
  return aux;
}

double QuadraticForm::value(const CVector& theta) const {
  return std::real(theta.dot(A * theta)) - 2.0 * std::real(theta.dot(B));
}

QuadraticForm build_quadratic_form(const std::vector<LinearizedChannel>& lin,
                                   int elements, const CMatrix& precoder,
                                   const FpAuxiliaries& aux,
                                   const RVector& weights) {
  QuadraticForm form{CMatrix::Zero(elements, elements), CVector::Zero(elements)};
  for (std::size_t j = 0; j < lin.size(); ++j) {
    const auto& l = lin[j];
    const double b2 = std::norm(aux.beta[j]);
    const double s = std::sqrt(weights[j] * (1.0 + aux.alpha[j]));
    // e_ji = conj(C_j w_i): theta^T C_j w_i = e_ji^H theta.
    const CMatrix e = (l.cascade * precoder).conjugate();
    const CRowVector direct = l.direct_row * precoder;
    auto a_block = form.A.block(l.block.begin, l.block.begin, l.block.size,
                                l.block.size);
    auto b_block = form.B.segment(l.block.begin, l.block.size);
    a_block += b2 * (e * e.adjoint());
    b_block += s * aux.beta[j] * e.col(j);
    b_block -= b2 * (e * direct.transpose());
  }
  return form;
}

PhaseVector update_phases(const PhaseVector& theta, const QuadraticForm& form,
                          int sweeps, std::optional<ElementBlock> range) {
  const ElementBlock r = range.value_or(ElementBlock{0, theta.size()});
  CVector x = theta.values();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int n = r.begin; n < r.end(); ++n) {
      const Complex coupled =
          form.A.row(n).transpose().cwiseProduct(x).sum() - form.A(n, n) * x[n];
      const Complex target = form.B[n] - coupled;
      const double mag = std::abs(target);
      // A zero target leaves f_psi flat in theta_n; keep the current value.
      if (mag > 0.0) x[n] = target / mag;
    }
  }
  return PhaseVector(std::move(x));
}

namespace {

CMatrix weighted_gram(const CMatrix& rows, const FpAuxiliaries& aux) {
  return rows.adjoint() * aux.beta.cwiseAbs2().asDiagonal() * rows;
}

}  // namespace

CMatrix precoder_gradient(const CMatrix& at, const CMatrix& rows,
                          const RVector& weights, const FpAuxiliaries& aux) {
  CMatrix grad = 2.0 * weighted_gram(rows, aux) * at;
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    const double s = std::sqrt(weights[j] * (1.0 + aux.alpha[j]));
    grad.col(j) -= 2.0 * s * aux.beta[j] * rows.row(j).adjoint();
  }
  return grad;
}

double precoder_lipschitz(const CMatrix& rows, const FpAuxiliaries& aux) {
  const CMatrix gram = weighted_gram(rows, aux);
  if (gram.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  return 2.0 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

CMatrix update_precoder_proxlinear(const CMatrix& w_bar, const CMatrix& w_prev,
                                   double tau, const CMatrix& rows,
                                   const RVector& weights,
                                   const FpAuxiliaries& aux, double power) {
  const CMatrix w_hat = w_bar + tau * (w_bar - w_prev);
  const CMatrix grad = precoder_gradient(w_hat, rows, weights, aux);
  const double lipschitz = precoder_lipschitz(rows, aux);
  if (!(lipschitz > 0.0)) {
    if (grad.isZero(0.0)) return w_bar;
    throw DegenerateAuxiliaryError(
        "prox-linear step has zero Lipschitz constant but nonzero gradient");
  }
  return project_power(w_hat - grad / lipschitz, power);
}

namespace {

struct Iterate {
  CMatrix precoder;
  FpAuxiliaries aux;
  double wsr = 0.0;
};

// Precoder step followed by the alpha and beta refresh.
Iterate precoder_and_auxiliaries(const CMatrix& w_bar, const CMatrix& w_prev,
                                 double tau, const CMatrix& rows,
                                 const RVector& weights,
                                 const FpAuxiliaries& aux, double noise_power,
                                 double power) {
  Iterate next;
  next.precoder = update_precoder_proxlinear(w_bar, w_prev, tau, rows, weights,
                                             aux, power);
  // alpha = SINR is the fixed point of alternating update_alpha and
  // update_beta; there the surrogate equals the weighted sum-rate, so every
  // outer iteration is an ascent step on the rate itself.
  next.aux = optimal_auxiliaries(rows, next.precoder, weights, noise_power);
  next.wsr = weighted_sum_rate(rows, next.precoder, weights, noise_power);
  return next;
}

}  // namespace

BcdResult bcd_solve(const ChannelSet& channels, const PartitionPlan& plan,
                    const std::vector<CVector>& receive,
                    const RVector& weights, double noise_power, double power,
                    const BcdOptions& options, Rng& rng) {
  const int elements = channels.ris_elements();
  const auto lin = linearize_channels(channels, plan, receive);

  BcdResult result;
  PhaseVector theta = PhaseVector::random(elements, rng);
  CMatrix rows = rows_from_linearized(lin, theta);
  CMatrix w = wmmse_precoder(rows, weights, noise_power, power, options.wmmse)
                  .precoder;
  FpAuxiliaries aux = optimal_auxiliaries(rows, w, weights, noise_power);
  double wsr = weighted_sum_rate(rows, w, weights, noise_power);

  result.theta = theta;
  result.precoder = w;
  result.wsr = wsr;
  result.initial_wsr = wsr;
  result.wsr_history.push_back(wsr);
  result.best_history.push_back(wsr);
  result.best_rate_history.push_back(
      rates_from_equivalent(rows, w, weights, noise_power).rate);

  CMatrix w_prev = w;
  double t = 1.0;
  for (int it = 1; it <= options.max_outer; ++it) {
    const QuadraticForm form =
        build_quadratic_form(lin, elements, w, aux, weights);
    for (const ElementBlock& block : plan.blocks()) {
      theta = update_phases(theta, form, options.phase_sweeps, block);
    }
    rows = rows_from_linearized(lin, theta);
    aux.beta = update_beta(aux.alpha, rows, w, weights, noise_power);

    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double tau = options.extrapolate ? (t - 1.0) / t_next : 0.0;
    Iterate next = precoder_and_auxiliaries(w, w_prev, tau, rows, weights, aux,
                                            noise_power, power);
    if (tau > 0.0 && next.wsr < wsr) {
      next = precoder_and_auxiliaries(w, w, 0.0, rows, weights, aux,
                                      noise_power, power);
      t_next = 1.0;
      ++result.restarts;
    }

    w_prev = w;
    w = next.precoder;
    aux = next.aux;
    t = t_next;
    const double previous = wsr;
    wsr = next.wsr;

    result.iterations = it;
    result.wsr_history.push_back(wsr);
    if (wsr > result.wsr) {
      result.wsr = wsr;
      result.theta = theta;
      result.precoder = w;
      result.best_rate_history.push_back(
          rates_from_equivalent(rows, w, weights, noise_power).rate);
    } else {
      result.best_rate_history.push_back(result.best_rate_history.back());
    }
    result.best_history.push_back(result.wsr);
    if (std::abs(wsr - previous) < options.tol) break;
  }
  return result;
}

}  // namespace risbeam
