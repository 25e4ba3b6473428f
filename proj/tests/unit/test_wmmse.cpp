#include <doctest.h>

#include "oracles.hpp"
#include "risbeam/metrics.hpp"
#include "risbeam/wmmse.hpp"

using namespace risbeam;

TEST_CASE("project_power") {
  CHECK(project_power(CMatrix::Zero(2, 3), 1.0).norm() == 0.0);

  std::mt19937_64 rng(1);
  CMatrix w = oracle::random_matrix(3, 2, rng);
  w *= 2.0 / w.norm();  // total power 4
  const CMatrix p = project_power(w, 1.0);
  CHECK((p - 0.5 * w).norm() < 1e-14);
  CHECK((project_power(p, 1.0) - p).norm() < 1e-15);

  const CMatrix inside = 0.1 * w;
  CHECK(project_power(inside, 1.0) == inside);
  CHECK(total_power(w) == doctest::Approx(4.0));
}

TEST_CASE("single antenna matched filter") {
  CMatrix h(1, 1);
  h(0, 0) = Complex(0.3, -1.2);
  const double p = 2.5, noise = 0.4;
  const WmmseResult r = wmmse_precoder(h, RVector::Ones(1), noise, p);
  const Complex expected = std::sqrt(p) * std::conj(h(0, 0)) / std::abs(h(0, 0));
  CHECK(std::abs(r.precoder(0, 0) - expected) < 1e-8);
  CHECK(r.wsr == doctest::Approx(std::log2(1.0 + p * std::norm(h(0, 0)) / noise)).epsilon(1e-12));
}

TEST_CASE("single user output equals closed-form MRT") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int bs = 1 + trial % 4;
    const CMatrix h = oracle::random_matrix(1, bs, rng);
    const double p = 0.5 + trial * 0.1;
    const WmmseResult r = wmmse_precoder(h, RVector::Ones(1), 1.0, p);
    const CVector mrt = std::sqrt(p) * h.row(0).adjoint() / h.norm();
    // A common phase does not change the rate; align it before comparing.
    const Complex phase = r.precoder.col(0).dot(mrt);
    const CVector aligned = r.precoder.col(0) * (phase / std::abs(phase));
    CHECK((aligned - mrt).norm() < 1e-8);
    CHECK((r.precoder.col(0) - mrt).norm() < 1e-8);
  }
}

TEST_CASE("single user beats a grid over the unit ball") {
  std::mt19937_64 rng(3);
  const CMatrix h = oracle::random_matrix(1, 2, rng);
  const double p = 1.0, noise = 0.5;
  const WmmseResult r = wmmse_precoder(h, RVector::Ones(1), noise, p);

  // Precoders sqrt(p) * rho * (cos a, sin a e^{j phi}); global phase is free.
  const double step = 0.01;
  double best = 0.0;
  for (double rho = 0.0; rho <= 1.0 + 1e-12; rho += step) {
    for (double a = 0.0; a <= kPi / 2 + 1e-12; a += step) {
      for (double phi = 0.0; phi < 2 * kPi; phi += step) {
        CMatrix w(2, 1);
        w(0, 0) = std::sqrt(p) * rho * std::cos(a);
        w(1, 0) = std::sqrt(p) * rho * std::sin(a) * std::polar(1.0, phi);
        best = std::max(best, oracle::wsr({h.row(0)}, w, RVector::Ones(1), noise));
      }
    }
  }
  CHECK(r.wsr >= best - 1e-12);
  CHECK(r.wsr - best < 1e-3);
}

TEST_CASE("orthogonal users get MRT with a water-filled split") {
  // Orthogonal rows along the two antenna axes with different strengths.
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 0) = Complex(1.5, 0.0);
  h(1, 1) = Complex(0.0, 0.6);
  const double p = 2.0, noise = 1.0;
  const WmmseResult r = wmmse_precoder(h, RVector::Ones(2), noise, p, {1e-10, 2000});

  const double g1 = std::norm(h(0, 0)), g2 = std::norm(h(1, 1));
  double grid = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double p1 = p * k / 10000.0;
    grid = std::max(grid, std::log2(1 + p1 * g1 / noise) + std::log2(1 + (p - p1) * g2 / noise));
  }
  // Water level: p_j = max(mu - noise / g_j, 0) with the powers summing to p.
  double lo = 0.0, hi = p + noise / g1 + noise / g2;
  for (int it = 0; it < 200; ++it) {
    const double mu = 0.5 * (lo + hi);
    const double used = std::max(mu - noise / g1, 0.0) + std::max(mu - noise / g2, 0.0);
    (used > p ? hi : lo) = mu;
  }
  const double p1 = std::max(lo - noise / g1, 0.0), p2 = std::max(lo - noise / g2, 0.0);
  const double wf = std::log2(1 + p1 * g1 / noise) + std::log2(1 + p2 * g2 / noise);
  CHECK(std::abs(grid - wf) < 1e-6);
  CHECK(std::abs(r.wsr - grid) < 1e-2);
  CHECK(std::abs(r.precoder(1, 0)) < 1e-3);
  CHECK(std::abs(r.precoder(0, 1)) < 1e-3);
}

TEST_CASE("WMMSE history is monotone and power feasible") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int users = 1 + trial % 4, bs = 1 + (trial / 4) % 4;
    const CMatrix h = oracle::random_matrix(users, bs, rng);
    RVector weights(users);
    for (int j = 0; j < users; ++j) weights[j] = 0.5 + 0.25 * j;
    const double p = std::pow(10.0, (trial % 7 - 2) / 2.0);
    const WmmseResult r = wmmse_precoder(h, weights, 1.0, p);
    for (std::size_t i = 1; i < r.history.size(); ++i)
      CHECK(r.history[i] >= r.history[i - 1] - 1e-9);
    CHECK(oracle::power_of(r.precoder) <= p + 1e-9);
    CHECK(r.wsr == doctest::Approx(oracle::wsr(oracle::split_rows(h), r.precoder, weights, 1.0))
                       .epsilon(1e-12));
  }
}

TEST_CASE("all-zero channels give a zero precoder") {
  const WmmseResult r = wmmse_precoder(CMatrix::Zero(2, 3), RVector::Ones(2), 1.0, 1.0);
  CHECK(r.precoder.norm() == 0.0);
  CHECK(r.wsr == 0.0);
}

TEST_CASE("MRT start uses equal power per user") {
  std::mt19937_64 rng(5);
  const CMatrix h = oracle::random_matrix(3, 4, rng);
  const CMatrix w = mrt_precoder(h, 6.0);
  for (int j = 0; j < 3; ++j) {
    CHECK(w.col(j).squaredNorm() == doctest::Approx(2.0));
    CHECK(std::abs(std::abs(h.row(j).dot(w.col(j).conjugate())) -
                   h.row(j).norm() * w.col(j).norm()) < 1e-12);
  }
}
