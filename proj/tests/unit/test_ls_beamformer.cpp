#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "risbeam/ls_beamformer.hpp"
#include "risbeam/metrics.hpp"

using namespace risbeam;

namespace {

LsParams params_for(int users, double power) {
  LsParams p;
  p.weights = RVector::Ones(users);
  p.noise_power = 1.0;
  p.power = power;
  return p;
}

// WSR of WMMSE at every phase vector in the set product, by enumeration.
std::vector<double> brute_force(const ChannelSet& c, const PartitionPlan& plan,
                                const std::vector<CVector>& receive,
                                const QuantizedPhaseSet& set, const LsParams& p) {
  const auto lin = linearize_channels(c, plan, receive);
  const int n = c.ris_elements();
  const int levels = set.size();
  int total = 1;
  for (int i = 0; i < n; ++i) total *= levels;
  std::vector<double> out;
  for (int code = 0; code < total; ++code) {
    CVector theta(n);
    int rest = code;
    for (int i = 0; i < n; ++i) {
      theta[i] = set.values[rest % levels];
      rest /= levels;
    }
    const CMatrix rows = rows_from_linearized(lin, theta);
    out.push_back(wmmse_precoder(rows, p.weights, p.noise_power, p.power, p.wmmse).wsr);
  }
  return out;
}

}  // namespace

TEST_CASE("phase sets") {
  for (int bits = 1; bits <= 4; ++bits) {
    const QuantizedPhaseSet s = make_phase_set(bits);
    REQUIRE(s.size() == (1 << bits));
    CHECK(s.values[0] == Complex(1.0, 0.0));
    for (int k = 0; k < s.size(); ++k) {
      CHECK(std::abs(std::abs(s.values[k]) - 1.0) < 1e-15);
      CHECK(std::abs(s.values[k] - std::polar(1.0, 2 * kPi * k / s.size())) < 1e-15);
    }
  }
  const QuantizedPhaseSet one = make_phase_set(1);
  const QuantizedPhaseSet two = make_phase_set(2);
  for (const auto& v : one.values) CHECK(two.contains(v));
}

TEST_CASE("receive grid size and unit norm") {
  const ReceiveGrid grid = make_receive_grid(2, 1);
  CHECK(grid.size() == 8);
  const auto cands = receive_candidates({2, 2, 0.5}, grid);
  REQUIRE(cands.size() == 8);
  for (const auto& v : cands) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));

  const auto scalar = receive_candidates({1, 1, 0.5}, grid);
  for (const auto& v : scalar) CHECK(std::abs(v[0] - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("single 1x1 user picks [1]") {
  std::mt19937_64 rng(1);
  const ChannelSet c = oracle::random_channels(1, 2, 1, 4, rng);
  const PartitionPlan plan = make_partition(4, 1, PartitionMode::subarray);
  Rng search(3);
  const auto v = search_receive_vectors(c, plan, PhaseVector::ones(4), {1, 1, 0.5},
                                        make_receive_grid(2, 1), {RVector::Ones(1), 1.0, 1.0},
                                        search);
  REQUIRE(v.size() == 1);
  CHECK(std::abs(v[0][0] - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("aligned channel selects its grid vector") {
  const UpaGeometry ue{2, 1, 0.5};
  const ReceiveGrid grid = make_receive_grid(2, 1);
  const auto cands = receive_candidates(ue, grid);
  std::mt19937_64 rng(2);
  for (int target = 0; target < grid.size(); ++target) {
    ChannelSet c;
    const CRowVector tx = oracle::random_matrix(1, 2, rng);
    c.direct = {cands[target] * tx};
    c.bs_to_ris = CMatrix::Zero(1, 2);
    c.ris_to_user = {CMatrix::Zero(2, 1)};
    // Exhaustive scoring: the gain |v_c^H a_target| with lowest index on ties.
    int expected = 0;
    double best = -1.0;
    for (int k = 0; k < grid.size(); ++k) {
      Complex ip = 0.0;
      for (int r = 0; r < 2; ++r) ip += std::conj(cands[k][r]) * cands[target][r];
      if (std::abs(ip) > best + 1e-12) {
        best = std::abs(ip);
        expected = k;
      }
    }
    Rng search(5);
    const auto v = search_receive_vectors(c, make_partition(1, 1, PartitionMode::whole),
                                          PhaseVector::ones(1), ue, grid,
                                          {RVector::Ones(1), 1.0, 1.0}, search);
    CHECK((v[0] - cands[expected]).norm() < 1e-14);
    CHECK(std::abs(cands[expected].dot(cands[target])) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("one element: LS equals exhaustive search") {
  std::mt19937_64 rng(10);
  for (int seed = 0; seed < 30; ++seed) {
    const int bits = 1 + seed % 3;
    const ChannelSet c = oracle::random_channels(2, 2, 2, 1, rng);
    const PartitionPlan plan = make_partition(1, 2, PartitionMode::whole);
    const std::vector<CVector> v = {oracle::random_unit_vector(2, rng),
                                    oracle::random_unit_vector(2, rng)};
    const auto set = make_phase_set(bits);
    const LsParams p = params_for(2, 3.0);
    Rng ls_rng(seed);
    const LsResult r = ls_optimize(c, plan, v, set, p, ls_rng);
    const auto all = brute_force(c, plan, v, set, p);
    CHECK(r.wsr == *std::max_element(all.begin(), all.end()));
    CHECK(r.wmmse_calls == set.size());
  }
}

TEST_CASE("four elements: LS lands in the enumeration set") {
  std::mt19937_64 rng(11);
  const ChannelSet c = oracle::random_channels(1, 1, 1, 4, rng);
  const PartitionPlan plan = make_partition(4, 1, PartitionMode::subarray);
  const std::vector<CVector> v = {CVector::Ones(1)};
  const auto set = make_phase_set(1);
  const LsParams p = params_for(1, 2.0);
  auto all = brute_force(c, plan, v, set, p);
  REQUIRE(all.size() == 16);
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[7] + sorted[8]);
  for (int seed = 0; seed < 20; ++seed) {
    Rng ls_rng(seed);
    const LsResult r = ls_optimize(c, plan, v, set, p, ls_rng);
    double nearest = 1e300;
    for (double x : all) nearest = std::min(nearest, std::abs(x - r.wsr));
    CHECK(nearest < 1e-12);
    CHECK(r.wsr >= median - 1e-12);
    CHECK(r.wmmse_calls == 8);
  }
}

TEST_CASE("two elements: argmax over the first element") {
  std::mt19937_64 rng(12);
  const ChannelSet c = oracle::random_channels(1, 2, 1, 2, rng);
  const PartitionPlan plan = make_partition(2, 1, PartitionMode::whole);
  const std::vector<CVector> v = {CVector::Ones(1)};
  const auto set = make_phase_set(1);
  const LsParams p = params_for(1, 1.0);
  for (int seed = 0; seed < 10; ++seed) {
    Rng ls_rng(seed), replay(seed);
    const LsResult r = ls_optimize(c, plan, v, set, p, ls_rng);
    std::uniform_int_distribution<int> pick(0, set.size() - 1);
    const Complex second = set.values[pick(replay)];
    double first_best = -1.0;
    for (const auto& a : set.values) {
      CVector theta(2);
      theta << a, second;
      const CMatrix rows = equivalent_channels(c, PhaseVector(theta), plan, v);
      first_best = std::max(first_best, wmmse_precoder(rows, p.weights, 1.0, 1.0).wsr);
    }
    CHECK(r.wsr >= first_best - 1e-12);
  }
}

TEST_CASE("LS output membership, determinism and report consistency") {
  std::mt19937_64 rng(13);
  const ChannelSet c = oracle::random_channels(4, 4, 2, 16, rng);
  const PartitionPlan plan = make_partition(16, 4, PartitionMode::subarray);
  std::vector<CVector> v;
  for (int j = 0; j < 4; ++j) v.push_back(oracle::random_unit_vector(2, rng));
  for (int bits = 1; bits <= 3; ++bits) {
    const auto set = make_phase_set(bits);
    const LsParams p = params_for(4, 5.0);
    Rng a(42), b(42);
    const LsResult x = ls_optimize(c, plan, v, set, p, a);
    const LsResult y = ls_optimize(c, plan, v, set, p, b);
    CHECK(x.wsr == y.wsr);
    CHECK(x.theta.values() == y.theta.values());
    CHECK(x.precoder == y.precoder);
    CHECK(x.wmmse_calls == set.size() * 16);
    for (int n = 0; n < 16; ++n)
      CHECK(std::find(set.values.begin(), set.values.end(), x.theta[n]) != set.values.end());
    CHECK(oracle::power_of(x.precoder) <= p.power + 1e-9);
    const RateReport rep = evaluate(c, x.theta, x.precoder, v, plan, p.weights, 1.0);
    CHECK(rep.wsr == doctest::Approx(x.wsr).epsilon(1e-12));
  }
}

TEST_CASE("best of ten seeds with two bits is no worse than with one") {
  std::mt19937_64 rng(14);
  const ChannelSet c = oracle::random_channels(2, 2, 2, 8, rng);
  const PartitionPlan plan = make_partition(8, 2, PartitionMode::subarray);
  const std::vector<CVector> v = {oracle::random_unit_vector(2, rng),
                                  oracle::random_unit_vector(2, rng)};
  const LsParams p = params_for(2, 3.0);
  double best1 = -1.0, best2 = -1.0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng a(seed), b(seed);
    best1 = std::max(best1, ls_optimize(c, plan, v, make_phase_set(1), p, a).wsr);
    best2 = std::max(best2, ls_optimize(c, plan, v, make_phase_set(2), p, b).wsr);
  }
  CHECK(best2 >= best1 - 1e-9);
}
