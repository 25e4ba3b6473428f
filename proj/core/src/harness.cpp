#include "risbeam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "risbeam/bcd_optimizer.hpp"
#include "risbeam/error.hpp"
#include "risbeam/ls_beamformer.hpp"
#include "risbeam/metrics.hpp"
#include "risbeam/subarray.hpp"

#ifndef RISBEAM_VERSION_STRING
#define RISBEAM_VERSION_STRING "unknown"
#endif

namespace risbeam {

std::string_view to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::snr_db: return "snr_db";
    case SweepVariable::iterations: return "iterations";
    case SweepVariable::n_elements: return "n_elements";
    case SweepVariable::users: return "users";
  }
  return "unknown";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "snr" || name == "snr_db") return SweepVariable::snr_db;
  if (name == "iterations") return SweepVariable::iterations;
  if (name == "n_elements" || name == "elements") return SweepVariable::n_elements;
  if (name == "users") return SweepVariable::users;
  throw ConfigError("unknown sweep variable '" + std::string(name) +
                    "' (expected snr, iterations, n_elements or users)");
}

std::vector<double> default_sweep_values(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::snr_db: return {-10, -5, 0, 5, 10, 15, 20};
    case SweepVariable::iterations: {
      std::vector<double> v;
      for (int i = 0; i <= 100; ++i) v.push_back(i);
      return v;
    }
    case SweepVariable::n_elements: return {36, 64, 100, 144};
    case SweepVariable::users: return {2, 4, 6};
  }
  return {};
}

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed_base, int trials) {
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < trials; ++t) seeds.push_back(seed_base + static_cast<std::uint64_t>(t));
  return seeds;
}

RVector user_weights(WeightsRule rule, const ChannelSet& channels) {
  const int users = channels.users();
  RVector w = RVector::Ones(users);
  if (rule == WeightsRule::inverse_pathloss) {
    // pathloss_direct holds amplitude gains g; the linear power loss is
    // 1 / g^2, so its inverse is g^2.
    for (int j = 0; j < users; ++j) {
      w[j] = channels.pathloss_direct[j] * channels.pathloss_direct[j];
    }
    w *= users / w.sum();
  }
  return w;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_mix(std::uint64_t& h, const CMatrix& m) {
  const Eigen::Index dims[2] = {m.rows(), m.cols()};
  fnv_mix(h, dims, sizeof(dims));
  fnv_mix(h, m.data(), sizeof(Complex) * static_cast<std::size_t>(m.size()));
}

}  // namespace

std::uint64_t channel_fingerprint(const ChannelSet& channels) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, channels.bs_to_ris);
  for (const auto& m : channels.direct) fnv_mix(h, m);
  for (const auto& m : channels.ris_to_user) fnv_mix(h, m);
  return h;
}

SystemConfig apply_sweep_value(const SystemConfig& config,
                               SweepVariable variable, double value) {
  SystemConfig c = config;
  switch (variable) {
    case SweepVariable::snr_db:
      if (c.power_mode != PowerMode::normalized_snr) {
        throw ConfigError("an SNR sweep needs power_mode normalized_snr");
      }
      c.snr_db = value;
      break;
    case SweepVariable::n_elements: {
      const int side = static_cast<int>(std::lround(std::sqrt(value)));
      if (value < 1 || side * side != static_cast<int>(std::lround(value)) ||
          std::abs(value - std::round(value)) > 0) {
        throw ConfigError("n_elements sweep value " + std::to_string(value) +
                          " is not a perfect square");
      }
      c.ris_side = side;
      break;
    }
    case SweepVariable::users:
      if (value < 1 || std::abs(value - std::round(value)) > 0) {
        throw ConfigError("users sweep values must be positive integers");
      }
      c.users = static_cast<int>(std::lround(value));
      break;
    case SweepVariable::iterations:
      if (value < 0 || std::abs(value - std::round(value)) > 0) {
        throw ConfigError("iterations sweep values must be non-negative integers");
      }
      break;
  }
  return c;
}

namespace {

// Tags separating the random streams of one trial.
constexpr std::uint64_t kReceiveStream = 0x7265636569766572ULL;
constexpr std::uint64_t kAlgorithmStream = 0x616c676f72697468ULL;
constexpr std::uint64_t kSearchPhaseStream = 0x7365617263687068ULL;

struct TrialChannels {
  ChannelSet channels;
  RVector weights;
  std::uint64_t hash = 0;
};

TrialChannels draw_trial_channels(const SystemConfig& config,
                                  std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  const ScenarioGeometry scenario = make_scenario(config, rng);
  TrialChannels t;
  t.channels = build_channel_set(config, scenario, {config.k1, config.k2}, rng);
  t.weights = user_weights(config.weights_rule, t.channels);
  t.hash = channel_fingerprint(t.channels);
  return t;
}

std::vector<CVector> choose_receive_vectors(const SystemConfig& config,
                                            const TrialChannels& trial,
                                            const PartitionPlan& plan,
                                            std::uint64_t seed) {
  // The search sees a random quantized RIS state; its draws come from their
  // own stream so the receive-grid draws do not depend on the RIS size.
  Rng phase_rng(mix_seed(seed ^ kSearchPhaseStream));
  const QuantizedPhaseSet phases = make_phase_set(config.phase_bits);
  std::uniform_int_distribution<int> pick(0, phases.size() - 1);
  CVector theta(config.ris_elements());
  for (Eigen::Index n = 0; n < theta.size(); ++n) theta[n] = phases.values[pick(phase_rng)];
  Rng rng(mix_seed(seed ^ kReceiveStream));
  const UpaGeometry user_array{config.user_width, config.user_height,
                               config.spacing_ratio};
  return search_receive_vectors(
      trial.channels, plan, PhaseVector(theta), user_array,
      make_receive_grid(config.azimuth_bits, config.elevation_bits),
      {trial.weights, config.noise_power(), config.transmit_power()}, rng);
}

struct AlgorithmOutcome {
  PhaseVector theta;
  CMatrix precoder;
  int iterations = 0;
  double initial_wsr = 0.0;
  std::vector<double> best_history;
  std::vector<std::vector<double>> best_rate_history;
};

AlgorithmOutcome run_algorithm(const SystemConfig& config, Algorithm algorithm,
                               const TrialChannels& trial,
                               const PartitionPlan& plan,
                               const std::vector<CVector>& receive,
                               std::uint64_t seed, int max_outer) {
  Rng rng(mix_seed(seed ^ kAlgorithmStream));
  const WmmseOptions wmmse{config.wmmse_tol, config.wmmse_max_iter};
  AlgorithmOutcome out;
  if (algorithm == Algorithm::wmmse_ls) {
    LsParams params{trial.weights, config.noise_power(), config.transmit_power(), wmmse};
    LsResult ls = ls_optimize(trial.channels, plan, receive,
                              make_phase_set(config.phase_bits), params, rng);
    out.theta = std::move(ls.theta);
    out.precoder = std::move(ls.precoder);
    out.iterations = ls.wmmse_calls;
    return out;
  }
  BcdOptions options;
  options.tol = config.tol;
  options.max_outer = max_outer;
  options.phase_sweeps = config.phase_sweeps;
  options.wmmse = wmmse;
  BcdResult bcd = bcd_solve(trial.channels, plan, receive, trial.weights,
                            config.noise_power(), config.transmit_power(),
                            options, rng);
  out.theta = std::move(bcd.theta);
  out.precoder = std::move(bcd.precoder);
  out.iterations = bcd.iterations;
  out.initial_wsr = bcd.initial_wsr;
  out.best_history = std::move(bcd.best_history);
  out.best_rate_history = std::move(bcd.best_rate_history);
  return out;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index
// writes only its own output slot, so the schedule never shows in results.
template <class Fn>
void parallel_for(int count, int threads, Fn fn) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void aggregate(ExperimentResult& result, const std::vector<double>& values) {
  result.points.clear();
  for (double value : values) {
    SweepPoint point;
    point.value = value;
    std::vector<const TrialRecord*> rows;
    for (const auto& r : result.records) {
      if (r.sweep_value == value) rows.push_back(&r);
    }
    point.trials = static_cast<int>(rows.size());
    if (rows.empty()) {
      result.points.push_back(point);
      continue;
    }
    double sum = 0.0;
    std::size_t users = 0;
    for (const auto* r : rows) {
      sum += r->wsr;
      users = std::max(users, r->rates.size());
    }
    point.mean_wsr = sum / rows.size();
    double ss = 0.0;
    for (const auto* r : rows) ss += (r->wsr - point.mean_wsr) * (r->wsr - point.mean_wsr);
    point.std_wsr = rows.size() > 1 ? std::sqrt(ss / (rows.size() - 1)) : 0.0;
    point.mean_rates.assign(users, 0.0);
    for (const auto* r : rows) {
      for (std::size_t k = 0; k < r->rates.size(); ++k) point.mean_rates[k] += r->rates[k];
    }
    for (double& m : point.mean_rates) m /= rows.size();
    result.points.push_back(point);
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void validate_sweep(const SystemConfig& config, SweepVariable variable,
                    const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  config.validate();
  for (double v : values) {
    const SystemConfig c = apply_sweep_value(config, variable, v);
    c.validate();
    make_partition(c.ris_elements(), c.users, c.mode);
  }
}

}  // namespace

ExperimentResult run_sweep(const SystemConfig& config, SweepVariable variable,
                           const std::vector<double>& values,
                           const RunOptions& options) {
  validate_sweep(config, variable, values);
  if (variable == SweepVariable::iterations && config.algorithm != Algorithm::bcd) {
    throw ConfigError("an iterations sweep needs algorithm bcd");
  }

  ExperimentResult result;
  result.variable = variable;
  result.algorithm = config.algorithm;
  result.mode = config.mode;
  result.seeds = trial_seeds(config.seed_base, config.trials);
  const int trials = config.trials;

  if (variable == SweepVariable::iterations) {
    const int horizon = static_cast<int>(
        std::lround(*std::max_element(values.begin(), values.end())));
    std::vector<std::vector<TrialRecord>> per_trial(trials);
    parallel_for(trials, options.threads, [&](int t) {
      const auto start = std::chrono::steady_clock::now();
      const std::uint64_t seed = result.seeds[t];
      const TrialChannels trial = draw_trial_channels(config, seed);
      const PartitionPlan plan = make_partition(config.ris_elements(), config.users, config.mode);
      const auto receive = choose_receive_vectors(config, trial, plan, seed);
      const AlgorithmOutcome out = run_algorithm(config, Algorithm::bcd, trial, plan,
                                                 receive, seed, std::max(horizon, 1));
      const double wall = options.record_wall_time ? elapsed_ms(start) : 0.0;
      const int last = static_cast<int>(out.best_history.size()) - 1;
      for (double v : values) {
        const int i = std::min(static_cast<int>(std::lround(v)), last);
        TrialRecord r;
        r.sweep_value = v;
        r.trial = t;
        r.seed = seed;
        r.wsr = out.best_history[i];
        r.initial_wsr = out.initial_wsr;
        r.rates = out.best_rate_history[i];
        r.iterations_used = i;
        r.wall_ms = wall;
        r.channel_hash = trial.hash;
        per_trial[t].push_back(std::move(r));
      }
    });
    for (std::size_t k = 0; k < values.size(); ++k) {
      for (int t = 0; t < trials; ++t) result.records.push_back(per_trial[t][k]);
    }
    aggregate(result, values);
    return result;
  }

  const int jobs = static_cast<int>(values.size()) * trials;
  result.records.resize(jobs);
  parallel_for(jobs, options.threads, [&](int job) {
    const auto start = std::chrono::steady_clock::now();
    const double value = values[job / trials];
    const int t = job % trials;
    const std::uint64_t seed = result.seeds[t];
    const SystemConfig c = apply_sweep_value(config, variable, value);
    const TrialChannels trial = draw_trial_channels(c, seed);
    const PartitionPlan plan = make_partition(c.ris_elements(), c.users, c.mode);
    const auto receive = choose_receive_vectors(c, trial, plan, seed);
    const AlgorithmOutcome out =
        run_algorithm(c, c.algorithm, trial, plan, receive, seed, c.max_iter);
    const RateReport report = evaluate(trial.channels, out.theta, out.precoder, receive,
                                       plan, trial.weights, c.noise_power());
    TrialRecord& r = result.records[job];
    r.sweep_value = value;
    r.trial = t;
    r.seed = seed;
    r.wsr = report.wsr;
    r.initial_wsr = out.initial_wsr;
    r.rates = report.rate;
    r.iterations_used = out.iterations;
    r.channel_hash = trial.hash;
    r.wall_ms = options.record_wall_time ? elapsed_ms(start) : 0.0;
  });
  aggregate(result, values);
  return result;
}

const ExperimentResult& ComparisonResult::arm(Algorithm algorithm,
                                              PartitionMode mode) const {
  const int index = (algorithm == Algorithm::bcd ? 2 : 0) +
                    (mode == PartitionMode::subarray ? 1 : 0);
  return arms[index];
}

ComparisonResult paired_comparison(const SystemConfig& config,
                                   SweepVariable variable,
                                   const std::vector<double>& values,
                                   const RunOptions& options) {
  if (variable == SweepVariable::iterations) {
    throw ConfigError("compare does not support an iterations sweep");
  }
  for (PartitionMode mode : {PartitionMode::whole, PartitionMode::subarray}) {
    SystemConfig c = config;
    c.mode = mode;
    validate_sweep(c, variable, values);
  }

  ComparisonResult result;
  const Algorithm algorithms[2] = {Algorithm::wmmse_ls, Algorithm::bcd};
  const PartitionMode modes[2] = {PartitionMode::whole, PartitionMode::subarray};
  const std::vector<std::uint64_t> seeds = trial_seeds(config.seed_base, config.trials);
  const int trials = config.trials;
  const int jobs = static_cast<int>(values.size()) * trials;
  for (int a = 0; a < 2; ++a) {
    for (int m = 0; m < 2; ++m) {
      ExperimentResult& arm = result.arms[a * 2 + m];
      arm.variable = variable;
      arm.algorithm = algorithms[a];
      arm.mode = modes[m];
      arm.seeds = seeds;
      arm.records.resize(jobs);
    }
  }

  parallel_for(jobs, options.threads, [&](int job) {
    const double value = values[job / trials];
    const int t = job % trials;
    const std::uint64_t seed = seeds[t];
    const SystemConfig base = apply_sweep_value(config, variable, value);
    const TrialChannels trial = draw_trial_channels(base, seed);
    for (int m = 0; m < 2; ++m) {
      SystemConfig c = base;
      c.mode = modes[m];
      const PartitionPlan plan = make_partition(c.ris_elements(), c.users, c.mode);
      const auto receive = choose_receive_vectors(c, trial, plan, seed);
      for (int a = 0; a < 2; ++a) {
        const auto start = std::chrono::steady_clock::now();
        const AlgorithmOutcome out =
            run_algorithm(c, algorithms[a], trial, plan, receive, seed, c.max_iter);
        const RateReport report = evaluate(trial.channels, out.theta, out.precoder,
                                           receive, plan, trial.weights, c.noise_power());
        TrialRecord& r = result.arms[a * 2 + m].records[job];
        r.sweep_value = value;
        r.trial = t;
        r.seed = seed;
        r.wsr = report.wsr;
        r.initial_wsr = out.initial_wsr;
        r.rates = report.rate;
        r.iterations_used = out.iterations;
        r.channel_hash = trial.hash;
        r.wall_ms = options.record_wall_time ? elapsed_ms(start) : 0.0;
      }
    }
  });
  for (auto& arm : result.arms) aggregate(arm, values);

  auto paired = [&](const ExperimentResult& lhs, const ExperimentResult& rhs,
                    const std::string& label) {
    for (double value : values) {
      PairedDifference d;
      d.label = label;
      d.sweep_value = value;
      std::vector<double> diffs;
      for (std::size_t k = 0; k < lhs.records.size(); ++k) {
        if (lhs.records[k].sweep_value == value) {
          diffs.push_back(lhs.records[k].wsr - rhs.records[k].wsr);
        }
      }
      d.trials = static_cast<int>(diffs.size());
      double sum = 0.0;
      for (double x : diffs) sum += x;
      d.mean_difference = diffs.empty() ? 0.0 : sum / diffs.size();
      int agree = 0;
      for (double x : diffs) {
        if ((d.mean_difference > 0 && x > 0) || (d.mean_difference < 0 && x < 0)) ++agree;
      }
      d.sign_agreement = diffs.empty() ? 0.0 : static_cast<double>(agree) / diffs.size();
      result.differences.push_back(d);
    }
  };
  for (PartitionMode mode : modes) {
    paired(result.arm(Algorithm::bcd, mode), result.arm(Algorithm::wmmse_ls, mode),
           "bcd-wmmse_ls@" + std::string(to_string(mode)));
  }
  for (Algorithm algorithm : algorithms) {
    paired(result.arm(algorithm, PartitionMode::subarray),
           result.arm(algorithm, PartitionMode::whole),
           "subarray-whole@" + std::string(to_string(algorithm)));
  }
  return result;
}

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::size_t max_users(const ExperimentResult& result) {
  std::size_t users = 0;
  for (const auto& r : result.records) users = std::max(users, r.rates.size());
  return users;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::string results_csv(const ExperimentResult& result) {
  const std::size_t users = max_users(result);
  std::ostringstream out;
  out << "sweep_value,trial,seed,wsr";
  for (std::size_t k = 1; k <= users; ++k) out << ",rate_user_" << k;
  out << ",iterations_used,wall_ms\n";
  for (const auto& r : result.records) {
    out << num(r.sweep_value) << ',' << r.trial << ',' << r.seed << ',' << num(r.wsr);
    for (std::size_t k = 0; k < users; ++k) {
      out << ',';
      if (k < r.rates.size()) out << num(r.rates[k]);
    }
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", r.wall_ms);
    out << ',' << r.iterations_used << ',' << wall << '\n';
  }
  return out.str();
}

std::string summary_csv(const ExperimentResult& result) {
  std::size_t users = 0;
  for (const auto& p : result.points) users = std::max(users, p.mean_rates.size());
  std::ostringstream out;
  out << "sweep_value,algorithm,mode,trials,mean_wsr,std_wsr";
  for (std::size_t k = 1; k <= users; ++k) out << ",mean_rate_user_" << k;
  out << '\n';
  for (const auto& p : result.points) {
    out << num(p.value) << ',' << to_string(result.algorithm) << ','
        << to_string(result.mode) << ',' << p.trials << ',' << num(p.mean_wsr) << ','
        << num(p.std_wsr);
    for (std::size_t k = 0; k < users; ++k) {
      out << ',';
      if (k < p.mean_rates.size()) out << num(p.mean_rates[k]);
    }
    out << '\n';
  }
  return out.str();
}

std::string differences_csv(const ComparisonResult& result) {
  std::ostringstream out;
  out << "comparison,sweep_value,trials,mean_difference,sign_agreement\n";
  for (const auto& d : result.differences) {
    out << d.label << ',' << num(d.sweep_value) << ',' << d.trials << ','
        << num(d.mean_difference) << ',' << num(d.sign_agreement) << '\n';
  }
  return out.str();
}

std::string manifest_text(const SystemConfig& config,
                          const ExperimentResult& result) {
  std::ostringstream out;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, config_hash(config));
  out << "tool=risbeam\n";
  out << "version=" << RISBEAM_VERSION_STRING << '\n';
  out << "config_hash=" << hash << '\n';
  out << "algorithm=" << to_string(result.algorithm) << '\n';
  out << "mode=" << to_string(result.mode) << '\n';
  out << "sweep_variable=" << to_string(result.variable) << '\n';
  out << "sweep_values=";
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    out << (k ? " " : "") << num(result.points[k].value);
  }
  out << '\n';
  out << "trials=" << result.seeds.size() << '\n';
  out << "seeds=";
  for (std::size_t k = 0; k < result.seeds.size(); ++k) {
    out << (k ? " " : "") << result.seeds[k];
  }
  out << '\n';
  out << "power_mode=" << to_string(config.power_mode) << '\n';
  if (config.power_mode == PowerMode::normalized_snr) {
    out << "snr_semantics=P/sigma^2 with sigma^2 = 1; user-side channels scaled by "
           "a reference loss of "
        << num(config.reference_loss_db())
        << " dB, so SNR is the receive SNR of a link with that pathloss\n";
  } else {
    out << "noise_power_w=" << num(config.noise_power()) << '\n';
    out << "tx_power_w=" << num(config.transmit_power()) << '\n';
  }
  out << "weights_rule=" << to_string(config.weights_rule) << '\n';
  out << "rates=bits/s/Hz\n";
  return out.str();
}

void write_results(const ExperimentResult& result, const SystemConfig& config,
                   const std::string& dir, const std::string& prefix) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  write_file(root / (prefix + "results.csv"), results_csv(result));
  write_file(root / (prefix + "summary.csv"), summary_csv(result));
  write_file(root / (prefix + "manifest.txt"), manifest_text(config, result));
  write_file(root / (prefix + "config.json"), dump_config(config));
}

void write_comparison(const ComparisonResult& result,
                      const SystemConfig& config, const std::string& dir) {
  for (const auto& arm : result.arms) {
    SystemConfig c = config;
    c.algorithm = arm.algorithm;
    c.mode = arm.mode;
    write_results(arm, c, dir,
                  std::string(to_string(arm.algorithm)) + "_" +
                      std::string(to_string(arm.mode)) + "_");
  }
  const std::filesystem::path root(dir);
  write_file(root / "differences.csv", differences_csv(result));
}

}  // namespace risbeam
