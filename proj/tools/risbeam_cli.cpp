// risbeam: Monte-Carlo driver for RIS-aided multiuser beamforming.
//
//   risbeam default-config > run.json
//   risbeam sweep   --config run.json --out out/snr --sweep snr --values -10,0,10
//   risbeam compare --config run.json --out out/cmp --trials 50 --threads 8
//
// Exit status is 0 on success, 1 on configuration errors and 2 on any other
// failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risbeam/config.hpp"
#include "risbeam/error.hpp"
#include "risbeam/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "risbeam_out";
  std::optional<std::uint64_t> seed_base;
  std::optional<int> trials;
  int threads = 1;
  std::string sweep = "snr";
  std::vector<double> values;
  bool wall_time = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seed-base", args.seed_base, "Seed of trial 0; trial t uses seed-base + t");
  cmd->add_option("--trials", args.trials, "Monte-Carlo trials per sweep value")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--sweep", args.sweep, "Sweep variable: snr, iterations, n_elements, users");
  cmd->add_option("--values", args.values, "Comma-separated sweep values")->delimiter(',');
  cmd->add_flag("--wall-time", args.wall_time,
                "Record wall-clock per trial (makes output non-reproducible)");
}

risbeam::SystemConfig resolve_config(const CommonArgs& args) {
  risbeam::SystemConfig config =
      args.config_path.empty() ? risbeam::SystemConfig{} : risbeam::load_config(args.config_path);
  if (args.seed_base) config.seed_base = *args.seed_base;
  if (args.trials) config.trials = *args.trials;
  config.validate();
  return config;
}

std::vector<double> resolve_values(const CommonArgs& args, risbeam::SweepVariable variable) {
  return args.values.empty() ? risbeam::default_sweep_values(variable) : args.values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided multiuser MIMO beamforming experiments"};
  app.require_subcommand(1);

  auto* defaults = app.add_subcommand("default-config", "Print the default configuration");
  std::string defaults_out;
  defaults->add_option("--out", defaults_out, "Write to this file instead of stdout");

  CommonArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run one algorithm/mode over a sweep");
  add_common(sweep, sweep_args);

  CommonArgs compare_args;
  auto* compare = app.add_subcommand(
      "compare", "Run LS and BCD in whole and subarray modes on shared channel draws");
  add_common(compare, compare_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*defaults) {
      if (defaults_out.empty()) {
        std::cout << risbeam::dump_config(risbeam::SystemConfig{});
      } else {
        risbeam::save_config(risbeam::SystemConfig{}, defaults_out);
      }
      return 0;
    }
    const CommonArgs& args = *sweep ? sweep_args : compare_args;
    const risbeam::SystemConfig config = resolve_config(args);
    const auto variable = risbeam::parse_sweep_variable(args.sweep);
    const auto values = resolve_values(args, variable);
    const risbeam::RunOptions options{args.threads, args.wall_time};

    if (*sweep) {
      const auto result = risbeam::run_sweep(config, variable, values, options);
      risbeam::write_results(result, config, args.out_dir);
      std::cout << risbeam::summary_csv(result);
    } else {
      const auto result = risbeam::paired_comparison(config, variable, values, options);
      risbeam::write_comparison(result, config, args.out_dir);
      for (const auto& arm : result.arms) std::cout << risbeam::summary_csv(arm);
      std::cout << risbeam::differences_csv(result);
    }
    return 0;
  } catch (const risbeam::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
