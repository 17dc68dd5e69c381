// Command-line front end: `run` (single seeded run), `mc` (Monte Carlo batch)
// and `report` (recompute c-ratio tables from stored fronts).

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mopso/mopso.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kLoadError = 2,
  kIoError = 3,
  kUnsupported = 4,
  kInvalid = 5,
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::string> cadence;
  bool timings = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Experiment JSON file")->required();
  cmd->add_option("--seed", opts.seed, "Run seed (mc: base seed)");
  cmd->add_option("--out", opts.out, "Output directory (overrides output_dir)");
  cmd->add_option("--mode", opts.mode, "Interval-distance aggregate used by the stop rule")
      ->check(CLI::IsMember({"max", "min", "avg"}));
  cmd->add_option("--cadence", opts.cadence, "Evaluation cadence of the stop rule")
      ->check(CLI::IsMember({"every-h", "every-iter"}));
  cmd->add_flag("--timings", opts.timings, "Record wall-clock timings in summary.json");
}

mopso::ExperimentConfig load(const CommonOptions& opts) {
  auto cfg = mopso::load_experiment(opts.config);
  if (opts.seed) cfg.base_seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;
  if (opts.mode) cfg.convergence.mode = mopso::parse_mode(*opts.mode, "--mode");
  if (opts.cadence) cfg.convergence.cadence = mopso::parse_cadence(*opts.cadence, "--cadence");
  cfg.record_timings = opts.timings;
  cfg.validate();
  return cfg;
}

int fail(const char* category, const std::string& message, int code) {
  std::cerr << "error[" << category << "]: " << message << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective particle swarm antenna deployment with adaptive stopping"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Single seeded optimization run");
  add_common(run, run_opts);

  CommonOptions mc_opts;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  bool no_trial_output = false;
  auto* mc = app.add_subcommand("mc", "Monte Carlo batch with seeds base_seed + i");
  add_common(mc, mc_opts);
  mc->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  mc->add_option("--threads", threads, "Worker threads (0: all cores)");
  mc->add_flag("--no-trial-output", no_trial_output, "Only write aggregate files");

  std::string report_in;
  std::optional<std::string> report_out;
  std::vector<double> anchors;
  auto* report = app.add_subcommand("report", "Recompute c_ratio.csv from stored fronts");
  report->add_option("--in", report_in, "Run or Monte Carlo output directory")->required();
  report->add_option("--out", report_out, "Directory for c_ratio.csv (default: --in)");
  report->add_option("--anchors", anchors, "Objective-1 anchor values (default: 25/50/75 percentiles)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = load(run_opts);
      const auto result = mopso::run_single(cfg, cfg.base_seed);
      mopso::export_run(cfg, result, cfg.output_dir);
      std::printf("seed %llu: stopped at iteration %zu (%s), final front %zu points -> %s\n",
                  static_cast<unsigned long long>(result.seed), result.stop_iteration,
                  result.criterion_met ? "criterion met" : "iteration cap", result.final_front.size(),
                  cfg.output_dir.string().c_str());
    } else if (*mc) {
      auto cfg = load(mc_opts);
      if (trials) cfg.trials = *trials;
      if (threads) cfg.threads = *threads;
      const auto result = mopso::run_monte_carlo(cfg);
      mopso::export_monte_carlo(cfg, result, cfg.output_dir, !no_trial_output);
      std::printf("%zu trials: median stop iteration %.1f (q25 %.1f, q75 %.1f), criterion met in %zu -> %s\n",
                  cfg.trials, result.stops.median, result.stops.q25, result.stops.q75,
                  result.stops.criterion_met, cfg.output_dir.string().c_str());
    } else if (*report) {
      const auto target = mopso::report_directory(report_in, anchors, report_out.value_or(report_in));
      std::printf("wrote %s\n", target.string().c_str());
    }
  } catch (const mopso::LoadError& e) {
    return fail(mopso::LoadError::category, e.what(), kLoadError);
  } catch (const mopso::IoError& e) {
    return fail(mopso::IoError::category, e.what(), kIoError);
  } catch (const mopso::UnsupportedReport& e) {
    return fail(mopso::UnsupportedReport::category, e.what(), kUnsupported);
  } catch (const mopso::InvalidArgument& e) {
    return fail(mopso::InvalidArgument::category, e.what(), kInvalid);
  } catch (const mopso::StateError& e) {
    return fail(mopso::StateError::category, e.what(), kFailure);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kFailure);
  }
  return kOk;
}
