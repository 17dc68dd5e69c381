// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mopso/mopso.hpp"
#include "oracles.hpp"

using namespace mopso;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path kSource = MOPSO_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mopso_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

// 1. Closed-form power densities, frozen at 40 significant digits.
Outcome objective_exactness() {
  struct Case {
    std::vector<Point> antennas;
    Point cell;
    std::vector<double> powers;
    std::vector<double> gains;
    double expected;
  };
  const std::vector<Case> cases{
      {{{0, 0}}, {10000, 0}, {15000}, {1e4}, 0.11936620731892150183},
      {{{0, 0}}, {3000, 4000}, {10}, {1e4}, 0.00031830988618379067154},
      {{{0, 0}}, {70000, 70000}, {15000}, {1e4}, 0.0012180225236624643044},
      {{{500, 500}}, {500, 500}, {15000}, {1e4}, 1193.6620731892150183},
      {{{0, 0}}, {30, 40}, {15000}, {1e4}, 1193.6620731892150183},
      {{{0, 0}, {6000, 0}}, {3000, 4000}, {15000, 15000}, {1e4, 1e4}, 0.95492965855137201461},
      {{{0, 0}, {1000, 0}, {0, 2000}}, {0, 0}, {100, 200, 300}, {1, 10, 100}, 0.0015517606951459795237},
      {{{0, 0}}, {600, 800}, {1}, {db_to_linear(40)}, 0.00079577471545947667884},
      {{{0, 0}}, {60, 80}, {15000}, {1e4}, 1193.6620731892150183},
      {{{0, 0}, {70000, 0}, {0, 70000}, {70000, 70000}},
       {35000, 35000},
       {15000, 15000, 15000, 15000},
       {1e4, 1e4, 1e4, 1e4},
       0.01948836037859942887},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const double got = power_density(AntennaLayout{c.antennas}, c.cell, RadarParams{c.powers, c.gains}, 100.0);
    worst = std::max(worst, std::abs(got - c.expected) / c.expected);
  }
  return {worst <= 1e-12, std::to_string(cases.size()) + " cases, max relative error " + fmt("%.3g", worst)};
}

// 2. Pareto machinery against brute force.
Outcome pareto_oracle() {
  Rng rng(20240601);
  const std::size_t dims[] = {2, 3, 5};
  std::size_t mismatches = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t m = dims[instance % 3];
    const int style = static_cast<int>(rng.index(3));
    const auto points = oracle::random_points(rng, 1 + rng.index(200), m, style);
    auto got = pareto_filter(points);
    auto want = oracle::pareto_filter(points);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    mismatches += got == want ? 0 : 1;

    const auto prev = oracle::random_front(rng, 1 + rng.index(200), m, style);
    const auto cur = oracle::random_front(rng, 1 + rng.index(200), m, style);
    const FrontSnapshot ft{5, cur};
    const FrontSnapshot fp{0, prev};
    for (std::size_t k = 0; k < cur.size(); ++k) {
      mismatches += dominated_set(k, ft, fp) == oracle::dominated_set(cur[k], prev) ? 0 : 1;
      mismatches += relative_distance(k, ft, fp) == oracle::relative_distance(cur[k], prev) ? 0 : 1;
    }
    const auto want_agg = oracle::interval_distance(cur, prev);
    const auto mx = interval_distance(ft, fp, DistanceMode::Max);
    const auto mn = interval_distance(ft, fp, DistanceMode::Min);
    const auto av = interval_distance(ft, fp, DistanceMode::Avg);
    mismatches += mx.dist == want_agg.max ? 0 : 1;
    mismatches += mn.dist == want_agg.min ? 0 : 1;
    mismatches += av.dist == want_agg.avg ? 0 : 1;
    mismatches += av.zero_count == want_agg.zeros ? 0 : 1;
  }
  return {mismatches == 0, "1000 instances, " + std::to_string(mismatches) + " mismatches"};
}

// 3. No archived point is ever dominated by an earlier archived point.
Outcome front_non_regression() {
  auto cfg = load_experiment(kSource / "configs" / "default_experiment.json");
  const DeploymentProblem problem(cfg.scenario);
  MopsoConfig mopso = cfg.mopso;
  mopso.archive_capacity.reset();
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    mopso.rng_seed = seed;
    auto state = initialize_swarm(problem, mopso);
    std::vector<std::vector<ObjectiveVector>> history{state.archive.values()};
    for (int t = 1; t <= 200; ++t) {
      step(state, problem, mopso);
      history.push_back(state.archive.values());
    }
    for (std::size_t later = 1; later < history.size(); ++later) {
      for (std::size_t earlier = 0; earlier < later; ++earlier) {
        for (const auto& b : history[later]) {
          for (const auto& a : history[earlier]) {
            violations += dominates(a, b) ? 1 : 0;
          }
        }
      }
    }
  }
  return {violations == 0, "20 seeds x 200 iterations, " + std::to_string(violations) + " violations"};
}

// 4. Early interval distances dwarf late ones in every aggregate mode.
Outcome convergence_trend() {
  auto cfg = load_experiment(kSource / "configs" / "default_experiment.json");
  cfg.mopso.max_iterations = 600;
  cfg.snapshot_iterations = {10, 50, 100, 400, 600};
  cfg.continue_after_stop = true;
  cfg.trials = 20;
  cfg.base_seed = 0;
  const auto report = run_monte_carlo(cfg);

  bool pass = true;
  std::string detail;
  for (DistanceMode mode : {DistanceMode::Max, DistanceMode::Min, DistanceMode::Avg}) {
    std::map<std::size_t, std::vector<double>> per_t;
    for (const auto& run : report.runs) {
      for (const auto& r : run.trace.records) {
        per_t[r.iteration].push_back(r.dist(mode));
      }
    }
    double first = 0.0;
    double last = 0.0;
    std::size_t n_first = 0;
    std::size_t n_last = 0;
    for (const auto& [t, values] : per_t) {
      const double med = median(values);
      if (t <= 150) {
        first += med;
        ++n_first;
      } else if (t > 450) {
        last += med;
        ++n_last;
      }
    }
    first /= static_cast<double>(n_first);
    last /= static_cast<double>(n_last);
    const double ratio = last > 0.0 ? first / last : (first > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    pass = pass && ratio >= 5.0;
    detail += std::string(detail.empty() ? "" : ", ") + to_string(mode) + " " + fmt("%.2f", ratio);
  }
  return {pass, "first/last quarter median dist ratio: " + detail + " (need >= 5)"};
}

ExperimentConfig adaptive_config() {
  auto cfg = load_experiment(kSource / "configs" / "adaptive_stop_study.json");
  cfg.trials = 20;
  cfg.base_seed = 0;
  cfg.continue_after_stop = true;
  return cfg;
}

// 5. The stop rule fires early and the front at the stop is near-final.
Outcome adaptive_stop(const ExperimentConfig& cfg, const MonteCarloReport& report) {
  std::size_t early = 0;
  std::vector<std::vector<double>> c_at_stop(3);
  std::vector<double> stops;
  for (const auto& run : report.runs) {
    if (run.criterion_met && run.stop_iteration < cfg.mopso.max_iterations) {
      ++early;
    }
    stops.push_back(static_cast<double>(run.stop_iteration));
    const auto rep = run_c_ratio(run, {});
    for (const auto& row : rep->rows) {
      if (row.iteration == run.stop_iteration) {
        for (std::size_t a = 0; a < 3; ++a) {
          c_at_stop[a].push_back(row.c[a].value_or(0.0));
        }
      }
    }
  }
  bool pass = early * 10 >= report.runs.size() * 9;
  std::string detail = std::to_string(early) + "/" + std::to_string(report.runs.size()) +
                       " stopped before the cap (median stop " + fmt("%.1f", median(stops)) + "); median c at stop";
  const char* labels[] = {"p25", "p50", "p75"};
  for (std::size_t a = 0; a < 3; ++a) {
    const double m = median(c_at_stop[a]);
    pass = pass && m >= 95.0;
    detail += std::string(" ") + labels[a] + "=" + fmt("%.2f", m);
  }
  return {pass, detail + " (need >= 18 stops and c >= 95)"};
}

// 6. A frozen archive stops at t = 2h with zero distance.
Outcome stationary_front() {
  ConvergenceConfig conv;
  conv.step = 5;
  ConvergenceMonitor monitor(conv, 1000);
  const std::vector<ObjectiveVector> frozen{{1.0, 4.0}, {2.0, 3.0}, {3.5, 1.0}};
  std::size_t stop = 0;
  for (std::size_t t = 0; t <= 1000 && stop == 0; ++t) {
    if (monitor.observe({t, frozen}) == Decision::Stop) {
      stop = t;
    }
  }
  const auto& last = monitor.trace().records.back();
  bool pass = stop == 10 && last.max_dist == 0.0 && last.min_dist == 0.0 && last.avg_dist == 0.0;

  // Same through the optimizer: with no inertia or attraction nothing moves.
  auto cfg = load_experiment(kSource / "configs" / "default_experiment.json");
  cfg.mopso.inertia = 0.0;
  cfg.mopso.c1 = 0.0;
  cfg.mopso.c2 = 0.0;
  const auto run = run_single(cfg, 0);
  const auto& rec = run.trace.records.back();
  pass = pass && run.stop_iteration == 10 && run.criterion_met && rec.dist(cfg.convergence.mode) == 0.0;
  return {pass, "synthetic stop t=" + std::to_string(stop) + ", optimizer stop t=" + std::to_string(run.stop_iteration) +
                    ", dist=" + fmt("%g", rec.dist(cfg.convergence.mode))};
}

// 7. Two CLI Monte Carlo executions write identical trees.
Outcome determinism() {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::string base = std::string("\"") + MOPSO_CLI_PATH + "\" mc --config \"" +
                           (kSource / "configs" / "default_experiment.json").string() +
                           "\" --trials 5 --seed 42 --out ";
  for (const auto& dir : {a, b}) {
    if (std::system((base + "\"" + dir.string() + "\" > /dev/null").c_str()) != 0) {
      return {false, "cli exited with an error"};
    }
  }
  auto tree = [](const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) {
        out[fs::relative(e.path(), root).generic_string()] = read_text_file(e.path());
      }
    }
    return out;
  };
  const auto ta = tree(a);
  const auto tb = tree(b);
  std::size_t differing = 0;
  for (const auto& [name, text] : ta) {
    auto it = tb.find(name);
    differing += (it == tb.end() || it->second != text) ? 1 : 0;
  }
  differing += tb.size() > ta.size() ? tb.size() - ta.size() : 0;
  return {differing == 0 && !ta.empty(),
          std::to_string(ta.size()) + " files, " + std::to_string(differing) + " differing"};
}

// 8. Median c-ratio rises with the snapshot iteration and ends at 100.
Outcome c_ratio_structure(const ExperimentConfig& cfg, const MonteCarloReport& report) {
  const auto dir = scratch("c_ratio");
  export_monte_carlo(cfg, report, dir, false);
  std::istringstream in(read_text_file(dir / "c_ratio.csv"));
  std::string line;
  std::getline(in, line);
  std::map<std::string, std::vector<std::pair<std::string, double>>> by_anchor;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string anchor, iteration, value;
    std::getline(fields, anchor, ',');
    std::getline(fields, iteration, ',');
    std::getline(fields, value, ',');
    by_anchor[anchor].push_back({iteration, parse_number(value, "c_ratio.csv")});
  }
  bool pass = by_anchor.size() == 3;
  std::string detail;
  for (const auto& [anchor, rows] : by_anchor) {
    detail += (detail.empty() ? "" : "; ") + anchor + ":";
    double previous = -std::numeric_limits<double>::infinity();
    for (const auto& [iteration, c] : rows) {
      pass = pass && c >= previous;
      previous = c;
      detail += " " + iteration + "=" + fmt("%.1f", c);
    }
    pass = pass && !rows.empty() && rows.back().first == "final" && rows.back().second == 100.0;
  }
  return {pass, detail};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& body) {
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = body();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("[%s] criterion %d %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", id, name,
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  };

  report(1, "objective exactness", objective_exactness);
  report(2, "Pareto machinery oracle", pareto_oracle);
  report(3, "front non-regression", front_non_regression);
  report(4, "convergence trend", convergence_trend);

  const auto cfg = adaptive_config();
  std::optional<MonteCarloReport> adaptive;
  report(5, "adaptive-stop efficacy", [&] {
    adaptive = run_monte_carlo(cfg);
    return adaptive_stop(cfg, *adaptive);
  });
  report(6, "stationary-front stop", stationary_front);
  report(7, "determinism", determinism);
  report(8, "c-ratio structure", [&] {
    if (!adaptive) adaptive = run_monte_carlo(cfg);
    return c_ratio_structure(cfg, *adaptive);
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
