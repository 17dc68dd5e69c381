#pragma once

// Experiment orchestration: single runs, seeded Monte Carlo batches and the
// c-ratio comparison of fronts against the final front.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mopso/archive.hpp"
#include "mopso/convergence.hpp"
#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"
#include "mopso/experiment.hpp"
#include "mopso/scenario.hpp"
#include "mopso/swarm.hpp"

namespace mopso {

using Front = std::vector<ArchiveEntry>;

inline std::vector<ObjectiveVector> front_values(const Front& front) {
  std::vector<ObjectiveVector> out;
  out.reserve(front.size());
  for (const auto& e : front) {
    out.push_back(e.value);
  }
  return out;
}

struct RunResult {
  std::uint64_t seed = 0;
  // First iteration at which the run was told to stop (stop rule or cap).
  std::size_t stop_iteration = 0;
  // Whether the stop rule fired (as opposed to reaching max_iterations).
  bool criterion_met = false;
  // Iterations actually executed; exceeds stop_iteration only with
  // continue_after_stop.
  std::size_t iterations_run = 0;
  Front final_front;
  std::map<std::size_t, Front> snapshots;  // requested iterations, stop and final
  DistanceTrace trace;
  double wall_seconds = 0.0;
};

inline RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto started = std::chrono::steady_clock::now();
  const DeploymentProblem problem(cfg.scenario);
  MopsoConfig mopso = cfg.mopso;
  mopso.rng_seed = seed;

  RunResult result;
  result.seed = seed;
  SwarmState state = initialize_swarm(problem, mopso);
  ConvergenceMonitor monitor(cfg.convergence, mopso.max_iterations);

  auto wanted = [&](std::size_t t) {
    return std::find(cfg.snapshot_iterations.begin(), cfg.snapshot_iterations.end(), t) !=
           cfg.snapshot_iterations.end();
  };
  auto capture = [&](std::size_t t) { result.snapshots[t] = state.archive.entries(); };

  if (wanted(0)) {
    capture(0);
  }
  monitor.observe({0, state.archive.values()});

  bool stopped = false;
  for (std::size_t t = 1; t <= mopso.max_iterations; ++t) {
    step(state, problem, mopso);
    result.iterations_run = t;
    if (wanted(t)) {
      capture(t);
    }
    const Decision decision = monitor.observe({t, state.archive.values()});
    if (decision == Decision::Stop && !stopped) {
      stopped = true;
      result.stop_iteration = t;
      capture(t);
      if (!cfg.continue_after_stop) {
        break;
      }
    }
  }
  if (!stopped) {
    result.stop_iteration = result.iterations_run;
  }
  result.criterion_met = monitor.criterion_iteration().has_value() &&
                         *monitor.criterion_iteration() <= result.stop_iteration;
  result.final_front = state.archive.entries();
  result.snapshots[result.iterations_run] = result.final_front;
  result.trace = monitor.take_trace();
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

// Objective-2 value of a bi-objective front at objective-1 = anchor, linear
// between neighbouring front points; nullopt outside the front's range.
inline std::optional<double> interpolate_front(std::vector<ObjectiveVector> front, double anchor) {
  if (front.empty()) {
    return std::nullopt;
  }
  std::sort(front.begin(), front.end());
  if (anchor < front.front()[0] || anchor > front.back()[0]) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < front.size(); ++i) {
    if (front[i][0] == anchor) {
      return front[i][1];
    }
    if (i + 1 < front.size() && anchor < front[i + 1][0]) {
      const double u = (anchor - front[i][0]) / (front[i + 1][0] - front[i][0]);
      return front[i][1] + u * (front[i + 1][1] - front[i][1]);
    }
  }
  return front.back()[1];
}

// Linear-interpolated quantile (q in [0, 1]) of a non-empty sample.
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw InvalidArgument("quantile of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

// Anchors at the 25/50/75 percentiles of the front's objective-1 values.
inline std::vector<double> default_anchors(const std::vector<ObjectiveVector>& final_front) {
  std::vector<double> f1;
  for (const auto& v : final_front) {
    f1.push_back(v.at(0));
  }
  return {quantile(f1, 0.25), quantile(f1, 0.5), quantile(f1, 0.75)};
}

struct CRatioRow {
  std::size_t iteration = 0;
  std::vector<std::optional<double>> value;  // interpolated objective 2, per anchor
  std::vector<std::optional<double>> c;      // 100 * value / final value
};

struct CRatioReport {
  std::vector<std::string> labels;
  std::vector<double> anchors;
  std::size_t final_iteration = 0;
  std::vector<CRatioRow> rows;  // ascending iteration; last row is the final one
};

namespace detail {

inline CRatioReport c_ratio_rows(const std::map<std::size_t, std::vector<ObjectiveVector>>& snapshots,
                                 const std::vector<double>& anchors, std::vector<std::string> labels) {
  CRatioReport report;
  report.anchors = anchors;
  report.labels = std::move(labels);
  report.final_iteration = snapshots.rbegin()->first;
  const auto& final_front = snapshots.rbegin()->second;
  std::vector<std::optional<double>> final_values;
  for (double a : anchors) {
    final_values.push_back(interpolate_front(final_front, a));
  }
  for (const auto& [t, front] : snapshots) {
    CRatioRow row;
    row.iteration = t;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      const auto v = interpolate_front(front, anchors[a]);
      row.value.push_back(v);
      if (v && final_values[a] && *final_values[a] != 0.0) {
        row.c.push_back(100.0 * (*v / *final_values[a]));
      } else {
        row.c.push_back(std::nullopt);
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline void check_bi_objective(const std::map<std::size_t, std::vector<ObjectiveVector>>& snapshots) {
  if (snapshots.empty()) {
    throw InvalidArgument("c_ratio_report: no snapshots");
  }
  for (const auto& [t, front] : snapshots) {
    for (const auto& v : front) {
      if (v.size() != 2) {
        throw UnsupportedReport("c-ratio report requires exactly two objectives, got " +
                                std::to_string(v.size()));
      }
    }
  }
}

inline std::vector<std::string> anchor_labels(std::size_t n, bool percentile) {
  if (percentile && n == 3) {
    return {"p25", "p50", "p75"};
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("a" + std::to_string(i + 1));
  }
  return labels;
}

}  // namespace detail

// Fronts keyed by iteration; the largest iteration is the reference. Empty
// `anchors` selects the default percentiles of the reference front.
inline CRatioReport c_ratio_report(const std::map<std::size_t, std::vector<ObjectiveVector>>& snapshots,
                                   std::vector<double> anchors = {}) {
  detail::check_bi_objective(snapshots);
  const auto& final_front = snapshots.rbegin()->second;
  if (final_front.empty()) {
    throw InvalidArgument("c_ratio_report: final front is empty");
  }
  const bool percentile = anchors.empty();
  if (percentile) {
    anchors = default_anchors(final_front);
  }
  double lo = final_front.front()[0];
  double hi = lo;
  for (const auto& v : final_front) {
    lo = std::min(lo, v[0]);
    hi = std::max(hi, v[0]);
  }
  for (double a : anchors) {
    if (a < lo || a > hi) {
      throw InvalidArgument("c_ratio_report: anchor " + std::to_string(a) +
                            " lies outside the final front's objective-1 range");
    }
  }
  return detail::c_ratio_rows(snapshots, anchors, detail::anchor_labels(anchors.size(), percentile));
}

inline std::map<std::size_t, std::vector<ObjectiveVector>> snapshot_values(const RunResult& run) {
  std::map<std::size_t, std::vector<ObjectiveVector>> out;
  for (const auto& [t, front] : run.snapshots) {
    out[t] = front_values(front);
  }
  return out;
}

// Per-run c-ratio with the experiment's anchors; anchors outside this run's
// final front are reported unavailable rather than rejected.
inline std::optional<CRatioReport> run_c_ratio(const RunResult& run, const std::vector<double>& anchors) {
  if (run.final_front.empty() || run.final_front.front().value.size() != 2) {
    return std::nullopt;
  }
  const auto snaps = snapshot_values(run);
  if (anchors.empty()) {
    return c_ratio_report(snaps);
  }
  return detail::c_ratio_rows(snaps, anchors, detail::anchor_labels(anchors.size(), false));
}

struct StopStatistics {
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t criterion_met = 0;
};

struct MeanTracePoint {
  std::size_t iteration = 0;
  double max_dist = 0.0;
  double min_dist = 0.0;
  double avg_dist = 0.0;
  double zero_count = 0.0;
  double front_size = 0.0;
  std::size_t runs = 0;
};

struct AggregateCRatio {
  std::vector<std::string> labels;
  // Requested snapshot iterations reached by at least one trial, then "final"
  // (each trial's own last iteration).
  std::vector<std::string> rows;
  // [row][anchor]: median c over trials, unavailable counted as 0.
  std::vector<std::vector<double>> median_c;
  std::vector<std::vector<std::size_t>> available;
  std::size_t trials = 0;
};

struct MonteCarloReport {
  std::vector<RunResult> runs;  // indexed by trial
  StopStatistics stops;
  std::vector<MeanTracePoint> mean_trace;
  std::map<std::size_t, Front> pooled_fronts;  // non-dominated union per snapshot iteration
  std::optional<AggregateCRatio> c_ratio;
};

namespace detail {

inline void for_each_trial(std::size_t trials, std::size_t threads,
                           const std::function<void(std::size_t)>& body) {
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, trials);
  if (threads <= 1) {
    for (std::size_t i = 0; i < trials; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < trials; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

inline Front pooled_front(const std::vector<const Front*>& fronts) {
  Front pool;
  for (const Front* f : fronts) {
    pool.insert(pool.end(), f->begin(), f->end());
  }
  if (pool.empty()) {
    return pool;
  }
  const auto values = front_values(pool);
  Front out;
  for (std::size_t i : pareto_filter(values)) {
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace detail

// Median c per (snapshot iteration, anchor) over the runs; nullopt when no
// run is bi-objective.
inline std::optional<AggregateCRatio> aggregate_c_ratio(const std::vector<RunResult>& runs,
                                                        const std::vector<std::size_t>& snapshot_iterations,
                                                        const std::vector<double>& anchors) {
  AggregateCRatio agg;
  std::map<std::size_t, std::vector<std::vector<double>>> samples;  // iteration -> anchor -> c
  std::vector<std::vector<double>> final_samples;
  for (const auto& r : runs) {
    const auto rep = run_c_ratio(r, anchors);
    if (!rep) {
      continue;
    }
    ++agg.trials;
    if (agg.labels.empty()) {
      agg.labels = rep->labels;
      final_samples.resize(agg.labels.size());
    }
    auto add = [](std::vector<std::vector<double>>& per_anchor, const CRatioRow& row) {
      per_anchor.resize(row.c.size());
      for (std::size_t a = 0; a < row.c.size(); ++a) {
        per_anchor[a].push_back(row.c[a].value_or(std::nan("")));
      }
    };
    for (const auto& row : rep->rows) {
      if (std::find(snapshot_iterations.begin(), snapshot_iterations.end(), row.iteration) !=
          snapshot_iterations.end()) {
        add(samples[row.iteration], row);
      }
    }
    add(final_samples, rep->rows.back());
  }
  auto summarize = [&](const std::string& label, const std::vector<std::vector<double>>& per_anchor) {
    agg.rows.push_back(label);
    std::vector<double> medians;
    std::vector<std::size_t> counts;
    for (std::size_t a = 0; a < agg.labels.size(); ++a) {
      std::vector<double> cs;
      std::size_t available = 0;
      for (double c : per_anchor[a]) {
        available += std::isnan(c) ? 0 : 1;
        cs.push_back(std::isnan(c) ? 0.0 : c);
      }
      medians.push_back(cs.empty() ? 0.0 : median(cs));
      counts.push_back(available);
    }
    agg.median_c.push_back(std::move(medians));
    agg.available.push_back(std::move(counts));
  };
  if (agg.trials > 0) {
    for (const auto& [t, per_anchor] : samples) {
      summarize(std::to_string(t), per_anchor);
    }
    summarize("final", final_samples);
    return agg;
  }
  return std::nullopt;
}

inline MonteCarloReport aggregate_runs(const ExperimentConfig& cfg, std::vector<RunResult> runs) {
  MonteCarloReport report;
  report.runs = std::move(runs);

  std::vector<double> stops;
  for (const auto& r : report.runs) {
    stops.push_back(static_cast<double>(r.stop_iteration));
    report.stops.criterion_met += r.criterion_met ? 1 : 0;
  }
  report.stops.mean = std::accumulate(stops.begin(), stops.end(), 0.0) / static_cast<double>(stops.size());
  report.stops.median = median(stops);
  report.stops.q25 = quantile(stops, 0.25);
  report.stops.q75 = quantile(stops, 0.75);
  report.stops.min = static_cast<std::size_t>(*std::min_element(stops.begin(), stops.end()));
  report.stops.max = static_cast<std::size_t>(*std::max_element(stops.begin(), stops.end()));

  std::map<std::size_t, MeanTracePoint> trace;
  for (const auto& r : report.runs) {
    for (const auto& rec : r.trace.records) {
      auto& p = trace[rec.iteration];
      p.iteration = rec.iteration;
      p.max_dist += rec.max_dist;
      p.min_dist += rec.min_dist;
      p.avg_dist += rec.avg_dist;
      p.zero_count += static_cast<double>(rec.zero_count);
      p.front_size += static_cast<double>(rec.front_size);
      ++p.runs;
    }
  }
  for (auto& [t, p] : trace) {
    const double n = static_cast<double>(p.runs);
    p.max_dist /= n;
    p.min_dist /= n;
    p.avg_dist /= n;
    p.zero_count /= n;
    p.front_size /= n;
    report.mean_trace.push_back(p);
  }

  std::map<std::size_t, std::vector<const Front*>> by_iteration;
  for (const auto& r : report.runs) {
    for (const auto& [t, front] : r.snapshots) {
      if (std::find(cfg.snapshot_iterations.begin(), cfg.snapshot_iterations.end(), t) !=
          cfg.snapshot_iterations.end()) {
        by_iteration[t].push_back(&front);
      }
    }
  }
  for (const auto& [t, fronts] : by_iteration) {
    report.pooled_fronts[t] = detail::pooled_front(fronts);
  }

  if (cfg.scenario.objective_count() == 2) {
    report.c_ratio = aggregate_c_ratio(report.runs, cfg.snapshot_iterations, cfg.anchors);
  }
  return report;
}

// Trials use seeds base_seed + i and run concurrently; results are keyed by
// trial index, so the report does not depend on scheduling.
inline MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<RunResult> runs(cfg.trials);
  detail::for_each_trial(cfg.trials, cfg.threads,
                         [&](std::size_t i) { runs[i] = run_single(cfg, cfg.base_seed + i); });
  return aggregate_runs(cfg, std::move(runs));
}

}  // namespace mopso
