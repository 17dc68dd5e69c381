#pragma once

// On-disk formats. CSV numbers use 17 significant digits, '.' as decimal
// separator and LF line endings, so parsing a file reproduces the exact
// doubles that were written.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mopso/convergence.hpp"
#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"
#include "mopso/experiment.hpp"
#include "mopso/runner.hpp"

namespace mopso {

namespace fs = std::filesystem;

inline std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : "nan";
}

inline double parse_number(const std::string& text, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw InvalidArgument(context + ": not a number: '" + text + "'");
  }
  return v;
}

inline void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(path.string(), "cannot open for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError(path.string(), "write failed");
  }
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path.string(), "cannot open for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(dir.string(), "cannot create directory" + (ec ? ": " + ec.message() : std::string()));
  }
}

// Header: f1..fM, then x1,y1,...,xJ,yJ for the antenna coordinates.
inline std::string front_csv(const Front& front) {
  std::string out;
  if (front.empty()) {
    return out;
  }
  const std::size_t m = front.front().value.size();
  const std::size_t d = front.front().position.size();
  for (std::size_t q = 0; q < m; ++q) {
    out += (q ? ",f" : "f") + std::to_string(q + 1);
  }
  for (std::size_t i = 0; i < d; ++i) {
    out += ",";
    out += d % 2 == 0 ? std::string(i % 2 == 0 ? "x" : "y") + std::to_string(i / 2 + 1)
                      : "d" + std::to_string(i + 1);
  }
  out += "\n";
  for (const auto& e : front) {
    for (std::size_t q = 0; q < m; ++q) {
      out += (q ? "," : "") + format_number(e.value[q]);
    }
    for (double x : e.position) {
      out += "," + format_number(x);
    }
    out += "\n";
  }
  return out;
}

inline void write_front_csv(const fs::path& path, const Front& front) {
  if (front.empty()) {
    throw StateError("refusing to export an empty front to " + path.string());
  }
  const auto values = front_values(front);
  if (pareto_filter(values).size() != values.size()) {
    throw StateError("front exported to " + path.string() + " is not mutually non-dominated");
  }
  write_text_file(path, front_csv(front));
}

inline Front read_front_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError(path.string(), "empty front file");
  }
  std::size_t objectives = 0;
  std::size_t columns = 0;
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) {
      ++columns;
      if (!name.empty() && name[0] == 'f') {
        ++objectives;
      }
    }
  }
  Front front;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    ArchiveEntry e;
    std::size_t col = 0;
    while (std::getline(fields, field, ',')) {
      const double v = parse_number(field, path.string() + ":" + std::to_string(row));
      (col < objectives ? e.value : e.position).push_back(v);
      ++col;
    }
    if (col != columns) {
      throw IoError(path.string(), "row " + std::to_string(row) + " has " + std::to_string(col) +
                                       " fields, expected " + std::to_string(columns));
    }
    front.push_back(std::move(e));
  }
  return front;
}

inline std::string front_file_name(std::size_t iteration, const std::string& prefix = "front") {
  return prefix + "_t" + std::to_string(iteration) + ".csv";
}

// Fronts stored as <prefix>_t<iteration>.csv in `dir`, keyed by iteration.
inline std::map<std::size_t, Front> read_front_directory(const fs::path& dir,
                                                         const std::string& prefix = "front") {
  const std::regex pattern(prefix + "_t([0-9]+)\\.csv");
  std::map<std::size_t, Front> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, match, pattern)) {
      out[static_cast<std::size_t>(std::stoull(match[1].str()))] = read_front_csv(entry.path());
    }
  }
  return out;
}

// Rows (t, mode, dist, z, K), one per record and distance mode.
inline std::string trace_csv(const DistanceTrace& trace) {
  std::string out = "t,mode,dist,z,K\n";
  for (const auto& r : trace.records) {
    for (DistanceMode mode : {DistanceMode::Max, DistanceMode::Min, DistanceMode::Avg}) {
      out += std::to_string(r.iteration) + "," + to_string(mode) + "," + format_number(r.dist(mode)) + "," +
             std::to_string(r.zero_count) + "," + std::to_string(r.front_size) + "\n";
    }
  }
  return out;
}

inline std::string c_ratio_csv(const CRatioReport& report) {
  std::string out = "anchor,anchor_f1,iteration,f2,c\n";
  for (std::size_t a = 0; a < report.anchors.size(); ++a) {
    for (const auto& row : report.rows) {
      out += report.labels[a] + "," + format_number(report.anchors[a]) + "," + std::to_string(row.iteration) +
             "," + format_optional(row.value[a]) + "," + format_optional(row.c[a]) + "\n";
    }
  }
  return out;
}

inline std::string c_ratio_csv(const AggregateCRatio& agg) {
  std::string out = "anchor,iteration,median_c,available,trials\n";
  for (std::size_t a = 0; a < agg.labels.size(); ++a) {
    for (std::size_t r = 0; r < agg.rows.size(); ++r) {
      out += agg.labels[a] + "," + agg.rows[r] + "," + format_number(agg.median_c[r][a]) + "," +
             std::to_string(agg.available[r][a]) + "," + std::to_string(agg.trials) + "\n";
    }
  }
  return out;
}

inline Json run_summary(const ExperimentConfig& cfg, const RunResult& run, bool echo_config) {
  Json j{{"seed", run.seed},
         {"stop_iteration", run.stop_iteration},
         {"criterion_met", run.criterion_met},
         {"iterations_run", run.iterations_run},
         {"final_front_size", run.final_front.size()},
         {"trace_records", run.trace.records.size()}};
  std::vector<std::size_t> snaps;
  for (const auto& [t, f] : run.snapshots) {
    snaps.push_back(t);
  }
  j["snapshots"] = snaps;
  if (echo_config) {
    j["config"] = to_json(cfg);
  }
  if (cfg.record_timings) {
    j["wall_seconds"] = run.wall_seconds;
  }
  return j;
}

// front_t{iter}.csv for every snapshot, trace.csv, summary.json and, for
// bi-objective scenarios, c_ratio.csv.
inline void export_run(const ExperimentConfig& cfg, const RunResult& run, const fs::path& dir,
                       bool echo_config = true) {
  ensure_directory(dir);
  for (const auto& [t, front] : run.snapshots) {
    write_front_csv(dir / front_file_name(t), front);
  }
  write_text_file(dir / "trace.csv", trace_csv(run.trace));
  write_text_file(dir / "summary.json", run_summary(cfg, run, echo_config).dump(2) + "\n");
  if (auto report = run_c_ratio(run, cfg.anchors)) {
    write_text_file(dir / "c_ratio.csv", c_ratio_csv(*report));
  }
}

inline std::string trial_directory_name(std::size_t trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%04zu", trial);
  return buf;
}

inline void export_monte_carlo(const ExperimentConfig& cfg, const MonteCarloReport& report, const fs::path& dir,
                               bool write_trials = true) {
  ensure_directory(dir);

  std::string stops = "trial,seed,stop_iteration,criterion_met,iterations_run\n";
  double wall = 0.0;
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& r = report.runs[i];
    stops += std::to_string(i) + "," + std::to_string(r.seed) + "," + std::to_string(r.stop_iteration) + "," +
             (r.criterion_met ? "1" : "0") + "," + std::to_string(r.iterations_run) + "\n";
    wall += r.wall_seconds;
  }
  write_text_file(dir / "stop_iterations.csv", stops);

  std::string trace = "t,mode,mean_dist,mean_z,mean_K,runs\n";
  for (const auto& p : report.mean_trace) {
    for (DistanceMode mode : {DistanceMode::Max, DistanceMode::Min, DistanceMode::Avg}) {
      const double d = mode == DistanceMode::Max ? p.max_dist : mode == DistanceMode::Min ? p.min_dist : p.avg_dist;
      trace += std::to_string(p.iteration) + "," + to_string(mode) + "," + format_number(d) + "," +
               format_number(p.zero_count) + "," + format_number(p.front_size) + "," + std::to_string(p.runs) + "\n";
    }
  }
  write_text_file(dir / "mean_trace.csv", trace);

  for (const auto& [t, front] : report.pooled_fronts) {
    write_front_csv(dir / front_file_name(t, "pooled_front"), front);
  }
  if (report.c_ratio) {
    write_text_file(dir / "c_ratio.csv", c_ratio_csv(*report.c_ratio));
  }

  std::vector<std::uint64_t> seeds;
  for (const auto& r : report.runs) {
    seeds.push_back(r.seed);
  }
  Json summary{{"config", to_json(cfg)},
               {"seeds", seeds},
               {"stop_iteration",
                {{"mean", report.stops.mean},
                 {"median", report.stops.median},
                 {"q25", report.stops.q25},
                 {"q75", report.stops.q75},
                 {"min", report.stops.min},
                 {"max", report.stops.max},
                 {"criterion_met", report.stops.criterion_met}}}};
  if (cfg.record_timings) {
    summary["wall_seconds_total"] = wall;
  }
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");

  if (write_trials) {
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      export_run(cfg, report.runs[i], dir / "trials" / trial_directory_name(i), false);
    }
  }
}

// Recomputes c_ratio.csv from stored fronts. A run directory yields the
// per-run table; a Monte Carlo directory (with trials/) yields the median
// table over its trials.
inline fs::path report_directory(const fs::path& in, const std::vector<double>& anchors, const fs::path& out) {
  if (!fs::is_directory(in)) {
    throw IoError(in.string(), "not a directory");
  }
  ensure_directory(out);
  const fs::path target = out / "c_ratio.csv";
  if (fs::is_directory(in / "trials")) {
    std::vector<fs::path> trial_dirs;
    for (const auto& entry : fs::directory_iterator(in / "trials")) {
      if (entry.is_directory()) {
        trial_dirs.push_back(entry.path());
      }
    }
    std::sort(trial_dirs.begin(), trial_dirs.end());
    std::vector<RunResult> runs;
    std::vector<std::size_t> iterations;
    for (const auto& d : trial_dirs) {
      RunResult r;
      r.snapshots = read_front_directory(d);
      if (r.snapshots.empty()) {
        continue;
      }
      r.iterations_run = r.snapshots.rbegin()->first;
      r.final_front = r.snapshots.rbegin()->second;
      for (const auto& [t, f] : r.snapshots) {
        if (std::find(iterations.begin(), iterations.end(), t) == iterations.end()) {
          iterations.push_back(t);
        }
      }
      runs.push_back(std::move(r));
    }
    if (runs.empty()) {
      throw IoError(in.string(), "no trial fronts found");
    }
    const auto agg = aggregate_c_ratio(runs, iterations, anchors);
    if (!agg) {
      throw UnsupportedReport("c-ratio report requires exactly two objectives");
    }
    write_text_file(target, c_ratio_csv(*agg));
    return target;
  }
  const auto fronts = read_front_directory(in);
  if (fronts.empty()) {
    throw IoError(in.string(), "no front_t*.csv files found");
  }
  std::map<std::size_t, std::vector<ObjectiveVector>> snaps;
  for (const auto& [t, f] : fronts) {
    snaps[t] = front_values(f);
  }
  write_text_file(target, c_ratio_csv(c_ratio_report(snaps, anchors)));
  return target;
}

}  // namespace mopso
