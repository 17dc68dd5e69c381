#pragma once

// Adaptive stopping rule driven by the interval distance between Pareto-front
// snapshots taken h iterations apart.
//
// For every point k of the newer front PF(t), the points of PF(t-h) that it
// dominates form its dominated set; the relative distance of k is the smallest
// Euclidean objective-space distance to that set (0 when it is empty). The
// interval distance aggregates the non-zero relative distances by max, min or
// mean, and the run stops once two consecutive aggregates differ by at most
// the threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"

namespace mopso {

enum class DistanceMode { Max, Min, Avg };

enum class Cadence {
  EveryH,          // evaluate at t = h, 2h, 3h, ...
  EveryIteration,  // evaluate at t = h, h+1, h+2, ...
};

inline const char* to_string(DistanceMode mode) {
  switch (mode) {
    case DistanceMode::Max:
      return "max";
    case DistanceMode::Min:
      return "min";
    case DistanceMode::Avg:
      return "avg";
  }
  return "?";
}

inline const char* to_string(Cadence cadence) {
  return cadence == Cadence::EveryH ? "every_h" : "every_iteration";
}

struct FrontSnapshot {
  std::size_t iteration = 0;
  std::vector<ObjectiveVector> values;
};

struct ConvergenceConfig {
  std::size_t step = 5;       // h
  double threshold = 0.25e-3;  // Delta
  DistanceMode mode = DistanceMode::Avg;
  Cadence cadence = Cadence::EveryH;
  // Divide each objective by the newer front's range before measuring.
  bool normalize = false;
  // Interpret threshold as a fraction of the first recorded aggregate.
  bool relative_threshold = false;

  void validate() const {
    if (step < 1) {
      throw InvalidArgument("convergence step h must be at least 1");
    }
    if (!(threshold >= 0.0)) {
      throw InvalidArgument("convergence threshold must be non-negative");
    }
  }
};

// Indices of the members of front_prev dominated by front_t.values[k].
inline std::vector<std::size_t> dominated_indices(std::size_t k, const FrontSnapshot& front_t,
                                                  const FrontSnapshot& front_prev) {
  if (k >= front_t.values.size()) {
    throw InvalidArgument("dominated_set: index " + std::to_string(k) + " out of range");
  }
  std::vector<std::size_t> out;
  const auto& point = front_t.values[k];
  for (std::size_t i = 0; i < front_prev.values.size(); ++i) {
    if (dominates(point, front_prev.values[i])) {
      out.push_back(i);
    }
  }
  return out;
}

inline std::vector<ObjectiveVector> dominated_set(std::size_t k, const FrontSnapshot& front_t,
                                                  const FrontSnapshot& front_prev) {
  std::vector<ObjectiveVector> out;
  for (std::size_t i : dominated_indices(k, front_t, front_prev)) {
    out.push_back(front_prev.values[i]);
  }
  return out;
}

inline double relative_distance(std::size_t k, const FrontSnapshot& front_t,
                                const FrontSnapshot& front_prev) {
  const auto dominated = dominated_indices(k, front_t, front_prev);
  if (dominated.empty()) {
    return 0.0;
  }
  const auto& point = front_t.values[k];
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i : dominated) {
    const auto& other = front_prev.values[i];
    double sq = 0.0;
    for (std::size_t m = 0; m < point.size(); ++m) {
      const double diff = point[m] - other[m];
      sq += diff * diff;
    }
    best_sq = std::min(best_sq, sq);
  }
  return std::sqrt(best_sq);
}

inline std::vector<double> relative_distances(const FrontSnapshot& front_t,
                                              const FrontSnapshot& front_prev) {
  std::vector<double> out(front_t.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = relative_distance(k, front_t, front_prev);
  }
  return out;
}

struct IntervalDistance {
  double dist = 0.0;
  std::size_t zero_count = 0;
};

// Aggregates the non-zero relative distances. When every value is zero the
// aggregate is defined as 0 for all modes.
inline IntervalDistance aggregate_distances(std::span<const double> dis, DistanceMode mode) {
  IntervalDistance out;
  double sum = 0.0;
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (double d : dis) {
    if (d == 0.0) {
      ++out.zero_count;
      continue;
    }
    sum += d;
    hi = std::max(hi, d);
    lo = std::min(lo, d);
  }
  const std::size_t nonzero = dis.size() - out.zero_count;
  if (nonzero == 0) {
    return out;
  }
  switch (mode) {
    case DistanceMode::Max:
      out.dist = hi;
      break;
    case DistanceMode::Min:
      out.dist = lo;
      break;
    case DistanceMode::Avg:
      out.dist = sum / static_cast<double>(nonzero);
      break;
  }
  return out;
}

inline IntervalDistance interval_distance(const FrontSnapshot& front_t, const FrontSnapshot& front_prev,
                                          DistanceMode mode) {
  if (front_t.values.empty() || front_prev.values.empty()) {
    throw InvalidArgument("interval_distance: fronts must be non-empty");
  }
  const auto dis = relative_distances(front_t, front_prev);
  return aggregate_distances(dis, mode);
}

// Copies of both fronts with each objective divided by front_t's range in that
// objective (range 0 leaves the objective unscaled).
inline std::pair<FrontSnapshot, FrontSnapshot> normalize_fronts(const FrontSnapshot& front_t,
                                                                const FrontSnapshot& front_prev) {
  if (front_t.values.empty()) {
    throw InvalidArgument("normalize_fronts: empty front");
  }
  const std::size_t m = front_t.values.front().size();
  std::vector<double> scale(m, 1.0);
  for (std::size_t q = 0; q < m; ++q) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& v : front_t.values) {
      lo = std::min(lo, v[q]);
      hi = std::max(hi, v[q]);
    }
    if (hi > lo) {
      scale[q] = hi - lo;
    }
  }
  auto rescale = [&](const FrontSnapshot& f) {
    FrontSnapshot out{f.iteration, f.values};
    for (auto& v : out.values) {
      for (std::size_t q = 0; q < m; ++q) {
        v[q] /= scale[q];
      }
    }
    return out;
  };
  return {rescale(front_t), rescale(front_prev)};
}

struct TraceRecord {
  std::size_t iteration = 0;
  std::vector<double> relative;  // dis for every point of PF(t)
  double max_dist = 0.0;
  double min_dist = 0.0;
  double avg_dist = 0.0;
  std::size_t zero_count = 0;
  std::size_t front_size = 0;

  double dist(DistanceMode mode) const {
    switch (mode) {
      case DistanceMode::Max:
        return max_dist;
      case DistanceMode::Min:
        return min_dist;
      case DistanceMode::Avg:
        return avg_dist;
    }
    return avg_dist;
  }
};

struct DistanceTrace {
  std::vector<TraceRecord> records;

  const TraceRecord* find(std::size_t iteration) const {
    auto it = std::find_if(records.rbegin(), records.rend(),
                           [&](const TraceRecord& r) { return r.iteration == iteration; });
    return it == records.rend() ? nullptr : &*it;
  }
};

inline TraceRecord make_record(const FrontSnapshot& front_t, const FrontSnapshot& front_prev) {
  TraceRecord record;
  record.iteration = front_t.iteration;
  record.relative = relative_distances(front_t, front_prev);
  record.max_dist = aggregate_distances(record.relative, DistanceMode::Max).dist;
  record.min_dist = aggregate_distances(record.relative, DistanceMode::Min).dist;
  const auto avg = aggregate_distances(record.relative, DistanceMode::Avg);
  record.avg_dist = avg.dist;
  record.zero_count = avg.zero_count;
  record.front_size = front_t.values.size();
  return record;
}

inline double effective_threshold(const DistanceTrace& trace, const ConvergenceConfig& cfg) {
  if (cfg.relative_threshold && !trace.records.empty()) {
    return cfg.threshold * trace.records.front().dist(cfg.mode);
  }
  return cfg.threshold;
}

// |dist(t) - dist(t-h)| <= Delta for the newest record t; false until t >= 2h.
inline bool should_stop(const DistanceTrace& trace, const ConvergenceConfig& cfg) {
  if (trace.records.empty()) {
    return false;
  }
  const TraceRecord& current = trace.records.back();
  if (current.iteration < 2 * cfg.step) {
    return false;
  }
  const TraceRecord* previous = trace.find(current.iteration - cfg.step);
  if (previous == nullptr) {
    return false;
  }
  return std::abs(current.dist(cfg.mode) - previous->dist(cfg.mode)) <= effective_threshold(trace, cfg);
}

enum class Decision { Continue, Stop };

// Sequential state machine fed one archive snapshot per optimizer iteration,
// starting with the initial archive at t = 0. Keeps only the snapshots still
// needed for a pending (t, t-h) comparison.
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(ConvergenceConfig cfg, std::size_t max_iterations)
      : cfg_(cfg), max_iterations_(max_iterations) {
    cfg_.validate();
  }

  Decision observe(FrontSnapshot snapshot) {
    const std::size_t t = snapshot.iteration;
    const std::size_t h = cfg_.step;
    bool criterion = false;
    const bool evaluate = t >= h && (cadence_every_iteration() || t % h == 0);
    if (evaluate) {
      auto prev = std::find_if(retained_.begin(), retained_.end(),
                               [&](const FrontSnapshot& s) { return s.iteration == t - h; });
      if (prev != retained_.end()) {
        if (cfg_.normalize) {
          const auto [cur, old] = normalize_fronts(snapshot, *prev);
          trace_.records.push_back(make_record(cur, old));
        } else {
          trace_.records.push_back(make_record(snapshot, *prev));
        }
        criterion = should_stop(trace_, cfg_);
      }
    }

    if (cadence_every_iteration()) {
      retained_.push_back(std::move(snapshot));
      while (!retained_.empty() && retained_.front().iteration + h <= t) {
        retained_.pop_front();
      }
    } else if (t % h == 0) {
      retained_.clear();
      retained_.push_back(std::move(snapshot));
    }

    if (criterion && !criterion_iteration_) {
      criterion_iteration_ = t;
    }
    if ((criterion || t >= max_iterations_) && !stop_iteration_) {
      stop_iteration_ = t;
    }
    return stop_iteration_ ? Decision::Stop : Decision::Continue;
  }

  const ConvergenceConfig& config() const noexcept { return cfg_; }
  const DistanceTrace& trace() const noexcept { return trace_; }
  DistanceTrace take_trace() { return std::move(trace_); }

  // First iteration at which Stop was returned.
  std::optional<std::size_t> stop_iteration() const noexcept { return stop_iteration_; }
  // First iteration at which the threshold test held.
  std::optional<std::size_t> criterion_iteration() const noexcept { return criterion_iteration_; }

 private:
  bool cadence_every_iteration() const noexcept { return cfg_.cadence == Cadence::EveryIteration; }

  ConvergenceConfig cfg_;
  std::size_t max_iterations_;
  DistanceTrace trace_;
  std::deque<FrontSnapshot> retained_;
  std::optional<std::size_t> stop_iteration_;
  std::optional<std::size_t> criterion_iteration_;
};

}  // namespace mopso
