#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"
#include "mopso/rng.hpp"

namespace mopso {

struct ArchiveEntry {
  DecisionVector position;
  ObjectiveVector value;
  double crowding = std::numeric_limits<double>::infinity();
};

namespace detail {

// Crowding distance of n points with m objectives; value(i) yields point i.
template <class ValueOf>
std::vector<double> crowding_impl(std::size_t n, std::size_t m, ValueOf value) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> crowding(n, 0.0);
  if (n <= 2) {
    std::fill(crowding.begin(), crowding.end(), inf);
    return crowding;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t q = 0; q < m; ++q) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value(a)[q] < value(b)[q]; });
    crowding[order.front()] = inf;
    crowding[order.back()] = inf;
    const double range = value(order.back())[q] - value(order.front())[q];
    if (!(range > 0.0)) {
      continue;
    }
    for (std::size_t r = 1; r + 1 < n; ++r) {
      crowding[order[r]] += (value(order[r + 1])[q] - value(order[r - 1])[q]) / range;
    }
  }
  return crowding;
}

}  // namespace detail

// Sorted-neighbour gap per objective, normalized by that objective's range and
// summed; the two extremes of every objective get +infinity.
inline std::vector<double> crowding_distances(std::span<const ObjectiveVector> values) {
  if (values.empty()) {
    return {};
  }
  return detail::crowding_impl(values.size(), values.front().size(),
                               [&](std::size_t i) -> const ObjectiveVector& { return values[i]; });
}

enum class LeaderSelection { Tournament, Roulette };

// External archive of mutually non-dominated (position, value) pairs.
class ParetoArchive {
 public:
  explicit ParetoArchive(std::optional<std::size_t> capacity = std::nullopt) : capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) {
      throw InvalidArgument("archive capacity must be at least 1");
    }
  }

  const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::optional<std::size_t> capacity() const noexcept { return capacity_; }

  std::vector<ObjectiveVector> values() const {
    std::vector<ObjectiveVector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
      out.push_back(e.value);
    }
    return out;
  }

  // Rejects the candidate when an entry weakly dominates it (equal objective
  // vectors included, so a stalled particle cannot flood the archive).
  // Otherwise inserts it, drops every entry it dominates, and truncates by
  // evicting the most crowded entry when over capacity. Returns whether the
  // candidate is still present afterwards.
  bool insert(ArchiveEntry candidate, Rng& rng) {
    for (const auto& e : entries_) {
      if (weakly_dominates(e.value, candidate.value)) {
        return false;
      }
    }
    std::erase_if(entries_, [&](const ArchiveEntry& e) { return dominates(candidate.value, e.value); });
    entries_.push_back(std::move(candidate));
    refresh_crowding();

    bool kept = true;
    if (capacity_ && entries_.size() > *capacity_) {
      const std::size_t victim = most_crowded(rng);
      kept = victim + 1 != entries_.size();
      entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(victim));
      refresh_crowding();
    }
    return kept;
  }

  // Global leader drawn by select_leader_index over the current entries.
  const DecisionVector& select_leader(Rng& rng,
                                      LeaderSelection method = LeaderSelection::Tournament) const;

 private:
  void refresh_crowding() {
    const auto crowding =
        detail::crowding_impl(entries_.size(), entries_.empty() ? 0 : entries_.front().value.size(),
                              [&](std::size_t i) -> const ObjectiveVector& { return entries_[i].value; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      entries_[i].crowding = crowding[i];
    }
  }

  std::size_t most_crowded(Rng& rng) const {
    double lowest = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].crowding < lowest) {
        lowest = entries_[i].crowding;
        ties.assign(1, i);
      } else if (entries_[i].crowding == lowest) {
        ties.push_back(i);
      }
    }
    return ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
  }

  std::optional<std::size_t> capacity_;
  std::vector<ArchiveEntry> entries_;
};

// Index of the global leader: binary tournament on crowding (two uniform
// draws, larger crowding wins, ties by coin flip), or roulette weighted by
// crowding where any +infinity entries share all the mass.
inline std::size_t select_leader_index(std::span<const ArchiveEntry> entries, Rng& rng,
                                       LeaderSelection method = LeaderSelection::Tournament) {
  if (entries.empty()) {
    throw StateError("select_leader: archive is empty");
  }
  if (entries.size() == 1) {
    return 0;
  }
  if (method == LeaderSelection::Roulette) {
    std::vector<std::size_t> unbounded;
    double total = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (std::isinf(entries[i].crowding)) {
        unbounded.push_back(i);
      } else {
        total += entries[i].crowding;
      }
    }
    if (!unbounded.empty()) {
      return unbounded[rng.index(unbounded.size())];
    }
    if (!(total > 0.0)) {
      return rng.index(entries.size());
    }
    double target = rng.uniform01() * total;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      target -= entries[i].crowding;
      if (target < 0.0) {
        return i;
      }
    }
    return entries.size() - 1;
  }
  const std::size_t a = rng.index(entries.size());
  const std::size_t b = rng.index(entries.size());
  if (entries[a].crowding > entries[b].crowding) {
    return a;
  }
  if (entries[b].crowding > entries[a].crowding) {
    return b;
  }
  return rng.coin() ? a : b;
}

inline const DecisionVector& ParetoArchive::select_leader(Rng& rng, LeaderSelection method) const {
  return entries_[select_leader_index(entries_, rng, method)].position;
}

}  // namespace mopso
