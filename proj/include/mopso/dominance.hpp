#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mopso/errors.hpp"

namespace mopso {

using ObjectiveVector = std::vector<double>;
using DecisionVector = std::vector<double>;

// Pareto dominance under maximization: a >= b everywhere and a > b somewhere.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("dominates: objective vectors of length " + std::to_string(a.size()) +
                          " and " + std::to_string(b.size()));
  }
  bool strictly_better = false;
  for (std::size_t q = 0; q < a.size(); ++q) {
    if (a[q] < b[q]) {
      return false;
    }
    if (a[q] > b[q]) {
      strictly_better = true;
    }
  }
  return strictly_better;
}

// a >= b in every objective (equal vectors included).
inline bool weakly_dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("weakly_dominates: objective vectors of different length");
  }
  for (std::size_t q = 0; q < a.size(); ++q) {
    if (a[q] < b[q]) {
      return false;
    }
  }
  return true;
}

// Indices (ascending) of the non-dominated members of `values`. Equal vectors
// never dominate each other, so duplicates of a surviving value all survive.
//
// Candidates are visited in lexicographically descending order. Any dominator
// of a point precedes it in that order, and by transitivity a dominated point
// is always dominated by some already-accepted non-dominated point, so each
// candidate only needs checking against the accepted set.
inline std::vector<std::size_t> pareto_filter(std::span<const ObjectiveVector> values) {
  if (values.empty()) {
    throw InvalidArgument("pareto_filter: empty input");
  }
  const std::size_t m = values.front().size();
  for (const auto& v : values) {
    if (v.size() != m) {
      throw InvalidArgument("pareto_filter: objective vectors of different length");
    }
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(values[b].begin(), values[b].end(), values[a].begin(),
                                        values[a].end());
  });

  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return dominates(values[k], values[i]);
    });
    if (!dominated) {
      kept.push_back(i);
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace mopso
