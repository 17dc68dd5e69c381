#pragma once

// Multi-objective particle swarm over a box-bounded decision space.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mopso/archive.hpp"
#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"
#include "mopso/rng.hpp"

namespace mopso {

template <class P>
concept MultiObjectiveProblem = requires(const P& problem, std::span<const double> x) {
  { problem.dimension() } -> std::convertible_to<std::size_t>;
  { problem.objective_count() } -> std::convertible_to<std::size_t>;
  { problem.lower_bounds() } -> std::convertible_to<std::span<const double>>;
  { problem.upper_bounds() } -> std::convertible_to<std::span<const double>>;
  { problem.evaluate(x) } -> std::convertible_to<ObjectiveVector>;
};

// How r1 and r2 are drawn: one scalar pair per particle per iteration, or an
// independent pair for every dimension.
enum class CoefficientDraw { PerParticle, PerDimension };

struct MopsoConfig {
  std::size_t swarm_size = 30;
  double inertia = 0.4;
  double c1 = 2.0;
  double c2 = 2.0;
  double v_max = 4.0;
  std::optional<std::size_t> archive_capacity;  // nullopt: unbounded
  std::size_t max_iterations = 1000;
  std::uint64_t rng_seed = 0;
  CoefficientDraw coefficient_draw = CoefficientDraw::PerParticle;
  LeaderSelection leader_selection = LeaderSelection::Tournament;

  void validate() const {
    if (swarm_size < 2) {
      throw InvalidArgument("swarm_size must be at least 2");
    }
    if (!(inertia >= 0.0)) {
      throw InvalidArgument("inertia must be non-negative");
    }
    if (!(c1 >= 0.0) || !(c2 >= 0.0)) {
      throw InvalidArgument("acceleration constants must be non-negative");
    }
    if (!(v_max > 0.0)) {
      throw InvalidArgument("v_max must be positive");
    }
    if (max_iterations < 1) {
      throw InvalidArgument("max_iterations must be at least 1");
    }
    if (archive_capacity && *archive_capacity == 0) {
      throw InvalidArgument("archive_capacity must be at least 1");
    }
  }
};

struct Particle {
  DecisionVector position;
  DecisionVector velocity;
  DecisionVector personal_best;
  ObjectiveVector personal_best_value;
};

// v' = w v + c1 r1 (p_n - x) + c2 r2 (p_g - x), clamped to [-v_max, v_max].
inline DecisionVector update_velocity(const Particle& p, std::span<const double> leader,
                                      const MopsoConfig& cfg, Rng& rng) {
  const std::size_t d = p.position.size();
  if (p.velocity.size() != d || p.personal_best.size() != d || leader.size() != d) {
    throw InvalidArgument("update_velocity: dimension mismatch");
  }
  double r1 = 0.0;
  double r2 = 0.0;
  if (cfg.coefficient_draw == CoefficientDraw::PerParticle) {
    r1 = rng.uniform01();
    r2 = rng.uniform01();
  }
  DecisionVector v(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (cfg.coefficient_draw == CoefficientDraw::PerDimension) {
      r1 = rng.uniform01();
      r2 = rng.uniform01();
    }
    const double raw = cfg.inertia * p.velocity[i] +
                       cfg.c1 * r1 * (p.personal_best[i] - p.position[i]) +
                       cfg.c2 * r2 * (leader[i] - p.position[i]);
    v[i] = std::clamp(raw, -cfg.v_max, cfg.v_max);
  }
  return v;
}

// x' = x + v, clamped into the box; a clamped coordinate loses its velocity.
inline void update_position(Particle& p, std::span<const double> lower, std::span<const double> upper) {
  const std::size_t d = p.position.size();
  if (p.velocity.size() != d || lower.size() != d || upper.size() != d) {
    throw InvalidArgument("update_position: dimension mismatch");
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double moved = p.position[i] + p.velocity[i];
    if (moved < lower[i]) {
      p.position[i] = lower[i];
      p.velocity[i] = 0.0;
    } else if (moved > upper[i]) {
      p.position[i] = upper[i];
      p.velocity[i] = 0.0;
    } else {
      p.position[i] = moved;
    }
  }
}

// The personal best moves only when the new value dominates the old one.
inline bool update_personal_best(Particle& p, const ObjectiveVector& new_value) {
  if (!dominates(new_value, p.personal_best_value)) {
    return false;
  }
  p.personal_best = p.position;
  p.personal_best_value = new_value;
  return true;
}

struct SwarmState {
  std::vector<Particle> particles;
  ParetoArchive archive;
  Rng rng;
  std::size_t iteration = 0;
};

// Uniform positions over the box, uniform velocities in [-v_max, v_max],
// personal best = initial position, archive seeded with the non-dominated
// initial particles.
template <MultiObjectiveProblem Problem>
SwarmState initialize_swarm(const Problem& problem, const MopsoConfig& cfg) {
  cfg.validate();
  const auto lower = problem.lower_bounds();
  const auto upper = problem.upper_bounds();
  const std::size_t d = problem.dimension();

  SwarmState state{{}, ParetoArchive(cfg.archive_capacity), Rng(cfg.rng_seed), 0};
  state.particles.reserve(cfg.swarm_size);
  for (std::size_t n = 0; n < cfg.swarm_size; ++n) {
    Particle p;
    p.position.resize(d);
    p.velocity.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      p.position[i] = state.rng.uniform(lower[i], upper[i]);
    }
    for (std::size_t i = 0; i < d; ++i) {
      p.velocity[i] = state.rng.uniform(-cfg.v_max, cfg.v_max);
    }
    p.personal_best = p.position;
    p.personal_best_value = problem.evaluate(p.position);
    state.particles.push_back(std::move(p));
  }
  for (const auto& p : state.particles) {
    state.archive.insert({p.position, p.personal_best_value}, state.rng);
  }
  return state;
}

// One iteration: each particle in index order selects a leader, moves,
// is evaluated, updates its personal best, and offers itself to the archive.
template <MultiObjectiveProblem Problem>
void step(SwarmState& state, const Problem& problem, const MopsoConfig& cfg) {
  const auto lower = problem.lower_bounds();
  const auto upper = problem.upper_bounds();
  for (auto& p : state.particles) {
    const DecisionVector leader = state.archive.select_leader(state.rng, cfg.leader_selection);
    p.velocity = update_velocity(p, leader, cfg, state.rng);
    update_position(p, lower, upper);
    ObjectiveVector value = problem.evaluate(p.position);
    update_personal_best(p, value);
    state.archive.insert({p.position, std::move(value)}, state.rng);
  }
  ++state.iteration;
}

}  // namespace mopso
