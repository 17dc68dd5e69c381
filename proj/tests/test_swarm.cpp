#include <catch_amalgamated.hpp>

#include <cmath>

#include "mopso/scenario.hpp"
#include "mopso/swarm.hpp"
#include "oracles.hpp"

using namespace mopso;

namespace {

Particle particle(DecisionVector x, DecisionVector v, DecisionVector best) {
  return {std::move(x), std::move(v), std::move(best), {}};
}

// Two conflicting objectives on [0, 1]^d: closeness to the origin corner and
// to the opposite corner.
struct TwoCorners {
  std::size_t d = 3;
  std::vector<double> lo = std::vector<double>(3, 0.0);
  std::vector<double> hi = std::vector<double>(3, 1.0);
  std::size_t dimension() const { return d; }
  std::size_t objective_count() const { return 2; }
  std::span<const double> lower_bounds() const { return lo; }
  std::span<const double> upper_bounds() const { return hi; }
  ObjectiveVector evaluate(std::span<const double> x) const {
    double a = 0.0;
    double b = 0.0;
    for (double v : x) {
      a -= v * v;
      b -= (1.0 - v) * (1.0 - v);
    }
    return {a, b};
  }
};

static_assert(MultiObjectiveProblem<TwoCorners>);
static_assert(MultiObjectiveProblem<DeploymentProblem>);

Scenario small_scenario() {
  Scenario s;
  s.deployment_region = {0, 70000, 0, 70000};
  s.regions.push_back(InterferenceRegion::make(1, {10000, 25000, 45000, 60000}, 5, 5));
  s.regions.push_back(InterferenceRegion::make(2, {45000, 60000, 10000, 25000}, 5, 5));
  s.radar = {std::vector<double>(3, 15000), std::vector<double>(3, 1e4)};
  return s;
}

}  // namespace

TEST_CASE("update_velocity examples") {
  Rng rng(1);
  MopsoConfig cfg;
  cfg.v_max = 4;

  cfg.inertia = 0;
  cfg.c1 = 0;
  cfg.c2 = 0;
  const auto p = particle({1, 2}, {3, -3}, {5, 5});
  CHECK(update_velocity(p, std::vector<double>{0, 0}, cfg, rng) == DecisionVector{0, 0});

  cfg = MopsoConfig{};
  cfg.v_max = 4;
  const auto still = particle({1, 2}, {3, -5}, {1, 2});
  CHECK(update_velocity(still, std::vector<double>{1, 2}, cfg, rng) ==
        DecisionVector{0.4 * 3, std::max(-4.0, 0.4 * -5)});

  cfg.inertia = 0.4;
  cfg.c1 = 0;
  cfg.c2 = 0;
  const auto fast = particle({0, 0, 0}, {10, 0, 0}, {0, 0, 0});
  CHECK(update_velocity(fast, std::vector<double>{0, 0, 0}, cfg, rng) == DecisionVector{4, 0, 0});
  const auto faster = particle({0}, {-25}, {0});
  CHECK(update_velocity(faster, std::vector<double>{0}, cfg, rng) == DecisionVector{-4});
}

TEST_CASE("update_velocity draws one r1, r2 pair per particle by default") {
  MopsoConfig cfg;
  cfg.inertia = 0;
  cfg.c2 = 0;
  cfg.c1 = 1;
  cfg.v_max = 100;
  const auto p = particle({0, 0, 0}, {0, 0, 0}, {1, 2, 3});
  Rng rng(5);
  const auto v = update_velocity(p, std::vector<double>{0, 0, 0}, cfg, rng);
  // Same scalar r1 on every dimension: v is proportional to (1, 2, 3).
  CHECK(v[1] == Catch::Approx(2 * v[0]));
  CHECK(v[2] == Catch::Approx(3 * v[0]));

  Rng replay(5);
  const double r1 = replay.uniform01();
  CHECK(v[0] == r1);

  cfg.coefficient_draw = CoefficientDraw::PerDimension;
  Rng rng2(5);
  const auto w = update_velocity(p, std::vector<double>{0, 0, 0}, cfg, rng2);
  CHECK(w[1] != Catch::Approx(2 * w[0]));
}

TEST_CASE("update_velocity rejects mismatched dimensions") {
  Rng rng(1);
  const auto p = particle({0, 0}, {0, 0}, {0, 0});
  CHECK_THROWS_AS(update_velocity(p, std::vector<double>{0}, MopsoConfig{}, rng), InvalidArgument);
}

TEST_CASE("update_position examples") {
  const std::vector<double> lo{-100, -100};
  const std::vector<double> hi{100, 100};
  auto p = particle({1, 1}, {0, 0}, {1, 1});
  update_position(p, lo, hi);
  CHECK(p.position == DecisionVector{1, 1});

  p.velocity = {2, 3};
  update_position(p, lo, hi);
  CHECK(p.position == DecisionVector{3, 4});
  CHECK(p.velocity == DecisionVector{2, 3});

  auto edge = particle({69999, 0}, {4, 0}, {0, 0});
  update_position(edge, std::vector<double>{0, 0}, std::vector<double>{70000, 70000});
  CHECK(edge.position == DecisionVector{70000, 0});
  CHECK(edge.velocity == DecisionVector{0, 0});

  auto low = particle({1, 50}, {-4, 1}, {0, 0});
  update_position(low, std::vector<double>{0, 0}, std::vector<double>{70000, 70000});
  CHECK(low.position == DecisionVector{0, 51});
  CHECK(low.velocity == DecisionVector{0, 1});
}

TEST_CASE("update_personal_best requires strict dominance") {
  auto p = particle({7, 7}, {0, 0}, {1, 1});
  p.personal_best_value = {2, 2};
  CHECK(update_personal_best(p, {3, 3}));
  CHECK(p.personal_best == DecisionVector{7, 7});
  CHECK(p.personal_best_value == ObjectiveVector{3, 3});

  p.position = {8, 8};
  CHECK_FALSE(update_personal_best(p, {4, 1}));
  CHECK(p.personal_best == DecisionVector{7, 7});

  CHECK_FALSE(update_personal_best(p, {3, 3}));
  CHECK(p.personal_best_value == ObjectiveVector{3, 3});
}

TEST_CASE("initialization follows the documented distribution") {
  const TwoCorners problem;
  MopsoConfig cfg;
  cfg.v_max = 0.05;
  cfg.rng_seed = 12;
  const auto state = initialize_swarm(problem, cfg);
  REQUIRE(state.particles.size() == cfg.swarm_size);
  for (const auto& p : state.particles) {
    CHECK(p.personal_best == p.position);
    CHECK(p.personal_best_value == problem.evaluate(p.position));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(p.position[i] >= 0.0);
      CHECK(p.position[i] <= 1.0);
      CHECK(std::abs(p.velocity[i]) <= cfg.v_max);
    }
  }
  std::vector<ObjectiveVector> initial;
  for (const auto& p : state.particles) {
    initial.push_back(p.personal_best_value);
  }
  CHECK(state.archive.size() == oracle::pareto_filter(initial).size());
}

TEST_CASE("step with zero coefficients leaves the swarm in place") {
  const DeploymentProblem problem(small_scenario());
  MopsoConfig cfg;
  cfg.inertia = 0;
  cfg.c1 = 0;
  cfg.c2 = 0;
  cfg.v_max = 4000;
  cfg.rng_seed = 3;
  auto state = initialize_swarm(problem, cfg);
  const auto positions_before = [&] {
    std::vector<DecisionVector> out;
    for (const auto& p : state.particles) out.push_back(p.position);
    return out;
  }();
  auto archive_before = state.archive.values();
  for (int t = 0; t < 5; ++t) {
    step(state, problem, cfg);
  }
  for (std::size_t n = 0; n < state.particles.size(); ++n) {
    CHECK(state.particles[n].position == positions_before[n]);
  }
  auto archive_after = state.archive.values();
  std::sort(archive_before.begin(), archive_before.end());
  std::sort(archive_after.begin(), archive_after.end());
  CHECK(archive_after == archive_before);
  CHECK(state.iteration == 5);
}

TEST_CASE("seeded runs are bit-identical") {
  const DeploymentProblem problem(small_scenario());
  MopsoConfig cfg;
  cfg.v_max = 4000;
  cfg.rng_seed = 77;
  auto a = initialize_swarm(problem, cfg);
  auto b = initialize_swarm(problem, cfg);
  for (int t = 0; t < 40; ++t) {
    step(a, problem, cfg);
    step(b, problem, cfg);
  }
  REQUIRE(a.archive.size() == b.archive.size());
  for (std::size_t i = 0; i < a.archive.size(); ++i) {
    CHECK(a.archive.entries()[i].position == b.archive.entries()[i].position);
    CHECK(a.archive.entries()[i].value == b.archive.entries()[i].value);
  }
  for (std::size_t n = 0; n < a.particles.size(); ++n) {
    CHECK(a.particles[n].velocity == b.particles[n].velocity);
  }

  cfg.rng_seed = 78;
  auto c = initialize_swarm(problem, cfg);
  CHECK(c.particles[0].position != a.particles[0].position);
}

TEST_CASE("swarm invariants hold after every step") {
  const DeploymentProblem problem(small_scenario());
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MopsoConfig cfg;
    cfg.v_max = 4000;
    cfg.rng_seed = seed;
    auto state = initialize_swarm(problem, cfg);
    std::vector<std::vector<ObjectiveVector>> history{state.archive.values()};
    for (int t = 0; t < 60; ++t) {
      step(state, problem, cfg);
      for (const auto& p : state.particles) {
        for (std::size_t i = 0; i < p.position.size(); ++i) {
          REQUIRE(std::abs(p.velocity[i]) <= cfg.v_max);
          REQUIRE(p.position[i] >= problem.lower_bounds()[i]);
          REQUIRE(p.position[i] <= problem.upper_bounds()[i]);
        }
      }
      const auto values = state.archive.values();
      REQUIRE(oracle::pareto_filter(values).size() == values.size());
      history.push_back(values);
    }
    // No later archive point is dominated by an earlier one.
    for (std::size_t t = 0; t < history.size(); ++t) {
      for (std::size_t u = t + 1; u < history.size(); ++u) {
        for (const auto& later : history[u]) {
          for (const auto& earlier : history[t]) {
            REQUIRE_FALSE(oracle::dominates(earlier, later));
          }
        }
      }
    }
  }
}

TEST_CASE("bounded archive respects its capacity during a run") {
  const TwoCorners problem;
  MopsoConfig cfg;
  cfg.v_max = 0.1;
  cfg.archive_capacity = 10;
  cfg.rng_seed = 4;
  auto state = initialize_swarm(problem, cfg);
  for (int t = 0; t < 50; ++t) {
    step(state, problem, cfg);
    REQUIRE(state.archive.size() <= 10);
  }
  CHECK(state.archive.size() == 10);
}

TEST_CASE("MopsoConfig validation") {
  MopsoConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.swarm_size = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.v_max = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.inertia = -0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
