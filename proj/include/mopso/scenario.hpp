#pragma once

// Antenna-deployment objective: free-space interference power density
// delivered by J planar antennas, aggregated per interference region as the
// weakest resolution cell.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"

namespace mopso {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Rectangle {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(Point p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  Point center() const noexcept { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  void validate() const {
    if (!(x_min < x_max) || !(y_min < y_max)) {
      throw InvalidArgument("rectangle requires x_min < x_max and y_min < y_max");
    }
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct RadarParams {
  std::vector<double> transmit_powers;  // W
  std::vector<double> gains;            // linear

  std::size_t antenna_count() const noexcept { return transmit_powers.size(); }

  void validate() const {
    if (transmit_powers.empty()) {
      throw InvalidArgument("radar requires at least one antenna");
    }
    if (transmit_powers.size() != gains.size()) {
      throw InvalidArgument("radar power and gain lists differ in length");
    }
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!std::all_of(transmit_powers.begin(), transmit_powers.end(), positive)) {
      throw InvalidArgument("transmit powers must be strictly positive");
    }
    if (!std::all_of(gains.begin(), gains.end(), positive)) {
      throw InvalidArgument("gains must be strictly positive");
    }
  }
};

// nx * ny cell centers in row-major order (x index fastest).
inline std::vector<Point> discretize_region(const Rectangle& bounds, std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) {
    throw InvalidArgument("discretize_region: cell counts must be at least 1");
  }
  bounds.validate();
  const double dx = (bounds.x_max - bounds.x_min) / static_cast<double>(nx);
  const double dy = (bounds.y_max - bounds.y_min) / static_cast<double>(ny);
  std::vector<Point> cells;
  cells.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      cells.push_back({bounds.x_min + (static_cast<double>(i) + 0.5) * dx,
                       bounds.y_min + (static_cast<double>(j) + 0.5) * dy});
    }
  }
  return cells;
}

struct InterferenceRegion {
  int index = 1;
  Rectangle bounds;
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::vector<Point> cells;

  static InterferenceRegion make(int index, const Rectangle& bounds, std::size_t nx, std::size_t ny) {
    return {index, bounds, nx, ny, discretize_region(bounds, nx, ny)};
  }
};

struct AntennaLayout {
  std::vector<Point> positions;

  // Decision vector layout: [x1, y1, x2, y2, ...].
  static AntennaLayout from_decision(std::span<const double> theta) {
    if (theta.size() % 2 != 0) {
      throw InvalidArgument("decision vector length must be even");
    }
    AntennaLayout layout;
    layout.positions.reserve(theta.size() / 2);
    for (std::size_t j = 0; j < theta.size(); j += 2) {
      layout.positions.push_back({theta[j], theta[j + 1]});
    }
    return layout;
  }

  DecisionVector to_decision() const {
    DecisionVector theta;
    theta.reserve(2 * positions.size());
    for (const auto& p : positions) {
      theta.push_back(p.x);
      theta.push_back(p.y);
    }
    return theta;
  }
};

struct Scenario {
  Rectangle deployment_region;
  std::vector<InterferenceRegion> regions;
  RadarParams radar;
  double min_separation = 100.0;  // m

  std::size_t antenna_count() const noexcept { return radar.antenna_count(); }
  std::size_t objective_count() const noexcept { return regions.size(); }

  void validate() const {
    deployment_region.validate();
    radar.validate();
    if (regions.empty()) {
      throw InvalidArgument("scenario requires at least one interference region");
    }
    std::vector<bool> seen(regions.size(), false);
    for (const auto& r : regions) {
      if (r.index < 1 || static_cast<std::size_t>(r.index) > regions.size() ||
          seen[static_cast<std::size_t>(r.index - 1)]) {
        throw InvalidArgument("region indices must be 1..M without duplicates");
      }
      seen[static_cast<std::size_t>(r.index - 1)] = true;
      if (r.cells.empty()) {
        throw InvalidArgument("interference region has no resolution cells");
      }
    }
    if (!(min_separation > 0.0) || !std::isfinite(min_separation)) {
      throw InvalidArgument("min_separation must be strictly positive");
    }
  }
};

namespace detail {

inline double power_density_impl(std::span<const Point> antennas, Point cell,
                                 const RadarParams& radar, double min_separation_sq) {
  double total = 0.0;
  for (std::size_t j = 0; j < antennas.size(); ++j) {
    const double dx = antennas[j].x - cell.x;
    const double dy = antennas[j].y - cell.y;
    const double r2 = std::max(dx * dx + dy * dy, min_separation_sq);
    total += radar.transmit_powers[j] * radar.gains[j] / (4.0 * std::numbers::pi * r2);
  }
  return total;
}

inline void check_antenna_count(const AntennaLayout& layout, const RadarParams& radar) {
  if (layout.positions.size() != radar.antenna_count()) {
    throw InvalidArgument("layout has " + std::to_string(layout.positions.size()) +
                          " antennas but radar parameters describe " +
                          std::to_string(radar.antenna_count()));
  }
}

}  // namespace detail

// Sum over antennas of P_t G / (4 pi R^2), with R floored at min_separation.
inline double power_density(const AntennaLayout& layout, Point cell, const RadarParams& radar,
                            double min_separation) {
  detail::check_antenna_count(layout, radar);
  return detail::power_density_impl(layout.positions, cell, radar, min_separation * min_separation);
}

// Weakest cell of the region.
inline double region_objective(const AntennaLayout& layout, const InterferenceRegion& region,
                               const RadarParams& radar, double min_separation) {
  detail::check_antenna_count(layout, radar);
  if (region.cells.empty()) {
    throw InvalidArgument("region_objective: region has no cells");
  }
  const double floor_sq = min_separation * min_separation;
  double lowest = std::numeric_limits<double>::infinity();
  for (const Point& cell : region.cells) {
    lowest = std::min(lowest, detail::power_density_impl(layout.positions, cell, radar, floor_sq));
  }
  return lowest;
}

// One value per region, ordered by region index.
inline ObjectiveVector joint_objective(const AntennaLayout& layout, const Scenario& scenario) {
  for (const Point& p : layout.positions) {
    if (!scenario.deployment_region.contains(p)) {
      throw InvalidArgument("antenna outside the deployment region");
    }
  }
  ObjectiveVector values(scenario.regions.size());
  for (const auto& region : scenario.regions) {
    values[static_cast<std::size_t>(region.index - 1)] =
        region_objective(layout, region, scenario.radar, scenario.min_separation);
  }
  return values;
}

// Adapts a Scenario to the optimizer's problem interface: 2J box-bounded
// decision variables, M maximized objectives.
class DeploymentProblem {
 public:
  explicit DeploymentProblem(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    const auto& box = scenario_.deployment_region;
    for (std::size_t j = 0; j < scenario_.antenna_count(); ++j) {
      lower_.push_back(box.x_min);
      lower_.push_back(box.y_min);
      upper_.push_back(box.x_max);
      upper_.push_back(box.y_max);
    }
  }

  std::size_t dimension() const noexcept { return lower_.size(); }
  std::size_t objective_count() const noexcept { return scenario_.objective_count(); }
  std::span<const double> lower_bounds() const noexcept { return lower_; }
  std::span<const double> upper_bounds() const noexcept { return upper_; }
  const Scenario& scenario() const noexcept { return scenario_; }

  ObjectiveVector evaluate(std::span<const double> theta) const {
    return joint_objective(AntennaLayout::from_decision(theta), scenario_);
  }

 private:
  Scenario scenario_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

}  // namespace mopso
