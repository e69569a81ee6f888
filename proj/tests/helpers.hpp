#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rssac/rssac.hpp"

namespace rssac::testing {

inline Vec2 random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double th = 2.0 * M_PI * u(rng);
  return {r * std::cos(th), r * std::sin(th)};
}

inline Vec4 random_vec4(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec4(u(rng), u(rng), u(rng), u(rng));
}

inline ControlSchedule random_schedule(std::mt19937_64& rng, double t0, const TimeGrid& grid, double u_max,
                                       double magnitude) {
  std::vector<Vec2> in(static_cast<std::size_t>(grid.cells()));
  for (auto& u : in) u = random_in_disk(rng, magnitude);
  return ControlSchedule(t0, grid.dt_c, std::move(in), u_max);
}

/// Humans listed with explicit mean velocities (no history needed beyond the current position).
inline HumanHistory walker(int id, Vec2 p, Vec2 v) {
  HumanHistory h;
  h.id = id;
  h.positions = {p - 0.4 * v, p};
  h.mean_velocity = v;
  return h;
}

inline PlanningInput planning_input(Vec4 x, std::vector<HumanHistory> humans, Vec2 goal, double t0 = 0.0) {
  PlanningInput in;
  in.t0 = t0;
  in.robot = x;
  in.humans = std::move(humans);
  in.first_jump_cell = 20;
  in.reference = {x.head<2>(), goal, 1.0, t0};
  in.seed = 11;
  return in;
}

}  // namespace rssac::testing
