#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rssac/controller.hpp"
#include "rssac/datasets.hpp"

namespace rssac {

enum class ScenarioKind { intersection, dataset_replay, static_field };

ScenarioKind parse_scenario_kind(std::string_view name);
std::string to_string(ScenarioKind kind);

/// Ground-truth pedestrian walking from `start` with constant mean velocity and
/// Gaussian step noise. `goal` only defines the path segment used for yielding.
struct ScriptedHuman {
  int id = 0;
  Vec2 start = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::intersection;
  RobotState robot0;
  Vec2 goal = Vec2::Zero();
  PredictorConfig predictor;
  double duration = 14.0;
  double collision_threshold = 0.4;
  double reference_speed = 1.0;
  /// The reference is re-laid from the current position when |x - r| exceeds this.
  double replan_threshold = 2.0;
  int history_len = 8;

  /// Recorded humans; frame `start_frame` is t = 0 and frames are dt_o apart.
  std::shared_ptr<const TrajectoryDataset> recorded;
  int start_frame = 0;

  /// Stochastic walkers realised per episode seed (used when `recorded` is null).
  std::vector<ScriptedHuman> walkers;
  Mat2 walker_noise = 0.01 * Mat2::Identity();
  /// Hand the walkers' true mean velocity to the predictor instead of estimating it.
  bool walkers_known_velocity = true;

  void validate(const TimeGrid& grid) const;
};

struct StateLogEntry {
  double t = 0.0;
  Vec4 x = Vec4::Zero();
  Vec2 u = Vec2::Zero();
  double min_distance = 0.0;

  bool operator==(const StateLogEntry&) const = default;
};

struct EpisodeResult {
  double min_robot_human_distance = 0.0;
  double normalized_goal_distance = 0.0;
  bool collided = false;
  /// Only defined for scenarios with a scripted walker.
  std::optional<bool> yielded;
  Vec2 goal = Vec2::Zero();
  bool failed = false;
  std::string error;
  /// Wall time of every controller call, seconds. Not part of same_outcome().
  std::vector<double> cycle_times;
  std::vector<StateLogEntry> log;

  /// Equality of everything except wall-clock timings.
  bool same_outcome(const EpisodeResult& other) const;
};

/// Ground-truth human tracks of one episode, with the frame that corresponds to t = 0.
struct RealizedHumans {
  TrajectoryDataset dataset;
  int start_frame = 0;
};

RealizedHumans realize_humans(const Scenario& scenario, std::uint64_t seed, const TimeGrid& grid);

/// Closed-loop run: replan every controller.replan_cells(), integrate the plant at
/// dt_c and record metrics at every step.
EpisodeResult run_episode(const Scenario& scenario, Controller& controller, std::uint64_t seed,
                          const TimeGrid& grid);

struct IntersectionOptions {
  Vec2 robot_start{0.0, -5.0};
  Vec2 robot_velocity{0.0, 1.0};
  Vec2 robot_goal{0.0, 5.0};
  Vec2 human_start{-5.0, 0.0};
  Vec2 human_velocity{1.0, 0.0};
  Vec2 human_goal{5.0, 0.0};
  Mat2 human_noise = 0.01 * Mat2::Identity();
  double duration = 14.0;
  double reference_speed = 1.0;
};

/// Robot heading north and one pedestrian heading east on a collision course.
/// Construction does not depend on the controller or its risk sensitivity.
Scenario intersection_scenario(const IntersectionOptions& options = {});

struct StaticFieldOptions {
  int humans = 50;
  Vec2 robot_start{0.0, -8.0};
  Vec2 robot_goal{0.0, 8.0};
  Vec2 field_min{-8.0, -6.0};
  Vec2 field_max{8.0, 6.0};
  /// Minimum distance between any human and the robot start.
  double start_clearance = 1.5;
  std::uint64_t layout_seed = 7;
  double duration = 10.0;
};

Scenario static_field_scenario(const StaticFieldOptions& options = {});
/// Static humans at explicit positions.
Scenario static_field_scenario(const std::vector<Vec2>& humans, const Vec2& robot_start, const Vec2& goal,
                               double duration);

Scenario dataset_scenario(std::shared_ptr<const TrajectoryDataset> dataset, int start_frame,
                          const RobotState& robot0, const Vec2& goal, double duration);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

MetricStats summarize(std::span<const double> values);

struct BenchmarkOptions {
  int runs = 100;
  std::uint64_t master_seed = 0;
  /// Goals are drawn uniformly from a disk of this radius around the scenario goal.
  double goal_radius = 1.0;
};

struct BenchmarkResult {
  std::string controller;
  std::vector<std::uint64_t> seeds;
  std::vector<EpisodeResult> episodes;
  /// Keyed by metric name: min_robot_human_distance, normalized_goal_distance,
  /// collision_rate and (when defined) yield_probability.
  std::map<std::string, MetricStats> stats;
};

std::uint64_t episode_seed(std::uint64_t master_seed, int run);
Vec2 randomized_goal(const Vec2& goal, double radius, std::uint64_t seed);

BenchmarkResult run_benchmark(const Scenario& scenario, const ControllerFactory& make_controller,
                              const TimeGrid& grid, const BenchmarkOptions& options);

/// Aggregates per-episode records into the per-metric table.
std::map<std::string, MetricStats> aggregate(std::span<const EpisodeResult> episodes);

}  // namespace rssac
