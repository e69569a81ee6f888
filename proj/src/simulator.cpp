#include "rssac/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rssac/parallel.hpp"

namespace rssac {
namespace {

double cross2(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

// True when segment p0-p1 touches segment q0-q1. A motion ending exactly on the
// line counts; one starting on it does not, so a crossing is reported once.
bool crosses(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
  const Vec2 r = p1 - p0;
  const Vec2 s = q1 - q0;
  const double denom = cross2(r, s);
  if (denom == 0.0) return false;
  const double t = cross2(q0 - p0, s) / denom;
  const double u = cross2(q0 - p0, r) / denom;
  return t > 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

int duration_cells(double duration, const TimeGrid& grid) {
  return static_cast<int>(std::lround(duration / grid.dt_c));
}

}  // namespace

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "intersection") return ScenarioKind::intersection;
  if (name == "dataset_replay") return ScenarioKind::dataset_replay;
  if (name == "static_field") return ScenarioKind::static_field;
  throw Error("unknown scenario kind '" + std::string(name) + "'");
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::intersection:
      return "intersection";
    case ScenarioKind::dataset_replay:
      return "dataset_replay";
    case ScenarioKind::static_field:
      return "static_field";
  }
  return "unknown";
}

void Scenario::validate(const TimeGrid& grid) const {
  require(duration > 0.0, "scenario.duration must be positive");
  const double cells = duration / grid.dt_c;
  require(std::abs(cells - std::round(cells)) < 1e-6, "scenario.duration must be a whole number of control steps");
  require(collision_threshold >= 0.0, "scenario.collision_threshold must be nonnegative");
  require(reference_speed > 0.0, "scenario.reference_speed must be positive");
  require(replan_threshold > 0.0, "scenario.replan_threshold must be positive");
  require(history_len >= 2, "scenario.history_len must be at least 2");
  require(robot0.stacked().allFinite() && goal.allFinite(), "scenario robot start and goal must be finite");
  require(recorded != nullptr || !walkers.empty() || kind != ScenarioKind::dataset_replay,
          "dataset_replay scenario needs a dataset");
  predictor.validate();
  for (const auto& w : walkers) {
    require((w.start - robot0.position).norm() >= collision_threshold, "scenario must start collision free");
  }
  if (recorded != nullptr) {
    for (const auto& r : recorded->at_frame(start_frame)) {
      require((Vec2(r.x, r.y) - robot0.position).norm() >= collision_threshold,
              "scenario must start collision free");
    }
  }
}

bool EpisodeResult::same_outcome(const EpisodeResult& o) const {
  return min_robot_human_distance == o.min_robot_human_distance &&
         normalized_goal_distance == o.normalized_goal_distance && collided == o.collided &&
         yielded == o.yielded && goal == o.goal && failed == o.failed && error == o.error &&
         cycle_times.size() == o.cycle_times.size() && log == o.log;
}

RealizedHumans realize_humans(const Scenario& scenario, std::uint64_t seed, const TimeGrid& grid) {
  if (scenario.recorded != nullptr) return {*scenario.recorded, scenario.start_frame};
  const int frames = static_cast<int>(std::ceil(scenario.duration / grid.dt_o())) + grid.horizon_steps + 2;
  Eigen::SelfAdjointEigenSolver<Mat2> eig(scenario.walker_noise);
  const Mat2 root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                    eig.eigenvectors().transpose();
  std::vector<TrajectoryRecord> records;
  for (std::size_t i = 0; i < scenario.walkers.size(); ++i) {
    const auto& w = scenario.walkers[i];
    std::mt19937_64 rng(stream_seed(seed ^ 0x68756d616e73ULL, i));
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vec2 step = w.velocity * grid.dt_o();
    Vec2 p = w.start - step;
    records.push_back({0, w.id, p(0), p(1)});
    p = w.start;
    records.push_back({1, w.id, p(0), p(1)});
    for (int f = 2; f <= frames; ++f) {
      const double z0 = normal(rng);
      const double z1 = normal(rng);
      p += step + root * Vec2(z0, z1);
      records.push_back({f, w.id, p(0), p(1)});
    }
  }
  return {TrajectoryDataset(std::move(records), grid.dt_o()), 1};
}

EpisodeResult run_episode(const Scenario& scenario, Controller& controller, std::uint64_t seed,
                          const TimeGrid& grid) {
  scenario.validate(grid);
  const RealizedHumans truth = realize_humans(scenario, seed, grid);
  const int total = duration_cells(scenario.duration, grid);
  const int replan = controller.replan_cells();
  require(replan >= 1, "controller replanning interval must be positive");
  controller.reset();

  EpisodeResult result;
  result.goal = scenario.goal;
  result.min_robot_human_distance = std::numeric_limits<double>::infinity();
  Vec4 x = scenario.robot0.stacked();
  const double initial_goal_distance = (x.head<2>() - scenario.goal).norm();

  ReferenceTrajectory reference{x.head<2>(), scenario.goal, scenario.reference_speed, 0.0};
  ControlSchedule schedule;
  int offset = 0;
  int cycle = 0;

  std::optional<int> robot_cross;
  std::optional<int> human_cross;
  const bool track_yield = !scenario.walkers.empty();
  const ScriptedHuman* walker = track_yield ? &scenario.walkers.front() : nullptr;

  auto humans_at = [&](int cell) { return truth.dataset.at_frame(truth.start_frame + cell / grid.obs_ratio); };
  auto observe = [&](int cell, const Vec2& u) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& r : humans_at(cell)) d = std::min(d, (x.head<2>() - Vec2(r.x, r.y)).norm());
    result.min_robot_human_distance = std::min(result.min_robot_human_distance, d);
    result.log.push_back({grid.dt_c * cell, x, u, d});
  };

  for (int cell = 0; cell < total; ++cell) {
    if (cell % replan == 0 || offset >= static_cast<int>(schedule.size())) {
      const double t = grid.dt_c * cell;
      if ((x - reference.at(t)).norm() > scenario.replan_threshold) {
        reference = {x.head<2>(), scenario.goal, scenario.reference_speed, t};
      }
      const int obs_index = cell / grid.obs_ratio;
      PlanningInput input;
      input.t0 = t;
      input.robot = x;
      input.humans = scene_window(truth.dataset, truth.start_frame + obs_index, scenario.history_len,
                                  grid.horizon_steps);
      if (scenario.recorded == nullptr && scenario.walkers_known_velocity) {
        for (auto& h : input.humans) {
          for (const auto& w : scenario.walkers) {
            if (w.id == h.id) h.mean_velocity = w.velocity;
          }
        }
      }
      input.first_jump_cell = (obs_index + 1) * grid.obs_ratio - cell;
      input.reference = reference;
      input.seed = stream_seed(seed, static_cast<std::uint64_t>(cycle));
      const auto start = std::chrono::steady_clock::now();
      try {
        schedule = controller.plan(input);
      } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        break;
      }
      result.cycle_times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      require(schedule.size() > 0, "controller returned an empty schedule");
      offset = 0;
      ++cycle;
    }
    const Vec2 u = schedule.input(static_cast<std::size_t>(offset));
    observe(cell, u);
    const Vec4 next = euler_step(x, u, grid.dt_c);
    if (walker != nullptr && !robot_cross &&
        crosses(x.head<2>(), next.head<2>(), walker->start, walker->goal)) {
      robot_cross = cell + 1;
    }
    x = next;
    ++offset;
    if (walker != nullptr && !human_cross && (cell + 1) % grid.obs_ratio == 0) {
      const int frame = truth.start_frame + (cell + 1) / grid.obs_ratio;
      const auto before = truth.dataset.position(walker->id, frame - 1);
      const auto after = truth.dataset.position(walker->id, frame);
      if (before && after && crosses(*before, *after, scenario.robot0.position, scenario.goal)) {
        human_cross = cell + 1;
      }
    }
  }
  if (!result.failed) observe(total, Vec2::Zero());

  result.collided = result.min_robot_human_distance < scenario.collision_threshold;
  if (!std::isfinite(result.min_robot_human_distance)) result.min_robot_human_distance = 0.0;
  result.normalized_goal_distance =
      initial_goal_distance > 0.0 ? (x.head<2>() - scenario.goal).norm() / initial_goal_distance : 0.0;
  if (track_yield) result.yielded = human_cross.has_value() && (!robot_cross || *human_cross < *robot_cross);
  return result;
}

Scenario intersection_scenario(const IntersectionOptions& o) {
  Scenario s;
  s.kind = ScenarioKind::intersection;
  s.robot0 = {o.robot_start, o.robot_velocity};
  s.goal = o.robot_goal;
  s.duration = o.duration;
  s.reference_speed = o.reference_speed;
  s.predictor.kind = PredictorKind::constant_velocity_gaussian;
  s.predictor.noise_cov = o.human_noise;
  s.walkers = {{1, o.human_start, o.human_velocity, o.human_goal}};
  s.walker_noise = o.human_noise;
  s.walkers_known_velocity = true;
  return s;
}

Scenario static_field_scenario(const std::vector<Vec2>& humans, const Vec2& robot_start, const Vec2& goal,
                               double duration) {
  Scenario s;
  s.kind = ScenarioKind::static_field;
  s.robot0 = {robot_start, Vec2::Zero()};
  s.goal = goal;
  s.duration = duration;
  s.predictor.kind = PredictorKind::constant_velocity_gaussian;
  s.predictor.noise_cov = 0.0025 * Mat2::Identity();
  const int frames = static_cast<int>(std::ceil(duration / 0.4)) + 16;
  std::vector<TrajectoryRecord> records;
  for (int f = 0; f <= frames; ++f) {
    for (std::size_t i = 0; i < humans.size(); ++i) {
      records.push_back({f, static_cast<int>(i) + 1, humans[i](0), humans[i](1)});
    }
  }
  s.recorded = std::make_shared<const TrajectoryDataset>(std::move(records));
  s.start_frame = 1;
  return s;
}

Scenario static_field_scenario(const StaticFieldOptions& o) {
  require(o.humans >= 0, "static field needs a nonnegative number of humans");
  std::mt19937_64 rng(mix64(o.layout_seed));
  std::uniform_real_distribution<double> ux(o.field_min(0), o.field_max(0));
  std::uniform_real_distribution<double> uy(o.field_min(1), o.field_max(1));
  std::vector<Vec2> humans;
  while (static_cast<int>(humans.size()) < o.humans) {
    const Vec2 p(ux(rng), uy(rng));
    if ((p - o.robot_start).norm() < o.start_clearance) continue;
    humans.push_back(p);
  }
  return static_field_scenario(humans, o.robot_start, o.robot_goal, o.duration);
}

Scenario dataset_scenario(std::shared_ptr<const TrajectoryDataset> dataset, int start_frame,
                          const RobotState& robot0, const Vec2& goal, double duration) {
  require(dataset != nullptr, "dataset scenario needs a dataset");
  Scenario s;
  s.kind = ScenarioKind::dataset_replay;
  s.robot0 = robot0;
  s.goal = goal;
  s.duration = duration;
  s.recorded = std::move(dataset);
  s.start_frame = start_frame;
  return s;
}

MetricStats summarize(std::span<const double> values) {
  MetricStats s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / s.n);
  return s;
}

std::map<std::string, MetricStats> aggregate(std::span<const EpisodeResult> episodes) {
  std::vector<double> dist, goal, coll, yield;
  for (const auto& e : episodes) {
    dist.push_back(e.min_robot_human_distance);
    goal.push_back(e.normalized_goal_distance);
    coll.push_back(e.collided ? 1.0 : 0.0);
    if (e.yielded) yield.push_back(*e.yielded ? 1.0 : 0.0);
  }
  std::map<std::string, MetricStats> out;
  out["min_robot_human_distance"] = summarize(dist);
  out["normalized_goal_distance"] = summarize(goal);
  out["collision_rate"] = summarize(coll);
  if (!yield.empty()) out["yield_probability"] = summarize(yield);
  return out;
}

std::uint64_t episode_seed(std::uint64_t master_seed, int run) {
  return stream_seed(master_seed, static_cast<std::uint64_t>(run));
}

Vec2 randomized_goal(const Vec2& goal, double radius, std::uint64_t seed) {
  if (radius <= 0.0) return goal;
  std::mt19937_64 rng(mix64(seed ^ 0x676f616cULL));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double r = radius * std::sqrt(uniform(rng));
  const double theta = 2.0 * std::numbers::pi * uniform(rng);
  return goal + r * Vec2(std::cos(theta), std::sin(theta));
}

BenchmarkResult run_benchmark(const Scenario& scenario, const ControllerFactory& make_controller,
                              const TimeGrid& grid, const BenchmarkOptions& options) {
  require(options.runs >= 1, "benchmark needs at least one run");
  BenchmarkResult out;
  out.episodes.resize(static_cast<std::size_t>(options.runs));
  for (int i = 0; i < options.runs; ++i) out.seeds.push_back(episode_seed(options.master_seed, i));
  out.controller = make_controller()->name();
  parallel_for(out.episodes.size(), [&](std::size_t i) {
    Scenario s = scenario;
    s.goal = randomized_goal(scenario.goal, options.goal_radius, out.seeds[i]);
    auto controller = make_controller();
    out.episodes[i] = run_episode(s, *controller, out.seeds[i], grid);
  });
  out.stats = aggregate(out.episodes);
  return out;
}

}  // namespace rssac
