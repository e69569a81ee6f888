#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "rssac/baselines.hpp"
#include "rssac/rssac.hpp"
#include "rssac/simulator.hpp"

namespace rssac {

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::intersection;
  double duration = 14.0;
  double collision_threshold = 0.4;
  double reference_speed = 1.0;
  double replan_threshold = 2.0;
  int history_len = 8;
  /// Radius of the disk benchmark goals are drawn from (0 disables randomisation).
  double goal_radius = 1.0;
  IntersectionOptions intersection;
  StaticFieldOptions static_field;
  /// dataset_replay only; relative paths resolve against the config file's directory.
  std::string dataset;
  int start_frame = 1;
  Vec2 robot_start = Vec2::Zero();
  Vec2 robot_velocity = Vec2::Zero();
  Vec2 goal = Vec2(5.0, 0.0);
};

/// Full parameter tree of a run. Every field has a default so an empty JSON
/// object describes the intersection scenario under the reference parameters.
struct RunConfig {
  TimeGrid grid;
  CostParams cost;
  RssacConfig rssac;
  ExhaustiveConfig exhaustive;
  PredictorConfig predictor;
  ScenarioConfig scenario;
  std::string controller = "rssac";
  std::uint64_t seed = 0;
  int runs = 100;
  std::filesystem::path base_dir;

  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

Scenario build_scenario(const RunConfig& cfg);

/// Controller names: rssac, nominal_only, exhaustive, zero.
std::unique_ptr<Controller> make_controller(const std::string& name, const RunConfig& cfg);
ControllerFactory controller_factory(const std::string& name, const RunConfig& cfg);

nlohmann::json episode_to_json(const EpisodeResult& e, bool with_timing);

}  // namespace rssac
