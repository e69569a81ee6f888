#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "rssac/config.hpp"

using namespace rssac;
using nlohmann::json;

namespace {

std::string error_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty config gives the reference parameters on the intersection") {
  const RunConfig cfg = config_from_json(json::object());
  CHECK(cfg.grid.dt_c == 0.02);
  CHECK(cfg.grid.dt_o() == doctest::Approx(0.4));
  CHECK(cfg.grid.horizon_steps == 12);
  CHECK(cfg.cost.Q == Vec4(0.5, 0.5, 0.0, 0.0).asDiagonal().toDenseMatrix());
  CHECK(cfg.cost.control_weight == 0.2);
  CHECK(cfg.cost.alpha == 100.0);
  CHECK(cfg.cost.lambda == 0.2);
  CHECK(cfg.cost.beta == 0.1);
  CHECK(cfg.rssac.samples == 30);
  CHECK(cfg.rssac.t_calc == 0.1);
  CHECK(cfg.rssac.replan_interval == 0.1);
  CHECK(cfg.rssac.u_max == 5.0);
  CHECK(cfg.rssac.epsilons.size() == 9);
  CHECK(cfg.rssac.nominal_candidate_count() == 17);
  CHECK(cfg.exhaustive.depth == 4);
  CHECK(cfg.scenario.kind == ScenarioKind::intersection);
  CHECK(cfg.controller == "rssac");
  const Scenario s = build_scenario(cfg);
  CHECK(s.robot0.position == Vec2(0, -5));
  CHECK(s.goal == Vec2(0, 5));
  REQUIRE(s.walkers.size() == 1);
  CHECK(s.walkers[0].start == Vec2(-5, 0));
  CHECK(s.walkers[0].velocity == Vec2(1, 0));
  CHECK(s.collision_threshold == 0.4);
}

TEST_CASE("dump and load round-trip") {
  json j = {{"rssac", {{"sigma", 0.5}, {"samples", 12}}},
            {"cost", {{"alpha", 80.0}, {"Q", {1.0, 2.0, 0.0, 0.5}}}},
            {"predictor", {{"kind", "multimodal_mixture"}, {"noise_cov", {0.04, 0.02}}}},
            {"scenario", {{"kind", "static_field"}, {"duration", 6.0}, {"static_field", {{"humans", 7}}}}},
            {"controller", "nominal_only"},
            {"seed", 99},
            {"runs", 3}};
  const RunConfig a = config_from_json(j);
  const json dumped = config_to_json(a);
  const RunConfig b = config_from_json(dumped);
  CHECK(config_to_json(b) == dumped);
  CHECK(b.rssac.sigma == 0.5);
  CHECK(b.cost.Q(1, 1) == 2.0);
  CHECK(b.predictor.kind == PredictorKind::multimodal_mixture);
  CHECK(b.predictor.noise_cov(1, 1) == 0.02);
  CHECK(b.scenario.static_field.humans == 7);
  CHECK(b.seed == 99);
}

TEST_CASE("matrices accept a diagonal or a full matrix") {
  const auto diag = config_from_json({{"cost", {{"Q", {0.5, 0.5, 0.0, 0.0}}}}});
  const auto full = config_from_json(
      {{"cost", {{"Q", {{0.5, 0.0, 0.0, 0.0}, {0.0, 0.5, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}}}}}});
  CHECK(diag.cost.Q == full.cost.Q);
  CHECK(error_of({{"cost", {{"Q", {1.0, 2.0}}}}}).find("cost.Q") != std::string::npos);
}

TEST_CASE("invalid fields are named") {
  CHECK(error_of({{"rssac", {{"sigma", -1.0}}}}).find("sigma") != std::string::npos);
  CHECK(error_of({{"rssac", {{"samples", "many"}}}}).find("rssac.samples") != std::string::npos);
  CHECK(error_of({{"rssac", {{"sigmaa", 1.0}}}}).find("rssac.sigmaa") != std::string::npos);
  CHECK(error_of({{"bogus", 1}}).find("bogus") != std::string::npos);
  CHECK(error_of({{"rssac", {{"epsilons", {0.0, 2e-3, 1e-3}}}}}).find("epsilon") != std::string::npos);
  CHECK(error_of({{"grid", {{"dt_o", 0.41}}}}).find("dt_o") != std::string::npos);
  CHECK(error_of({{"cost", {{"Q", {-1.0, 0.5, 0.0, 0.0}}}}}).find("Q") != std::string::npos);
  CHECK(error_of({{"cost", {{"r", 0.0}}}}).find("r") != std::string::npos);
  CHECK(error_of({{"controller", "magic"}}).find("magic") != std::string::npos);
  CHECK(error_of({{"scenario", {{"kind", "maze"}}}}).find("maze") != std::string::npos);
  CHECK(error_of({{"scenario", {{"intersection", {{"robot_start", {1.0}}}}}}}).find("scenario.intersection.robot_start") !=
        std::string::npos);
  CHECK(error_of({{"runs", 0}}).find("runs") != std::string::npos);
}

TEST_CASE("config files resolve dataset paths relative to themselves") {
  const auto dir = std::filesystem::temp_directory_path() / "rssac_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "tracks.txt") << "0 1 3 0\n1 1 3 0\n2 1 3 0\n3 1 3 0\n";
    std::ofstream(dir / "cfg.json") << R"({"scenario": {"kind": "dataset_replay", "dataset": "tracks.txt",
      "start_frame": 1, "duration": 0.4, "goal": [5, 0]}})";
  }
  const RunConfig cfg = load_config(dir / "cfg.json");
  const Scenario s = build_scenario(cfg);
  CHECK(s.kind == ScenarioKind::dataset_replay);
  CHECK(s.recorded->size() == 4);
  std::ofstream(dir / "broken.json") << "{ not json";
  try {
    load_config(dir / "broken.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("controllers are built by name") {
  const RunConfig cfg = config_from_json(json::object());
  for (const std::string name : {"rssac", "nominal_only", "exhaustive", "zero"}) {
    CHECK(make_controller(name, cfg)->name() == name);
  }
  CHECK_THROWS_AS(make_controller("magic", cfg), Error);
}

TEST_CASE("shipped configs load and build their scenarios") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(RSSAC_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const RunConfig cfg = load_config(entry.path());
    CHECK_NOTHROW(build_scenario(cfg));
    ++seen;
  }
  CHECK(seen >= 3);
}
