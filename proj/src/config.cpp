#include "rssac/config.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>

namespace rssac {
namespace {

using nlohmann::json;

// Reads fields out of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), "config: '" + label() + "' must be an object");
  }
  /// Rejects any key that was never asked for.
  void done() const {
    for (const auto& [key, _] : j_.items()) {
      require(seen_.count(key) > 0, "config: unknown field '" + qualified(key) + "'");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error("config: invalid value for '" + qualified(key) + "'");
    }
  }

  void vec2(const std::string& key, Vec2& out) {
    std::vector<double> v;
    get(key, v);
    if (!j_.contains(key)) return;
    require(v.size() == 2, "config: '" + qualified(key) + "' must have 2 entries");
    out = Vec2(v[0], v[1]);
  }

  void mat2(const std::string& key, Mat2& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    out = read_matrix<2>(j_.at(key), qualified(key));
  }

  void mat4(const std::string& key, Mat4& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    out = read_matrix<4>(j_.at(key), qualified(key));
  }

  std::optional<Section> child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return std::optional<Section>(std::in_place, j_.at(key), qualified(key));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

 private:
  template <int N>
  static Eigen::Matrix<double, N, N> read_matrix(const json& v, const std::string& name) {
    Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
    try {
      if (v.is_array() && !v.empty() && v[0].is_number()) {
        // Diagonal shorthand.
        require(v.size() == N, "config: '" + name + "' diagonal must have " + std::to_string(N) + " entries");
        for (int i = 0; i < N; ++i) m(i, i) = v[static_cast<std::size_t>(i)].get<double>();
        return m;
      }
      require(v.is_array() && v.size() == N, "config: '" + name + "' must be a " + std::to_string(N) + "x" +
                                                 std::to_string(N) + " matrix or its diagonal");
      for (int i = 0; i < N; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        require(row.is_array() && row.size() == N, "config: '" + name + "' has a malformed row");
        for (int k = 0; k < N; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
      }
    } catch (const json::exception&) {
      throw Error("config: invalid value for '" + name + "'");
    }
    return m;
  }

  std::string label() const { return path_.empty() ? "<root>" : path_; }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Vec2& v) { return json::array({v(0), v(1)}); }

template <int N>
json mat_json(const Eigen::Matrix<double, N, N>& m) {
  json rows = json::array();
  for (int i = 0; i < N; ++i) {
    json row = json::array();
    for (int k = 0; k < N; ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  TimeGrid::make(grid.dt_c, grid.dt_o(), grid.horizon_steps);
  cost.validate();
  rssac.validate(grid);
  ExhaustiveConfig ex = exhaustive;
  ex.sigma = rssac.sigma;
  ex.samples = rssac.samples;
  ex.u_max = rssac.u_max;
  ex.validate(grid);
  predictor.validate();
  require(runs >= 1, "config: 'runs' must be at least 1");
  require(scenario.goal_radius >= 0.0, "config: 'scenario.goal_radius' must be nonnegative");
  static const std::set<std::string> names = {"rssac", "nominal_only", "exhaustive", "zero"};
  require(names.count(controller) > 0, "config: unknown controller '" + controller + "'");
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  {
    Section root(j, "");
    if (auto g = root.child("grid")) {
      double dt_c = cfg.grid.dt_c;
      double dt_o = cfg.grid.dt_o();
      int steps = cfg.grid.horizon_steps;
      g->get("dt_c", dt_c);
      g->get("dt_o", dt_o);
      g->get("horizon_steps", steps);
      cfg.grid = TimeGrid::make(dt_c, dt_o, steps);
      g->done();
    }
    if (auto c = root.child("cost")) {
      c->mat4("Q", cfg.cost.Q);
      c->get("r", cfg.cost.control_weight);
      c->get("alpha", cfg.cost.alpha);
      c->get("lambda", cfg.cost.lambda);
      c->get("beta", cfg.cost.beta);
      c->done();
    }
    if (auto r = root.child("rssac")) {
      r->get("sigma", cfg.rssac.sigma);
      r->get("samples", cfg.rssac.samples);
      r->get("t_calc", cfg.rssac.t_calc);
      r->get("replan_interval", cfg.rssac.replan_interval);
      r->get("u_max", cfg.rssac.u_max);
      r->get("epsilons", cfg.rssac.epsilons);
      r->get("nominal_magnitudes", cfg.rssac.nominal_magnitudes);
      r->get("nominal_headings", cfg.rssac.nominal_headings);
      r->done();
    }
    if (auto e = root.child("exhaustive")) {
      e->get("depth", cfg.exhaustive.depth);
      e->get("magnitudes", cfg.exhaustive.magnitudes);
      e->get("headings", cfg.exhaustive.headings);
      e->get("t_calc", cfg.exhaustive.t_calc);
      e->get("replan_interval", cfg.exhaustive.replan_interval);
      e->done();
    }
    if (auto p = root.child("predictor")) {
      std::string kind = to_string(cfg.predictor.kind);
      p->get("kind", kind);
      cfg.predictor.kind = parse_predictor_kind(kind);
      p->mat2("noise_cov", cfg.predictor.noise_cov);
      json modes;
      p->get("modes", modes);
      if (p->has("modes")) {
        require(modes.is_array(), "config: 'predictor.modes' must be an array");
        cfg.predictor.modes.clear();
        for (std::size_t i = 0; i < modes.size(); ++i) {
          Section m(modes[i], "predictor.modes[" + std::to_string(i) + "]");
          MixtureMode mode;
          m.get("heading", mode.heading);
          m.get("weight", mode.weight);
          m.done();
          cfg.predictor.modes.push_back(mode);
        }
      }
      p->done();
    }
    if (auto s = root.child("scenario")) {
      std::string kind = to_string(cfg.scenario.kind);
      s->get("kind", kind);
      cfg.scenario.kind = parse_scenario_kind(kind);
      s->get("duration", cfg.scenario.duration);
      s->get("collision_threshold", cfg.scenario.collision_threshold);
      s->get("reference_speed", cfg.scenario.reference_speed);
      s->get("replan_threshold", cfg.scenario.replan_threshold);
      s->get("history_len", cfg.scenario.history_len);
      s->get("goal_radius", cfg.scenario.goal_radius);
      if (auto in = s->child("intersection")) {
        auto& o = cfg.scenario.intersection;
        in->vec2("robot_start", o.robot_start);
        in->vec2("robot_velocity", o.robot_velocity);
        in->vec2("robot_goal", o.robot_goal);
        in->vec2("human_start", o.human_start);
        in->vec2("human_velocity", o.human_velocity);
        in->vec2("human_goal", o.human_goal);
        in->mat2("human_noise", o.human_noise);
        in->done();
      }
      if (auto sf = s->child("static_field")) {
        auto& o = cfg.scenario.static_field;
        sf->get("humans", o.humans);
        sf->vec2("robot_start", o.robot_start);
        sf->vec2("robot_goal", o.robot_goal);
        sf->vec2("field_min", o.field_min);
        sf->vec2("field_max", o.field_max);
        sf->get("start_clearance", o.start_clearance);
        sf->get("layout_seed", o.layout_seed);
        sf->done();
      }
      s->get("dataset", cfg.scenario.dataset);
      s->get("start_frame", cfg.scenario.start_frame);
      s->vec2("robot_start", cfg.scenario.robot_start);
      s->vec2("robot_velocity", cfg.scenario.robot_velocity);
      s->vec2("goal", cfg.scenario.goal);
      s->done();
    }
    root.get("controller", cfg.controller);
    root.get("seed", cfg.seed);
    root.get("runs", cfg.runs);
    root.done();
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json modes = json::array();
  for (const auto& m : cfg.predictor.modes) modes.push_back({{"heading", m.heading}, {"weight", m.weight}});
  const auto& in = cfg.scenario.intersection;
  const auto& sf = cfg.scenario.static_field;
  return json{
      {"grid", {{"dt_c", cfg.grid.dt_c}, {"dt_o", cfg.grid.dt_o()}, {"horizon_steps", cfg.grid.horizon_steps}}},
      {"cost",
       {{"Q", mat_json<4>(cfg.cost.Q)},
        {"r", cfg.cost.control_weight},
        {"alpha", cfg.cost.alpha},
        {"lambda", cfg.cost.lambda},
        {"beta", cfg.cost.beta}}},
      {"rssac",
       {{"sigma", cfg.rssac.sigma},
        {"samples", cfg.rssac.samples},
        {"t_calc", cfg.rssac.t_calc},
        {"replan_interval", cfg.rssac.replan_interval},
        {"u_max", cfg.rssac.u_max},
        {"epsilons", cfg.rssac.epsilons},
        {"nominal_magnitudes", cfg.rssac.nominal_magnitudes},
        {"nominal_headings", cfg.rssac.nominal_headings}}},
      {"exhaustive",
       {{"depth", cfg.exhaustive.depth},
        {"magnitudes", cfg.exhaustive.magnitudes},
        {"headings", cfg.exhaustive.headings},
        {"t_calc", cfg.exhaustive.t_calc},
        {"replan_interval", cfg.exhaustive.replan_interval}}},
      {"predictor",
       {{"kind", to_string(cfg.predictor.kind)}, {"noise_cov", mat_json<2>(cfg.predictor.noise_cov)}, {"modes", modes}}},
      {"scenario",
       {{"kind", to_string(cfg.scenario.kind)},
        {"duration", cfg.scenario.duration},
        {"collision_threshold", cfg.scenario.collision_threshold},
        {"reference_speed", cfg.scenario.reference_speed},
        {"replan_threshold", cfg.scenario.replan_threshold},
        {"history_len", cfg.scenario.history_len},
        {"goal_radius", cfg.scenario.goal_radius},
        {"intersection",
         {{"robot_start", vec_json(in.robot_start)},
          {"robot_velocity", vec_json(in.robot_velocity)},
          {"robot_goal", vec_json(in.robot_goal)},
          {"human_start", vec_json(in.human_start)},
          {"human_velocity", vec_json(in.human_velocity)},
          {"human_goal", vec_json(in.human_goal)},
          {"human_noise", mat_json<2>(in.human_noise)}}},
        {"static_field",
         {{"humans", sf.humans},
          {"robot_start", vec_json(sf.robot_start)},
          {"robot_goal", vec_json(sf.robot_goal)},
          {"field_min", vec_json(sf.field_min)},
          {"field_max", vec_json(sf.field_max)},
          {"start_clearance", sf.start_clearance},
          {"layout_seed", sf.layout_seed}}},
        {"dataset", cfg.scenario.dataset},
        {"start_frame", cfg.scenario.start_frame},
        {"robot_start", vec_json(cfg.scenario.robot_start)},
        {"robot_velocity", vec_json(cfg.scenario.robot_velocity)},
        {"goal", vec_json(cfg.scenario.goal)}}},
      {"controller", cfg.controller},
      {"seed", cfg.seed},
      {"runs", cfg.runs}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

Scenario build_scenario(const RunConfig& cfg) {
  const auto& sc = cfg.scenario;
  Scenario s;
  switch (sc.kind) {
    case ScenarioKind::intersection: {
      IntersectionOptions o = sc.intersection;
      o.duration = sc.duration;
      o.reference_speed = sc.reference_speed;
      s = intersection_scenario(o);
      break;
    }
    case ScenarioKind::static_field: {
      StaticFieldOptions o = sc.static_field;
      o.duration = sc.duration;
      s = static_field_scenario(o);
      break;
    }
    case ScenarioKind::dataset_replay: {
      require(!sc.dataset.empty(), "config: 'scenario.dataset' is required for dataset_replay");
      std::filesystem::path p(sc.dataset);
      if (p.is_relative() && !cfg.base_dir.empty()) p = cfg.base_dir / p;
      auto ds = std::make_shared<const TrajectoryDataset>(load_trajectory_file(p, cfg.grid.dt_o()));
      s = dataset_scenario(ds, sc.start_frame, {sc.robot_start, sc.robot_velocity}, sc.goal, sc.duration);
      break;
    }
  }
  s.predictor = cfg.predictor;
  s.collision_threshold = sc.collision_threshold;
  s.reference_speed = sc.reference_speed;
  s.replan_threshold = sc.replan_threshold;
  s.history_len = sc.history_len;
  s.validate(cfg.grid);
  return s;
}

std::unique_ptr<Controller> make_controller(const std::string& name, const RunConfig& cfg) {
  std::shared_ptr<const Predictor> predictor = make_predictor(cfg.predictor, cfg.grid.dt_o());
  if (name == "rssac") return std::make_unique<RssacController>(cfg.rssac, cfg.cost, cfg.grid, predictor);
  if (name == "nominal_only") return make_nominal_only_controller(cfg.rssac, cfg.cost, cfg.grid, predictor);
  if (name == "exhaustive") {
    ExhaustiveConfig ex = cfg.exhaustive;
    ex.sigma = cfg.rssac.sigma;
    ex.samples = cfg.rssac.samples;
    ex.u_max = cfg.rssac.u_max;
    return std::make_unique<ExhaustiveTreeSearchController>(ex, cfg.cost, cfg.grid, predictor);
  }
  if (name == "zero") return std::make_unique<ZeroController>(cfg.grid, cfg.rssac.u_max, cfg.rssac.replan_cells(cfg.grid));
  throw Error("unknown controller '" + name + "'");
}

ControllerFactory controller_factory(const std::string& name, const RunConfig& cfg) {
  make_controller(name, cfg);  // validate eagerly
  return [name, cfg] { return make_controller(name, cfg); };
}

nlohmann::json episode_to_json(const EpisodeResult& e, bool with_timing) {
  json j{{"min_robot_human_distance", e.min_robot_human_distance},
         {"normalized_goal_distance", e.normalized_goal_distance},
         {"collided", e.collided},
         {"yielded", e.yielded ? json(*e.yielded) : json(nullptr)},
         {"goal", vec_json(e.goal)},
         {"failed", e.failed},
         {"cycles", e.cycle_times.size()}};
  if (!e.error.empty()) j["error"] = e.error;
  if (with_timing && !e.cycle_times.empty()) {
    std::vector<double> t = e.cycle_times;
    std::sort(t.begin(), t.end());
    double sum = 0.0;
    for (double v : t) sum += v;
    j["cycle_time_mean"] = sum / static_cast<double>(t.size());
    j["cycle_time_p95"] = t[std::min(t.size() - 1, static_cast<std::size_t>(0.95 * static_cast<double>(t.size())))];
    j["cycle_time_max"] = t.back();
  }
  return j;
}

}  // namespace rssac
