#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rssac/config.hpp"
#include "rssac/parallel.hpp"
#include "rssac/risk.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

rssac::RunConfig parse_config(const std::string& text) {
  return rssac::config_from_json(text.empty() ? json::object() : json::parse(text));
}

std::string episode_json(const std::string& config, const std::string& controller, std::uint64_t seed) {
  const rssac::RunConfig cfg = parse_config(config);
  const rssac::Scenario scenario = rssac::build_scenario(cfg);
  auto c = rssac::make_controller(controller.empty() ? cfg.controller : controller, cfg);
  rssac::EpisodeResult e;
  {
    py::gil_scoped_release release;
    e = rssac::run_episode(scenario, *c, seed, cfg.grid);
  }
  json out = rssac::episode_to_json(e, true);
  json log = json::array();
  for (const auto& s : e.log) log.push_back({s.t, s.x(0), s.x(1), s.x(2), s.x(3), s.u(0), s.u(1), s.min_distance});
  out["log"] = log;
  return out.dump();
}

std::string benchmark_json(const std::string& config, const std::string& controller, int runs, std::uint64_t seed) {
  const rssac::RunConfig cfg = parse_config(config);
  const rssac::Scenario scenario = rssac::build_scenario(cfg);
  rssac::BenchmarkOptions o;
  o.runs = runs;
  o.master_seed = seed;
  o.goal_radius = cfg.scenario.goal_radius;
  rssac::BenchmarkResult r;
  {
    py::gil_scoped_release release;
    r = rssac::run_benchmark(scenario, rssac::controller_factory(controller.empty() ? cfg.controller : controller, cfg),
                             cfg.grid, o);
  }
  json stats = json::object();
  for (const auto& [name, s] : r.stats) stats[name] = {{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
  json episodes = json::array();
  for (const auto& e : r.episodes) episodes.push_back(rssac::episode_to_json(e, false));
  return json{{"controller", r.controller}, {"seeds", r.seeds}, {"stats", stats}, {"episodes", episodes}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Risk-sensitive sequential action control core";

  py::register_exception<rssac::Error>(m, "RssacError", PyExc_ValueError);

  m.def("entropic_risk", [](const std::vector<double>& costs, double sigma) { return rssac::entropic_risk(costs, sigma); },
        py::arg("costs"), py::arg("sigma"));
  m.def("risk_weights", [](const std::vector<double>& costs, double sigma) { return rssac::risk_weights(costs, sigma); },
        py::arg("costs"), py::arg("sigma"));
  m.def(
      "optimal_action",
      [](const rssac::Vec4& rho, const rssac::Vec4& x, const rssac::Vec2& u, double r, double u_max) {
        const auto a = rssac::optimal_action(rho, x, u, r, u_max);
        return py::make_tuple(a.v, a.mig);
      },
      py::arg("rho"), py::arg("x"), py::arg("u"), py::arg("r") = 0.2, py::arg("u_max") = 5.0);
  m.def(
      "euler_step", [](const rssac::Vec4& x, const rssac::Vec2& u, double dt) { return rssac::euler_step(x, u, dt); },
      py::arg("x"), py::arg("u"), py::arg("dt") = 0.02);

  m.def("normalize_config", [](const std::string& text) { return rssac::config_to_json(parse_config(text)).dump(); },
        py::arg("config") = "");
  m.def("load_config", [](const std::string& path) { return rssac::config_to_json(rssac::load_config(path)).dump(); },
        py::arg("path"));
  m.def("run_episode", &episode_json, py::arg("config") = "", py::arg("controller") = "", py::arg("seed") = 0);
  m.def("run_benchmark", &benchmark_json, py::arg("config") = "", py::arg("controller") = "", py::arg("runs") = 1,
        py::arg("seed") = 0);

  m.def(
      "parse_trajectory_file",
      [](const std::string& text) {
        const rssac::TrajectoryDataset ds = rssac::parse_trajectory_file(text);
        std::vector<std::tuple<int, int, double, double>> out;
        for (const auto& r : ds.records()) out.emplace_back(r.frame, r.ped_id, r.x, r.y);
        return out;
      },
      py::arg("text"));

  m.def("worker_count", &rssac::worker_count);
  m.def("set_worker_count", &rssac::set_worker_count, py::arg("workers"));
}
