#include "rssac/commands.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace rssac {
namespace {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write '" + path.string() + "'");
  out.exceptions(std::ios::badbit | std::ios::failbit);
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  return std::filesystem::path(p.string() + suffix);
}

std::vector<std::string> controllers_of(const CommandOptions& o, const RunConfig& cfg) {
  if (o.controllers.empty()) return {cfg.controller};
  return o.controllers;
}

void write_stats_rows(std::ostream& out, const std::string& prefix, const BenchmarkResult& r) {
  for (const auto& [metric, s] : r.stats) {
    out << prefix << r.controller << '\t' << metric << '\t' << format_double(s.mean) << '\t' << format_double(s.std)
        << '\t' << s.n << '\n';
  }
}

void write_episode_records(std::ostream& out, const BenchmarkResult& r, bool timing, const json& extra) {
  for (std::size_t i = 0; i < r.episodes.size(); ++i) {
    json rec = extra;
    rec["controller"] = r.controller;
    rec["run"] = i;
    rec["seed"] = r.seeds[i];
    rec.update(episode_to_json(r.episodes[i], timing));
    out << rec.dump() << '\n';
  }
}

BenchmarkResult bench_one(const RunConfig& cfg, const std::string& controller) {
  const Scenario scenario = build_scenario(cfg);
  BenchmarkOptions bo;
  bo.runs = cfg.runs;
  bo.master_seed = cfg.seed;
  bo.goal_radius = cfg.scenario.goal_radius;
  return run_benchmark(scenario, controller_factory(controller, cfg), cfg.grid, bo);
}

template <typename F>
int guarded(std::ostream& log, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

RunConfig resolve_config(const CommandOptions& o) {
  RunConfig cfg;
  if (!o.config.empty()) {
    require(std::filesystem::exists(o.config), "config file '" + o.config.string() + "' does not exist");
    cfg = load_config(o.config);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.runs) cfg.runs = *o.runs;
  if (o.sigma) cfg.rssac.sigma = *o.sigma;
  if (o.controllers.size() == 1) cfg.controller = o.controllers.front();
  cfg.validate();
  return cfg;
}

int cmd_run(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = resolve_config(o);
    require(o.controllers.size() <= 1, "run takes a single controller");
    const Scenario scenario = build_scenario(cfg);
    auto controller = make_controller(cfg.controller, cfg);
    const EpisodeResult result = run_episode(scenario, *controller, cfg.seed, cfg.grid);

    json rec = episode_to_json(result, true);
    rec["controller"] = cfg.controller;
    rec["seed"] = cfg.seed;
    rec["scenario"] = to_string(cfg.scenario.kind);
    const auto out_path = o.out.empty() ? std::filesystem::path("result.json") : o.out;
    auto out = open_output(out_path);
    out << rec.dump(2) << '\n';

    if (!o.log.empty()) {
      auto csv = open_output(o.log);
      csv << "t,px,py,vx,vy,ux,uy,min_distance\n";
      for (const auto& e : result.log) {
        csv << format_double(e.t);
        for (int i = 0; i < 4; ++i) csv << ',' << format_double(e.x(i));
        csv << ',' << format_double(e.u(0)) << ',' << format_double(e.u(1)) << ',' << format_double(e.min_distance)
            << '\n';
      }
    }
    log << "wrote " << out_path.string() << '\n';
    return result.failed ? 2 : 0;
  });
}

int cmd_bench(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = resolve_config(o);
    const auto names = controllers_of(o, cfg);
    for (const auto& n : names) make_controller(n, cfg);
    const auto out_path = o.out.empty() ? std::filesystem::path("bench.tsv") : o.out;
    auto table = open_output(out_path);
    auto records = open_output(with_suffix(out_path, ".episodes.jsonl"));
    table << "controller\tmetric\tmean\tstd\tn\n";
    for (const auto& name : names) {
      const BenchmarkResult r = bench_one(cfg, name);
      write_stats_rows(table, "", r);
      write_episode_records(records, r, o.timing, json::object());
    }
    log << "wrote " << out_path.string() << '\n';
    return 0;
  });
}

int cmd_sweep(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    require(o.parameter == "sigma" || o.parameter == "alpha" || o.parameter == "lambda",
            "sweep needs one of --sigma, --alpha or --lambda with a list of values");
    require(!o.values.empty(), "sweep needs at least one value");
    CommandOptions base = o;
    base.sigma.reset();
    const RunConfig cfg0 = resolve_config(base);
    const auto names = controllers_of(o, cfg0);
    const auto out_path = o.out.empty() ? std::filesystem::path("sweep.tsv") : o.out;
    auto table = open_output(out_path);
    auto records = open_output(with_suffix(out_path, ".episodes.jsonl"));
    table << "parameter\tvalue\tcontroller\tmetric\tmean\tstd\tn\n";
    for (double value : o.values) {
      RunConfig cfg = cfg0;
      if (o.parameter == "sigma") cfg.rssac.sigma = value;
      if (o.parameter == "alpha") cfg.cost.alpha = value;
      if (o.parameter == "lambda") cfg.cost.lambda = value;
      cfg.validate();
      for (const auto& name : names) {
        const BenchmarkResult r = bench_one(cfg, name);
        write_stats_rows(table, o.parameter + '\t' + format_double(value) + '\t', r);
        write_episode_records(records, r, o.timing, json{{"parameter", o.parameter}, {"value", value}});
      }
    }
    log << "wrote " << out_path.string() << '\n';
    return 0;
  });
}

}  // namespace rssac
