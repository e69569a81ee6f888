#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "rssac/commands.hpp"
#include "rssac/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive sequential action control: runs, benchmarks and parameter sweeps"};
  app.require_subcommand(1);

  rssac::CommandOptions opt;
  std::uint64_t seed = 0;
  int runs = 0;
  double sigma = 0.0;
  std::string config;
  std::string out;
  std::string log;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file (defaults to the intersection scenario)");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--controller", opt.controllers, "rssac, nominal_only, exhaustive or zero")->delimiter(',');
    sub->add_option("--out", out, "Output path");
  };

  auto* run = app.add_subcommand("run", "Run one seeded episode");
  common(run);
  run->add_option("--sigma", sigma, "Risk sensitivity");
  run->add_option("--log", log, "Per-step state log (CSV)");

  auto* bench = app.add_subcommand("bench", "Benchmark controllers over seeded episodes");
  common(bench);
  bench->add_option("--sigma", sigma, "Risk sensitivity");
  bench->add_option("--runs", runs, "Episodes per controller")->check(CLI::PositiveNumber);
  bench->add_flag("--timing", opt.timing, "Record wall-clock cycle times in episode records");

  std::vector<double> sigmas, alphas, lambdas;
  auto* sweep = app.add_subcommand("sweep", "One benchmark per parameter value");
  common(sweep);
  sweep->add_option("--runs", runs, "Episodes per value")->check(CLI::PositiveNumber);
  auto* o_sigma = sweep->add_option("--sigma", sigmas, "Risk sensitivities")->delimiter(',');
  auto* o_alpha = sweep->add_option("--alpha", alphas, "Collision peak values")->delimiter(',');
  auto* o_lambda = sweep->add_option("--lambda", lambdas, "Collision bandwidths")->delimiter(',');
  o_sigma->excludes(o_alpha)->excludes(o_lambda);
  o_alpha->excludes(o_lambda);
  sweep->add_flag("--timing", opt.timing, "Record wall-clock cycle times in episode records");

  CLI11_PARSE(app, argc, argv);

  opt.config = config;
  opt.out = out;
  opt.log = log;
  for (auto* sub : {run, bench, sweep}) {
    if (sub->count("--seed")) opt.seed = seed;
  }
  if (bench->count("--runs") || sweep->count("--runs")) opt.runs = runs;
  if (run->parsed() && run->count("--sigma")) opt.sigma = sigma;
  if (bench->parsed() && bench->count("--sigma")) opt.sigma = sigma;

  if (run->parsed()) return rssac::cmd_run(opt, std::cerr);
  if (bench->parsed()) return rssac::cmd_bench(opt, std::cerr);

  if (!sigmas.empty()) opt.parameter = "sigma", opt.values = sigmas;
  if (!alphas.empty()) opt.parameter = "alpha", opt.values = alphas;
  if (!lambdas.empty()) opt.parameter = "lambda", opt.values = lambdas;
  return rssac::cmd_sweep(opt, std::cerr);
}
