#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rssac/config.hpp"

namespace rssac {

struct CommandOptions {
  /// Empty means built-in defaults (the intersection scenario).
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<double> sigma;
  std::vector<std::string> controllers;
  std::filesystem::path out;
  /// run: optional per-step state log (CSV).
  std::filesystem::path log;
  /// Include wall-clock fields in episode records. Off keeps outputs reproducible.
  bool timing = false;
  /// sweep: "sigma", "alpha" or "lambda" and its values.
  std::string parameter;
  std::vector<double> values;
};

/// Loads the config (if any) and applies flag overrides.
RunConfig resolve_config(const CommandOptions& options);

int cmd_run(const CommandOptions& options, std::ostream& log);
int cmd_bench(const CommandOptions& options, std::ostream& log);
int cmd_sweep(const CommandOptions& options, std::ostream& log);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace rssac
