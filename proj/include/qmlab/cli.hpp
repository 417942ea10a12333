#pragma once

#include "qmlab/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qmlab::cli {

enum class Format { json, csv };

struct Budgets {
  std::optional<std::size_t> max_length, doublings, iters, truncation;
};

struct RunConfig {
  std::string command;
  /// psl2z: count, defect or homog.
  std::string subcommand;
  /// Descriptors ("group", "qm", "qm2", "action", "lift", ...) and
  /// per-command fields ("word", "matrix", "witness", ...).
  config::Json params = config::Json::object();
  Budgets budgets;
  std::string output_path;
  std::optional<Format> format;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

const std::vector<std::string>& commands();

/// Splits a config document into command, budgets, output and descriptors.
/// Throws config::ConfigError.
RunConfig parse_run_config(const config::Json& doc);

/// Merges `overrides` on top of `base` (non-empty fields win).
RunConfig merge(RunConfig base, const RunConfig& overrides);

/// Runs the command and writes the report to config.output_path, or to `out`
/// when no path is set. Nothing is written unless the report is complete.
/// Diagnostics go to `err`. Returns 0 when every certified bound holds, 1
/// on a violation, 2 on invalid configuration.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Report text without writing anything; throws config::ConfigError on bad
/// input. `status` receives 0 or 1.
std::string render(const RunConfig& config, int& status);

}  // namespace qmlab::cli
