#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qosmarket/dynamics.hpp"
#include "qosmarket/multigood.hpp"

namespace qosmarket {

struct MultigoodSpec {
  std::vector<ResponseFunction> fs1;
  std::vector<ResponseFunction> fs2;
  double angle = 0.0;
};

struct DynamicsSpec {
  DynamicsConfig config;
  Schedule schedule;
  StrategyProfile initial;
};

/// A scenario file: measure plus either a homogeneous producer count or one
/// response function per producer, with optional dynamics / multigood blocks.
struct Scenario {
  Measure measure;
  int n = 0;
  std::vector<ResponseFunction> fs;  // empty means homogeneous
  bool heterogeneous = false;
  double eps = kEps;  // comparison tolerance for the checks

  std::optional<StrategyProfile> profile;
  std::optional<StrategyProfile> others;
  std::optional<std::vector<int>> pi;
  std::optional<DynamicsSpec> dynamics;
  std::optional<MultigoodSpec> multigood;
};

struct CliOptions {
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  int grid = 10000;
  double pour_step = 1e-5;
  std::optional<int> max_steps;
  std::string oracle_mode = "loads";  // oracle-check: loads | best-response
};

Scenario parse_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

/// Runs one subcommand against a scenario. Returns 0 on success, 2 when a
/// check-style command fails its check, 1 on error (the caller maps thrown
/// Errors to 1).
int execute(const std::string& command, const Scenario& scenario, const CliOptions& options,
            std::ostream& out, std::ostream& err);

extern const std::vector<std::string> kCommands;

}  // namespace qosmarket
