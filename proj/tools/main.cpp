#include <CLI11.hpp>
#include <iostream>

#include "qosmarket/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"QoS market competition toolkit"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string oracle_mode = "loads";
  qosmarket::CliOptions options;
  std::string out_path;
  int max_steps = -1;

  for (const std::string& name : qosmarket::kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    if (name == "oracle-check") {
      sub->add_option("mode", oracle_mode, "what to cross-check: loads | best-response");
      sub->add_option("--scenario", scenario_path, "scenario JSON file");
    } else {
      sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    }
    sub->add_option("--out", out_path, "write the result to a file instead of stdout");
    sub->add_option("--seed", options.seed, "seed for randomized checks");
    sub->add_option("--grid", options.grid, "grid resolution for oracle searches");
    sub->add_option("--pour-step", options.pour_step, "mass increment of the pour oracle");
    sub->add_option("--max-steps", max_steps, "override the dynamics step budget");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  if (!out_path.empty()) options.out = out_path;
  if (max_steps > 0) options.max_steps = max_steps;
  options.oracle_mode = oracle_mode;

  try {
    qosmarket::Scenario scenario;
    if (!scenario_path.empty()) {
      scenario = qosmarket::parse_scenario(scenario_path);
    } else {
      scenario.measure = qosmarket::Measure::uniform();
      scenario.n = 1;
    }
    return qosmarket::execute(command, scenario, options, std::cout, std::cerr);
  } catch (const qosmarket::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
