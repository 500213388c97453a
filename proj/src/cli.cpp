#include "qosmarket/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qosmarket/json_io.hpp"
#include "qosmarket/oracle.hpp"

namespace qosmarket {

const std::vector<std::string> kCommands = {
    "loads",     "consumer-eq",  "fine-nash", "coarse-check", "best-response",
    "dynamics",  "tilde",        "hetero-nash", "mainstreet", "oracle-check"};

namespace {

StrategyProfile profile_from_json(const Json& j, const std::string& path, bool unit_range) {
  if (!j.is_array()) throw Error("schema-error", path + " must be an array of numbers");
  StrategyProfile out;
  int i = 0;
  for (const Json& v : j) {
    if (!v.is_number())
      throw Error("schema-error", path + "/" + std::to_string(i) + " must be a number");
    out.push_back(v.get<double>());
    if (unit_range && (out.back() < 0.0 || out.back() > 1.0))
      throw Error("invariant-violation", path + "/" + std::to_string(i) + " must lie in [0,1]");
    ++i;
  }
  return out;
}

std::vector<ResponseFunction> responses_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw Error("schema-error", path + " must be an array");
  std::vector<ResponseFunction> fs;
  int i = 0;
  for (const Json& f : j) fs.push_back(response_from_json(f, path + "/" + std::to_string(i++)));
  return fs;
}

DynamicsSpec dynamics_from_json(const Json& j, int n) {
  if (!j.is_object()) throw Error("schema-error", "/dynamics must be an object");
  DynamicsSpec spec;

  const std::string pref = j.value("preference", std::string("coarse"));
  if (pref == "coarse")
    spec.config.preference = Preference::Coarse;
  else if (pref == "fine")
    spec.config.preference = Preference::Fine;
  else
    throw Error("schema-error", "/dynamics/preference must be \"coarse\" or \"fine\"");

  if (!j.contains("rule")) {
    spec.config.rule.kind = DynamicsRule::Best;
  } else if (j["rule"].is_string()) {
    const std::string r = j["rule"].get<std::string>();
    if (r != "best") throw Error("schema-error", "/dynamics/rule must be \"best\" or an object");
    spec.config.rule.kind = DynamicsRule::Best;
  } else if (j["rule"].is_object()) {
    const Json& r = j["rule"];
    const std::string kind = r.value("kind", std::string());
    if (kind == "best") {
      spec.config.rule.kind = DynamicsRule::Best;
    } else if (kind == "delta-better") {
      spec.config.rule.kind = DynamicsRule::DeltaBetter;
      if (!r.contains("delta") || !r["delta"].is_number())
        throw Error("schema-error", "/dynamics/rule/delta must be a number");
      spec.config.rule.delta = r["delta"].get<double>();
      if (spec.config.rule.delta <= 0.0)
        throw Error("invariant-violation", "/dynamics/rule/delta must be positive");
      spec.config.rule.adversarial = r.value("adversarial", false);
    } else if (kind == "scripted") {
      spec.config.rule.kind = DynamicsRule::Scripted;
      if (!r.contains("moves") || !r["moves"].is_array())
        throw Error("schema-error", "/dynamics/rule/moves must be an array of profiles");
      int i = 0;
      for (const Json& m : r["moves"])
        spec.config.rule.moves.push_back(
            profile_from_json(m, "/dynamics/rule/moves/" + std::to_string(i++), true));
      spec.config.rule.require_best = r.value("require_best", false);
    } else {
      throw Error("schema-error", "/dynamics/rule/kind must be best|delta-better|scripted");
    }
  } else {
    throw Error("schema-error", "/dynamics/rule must be a string or object");
  }

  spec.config.lazy = j.value("lazy", false);
  spec.config.max_steps = j.value("max_steps", 200);
  spec.config.grid = j.value("grid", 200);
  if (spec.config.max_steps < 1)
    throw Error("invariant-violation", "/dynamics/max_steps must be >= 1");

  const Json& sj = j.contains("schedule") ? j["schedule"] : Json::object();
  const std::string kind = sj.is_object() ? sj.value("kind", std::string("sequential-round-robin"))
                                          : std::string("sequential-round-robin");
  if (kind == "sequential-round-robin") {
    spec.schedule = build_schedule(ScheduleKind::SequentialRoundRobin, n);
  } else if (kind == "simultaneous") {
    spec.schedule = build_schedule(ScheduleKind::Simultaneous, n);
  } else if (kind == "custom") {
    if (!sj.contains("subsets") || !sj["subsets"].is_array())
      throw Error("schema-error", "/dynamics/schedule/subsets must be an array");
    std::vector<std::vector<int>> subsets;
    for (const Json& sub : sj["subsets"]) {
      std::vector<int> one;
      for (const Json& v : sub) one.push_back(v.get<int>());
      subsets.push_back(one);
    }
    spec.schedule = build_schedule(ScheduleKind::Custom, n, std::move(subsets));
  } else {
    throw Error("schema-error", "/dynamics/schedule/kind unknown");
  }

  if (!j.contains("initial"))
    throw Error("schema-error", "/dynamics/initial profile is required");
  spec.initial = profile_from_json(j["initial"], "/dynamics/initial", true);
  if (static_cast<int>(spec.initial.size()) != n)
    throw Error("invariant-violation", "/dynamics/initial must list one level per producer");
  return spec;
}

std::string format_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_output(const std::string& text, const CliOptions& options, std::ostream& out) {
  if (options.out) {
    std::ofstream file(*options.out);
    if (!file) throw Error("io-error", "cannot write " + *options.out);
    file << text;
  } else {
    out << text;
  }
}

std::string trajectory_csv(const Trajectory& traj, int n) {
  std::ostringstream csv;
  csv << "step,movers";
  for (int j = 0; j < n; ++j) csv << ",t_" << j;
  csv << ",l_noconsume";
  for (int j = 0; j < n; ++j) csv << ",l_" << j;
  csv << ",coarse_nash,fine_nash\n";
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const TrajectoryStep& s = traj.steps[i];
    csv << i << ",";
    for (std::size_t k = 0; k < s.movers.size(); ++k)
      csv << (k ? ";" : "") << s.movers[k];
    for (int j = 0; j < n; ++j) csv << "," << format_double(s.profile[j]);
    csv << "," << format_double(s.loads.noconsume);
    for (int j = 0; j < n; ++j) csv << "," << format_double(s.loads.loads[j]);
    csv << "," << (s.coarse_nash ? 1 : 0) << "," << (s.fine_nash ? 1 : 0) << "\n";
  }
  return csv.str();
}

const StrategyProfile& require_profile(const Scenario& sc) {
  if (!sc.profile) throw Error("schema-error", "/profile is required for this command");
  if (static_cast<int>(sc.profile->size()) != sc.n)
    throw Error("invariant-violation", "/profile must list one level per producer");
  return *sc.profile;
}

void require_homogeneous(const Scenario& sc, const std::string& command) {
  if (sc.heterogeneous)
    throw Error("invariant-violation", command + " needs a homogeneous scenario");
}

int oracle_check(const Scenario&, const CliOptions& options, std::ostream& out) {
  InstanceGenerator gen(options.seed);
  double worst = 0.0;
  if (options.oracle_mode == "loads") {
    for (int i = 0; i < 100; ++i) {
      const Measure mu = gen.random_measure();
      const StrategyProfile t = gen.random_profile(gen.random_int(1, 6));
      const LoadVector exact = compute_loads(mu, t);
      const LoadVector poured = pour_loads(mu, t, options.pour_step);
      worst = std::max(worst, std::abs(exact.noconsume - poured.noconsume));
      for (std::size_t j = 0; j < t.size(); ++j)
        worst = std::max(worst, std::abs(exact.loads[j] - poured.loads[j]));
    }
    out << "oracle-check loads: max |delta| = " << format_double(worst) << "\n";
    return worst <= 1e-3 ? 0 : 2;
  }
  if (options.oracle_mode == "best-response") {
    for (int i = 0; i < 50; ++i) {
      const Measure mu = gen.random_measure();
      const StrategyProfile others = gen.random_profile(gen.random_int(0, 4));
      const double exact = fine_best_response(mu, others);
      const double gridded = grid_best_response(mu, others, options.grid);
      worst = std::max(worst, std::abs(exact - gridded));
    }
    out << "oracle-check best-response: max |delta| = " << format_double(worst) << "\n";
    return worst <= 1e-4 ? 0 : 2;
  }
  throw Error("unknown-command", "oracle-check mode must be loads or best-response");
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error("schema-error", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("schema-error", "scenario must be a JSON object");
  if (!j.contains("measure")) throw Error("schema-error", "/measure is required");

  Scenario sc;
  sc.measure = measure_from_json(j["measure"], "/measure");

  if (!j.contains("producers") || !j["producers"].is_object())
    throw Error("schema-error", "/producers must be an object");
  const Json& pj = j["producers"];
  const bool has_n = pj.contains("n");
  const bool has_fs = pj.contains("fs");
  if (has_n == has_fs)
    throw Error("schema-error", "/producers needs exactly one of n or fs");
  if (has_n) {
    if (!pj["n"].is_number_integer() || pj["n"].get<int>() < 0)
      throw Error("schema-error", "/producers/n must be a nonnegative integer");
    sc.n = pj["n"].get<int>();
  } else {
    sc.fs = responses_from_json(pj["fs"], "/producers/fs");
    sc.n = static_cast<int>(sc.fs.size());
    sc.heterogeneous = true;
  }

  if (j.contains("eps")) {
    if (!j["eps"].is_number() || j["eps"].get<double>() <= 0.0)
      throw Error("schema-error", "/eps must be a positive number");
    sc.eps = j["eps"].get<double>();
  }
  if (j.contains("profile")) sc.profile = profile_from_json(j["profile"], "/profile", true);
  if (j.contains("others")) sc.others = profile_from_json(j["others"], "/others", true);
  if (j.contains("pi")) {
    std::vector<int> pi;
    for (const Json& v : j["pi"]) pi.push_back(v.get<int>());
    sc.pi = pi;
  }
  if (j.contains("dynamics")) sc.dynamics = dynamics_from_json(j["dynamics"], sc.n);
  if (j.contains("multigood")) {
    const Json& mj = j["multigood"];
    if (!mj.is_object() || !mj.contains("fs1") || !mj.contains("fs2"))
      throw Error("schema-error", "/multigood needs fs1 and fs2");
    MultigoodSpec mg;
    mg.fs1 = responses_from_json(mj["fs1"], "/multigood/fs1");
    mg.fs2 = responses_from_json(mj["fs2"], "/multigood/fs2");
    mg.angle = mj.value("angle", 0.0);
    sc.multigood = mg;
  }
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error("io-error", "cannot read " + path);
  std::ostringstream text;
  text << file.rdbuf();
  return scenario_from_json_text(text.str());
}

int execute(const std::string& command, const Scenario& sc, const CliOptions& options,
            std::ostream& out, std::ostream& err) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw Error("unknown-command", "unknown command " + command);

  try {
    if (command == "loads") {
      const StrategyProfile& t = require_profile(sc);
      const LoadVector lv =
          sc.heterogeneous ? hetero_loads(sc.measure, t, sc.fs) : compute_loads(sc.measure, t);
      write_output(to_json(lv).dump(2) + "\n", options, out);
      return 0;
    }
    if (command == "consumer-eq") {
      require_homogeneous(sc, command);
      const StrategyProfile& t = require_profile(sc);
      const ConsumerStrategy s = symmetric_equilibrium(sc.measure, t);
      const EquilibriumReport report = verify_equilibrium(sc.measure, t, s);
      Json j = to_json(s);
      j["verified"] = report.ok;
      j["worst_violation"] = num(report.worst_violation);
      j["loads"] = to_json(report.loads);
      write_output(j.dump(2) + "\n", options, out);
      return 0;
    }
    if (command == "fine-nash") {
      require_homogeneous(sc, command);
      const StrategyProfile t = fine_nash(sc.measure, sc.n);
      Json j = Json::array();
      for (double v : t) j.push_back(num(v));
      write_output(j.dump() + "\n", options, out);
      return 0;
    }
    if (command == "coarse-check") {
      require_homogeneous(sc, command);
      const StrategyProfile& t = require_profile(sc);
      const NashReport report = is_coarse_nash(sc.measure, t, sc.eps);
      Json slack = Json::array();
      for (double s : report.slack) slack.push_back(num(s));
      Json j{{"is_nash", report.is_nash}, {"slack", slack}};
      write_output(j.dump(2) + "\n", options, out);
      return report.is_nash ? 0 : 2;
    }
    if (command == "best-response") {
      require_homogeneous(sc, command);
      if (!sc.others) throw Error("schema-error", "/others is required for best-response");
      const double t = fine_best_response(sc.measure, *sc.others);
      write_output(num(t).dump() + "\n", options, out);
      return 0;
    }
    if (command == "dynamics") {
      require_homogeneous(sc, command);
      if (!sc.dynamics) throw Error("schema-error", "/dynamics is required");
      DynamicsSpec spec = *sc.dynamics;
      if (options.max_steps) spec.config.max_steps = *options.max_steps;
      const Trajectory traj = run_dynamics(sc.measure, spec.initial, spec.schedule, spec.config);
      write_output(trajectory_csv(traj, sc.n), options, out);
      return 0;
    }
    if (command == "tilde") {
      if (!sc.heterogeneous)
        throw Error("invariant-violation", "tilde needs a heterogeneous scenario");
      Json j = Json::array();
      for (double l : tilde_loads(sc.measure, sc.fs)) j.push_back(num(l));
      write_output(j.dump() + "\n", options, out);
      return 0;
    }
    if (command == "hetero-nash") {
      if (!sc.heterogeneous)
        throw Error("invariant-violation", "hetero-nash needs a heterogeneous scenario");
      std::vector<int> pi;
      if (sc.pi) {
        pi = *sc.pi;
      } else {
        pi.resize(sc.n);
        for (int i = 0; i < sc.n; ++i) pi[i] = i;
      }
      const StrategyProfile t = hetero_fine_nash(sc.measure, sc.fs, pi);
      Json j = Json::array();
      for (double v : t) j.push_back(num(v));
      write_output(j.dump() + "\n", options, out);
      return 0;
    }
    if (command == "mainstreet") {
      if (!sc.multigood) throw Error("schema-error", "/multigood is required");
      const auto placements = mainstreet_equilibrium(sc.measure, sc.multigood->fs1,
                                                     sc.multigood->fs2, sc.multigood->angle);
      Json j = Json::array();
      for (const PlanarPlacement& p : placements) j.push_back(to_json(p));
      write_output(j.dump(2) + "\n", options, out);
      return 0;
    }
    // oracle-check
    return oracle_check(sc, options, out);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qosmarket
