// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failing criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qosmarket/cli.hpp"
#include "qosmarket/dynamics.hpp"
#include "qosmarket/multigood.hpp"
#include "qosmarket/oracle.hpp"
#include "support.hpp"

using namespace qosmarket;

namespace {

struct Check {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------- criterion 1
bool fine_nash_closed_form(std::string& detail) {
  const Measure u = Measure::uniform();
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const StrategyProfile t = fine_nash(u, n);
    const LoadVector lv = compute_loads(u, t);
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(t[j] - static_cast<double>(j) / n));
      worst = std::max(worst, std::abs(lv.loads[j] - 1.0 / n));
    }
  }
  detail = "max deviation " + std::to_string(worst);
  return worst <= 1e-12;
}

// ---------------------------------------------------------------- criteria 2+3
bool loads_vs_pour_oracle(std::string& detail) {
  InstanceGenerator gen(1001);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Measure mu = gen.random_measure(3, 4);
    const StrategyProfile t = gen.random_profile(gen.random_int(1, 6));
    worst = std::max(worst, testsupport::max_abs_diff(compute_loads(mu, t),
                                                      pour_loads(mu, t, 1e-5)));
  }
  detail = "max |compute - pour| = " + std::to_string(worst);
  return worst <= 1e-3;
}

bool equilibrium_construction(std::string& detail) {
  InstanceGenerator gen(1001);  // the same 100 scenarios as criterion 2
  double worst_violation = 0.0;
  double worst_load_gap = 0.0;
  bool all_ok = true;
  for (int i = 0; i < 100; ++i) {
    const Measure mu = gen.random_measure(3, 4);
    const StrategyProfile t = gen.random_profile(gen.random_int(1, 6));
    const ConsumerStrategy s = symmetric_equilibrium(mu, t);
    const EquilibriumReport report = verify_equilibrium(mu, t, s);
    all_ok = all_ok && report.ok;
    worst_violation = std::max(worst_violation, report.worst_violation);
    worst_load_gap =
        std::max(worst_load_gap, testsupport::max_abs_diff(report.loads, compute_loads(mu, t)));
  }
  detail = "worst violation " + std::to_string(worst_violation) + ", load gap " +
           std::to_string(worst_load_gap);
  return all_ok && worst_violation <= 1e-9 && worst_load_gap <= 1e-9;
}

// ---------------------------------------------------------------- criterion 4
bool analytic_properties(std::string& detail) {
  InstanceGenerator gen(1004);
  int violations = 0;

  for (int trial = 0; trial < 1000; ++trial) {  // own-strategy monotonicity
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(1, 6);
    StrategyProfile t = gen.random_profile(n);
    const int j = gen.random_int(0, n - 1);
    const double before = compute_loads(mu, t).loads[j];
    StrategyProfile up(t);
    up[j] = gen.uniform(t[j], 1.0);
    if (compute_loads(mu, up).loads[j] > before + 1e-9) ++violations;
  }

  for (int trial = 0; trial < 1000; ++trial) {  // approach monotonicity
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(2, 6);
    StrategyProfile t = gen.random_profile(n);
    int j = gen.random_int(0, n - 1);
    int k = gen.random_int(0, n - 1);
    if (j == k) k = (k + 1) % n;
    const LoadVector base = compute_loads(mu, t);
    StrategyProfile toward(t);
    toward[k] = t[k] < t[j] ? gen.uniform(t[k], t[j]) : gen.uniform(t[j], t[k]);
    if (compute_loads(mu, toward).loads[j] > base.loads[j] + 1e-9) ++violations;
    StrategyProfile left(t);
    left[k] = gen.uniform(0.0, t[k]);
    if (compute_loads(mu, left).noconsume > base.noconsume + 1e-9) ++violations;
  }

  for (int trial = 0; trial < 1000; ++trial) {  // Lipschitz bound
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(1, 6);
    StrategyProfile t = gen.random_profile(n);
    const int k = gen.random_int(0, n - 1);
    StrategyProfile moved(t);
    moved[k] = gen.uniform(t[k], 1.0);
    const double crossed = mu.mass_co(std::min(t[k], moved[k]), std::max(t[k], moved[k]));
    const LoadVector a = compute_loads(mu, t);
    const LoadVector b = compute_loads(mu, moved);
    for (int j = 0; j < n; ++j)
      if (std::abs(a.loads[j] - b.loads[j]) > crossed + 1e-9) ++violations;
  }

  detail = std::to_string(violations) + " violations in 3000 trials";
  return violations == 0;
}

// ---------------------------------------------------------------- criterion 5
bool coarse_characterization(std::string& detail) {
  InstanceGenerator gen(1005);
  int disagreements = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(1, 6);
    StrategyProfile t;
    if (trial % 2 == 0) {
      t = gen.random_profile(n);
    } else {
      for (int j = 0; j < n; ++j)
        t.push_back(mu.sup_prefix(gen.uniform(0.0, 1.0) * mu.total() * j / n));
      std::shuffle(t.begin(), t.end(), gen.rng());
    }
    const bool characterized = is_coarse_nash(mu, t).is_nash;
    const LoadVector lv = compute_loads(mu, t);
    bool equal_loads = true;
    for (double l : lv.loads)
      if (std::abs(l - mu.total() / n) > 1e-9) equal_loads = false;
    if (characterized != equal_loads) ++disagreements;
  }
  detail = std::to_string(disagreements) + " disagreements in 500 profiles";
  return disagreements == 0;
}

// ---------------------------------------------------------------- criterion 6
bool best_response_vs_grid(std::string& detail) {
  InstanceGenerator gen(1006);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(1, 5);
    const StrategyProfile others = gen.random_profile(n - 1);
    worst = std::max(worst, std::abs(fine_best_response(mu, others) -
                                     grid_best_response(mu, others, 10000)));
  }
  detail = "max |constructive - grid| = " + std::to_string(worst);
  return worst <= 1e-4;
}

// ---------------------------------------------------------------- criterion 7
bool dynamics_bounds(std::string& detail) {
  InstanceGenerator gen(1007);
  int worst_fine_rounds = 0;
  for (int trial = 0; trial < 200; ++trial) {  // (a) sequential fine best response
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(2, 6);
    const Schedule seq = build_schedule(ScheduleKind::SequentialRoundRobin, n);
    DynamicsConfig config;
    config.preference = Preference::Fine;
    config.rule.kind = DynamicsRule::Best;
    config.max_steps = n * (n + 4);
    const Trajectory traj = run_dynamics(mu, gen.random_profile(n), seq, config);
    if (traj.first_fine_step < 0) {
      detail = "(a) fine Nash not reached";
      return false;
    }
    const int rounds = count_rounds(seq, 0, traj.first_fine_step);
    worst_fine_rounds = std::max(worst_fine_rounds, rounds);
    if (rounds > n) {
      detail = "(a) fine dynamics needed " + std::to_string(rounds) + " rounds, n=" +
               std::to_string(n);
      return false;
    }
    for (std::size_t i = traj.first_fine_step; i + 1 < traj.steps.size(); ++i) {
      if (traj.steps[i].profile != traj.steps[i + 1].profile) {
        detail = "(a) dynamics moved after the fine Nash";
        return false;
      }
    }
  }

  int worst_coarse_rounds = 0;
  for (int trial = 0; trial < 100; ++trial) {  // (b) best-response dynamics
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(2, 6);
    const Schedule sched = trial % 2 == 0
                               ? build_schedule(ScheduleKind::SequentialRoundRobin, n)
                               : build_schedule(ScheduleKind::Simultaneous, n);
    DynamicsConfig config;
    config.preference = trial % 4 < 2 ? Preference::Coarse : Preference::Fine;
    config.rule.kind = DynamicsRule::Best;
    config.max_steps = n * n + 2 * n + 2;
    const Trajectory traj = run_dynamics(mu, gen.random_profile(n), sched, config);
    if (traj.first_coarse_step < 0) {
      detail = "(b) coarse Nash not reached";
      return false;
    }
    const int rounds = count_rounds(sched, 0, traj.first_coarse_step);
    worst_coarse_rounds = std::max(worst_coarse_rounds, rounds);
    if (rounds > n - 1) {
      detail = "(b) best-response dynamics needed " + std::to_string(rounds) +
               " rounds, n=" + std::to_string(n);
      return false;
    }
  }

  int worst_delta_rounds = 0;
  for (int trial = 0; trial < 60; ++trial) {  // (c) delta-better dynamics, delta = 0.1
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(2, 6);
    const double delta = 0.1;
    const int bound =
        n * static_cast<int>(std::ceil(mu.total() / (delta * n) - 1e-12));
    const Schedule sched = trial % 3 == 0
                               ? build_schedule(ScheduleKind::Simultaneous, n)
                               : build_schedule(ScheduleKind::SequentialRoundRobin, n);
    DynamicsConfig config;
    config.preference = Preference::Coarse;
    config.rule.kind = DynamicsRule::DeltaBetter;
    config.rule.delta = delta;
    config.rule.adversarial = (trial % 2 == 0);
    config.max_steps = (bound + 2) * n + 4;
    const Trajectory traj = run_dynamics(mu, gen.random_profile(n), sched, config);
    if (traj.first_coarse_step < 0) {
      detail = "(c) coarse Nash not reached";
      return false;
    }
    const int rounds = count_rounds(sched, 0, traj.first_coarse_step);
    worst_delta_rounds = std::max(worst_delta_rounds, rounds);
    if (rounds > bound) {
      detail = "(c) delta dynamics needed " + std::to_string(rounds) + " rounds, bound " +
               std::to_string(bound);
      return false;
    }
  }

  // Observed-vs-proven gap, reported for information only.
  detail = "worst rounds: fine " + std::to_string(worst_fine_rounds) + ", best " +
           std::to_string(worst_coarse_rounds) + ", delta " + std::to_string(worst_delta_rounds);
  return true;
}

// ---------------------------------------------------------------- criterion 8
bool paper_trajectories(std::string& detail) {
  const Measure u = Measure::uniform();
  const int n = 3;
  const Schedule sim = build_schedule(ScheduleKind::Simultaneous, n);

  DynamicsConfig config;
  config.preference = Preference::Coarse;
  config.rule.kind = DynamicsRule::Scripted;
  config.rule.moves = testsupport::tight_cascade_script(n, 10);
  config.rule.require_best = true;
  config.max_steps = 11;

  StrategyProfile start(n, 0.0);
  start[0] = 1.0;
  const Trajectory traj = run_dynamics(u, start, sim, config);
  if (traj.first_coarse_step != n - 1) {
    detail = "tight cascade reached Nash at step " + std::to_string(traj.first_coarse_step);
    return false;
  }
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const bool expect_nash = i >= 2 && i % 2 == 0;  // re-reached every n-1 steps
    if (traj.steps[i].coarse_nash != expect_nash) {
      detail = "unexpected equilibrium flag at step " + std::to_string(i);
      return false;
    }
    if (i > 0 && traj.steps[i].coarse_nash && traj.steps[i - 1].coarse_nash) {
      detail = "two consecutive equilibria";
      return false;
    }
  }

  // the simultaneous fine-best 2-cycle never visits the fine Nash
  DynamicsConfig cycle;
  cycle.preference = Preference::Fine;
  cycle.rule.kind = DynamicsRule::Best;
  cycle.max_steps = 30;
  const Schedule sim2 = build_schedule(ScheduleKind::Simultaneous, 2);
  const Trajectory two = run_dynamics(u, {0.0, 0.0}, sim2, cycle);
  if (two.cycle_period != 2) {
    detail = "expected a 2-cycle, period " + std::to_string(two.cycle_period);
    return false;
  }
  for (const TrajectoryStep& s : two.steps)
    if (s.fine_nash) {
      detail = "cycle unexpectedly visited the fine Nash";
      return false;
    }
  detail = "cascade cadence and 2-cycle verified";
  return true;
}

// ---------------------------------------------------------------- criterion 9
bool super_strong(std::string& detail) {
  InstanceGenerator gen(1009);
  for (int scenario = 0; scenario < 50; ++scenario) {
    const Measure mu = gen.random_measure();
    const int n = 2 + scenario % 3;
    const StrategyProfile nash = fine_nash(mu, n);

    std::vector<std::vector<int>> coalitions;
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> c;
      for (int j = 0; j < n; ++j)
        if (mask & (1 << j)) c.push_back(j);
      if (static_cast<int>(c.size()) <= 3) coalitions.push_back(c);
    }
    for (const auto& coalition : coalitions) {
      for (Preference pref : {Preference::Coarse, Preference::Fine}) {
        const auto dev = coalition_search(mu, nash, coalition, 100, pref);
        if (dev) {
          std::ostringstream os;
          os << "scenario " << scenario << " found a deviation for coalition {";
          for (int j : dev->members) os << j << ",";
          os << "}";
          detail = os.str();
          return false;
        }
      }
    }
  }
  detail = "no improving coalition deviation in 50 scenarios";
  return true;
}

// --------------------------------------------------------------- criterion 10
bool heterogeneous(std::string& detail) {
  const Measure u = Measure::uniform();
  const std::vector<ResponseFunction> pair{ResponseFunction::linear(1.0),
                                           ResponseFunction::linear(2.0)};
  const auto tl = tilde_loads(u, pair);
  if (std::abs(tl[0] - 2.0 / 3.0) > 1e-9 || std::abs(tl[1] - 1.0 / 3.0) > 1e-9) {
    detail = "tilde loads for (x, 2x) off";
    return false;
  }

  InstanceGenerator gen(1010);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Measure mu = gen.random_measure();
    const int n = gen.random_int(1, 4);
    std::vector<ResponseFunction> fs;
    for (int i = 0; i < n; ++i) fs.push_back(gen.random_response(0.2, 5.0, 3, 0.3));

    const std::vector<double> tilde = tilde_loads(mu, fs);
    // any ordering that keeps zero-load producers last is valid
    std::vector<int> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = i;
    std::shuffle(pi.begin(), pi.end(), gen.rng());
    std::stable_sort(pi.begin(), pi.end(),
                     [&](int a, int b) { return (tilde[a] > 1e-12) > (tilde[b] > 1e-12); });

    const StrategyProfile t = hetero_fine_nash(mu, fs, pi);
    const LoadVector lv = hetero_loads(mu, t, fs);
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(lv.loads[j] - tilde[j]));
  }
  if (worst > 1e-6) {
    detail = "Nash loads deviate from tilde loads by " + std::to_string(worst);
    return false;
  }

  // exact homogeneous reduction
  InstanceGenerator gen2(1011);
  for (int trial = 0; trial < 30; ++trial) {
    const Measure mu = gen2.random_measure();
    const int n = gen2.random_int(1, 5);
    const StrategyProfile t = gen2.random_profile(n);
    std::vector<ResponseFunction> fs;
    for (int i = 0; i < n; ++i) fs.push_back(ResponseFunction::identity());
    const LoadVector a = compute_loads(mu, t);
    const LoadVector b = hetero_loads(mu, t, fs);
    if (a.noconsume != b.noconsume) {
      detail = "homogeneous reduction not exact";
      return false;
    }
    for (int j = 0; j < n; ++j)
      if (a.loads[j] != b.loads[j]) {
        detail = "homogeneous reduction not exact";
        return false;
      }
  }
  detail = "max |Nash load - tilde| = " + std::to_string(worst) + ", reduction exact";
  return true;
}

// --------------------------------------------------------------- criterion 11
bool market_split(std::string& detail) {
  InstanceGenerator gen(1012);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const Measure mu = gen.random_atomless();
    const int n = gen.random_int(2, 5);
    const StrategyProfile t = fine_nash(mu, n);
    const PureAssignment split = purify(mu, symmetric_equilibrium(mu, t));

    int expected = 0;
    for (const AssignmentPiece& piece : split.pieces) {
      if (piece.target < 0) continue;  // massless low cells consume nothing
      if (piece.target != expected) {
        detail = "producers out of order in the split";
        return false;
      }
      worst = std::max(worst, std::abs(mu.mass_co(0.0, piece.lo) -
                                       mu.total() * piece.target / n));
      ++expected;
    }
    if (expected != n) {
      detail = "split is missing producers";
      return false;
    }
  }
  detail = "max boundary mass error " + std::to_string(worst);
  return worst <= 1e-9;
}

// --------------------------------------------------------------- criterion 12
struct TwoGoodConfig {
  std::vector<PlanarPlacement> placements;
  const std::vector<ResponseFunction>* fs1;
  const std::vector<ResponseFunction>* fs2;
};

// Brute-force two-good consumption: each mass chunk takes the feasible pair
// (one shop per good) with minimal f1(l1)+f2(l2); feasibility requires the
// half-circumference of (origin, shop1, shop2) within the consumer type.
std::pair<std::vector<double>, std::vector<double>> pair_pour(const Measure& mu,
                                                              const TwoGoodConfig& cfg,
                                                              int chunks) {
  const int n1 = static_cast<int>(cfg.fs1->size());
  const int n2 = static_cast<int>(cfg.fs2->size());
  std::vector<const PlanarPlacement*> shops1(n1), shops2(n2);
  for (const PlanarPlacement& p : cfg.placements)
    (p.good == 1 ? shops1 : shops2)[p.index] = &p;

  std::vector<std::vector<double>> need(n1, std::vector<double>(n2));
  for (int j = 0; j < n1; ++j)
    for (int k = 0; k < n2; ++k) {
      const double r1 = shops1[j]->radius, r2 = shops2[k]->radius;
      const double d2 = r1 * r1 + r2 * r2 -
                        2.0 * r1 * r2 * std::cos(shops1[j]->angle - shops2[k]->angle);
      need[j][k] = 0.5 * (r1 + r2 + std::sqrt(std::max(0.0, d2)));
    }

  std::vector<double> l1(n1, 0.0), l2(n2, 0.0);
  const double total = mu.total();
  const double step = total / chunks;
  for (int c = 0; c < chunks; ++c) {
    const double d = mu.sup_prefix((c + 0.5) * step);
    double best = 1e300;
    int bj = -1, bk = -1;
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        if (need[j][k] > d + 1e-12) continue;
        const double cost = (*cfg.fs1)[j].value_at(l1[j]) + (*cfg.fs2)[k].value_at(l2[k]);
        if (cost < best) {
          best = cost;
          bj = j;
          bk = k;
        }
      }
    if (bj >= 0) {
      l1[bj] += step;
      l2[bk] += step;
    }
  }
  return {l1, l2};
}

bool mainstreet(std::string& detail) {
  InstanceGenerator gen(1013);

  int round_trips = 0;
  while (round_trips < 20) {
    const Measure mu = gen.random_atomless();
    const int n1 = gen.random_int(1, 3), n2 = gen.random_int(1, 3);
    std::vector<ResponseFunction> fs1, fs2;
    for (int i = 0; i < n1; ++i) fs1.push_back(gen.random_response(0.2, 5.0, 2, 0.0));
    for (int i = 0; i < n2; ++i) fs2.push_back(gen.random_response(0.2, 5.0, 2, 0.0));

    std::vector<PlanarPlacement> placements;
    try {
      placements = mainstreet_equilibrium(mu, fs1, fs2, gen.uniform(0.0, 6.28));
    } catch (const Error&) {
      continue;  // regenerate until generic
    }
    if (!verify_mainstreet(mu, fs1, fs2, placements).ok) {
      detail = "round trip failed";
      return false;
    }

    int twist = -1;
    for (std::size_t i = 0; i < placements.size(); ++i)
      if (placements[i].radius > 1e-9) twist = static_cast<int>(i);
    if (twist >= 0) {
      auto off = placements;
      off[twist].angle += 0.1;
      if (verify_mainstreet(mu, fs1, fs2, off).ok) {
        detail = "off-ray perturbation accepted";
        return false;
      }
      auto wrong = placements;
      wrong[twist].radius = std::min(1.0, wrong[twist].radius + 0.05);
      if (verify_mainstreet(mu, fs1, fs2, wrong).ok) {
        detail = "wrong-radius perturbation accepted";
        return false;
      }
    }
    ++round_trips;
  }

  // polar-grid deviation spot check on a small instance
  const Measure u = Measure::uniform();
  const std::vector<ResponseFunction> fs1{ResponseFunction::linear(1.0),
                                          ResponseFunction::linear(2.0)};
  const std::vector<ResponseFunction> fs2{ResponseFunction::linear(1.3)};
  const auto placements = mainstreet_equilibrium(u, fs1, fs2, 0.0);
  const auto tilde1 = tilde_loads(u, fs1);

  const int chunks = 2000;
  TwoGoodConfig base{placements, &fs1, &fs2};
  const auto eq = pair_pour(u, base, chunks);
  const double tol = 0.01;
  for (int j = 0; j < 2; ++j)
    if (std::abs(eq.first[j] - tilde1[j]) > tol) {
      detail = "pair pour does not reproduce the equilibrium loads";
      return false;
    }

  for (int deviator = 0; deviator < 2; ++deviator) {
    for (int a = 0; a < 36; ++a) {
      for (int r = 0; r < 50; ++r) {
        TwoGoodConfig moved{placements, &fs1, &fs2};
        for (PlanarPlacement& p : moved.placements) {
          if (p.good == 1 && p.index == deviator) {
            p.angle = a * 6.283185307179586 / 36;
            p.radius = r / 49.0;
          }
        }
        const auto loads = pair_pour(u, moved, chunks);
        if (loads.first[deviator] > tilde1[deviator] + tol) {
          std::ostringstream os;
          os << "deviation improves producer " << deviator << " to " << loads.first[deviator];
          detail = os.str();
          return false;
        }
      }
    }
  }
  detail = "20 round trips, perturbations rejected, no improving polar deviation";
  return true;
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {1, "fine Nash closed form on the uniform market", fine_nash_closed_form},
      {2, "load algorithm vs pour oracle", loads_vs_pour_oracle},
      {3, "equilibrium construction validity", equilibrium_construction},
      {4, "analytic properties of the load function", analytic_properties},
      {5, "coarse characterization consistency", coarse_characterization},
      {6, "best-response correctness vs grid oracle", best_response_vs_grid},
      {7, "dynamics round bounds", dynamics_bounds},
      {8, "paper trajectories replayed", paper_trajectories},
      {9, "super-strong: no coalition deviation", super_strong},
      {10, "heterogeneous products", heterogeneous},
      {11, "market split at prefix quantiles", market_split},
      {12, "main street round trip and deviations", mainstreet},
  };

  int failures = 0;
  for (Check& c : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2d. %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", checks.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
