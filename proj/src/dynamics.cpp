#include "qosmarket/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

namespace qosmarket {

Schedule build_schedule(ScheduleKind kind, int n, std::vector<std::vector<int>> custom) {
  if (n < 1) throw Error("empty-game", "schedule needs n >= 1");
  Schedule s;
  s.kind = kind;
  s.n = n;
  switch (kind) {
    case ScheduleKind::SequentialRoundRobin:
      for (int j = 0; j < n; ++j) s.pattern.push_back({j});
      break;
    case ScheduleKind::Simultaneous: {
      std::vector<int> all(n);
      for (int j = 0; j < n; ++j) all[j] = j;
      s.pattern.push_back(all);
      break;
    }
    case ScheduleKind::Custom: {
      if (custom.empty()) throw Error("empty-subset", "custom schedule needs subsets");
      std::vector<bool> seen(n, false);
      for (auto& subset : custom) {
        if (subset.empty()) throw Error("empty-subset", "schedule subsets must be nonempty");
        std::sort(subset.begin(), subset.end());
        subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
        for (int j : subset) {
          if (j < 0 || j >= n)
            throw Error("invalid-range", "schedule subset index out of range");
          seen[j] = true;
        }
      }
      for (int j = 0; j < n; ++j)
        if (!seen[j])
          throw Error("invariant-violation",
                      "cycling the pattern must let every producer move");
      s.pattern = std::move(custom);
      break;
    }
  }
  return s;
}

namespace {

double load_of(const Measure& mu, const StrategyProfile& profile, int j) {
  return compute_loads(mu, profile).loads[j];
}

double delta_better_move(const Measure& mu, const StrategyProfile& profile, int j,
                         double current_load, double best_value,
                         const DynamicsConfig& config) {
  StrategyProfile trial(profile);
  if (!config.rule.adversarial) return best_value;

  // Adversarial policy: the qualifying move with the smallest improvement,
  // preferring the larger strategy value on ties.
  const double total = mu.total();
  double chosen = best_value;
  double chosen_gain = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int q = 0; q <= config.grid; ++q) {
    const double t = mu.sup_prefix(total * q / config.grid);
    trial[j] = t;
    const double gain = load_of(mu, trial, j) - current_load;
    if (gain < config.rule.delta - 1e-12) continue;
    if (!found || gain < chosen_gain - 1e-12 ||
        (std::abs(gain - chosen_gain) <= 1e-12 && t > chosen)) {
      chosen = t;
      chosen_gain = gain;
      found = true;
    }
  }
  return found ? chosen : best_value;  // a best response is always allowed
}

}  // namespace

StrategyProfile step_profile(const Measure& mu, const StrategyProfile& profile,
                             const std::vector<int>& movers, const DynamicsConfig& config,
                             int step_index) {
  detail::check_profile(profile);
  const int n = static_cast<int>(profile.size());
  if (movers.empty()) throw Error("empty-subset", "movers must be nonempty");
  for (int j : movers)
    if (j < 0 || j >= n) throw Error("invalid-range", "mover index out of range");

  StrategyProfile next(profile);
  const LoadVector base = compute_loads(mu, profile);

  for (int j : movers) {
    StrategyProfile others;
    others.reserve(n - 1);
    for (int i = 0; i < n; ++i)
      if (i != j) others.push_back(profile[i]);

    switch (config.rule.kind) {
      case DynamicsRule::Best: {
        const double best_value = fine_best_response(mu, others);
        if (config.lazy) {
          StrategyProfile trial(profile);
          trial[j] = best_value;
          const double best_load = load_of(mu, trial, j);
          const bool already_best =
              config.preference == Preference::Fine
                  ? std::abs(profile[j] - best_value) <= 1e-12
                  : base.loads[j] >= best_load - kEps;
          if (already_best) continue;
        }
        next[j] = best_value;
        break;
      }
      case DynamicsRule::DeltaBetter: {
        if (config.rule.delta <= 0.0)
          throw Error("invariant-violation", "delta must be positive");
        const double best_value = fine_best_response(mu, others);
        StrategyProfile trial(profile);
        trial[j] = best_value;
        const double best_load = load_of(mu, trial, j);
        if (config.lazy && base.loads[j] >= best_load - kEps) continue;
        next[j] = delta_better_move(mu, profile, j, base.loads[j], best_value, config);
        break;
      }
      case DynamicsRule::Scripted: {
        if (step_index < 0 || step_index >= static_cast<int>(config.rule.moves.size()))
          throw Error("invalid-range", "no scripted move for this step");
        const StrategyProfile& target = config.rule.moves[step_index];
        if (target.size() != profile.size())
          throw Error("arity-mismatch", "scripted move has wrong arity");
        StrategyProfile trial(profile);
        trial[j] = target[j];
        const double moved_load = load_of(mu, trial, j);
        if (moved_load < base.loads[j] - kEps)
          throw Error("scripted-move-not-improving",
                      "scripted move must be a weakly better response");
        if (config.rule.require_best) {
          trial[j] = fine_best_response(mu, others);
          if (moved_load < load_of(mu, trial, j) - kEps)
            throw Error("scripted-move-not-improving",
                        "scripted move must be a best response");
        }
        next[j] = target[j];
        break;
      }
    }
  }

  if (config.rule.kind == DynamicsRule::Scripted) {
    const StrategyProfile& target = config.rule.moves[step_index];
    for (int i = 0; i < n; ++i) {
      bool mover = std::find(movers.begin(), movers.end(), i) != movers.end();
      if (!mover && std::abs(target[i] - profile[i]) > 1e-12)
        throw Error("scripted-move-not-improving", "scripted move changes a non-mover");
    }
  }
  return next;
}

Trajectory run_dynamics(const Measure& mu, const StrategyProfile& initial,
                        const Schedule& schedule, const DynamicsConfig& config) {
  if (config.max_steps < 1) throw Error("invalid-range", "max_steps must be >= 1");
  const int n = static_cast<int>(initial.size());
  if (n != schedule.n) throw Error("arity-mismatch", "schedule built for different n");

  Trajectory traj;
  const StrategyProfile reference = fine_nash(mu, n);
  StrategyProfile sorted_ref(reference);
  std::sort(sorted_ref.begin(), sorted_ref.end());

  auto record = [&](const StrategyProfile& profile, const std::vector<int>& movers) {
    TrajectoryStep step;
    step.profile = profile;
    step.movers = movers;
    step.loads = compute_loads(mu, profile);
    step.coarse_nash = is_coarse_nash(mu, profile).is_nash;
    StrategyProfile sorted(profile);
    std::sort(sorted.begin(), sorted.end());
    step.fine_nash = step.coarse_nash;
    for (int j = 0; j < n && step.fine_nash; ++j)
      if (std::abs(sorted[j] - sorted_ref[j]) > kEps) step.fine_nash = false;
    const int index = static_cast<int>(traj.steps.size());
    if (step.coarse_nash && traj.first_coarse_step < 0) traj.first_coarse_step = index;
    if (step.fine_nash && traj.first_fine_step < 0) traj.first_fine_step = index;
    traj.steps.push_back(std::move(step));
  };

  // Cycle keys carry the schedule phase: with a deterministic rule, the same
  // profile at the same phase repeats forever.
  std::map<std::vector<std::int64_t>, int> seen;
  auto key_of = [&](const StrategyProfile& p, int step) {
    std::vector<std::int64_t> key;
    key.reserve(p.size() + 1);
    key.push_back(step % static_cast<int>(schedule.pattern.size()));
    for (double t : p) key.push_back(static_cast<std::int64_t>(std::llround(t * 1e12)));
    return key;
  };

  const bool scripted = config.rule.kind == DynamicsRule::Scripted;
  const int cover = static_cast<int>(schedule.pattern.size());

  StrategyProfile profile(initial);
  int unchanged_streak = 0;
  for (int i = 0; i < config.max_steps; ++i) {
    if (!scripted) {
      auto [it, fresh] = seen.emplace(key_of(profile, i), i);
      if (!fresh) {
        traj.cycle_start = it->second;
        traj.cycle_period = i - it->second;
        record(profile, {});
        break;
      }
    }
    if (scripted && i >= static_cast<int>(config.rule.moves.size())) {
      record(profile, {});
      break;
    }

    const std::vector<int>& movers = schedule.at(i);
    record(profile, movers);
    StrategyProfile next = step_profile(mu, profile, movers, config, i);

    bool changed = false;
    for (int j = 0; j < n; ++j)
      if (std::abs(next[j] - profile[j]) > 1e-15) changed = true;
    unchanged_streak = changed ? 0 : unchanged_streak + 1;
    profile = std::move(next);

    // A full pattern cycle without change certifies a fixed point for the
    // deterministic rules.
    if (!scripted && unchanged_streak >= cover) {
      record(profile, {});
      traj.converged = true;
      break;
    }
    if (i + 1 == config.max_steps) record(profile, {});
  }

  traj.first_equilibrium_step = config.preference == Preference::Fine
                                    ? traj.first_fine_step
                                    : traj.first_coarse_step;
  if (traj.first_equilibrium_step >= 0)
    traj.rounds_to_first_equilibrium =
        count_rounds(schedule, 0, traj.first_equilibrium_step);
  return traj;
}

int count_rounds(const Schedule& schedule, int i1, int i2) {
  if (i1 > i2) throw Error("invalid-range", "count_rounds requires i1 <= i2");
  int rounds = 0;
  int i = i1;
  // Greedy packing of disjoint covering windows is maximal because windows
  // are consecutive and disjoint.
  while (i <= i2 - 2) {
    std::vector<bool> seen(schedule.n, false);
    int covered = 0;
    int e = i;
    bool complete = false;
    for (; e <= i2 - 2; ++e) {
      for (int j : schedule.at(e)) {
        if (!seen[j]) {
          seen[j] = true;
          ++covered;
        }
      }
      if (covered == schedule.n) {
        complete = true;
        break;
      }
    }
    if (!complete) break;
    ++rounds;
    i = e + 1;
  }
  return rounds + 1;
}

}  // namespace qosmarket
