#pragma once

#include <vector>

#include "qosmarket/producer.hpp"

namespace qosmarket {

enum class ScheduleKind { SequentialRoundRobin, Simultaneous, Custom };

/// Infinite mover schedule obtained by cycling a finite base pattern.
struct Schedule {
  ScheduleKind kind = ScheduleKind::SequentialRoundRobin;
  int n = 0;
  std::vector<std::vector<int>> pattern;

  const std::vector<int>& at(int step) const { return pattern[step % pattern.size()]; }
};

Schedule build_schedule(ScheduleKind kind, int n,
                        std::vector<std::vector<int>> custom_subsets = {});

struct DynamicsRule {
  enum Kind { Best, DeltaBetter, Scripted } kind = Best;
  double delta = 0.0;        // DeltaBetter
  bool adversarial = false;  // DeltaBetter: smallest qualifying improvement
  std::vector<StrategyProfile> moves;  // Scripted: profile after each step
  bool require_best = false;           // Scripted: moves must be best responses
};

struct DynamicsConfig {
  Preference preference = Preference::Coarse;
  DynamicsRule rule;
  bool lazy = false;
  int max_steps = 200;
  int grid = 200;  // candidate grid of the delta-better move policy
};

struct TrajectoryStep {
  StrategyProfile profile;
  std::vector<int> movers;  // empty on the final recorded state
  LoadVector loads;
  bool coarse_nash = false;
  bool fine_nash = false;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  int first_coarse_step = -1;
  int first_fine_step = -1;
  int first_equilibrium_step = -1;  // w.r.t. the configured preference
  int rounds_to_first_equilibrium = -1;
  bool converged = false;  // certified fixed point
  int cycle_start = -1;
  int cycle_period = -1;
};

/// One move of the dynamic: every mover responds to the current profile
/// simultaneously; non-movers keep their strategy. step_index selects the
/// scripted move when the rule is Scripted.
StrategyProfile step_profile(const Measure& mu, const StrategyProfile& profile,
                             const std::vector<int>& movers, const DynamicsConfig& config,
                             int step_index = 0);

Trajectory run_dynamics(const Measure& mu, const StrategyProfile& initial,
                        const Schedule& schedule, const DynamicsConfig& config);

/// Rounds needed to reach step i2 from step i1: one more than the largest
/// number of pairwise-disjoint covering windows packed into {i1, .., i2-2}.
int count_rounds(const Schedule& schedule, int i1, int i2);

}  // namespace qosmarket
