#pragma once

#include <random>
#include <utility>
#include <vector>

#include "qosmarket/consumer.hpp"

namespace qosmarket {

/// Finite-support mixed producer strategy: (value, probability) pairs with
/// strictly increasing values and probabilities summing to 1.
struct MixedStrategy {
  std::vector<std::pair<double, double>> support;

  double max_support() const { return support.back().first; }
};

struct NashReport {
  bool is_nash = false;
  /// mu([0, t_(j))) - (j/n) * mu(T) per sorted position; Nash iff all <= eps.
  std::vector<double> slack;
};

/// Coarse-preference Nash test via the prefix-mass characterization.
NashReport is_coarse_nash(const Measure& mu, const StrategyProfile& levels,
                          double eps = kEps);

/// The sorted strategies of the unique (up to permutation) fine Nash
/// equilibrium: t_j = Max{t : mu([0,t)) <= (j/n) mu(T)}.
StrategyProfile fine_nash(const Measure& mu, int n);

/// Permutation pi (position -> producer) arranging a coarse Nash profile in
/// canonical form for producer k: sorted, with k pushed right while the next
/// value's prefix mass stays within k's slack. At most n-1 swaps.
std::vector<int> canonicalize(const Measure& mu, const StrategyProfile& levels, int k);

/// The unique fine best response to the other producers' levels.
double fine_best_response(const Measure& mu, const StrategyProfile& others);

/// Mixed coarse Nash test: sort producers by Max supp and check the
/// prefix-mass characterization.
bool is_coarse_mixed_nash(const Measure& mu, const std::vector<MixedStrategy>& profile);

/// One independent realization per producer.
StrategyProfile sample_profile(const std::vector<MixedStrategy>& profile,
                               std::mt19937_64& rng);

}  // namespace qosmarket
