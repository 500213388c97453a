#pragma once

#include <vector>

#include "qosmarket/measure.hpp"

namespace qosmarket {

/// Producer QoS levels t_0..t_{n-1}, each in [0,1]. Order is by producer
/// index; operations sort internally where needed.
using StrategyProfile = std::vector<double>;

struct LoadVector {
  double noconsume = 0.0;
  std::vector<double> loads;  // by producer index

  double total() const {
    double s = noconsume;
    for (double l : loads) s += l;
    return s;
  }
};

/// One effective-type cell [lo,hi) (the last cell is [lo,1]): a weight per
/// producer plus the weight on consuming nothing, summing to 1.
struct ConsumerCell {
  double lo = 0.0;
  double hi = 1.0;
  bool closed = false;
  std::vector<double> weights;
  double noconsume = 0.0;
};

struct ConsumerStrategy {
  int producers = 0;
  std::vector<ConsumerCell> cells;
};

struct AssignmentPiece {
  double lo = 0.0;
  double hi = 1.0;
  bool closed = false;
  int target = -1;  // producer index, -1 = consume nothing
};

struct PureAssignment {
  std::vector<AssignmentPiece> pieces;
};

struct EquilibriumReport {
  bool ok = false;
  LoadVector loads;
  double worst_violation = 0.0;
};

/// Pour `amount` into the rightmost of a nonincreasing sequence of vessel
/// levels; water spreads left until surfaces equalize. Returns the rise of
/// each vessel. O(n).
std::vector<double> add_water(const std::vector<double>& levels, double amount,
                              double eps = kEps);

/// Equilibrium loads of the consumer game (mu; levels). Accepts unsorted
/// profiles; O(n^2) interval-mass queries.
LoadVector compute_loads(const Measure& mu, const StrategyProfile& levels);

/// The symmetric mixed-consumption Nash equilibrium built by pouring each
/// effective-type cell's mass into its vessel.
ConsumerStrategy symmetric_equilibrium(const Measure& mu, const StrategyProfile& levels);

/// Split each cell into producer-indexed subintervals carrying the cell's
/// mixed masses. Requires mu atomless.
PureAssignment purify(const Measure& mu, const ConsumerStrategy& s);

EquilibriumReport verify_equilibrium(const Measure& mu, const StrategyProfile& levels,
                                     const ConsumerStrategy& s);

namespace detail {
/// Stable sort permutation of a profile: order[pos] = producer index.
std::vector<int> sorted_order(const StrategyProfile& levels);
void check_profile(const StrategyProfile& levels);
}  // namespace detail

}  // namespace qosmarket
