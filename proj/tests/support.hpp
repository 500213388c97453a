#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qosmarket/consumer.hpp"
#include "qosmarket/hetero.hpp"

namespace testsupport {

using namespace qosmarket;

// Independent pour oracle for add_water: raise the minimal-level suffix block
// in tiny increments. Water enters at the rightmost vessel and spreads left
// while surfaces stay level.
inline std::vector<double> pour_into_suffix(std::vector<double> levels, double amount,
                                            double step = 1e-4) {
  const int n = static_cast<int>(levels.size());
  std::vector<double> rise(n, 0.0);
  double left = amount;
  while (left > 0.0) {
    const double m = std::min(step, left);
    left -= m;
    const double entry = levels[n - 1];
    int start = n - 1;
    while (start > 0 && levels[start - 1] <= entry + 1e-12) --start;
    const double share = m / (n - start);
    for (int j = start; j < n; ++j) {
      levels[j] += share;
      rise[j] += share;
    }
  }
  return rise;
}

// Left-continuous prefix function, for grid-scan checks.
inline double prefix_mass(const Measure& mu, double t) { return mu.mass_co(0.0, t); }

// Convert a pure assignment back into a cell strategy compatible with the
// profile, so it can go through verify_equilibrium.
inline ConsumerStrategy assignment_as_strategy(const Measure& mu, const StrategyProfile& t,
                                               const PureAssignment& a) {
  ConsumerStrategy mixed = symmetric_equilibrium(mu, t);  // borrow the cell layout
  for (ConsumerCell& cell : mixed.cells) {
    std::fill(cell.weights.begin(), cell.weights.end(), 0.0);
    cell.noconsume = 0.0;
    const double upper = cell.closed ? kTailSentinel : cell.hi;
    const double total = mu.mass_co(cell.lo, upper);
    if (total <= 0.0) {
      // massless cell: park it on any acceptable target of the assignment
      bool set = false;
      for (const AssignmentPiece& p : a.pieces) {
        if (p.lo <= cell.lo && cell.lo < (p.closed ? 1.0 + 1e-12 : p.hi)) {
          if (p.target < 0)
            cell.noconsume = 1.0;
          else
            cell.weights[p.target] = 1.0;
          set = true;
          break;
        }
      }
      if (!set) cell.noconsume = 1.0;
      continue;
    }
    for (const AssignmentPiece& p : a.pieces) {
      const double lo = std::max(cell.lo, p.lo);
      const double hi = std::min(cell.closed ? 1.0 : cell.hi, p.closed ? 1.0 : p.hi);
      const bool closed = cell.closed && p.closed;
      if (hi < lo) continue;
      const double m = mu.mass_co(lo, closed ? kTailSentinel : hi);
      if (m <= 0.0) continue;
      if (p.target < 0)
        cell.noconsume += m / total;
      else
        cell.weights[p.target] += m / total;
    }
  }
  return mixed;
}

inline double max_abs_diff(const LoadVector& a, const LoadVector& b) {
  double worst = std::abs(a.noconsume - b.noconsume);
  for (std::size_t i = 0; i < a.loads.size(); ++i)
    worst = std::max(worst, std::abs(a.loads[i] - b.loads[i]));
  return worst;
}

// The simultaneous best-response cascade that re-reaches equilibrium every
// n-2 steps on the uniform market, starting from (1, 0, ..., 0).
inline std::vector<StrategyProfile> tight_cascade_script(int n, int steps) {
  std::vector<StrategyProfile> moves;
  StrategyProfile cur(n, 0.0);
  cur[0] = 1.0;
  for (int s = 0; s < steps; ++s) {
    StrategyProfile next(n, 0.0);
    double top = 0.0;
    int filled = 0;
    for (double v : cur) {
      top = std::max(top, v);
      if (v > 1e-12) ++filled;
    }
    if (top <= 1.0 / n + 1e-12 || cur[0] == 1.0) {
      next[0] = static_cast<double>(n - 1) / n;
      next[1] = static_cast<double>(n - 2) / (n - 1);
    } else {
      const int head = filled;
      for (int j = 0; j < head; ++j) next[j] = static_cast<double>(n - head) / n;
      if (head < n) next[head] = static_cast<double>(n - head - 1) / (n - 1);
    }
    moves.push_back(next);
    cur = next;
  }
  return moves;
}

}  // namespace testsupport
