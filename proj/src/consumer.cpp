#include "qosmarket/consumer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qosmarket {

namespace detail {

std::vector<int> sorted_order(const StrategyProfile& levels) {
  std::vector<int> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return levels[a] < levels[b]; });
  return order;
}

void check_profile(const StrategyProfile& levels) {
  for (double t : levels)
    if (!(t >= 0.0 && t <= 1.0))
      throw Error("invariant-violation", "strategy must lie in [0,1]");
}

}  // namespace detail

std::vector<double> add_water(const std::vector<double>& levels, double amount,
                              double eps) {
  const int n = static_cast<int>(levels.size());
  if (amount < -eps) throw Error("negative-input", "poured amount must be >= 0");
  amount = std::max(amount, 0.0);
  if (n == 0) {
    if (amount > eps) throw Error("invalid-range", "cannot pour into zero vessels");
    return {};
  }
  for (int i = 0; i < n; ++i) {
    if (levels[i] < -eps) throw Error("negative-input", "levels must be >= 0");
    if (i > 0 && levels[i] > levels[i - 1] + eps)
      throw Error("not-sorted", "levels must be nonincreasing");
  }

  // Find the suffix that ends up wet: walking left, the common surface
  // h = (suffix sum + amount) / width stops rising once it fits under the
  // next vessel to the left.
  double suffix = 0.0;
  double h = 0.0;
  int start = n - 1;
  for (int i = n - 1; i >= 0; --i) {
    suffix += levels[i];
    h = (suffix + amount) / static_cast<double>(n - i);
    if (i == 0 || h <= levels[i - 1]) {
      start = i;
      break;
    }
  }

  std::vector<double> rise(n, 0.0);
  for (int j = start; j < n; ++j) rise[j] = std::max(0.0, h - levels[j]);
  return rise;
}

namespace {

// Interval mass between sorted positions, with the sentinel closing the tail.
double span_mass(const Measure& mu, const std::vector<double>& s, int k, int k2) {
  const int n = static_cast<int>(s.size());
  return mu.mass_co(s[k], k2 == n ? kTailSentinel : s[k2]);
}

}  // namespace

LoadVector compute_loads(const Measure& mu, const StrategyProfile& levels) {
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  LoadVector out;
  if (n == 0) {
    out.noconsume = mu.total();
    return out;
  }

  std::vector<int> order = detail::sorted_order(levels);
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = levels[order[i]];

  out.noconsume = mu.mass_co(0.0, s[0]);
  std::vector<double> sorted_loads(n, 0.0);

  int k = 0;
  while (k < n) {
    double best_avg = -1.0;
    double chosen_avg = 0.0;
    int chosen = -1;
    for (int k2 = k + 1; k2 <= n; ++k2) {
      double avg = span_mass(mu, s, k, k2) / static_cast<double>(k2 - k);
      // Averages within kEps tie; the largest k' wins a tie.
      if (avg >= best_avg - kEps) {
        best_avg = std::max(best_avg, avg);
        chosen_avg = avg;
        chosen = k2;
      }
    }
    for (int j = k; j < chosen; ++j) sorted_loads[j] = chosen_avg;
    k = chosen;
  }

  out.loads.assign(n, 0.0);
  for (int i = 0; i < n; ++i) out.loads[order[i]] = sorted_loads[i];
  return out;
}

ConsumerStrategy symmetric_equilibrium(const Measure& mu, const StrategyProfile& levels) {
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  ConsumerStrategy strat;
  strat.producers = n;
  if (n == 0) {
    ConsumerCell cell;
    cell.lo = 0.0;
    cell.hi = 1.0;
    cell.closed = true;
    cell.noconsume = 1.0;
    strat.cells.push_back(cell);
    return strat;
  }

  std::vector<int> order = detail::sorted_order(levels);
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = levels[order[i]];

  if (s[0] > 0.0) {
    ConsumerCell cell;
    cell.lo = 0.0;
    cell.hi = s[0];
    cell.weights.assign(n, 0.0);
    cell.noconsume = 1.0;
    strat.cells.push_back(cell);
  }

  std::vector<double> vessels;  // loads in sorted-producer order, nonincreasing
  vessels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const bool last = (i + 1 == n);
    const double cell_mass = last ? mu.mass_co(s[i], kTailSentinel) : mu.mass_co(s[i], s[i + 1]);
    vessels.push_back(0.0);

    std::vector<double> weights(i + 1, 0.0);
    if (cell_mass > 0.0) {
      std::vector<double> rise = add_water(vessels, cell_mass);
      for (int j = 0; j <= i; ++j) {
        weights[j] = rise[j] / cell_mass;
        vessels[j] += rise[j];
      }
    } else {
      // Empty pour: the cell joins the block an infinitesimal drop would
      // spread over, i.e. the vessels currently at the minimum level.
      int count = 0;
      for (int j = 0; j <= i; ++j)
        if (vessels[j] <= 1e-12) ++count;
      for (int j = 0; j <= i; ++j)
        if (vessels[j] <= 1e-12) weights[j] = 1.0 / count;
    }

    if (last || s[i + 1] > s[i]) {
      ConsumerCell cell;
      cell.lo = s[i];
      cell.hi = last ? 1.0 : s[i + 1];
      cell.closed = last;
      cell.weights.assign(n, 0.0);
      for (int j = 0; j <= i; ++j) cell.weights[order[j]] = weights[j];
      strat.cells.push_back(cell);
    }
  }
  return strat;
}

namespace {

double cell_mass(const Measure& mu, const ConsumerCell& cell) {
  return mu.mass_co(cell.lo, cell.closed ? kTailSentinel : cell.hi);
}

}  // namespace

PureAssignment purify(const Measure& mu, const ConsumerStrategy& s) {
  if (!mu.atomless())
    throw Error("atoms-present", "pure equilibria require an atomless measure");

  PureAssignment out;
  for (const ConsumerCell& cell : s.cells) {
    const double upper = cell.closed ? kTailSentinel : cell.hi;
    const Measure inside = mu.restricted(cell.lo, upper);

    struct Share {
      int target;
      double weight;
    };
    std::vector<Share> shares;
    if (cell.noconsume > 1e-12) shares.push_back({-1, cell.noconsume});
    for (int j = 0; j < s.producers; ++j)
      if (cell.weights[j] > 1e-12) shares.push_back({j, cell.weights[j]});
    if (shares.empty()) shares.push_back({-1, 1.0});

    const double mass = cell_mass(mu, cell);
    double cum = 0.0;
    double lo = cell.lo;
    for (std::size_t i = 0; i < shares.size(); ++i) {
      double hi;
      if (i + 1 == shares.size()) {
        hi = cell.hi;
      } else {
        cum += shares[i].weight * mass;
        hi = std::clamp(inside.sup_prefix(cum), cell.lo, cell.hi);
      }
      const bool piece_closed = cell.closed && i + 1 == shares.size();
      if (hi > lo || piece_closed) {
        if (!out.pieces.empty() && out.pieces.back().target == shares[i].target) {
          out.pieces.back().hi = hi;
          out.pieces.back().closed = piece_closed;
        } else {
          out.pieces.push_back({lo, hi, piece_closed, shares[i].target});
        }
      }
      lo = hi;
    }
  }
  return out;
}

EquilibriumReport verify_equilibrium(const Measure& mu, const StrategyProfile& levels,
                                     const ConsumerStrategy& s) {
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  if (s.producers != n)
    throw Error("cell-mismatch", "strategy built for a different producer count");

  // Cell boundaries must be the sorted distinct strategy values.
  std::vector<double> expected(levels);
  std::sort(expected.begin(), expected.end());
  expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
  if (!expected.empty() && expected.front() > 0.0) expected.insert(expected.begin(), 0.0);
  if (expected.empty()) expected.push_back(0.0);

  if (s.cells.size() != expected.size())
    throw Error("cell-mismatch", "cell boundaries do not match effective types");
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    if (std::abs(s.cells[i].lo - expected[i]) > 1e-12)
      throw Error("cell-mismatch", "cell boundaries do not match effective types");
    double hi = (i + 1 < s.cells.size()) ? expected[i + 1] : 1.0;
    if (std::abs(s.cells[i].hi - hi) > 1e-12 || (i + 1 == s.cells.size()) != s.cells[i].closed)
      throw Error("cell-mismatch", "cell boundaries do not match effective types");
    if (static_cast<int>(s.cells[i].weights.size()) != n && n > 0)
      throw Error("cell-mismatch", "cell weight vector has wrong arity");
    double sum = s.cells[i].noconsume;
    for (double w : s.cells[i].weights) {
      if (w < -1e-12) throw Error("cell-mismatch", "negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kEps)
      throw Error("cell-mismatch", "cell weights must sum to 1");
  }

  EquilibriumReport report;
  report.loads.loads.assign(n, 0.0);
  for (const ConsumerCell& cell : s.cells) {
    const double mass = cell_mass(mu, cell);
    report.loads.noconsume += cell.noconsume * mass;
    for (int j = 0; j < n; ++j) report.loads.loads[j] += cell.weights[j] * mass;
  }

  bool ok = true;
  double worst = 0.0;
  for (const ConsumerCell& cell : s.cells) {
    std::vector<int> acceptable;
    for (int j = 0; j < n; ++j)
      if (levels[j] <= cell.lo + 1e-12) acceptable.push_back(j);

    if (cell.noconsume > 1e-12 && !acceptable.empty()) ok = false;

    double min_acceptable = 0.0;
    bool have_min = false;
    for (int j : acceptable) {
      double l = report.loads.loads[j];
      if (!have_min || l < min_acceptable) {
        min_acceptable = l;
        have_min = true;
      }
    }
    for (int k = 0; k < n; ++k) {
      if (cell.weights[k] <= 1e-12) continue;
      if (std::find(acceptable.begin(), acceptable.end(), k) == acceptable.end()) {
        ok = false;  // weight on an unacceptable producer
        continue;
      }
      if (have_min) worst = std::max(worst, report.loads.loads[k] - min_acceptable);
    }
  }
  if (worst > kEps) ok = false;
  report.ok = ok;
  report.worst_violation = worst;
  return report;
}

}  // namespace qosmarket
