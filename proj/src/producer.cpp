#include "qosmarket/producer.hpp"

#include <algorithm>
#include <cmath>

namespace qosmarket {

NashReport is_coarse_nash(const Measure& mu, const StrategyProfile& levels, double eps) {
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  if (n == 0) throw Error("empty-game", "coarse Nash test needs n >= 1");

  std::vector<double> s(levels);
  std::sort(s.begin(), s.end());

  NashReport report;
  report.is_nash = true;
  report.slack.resize(n);
  const double total = mu.total();
  for (int j = 0; j < n; ++j) {
    report.slack[j] = mu.mass_co(0.0, s[j]) - total * j / n;
    if (report.slack[j] > eps) report.is_nash = false;
  }
  return report;
}

StrategyProfile fine_nash(const Measure& mu, int n) {
  if (n < 1) throw Error("empty-game", "fine Nash needs n >= 1");
  StrategyProfile t(n);
  const double total = mu.total();
  for (int j = 0; j < n; ++j) t[j] = mu.sup_prefix(total * j / n);
  return t;
}

std::vector<int> canonicalize(const Measure& mu, const StrategyProfile& levels, int k) {
  const int n = static_cast<int>(levels.size());
  if (k < 0 || k >= n) throw Error("invalid-range", "producer index out of range");
  if (!is_coarse_nash(mu, levels).is_nash)
    throw Error("not-coarse-nash", "canonical form is defined for coarse Nash profiles");

  std::vector<int> pi = detail::sorted_order(levels);
  int pos = static_cast<int>(std::find(pi.begin(), pi.end(), k) - pi.begin());
  const double total = mu.total();
  while (pos < n - 1 &&
         mu.mass_co(0.0, levels[pi[pos + 1]]) <= total * pos / n + kEps) {
    std::swap(pi[pos], pi[pos + 1]);
    ++pos;
  }
  return pi;
}

double fine_best_response(const Measure& mu, const StrategyProfile& others) {
  detail::check_profile(others);
  Measure nu = mu;
  std::vector<double> opp(others);
  std::sort(opp.begin(), opp.end());

  for (;;) {
    const int n = static_cast<int>(opp.size()) + 1;

    // Opponent mass below the lowest opponent forces a jump to the front.
    if (!opp.empty() && nu.mass_co(0.0, opp.front()) > kEps)
      return nu.sup_prefix(0.0);

    StrategyProfile full(opp);
    full.push_back(0.0);
    if (is_coarse_nash(nu, full).is_nash) {
      std::vector<int> pi = canonicalize(nu, full, n - 1);
      int pos = static_cast<int>(std::find(pi.begin(), pi.end(), n - 1) - pi.begin());
      return nu.sup_prefix(nu.total() * pos / n);
    }

    // Not a coarse Nash: cut the game at the first load drop and keep only
    // the opponents below the cut.
    LoadVector lv = compute_loads(nu, full);
    std::vector<double> sorted_loads;
    sorted_loads.reserve(n);
    std::vector<int> order = detail::sorted_order(full);
    for (int i = 0; i < n; ++i) sorted_loads.push_back(lv.loads[order[i]]);

    const double top = sorted_loads[0];
    int k = -1;
    for (int i = 1; i < n; ++i) {
      if (sorted_loads[i] < top - kEps) {
        k = i;
        break;
      }
    }
    // A drop must exist, otherwise the profile would have been a coarse Nash.
    nu = nu.restricted(0.0, opp[k - 1]);
    opp.resize(k - 1);
  }
}

namespace {

void check_mixed(const MixedStrategy& p) {
  if (p.support.empty())
    throw Error("malformed-distribution", "mixed strategy needs nonempty support");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    auto [t, prob] = p.support[i];
    if (!(t >= 0.0 && t <= 1.0))
      throw Error("malformed-distribution", "support point outside [0,1]");
    if (prob <= 0.0) throw Error("malformed-distribution", "probabilities must be positive");
    if (i > 0 && t <= p.support[i - 1].first)
      throw Error("malformed-distribution", "support must be strictly increasing");
    sum += prob;
  }
  if (std::abs(sum - 1.0) > kEps)
    throw Error("malformed-distribution", "probabilities must sum to 1");
}

}  // namespace

bool is_coarse_mixed_nash(const Measure& mu, const std::vector<MixedStrategy>& profile) {
  const int n = static_cast<int>(profile.size());
  if (n == 0) throw Error("empty-game", "mixed Nash test needs n >= 1");
  std::vector<double> maxes;
  maxes.reserve(n);
  for (const MixedStrategy& p : profile) {
    check_mixed(p);
    maxes.push_back(p.max_support());
  }
  std::sort(maxes.begin(), maxes.end());
  const double total = mu.total();
  for (int j = 0; j < n; ++j)
    if (mu.mass_co(0.0, maxes[j]) > total * j / n + kEps) return false;
  return true;
}

StrategyProfile sample_profile(const std::vector<MixedStrategy>& profile,
                               std::mt19937_64& rng) {
  StrategyProfile out;
  out.reserve(profile.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const MixedStrategy& p : profile) {
    double r = u(rng);
    double acc = 0.0;
    double value = p.support.back().first;
    for (auto [t, prob] : p.support) {
      acc += prob;
      if (r <= acc) {
        value = t;
        break;
      }
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace qosmarket
