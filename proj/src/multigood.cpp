#include "qosmarket/multigood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qosmarket {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

double angle_gap(double a, double b) {
  double d = std::abs(normalize_angle(a) - normalize_angle(b));
  return std::min(d, kTwoPi - d);
}

std::vector<double> proper_subset_sums(const std::vector<double>& loads) {
  const int n = static_cast<int>(loads.size());
  if (n > 16) throw Error("search-space-too-large", "subset-sum check capped at 16 producers");
  std::vector<double> sums;
  const unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask < full; ++mask) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) s += loads[j];
    sums.push_back(s);
  }
  std::sort(sums.begin(), sums.end());
  return sums;
}

void check_genericity(const std::vector<double>& tl1, const std::vector<double>& tl2) {
  for (double l : tl1)
    if (l <= 1e-12) throw Error("zero-load-producer", "every equilibrium load must be positive");
  for (double l : tl2)
    if (l <= 1e-12) throw Error("zero-load-producer", "every equilibrium load must be positive");

  const std::vector<double> s1 = proper_subset_sums(tl1);
  const std::vector<double> s2 = proper_subset_sums(tl2);
  std::size_t i = 0, j = 0;
  while (i < s1.size() && j < s2.size()) {
    const double d = s1[i] - s2[j];
    if (std::abs(d) <= kEps)
      throw Error("genericity-violation",
                  "proper subsets of the two goods' loads share a sum");
    if (d < 0.0)
      ++i;
    else
      ++j;
  }
}

std::vector<int> identity_permutation(int n) {
  std::vector<int> pi(n);
  std::iota(pi.begin(), pi.end(), 0);
  return pi;
}

bool radii_match_some_ordering(const Measure& mu, const std::vector<ResponseFunction>& fs,
                               const std::vector<double>& radii) {
  const int n = static_cast<int>(fs.size());
  if (n > 8) throw Error("search-space-too-large", "radius matching capped at 8 producers");
  std::vector<int> pi = identity_permutation(n);
  std::sort(pi.begin(), pi.end());
  do {
    StrategyProfile expected;
    try {
      expected = hetero_fine_nash(mu, fs, pi);
    } catch (const Error&) {
      continue;  // ordering invalid for zero loads
    }
    bool match = true;
    for (int j = 0; j < n && match; ++j)
      if (std::abs(expected[j] - radii[j]) > kEps) match = false;
    if (match) return true;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return false;
}

}  // namespace

std::vector<PlanarPlacement> mainstreet_equilibrium(const Measure& mu,
                                                    const std::vector<ResponseFunction>& fs1,
                                                    const std::vector<ResponseFunction>& fs2,
                                                    double angle) {
  if (fs1.empty() || fs2.empty())
    throw Error("empty-game", "both goods need at least one producer");
  check_genericity(tilde_loads(mu, fs1), tilde_loads(mu, fs2));

  const double a = normalize_angle(angle);
  std::vector<PlanarPlacement> placements;
  for (int good = 1; good <= 2; ++good) {
    const auto& fs = good == 1 ? fs1 : fs2;
    const StrategyProfile radii =
        hetero_fine_nash(mu, fs, identity_permutation(static_cast<int>(fs.size())));
    for (int j = 0; j < static_cast<int>(fs.size()); ++j)
      placements.push_back({good, j, radii[j], a});
  }
  return placements;
}

MainstreetReport verify_mainstreet(const Measure& mu,
                                   const std::vector<ResponseFunction>& fs1,
                                   const std::vector<ResponseFunction>& fs2,
                                   const std::vector<PlanarPlacement>& placements) {
  if (fs1.empty() || fs2.empty())
    throw Error("empty-game", "both goods need at least one producer");
  check_genericity(tilde_loads(mu, fs1), tilde_loads(mu, fs2));

  const int n1 = static_cast<int>(fs1.size());
  const int n2 = static_cast<int>(fs2.size());
  std::vector<double> radii1(n1, -1.0), radii2(n2, -1.0);
  std::vector<const PlanarPlacement*> positive;
  for (const PlanarPlacement& p : placements) {
    if (p.good != 1 && p.good != 2)
      throw Error("arity-mismatch", "placement good must be 1 or 2");
    auto& radii = p.good == 1 ? radii1 : radii2;
    const int n = p.good == 1 ? n1 : n2;
    if (p.index < 0 || p.index >= n || radii[p.index] >= 0.0)
      throw Error("arity-mismatch", "placements must cover each producer exactly once");
    if (p.radius < 0.0 || p.radius > 1.0)
      throw Error("invalid-range", "placement radius must lie in [0,1]");
    radii[p.index] = p.radius;
    if (p.radius > 1e-12) positive.push_back(&p);
  }
  for (double r : radii1)
    if (r < 0.0) throw Error("arity-mismatch", "placements must cover each producer exactly once");
  for (double r : radii2)
    if (r < 0.0) throw Error("arity-mismatch", "placements must cover each producer exactly once");

  MainstreetReport report;
  report.ok = true;

  // A producer at the origin sits on every ray; the angle condition binds
  // only at positive radii.
  for (std::size_t i = 1; i < positive.size(); ++i) {
    if (angle_gap(positive[i]->angle, positive[0]->angle) > kEps) {
      report.ok = false;
      report.violations.push_back(
          "off-ray pair: good " + std::to_string(positive[0]->good) + " index " +
          std::to_string(positive[0]->index) + " vs good " +
          std::to_string(positive[i]->good) + " index " + std::to_string(positive[i]->index));
    }
  }

  if (!radii_match_some_ordering(mu, fs1, radii1)) {
    report.ok = false;
    report.violations.push_back("radius mismatch: good 1");
  }
  if (!radii_match_some_ordering(mu, fs2, radii2)) {
    report.ok = false;
    report.violations.push_back("radius mismatch: good 2");
  }
  return report;
}

}  // namespace qosmarket
