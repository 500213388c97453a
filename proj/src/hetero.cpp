#include "qosmarket/hetero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qosmarket {

ResponseFunction ResponseFunction::create(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.size() < 2)
    throw Error("non-increasing-function", "response function needs at least two breakpoints");
  if (breakpoints.front().first != 0.0)
    throw Error("non-increasing-function", "response function domain must start at load 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i].first <= breakpoints[i - 1].first)
      throw Error("non-increasing-function", "breakpoint loads must be strictly increasing");
    if (breakpoints[i].second <= breakpoints[i - 1].second)
      throw Error("non-increasing-function", "response function must be strictly increasing");
  }
  ResponseFunction f;
  f.points_ = std::move(breakpoints);
  return f;
}

ResponseFunction ResponseFunction::identity(double domain) {
  return create({{0.0, 0.0}, {domain, domain}});
}

ResponseFunction ResponseFunction::linear(double slope, double offset, double domain) {
  if (slope <= 0.0) throw Error("non-increasing-function", "slope must be positive");
  return create({{0.0, offset}, {domain, offset + slope * domain}});
}

double ResponseFunction::value_at(double load) const {
  const auto& p = points_;
  std::size_t i = p.size() - 1;
  for (std::size_t j = 1; j < p.size(); ++j) {
    if (load <= p[j].first) {
      i = j;
      break;
    }
  }
  const double x0 = p[i - 1].first, v0 = p[i - 1].second;
  const double x1 = p[i].first, v1 = p[i].second;
  return v0 + (load - x0) * (v1 - v0) / (x1 - x0);
}

double ResponseFunction::load_at_level(double v) const {
  const auto& p = points_;
  if (v <= p.front().second) return 0.0;
  std::size_t i = p.size() - 1;
  for (std::size_t j = 1; j < p.size(); ++j) {
    if (v <= p[j].second) {
      i = j;
      break;
    }
  }
  const double x0 = p[i - 1].first, v0 = p[i - 1].second;
  const double x1 = p[i].first, v1 = p[i].second;
  return x0 + (v - v0) * (x1 - x0) / (v1 - v0);
}

double ResponseFunction::inv_slope_between(double lo, double hi) const {
  const double mid = 0.5 * (lo + hi);
  const auto& p = points_;
  if (mid <= p.front().second) return 0.0;
  std::size_t i = p.size() - 1;
  for (std::size_t j = 1; j < p.size(); ++j) {
    if (mid <= p[j].second) {
      i = j;
      break;
    }
  }
  return (p[i].first - p[i - 1].first) / (p[i].second - p[i - 1].second);
}

namespace detail {

Fill fill_with_level(const std::vector<const ResponseFunction*>& fs, double mass) {
  Fill out;
  out.loads.assign(fs.size(), 0.0);
  double min_floor = std::numeric_limits<double>::infinity();
  for (const ResponseFunction* f : fs) min_floor = std::min(min_floor, f->floor_value());
  if (mass <= 0.0) {
    out.level = min_floor;
    return out;
  }

  std::vector<double> candidates;
  for (const ResponseFunction* f : fs)
    for (const auto& bp : f->breakpoints()) candidates.push_back(bp.second);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto filled_at = [&](double v) {
    double sum = 0.0;
    for (const ResponseFunction* f : fs) sum += f->load_at_level(v);
    return sum;
  };

  double prev = candidates.front();
  double prev_sum = 0.0;
  double level = candidates.back();
  bool solved = false;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double cur = candidates[i];
    const double cur_sum = filled_at(cur);
    if (cur_sum >= mass) {
      double slope = 0.0;
      for (const ResponseFunction* f : fs) slope += f->inv_slope_between(prev, cur);
      level = prev + (mass - prev_sum) / slope;
      solved = true;
      break;
    }
    prev = cur;
    prev_sum = cur_sum;
  }
  if (!solved) {
    // Beyond the last breakpoint every function extrapolates its last piece.
    double slope = 0.0;
    for (const ResponseFunction* f : fs)
      slope += f->inv_slope_between(prev, prev + 1.0);
    level = prev + (mass - prev_sum) / slope;
  }

  out.level = level;
  for (std::size_t j = 0; j < fs.size(); ++j) out.loads[j] = fs[j]->load_at_level(level);
  return out;
}

}  // namespace detail

std::vector<double> water_fill(const std::vector<ResponseFunction>& fs, double mass) {
  if (mass < 0.0) throw Error("negative-input", "mass must be >= 0");
  std::vector<const ResponseFunction*> ptrs;
  ptrs.reserve(fs.size());
  for (const ResponseFunction& f : fs) ptrs.push_back(&f);
  return detail::fill_with_level(ptrs, mass).loads;
}

LoadVector hetero_loads(const Measure& mu, const StrategyProfile& levels,
                        const std::vector<ResponseFunction>& fs) {
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  if (static_cast<int>(fs.size()) != n)
    throw Error("arity-mismatch", "one response function per producer");

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
    double best_level = -std::numeric_limits<double>::infinity();
    int chosen = -1;
    detail::Fill chosen_fill;
    std::vector<const ResponseFunction*> block;
    for (int k2 = k + 1; k2 <= n; ++k2) {
      block.push_back(&fs[order[k2 - 1]]);
      const double m = mu.mass_co(s[k], k2 == n ? kTailSentinel : s[k2]);
      detail::Fill fill = detail::fill_with_level(block, m);
      if (fill.level >= best_level - kEps) {
        best_level = std::max(best_level, fill.level);
        chosen = k2;
        chosen_fill = std::move(fill);
      }
    }
    for (int j = k; j < chosen; ++j) sorted_loads[j] = chosen_fill.loads[j - k];
    k = chosen;
  }

  out.loads.assign(n, 0.0);
  for (int i = 0; i < n; ++i) out.loads[order[i]] = sorted_loads[i];
  return out;
}

std::vector<double> tilde_loads(const Measure& mu, const std::vector<ResponseFunction>& fs) {
  return water_fill(fs, mu.total());
}

StrategyProfile hetero_fine_nash(const Measure& mu, const std::vector<ResponseFunction>& fs,
                                 const std::vector<int>& pi) {
  const int n = static_cast<int>(fs.size());
  if (n < 1) throw Error("empty-game", "heterogeneous fine Nash needs n >= 1");
  if (static_cast<int>(pi.size()) != n)
    throw Error("invalid-permutation", "permutation arity mismatch");
  std::vector<bool> seen(n, false);
  for (int j : pi) {
    if (j < 0 || j >= n || seen[j])
      throw Error("invalid-permutation", "not a permutation of the producers");
    seen[j] = true;
  }

  const std::vector<double> tl = tilde_loads(mu, fs);
  bool hit_zero = false;
  for (int j = 0; j < n; ++j) {
    if (tl[pi[j]] <= 1e-12) {
      hit_zero = true;
    } else if (hit_zero) {
      throw Error("invalid-permutation",
                  "zero-load producers must come after all loaded producers");
    }
  }

  StrategyProfile t(n, 0.0);
  double partial = 0.0;
  for (int j = 0; j < n; ++j) {
    t[pi[j]] = mu.sup_prefix(partial);
    partial += tl[pi[j]];
  }
  return t;
}

}  // namespace qosmarket
