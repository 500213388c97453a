#include "qosmarket/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qosmarket {

namespace detail {

void loads_from_sorted_prefixes(const double* prefix, int n, double total, double* out) {
  int k = 0;
  while (k < n) {
    double best = -std::numeric_limits<double>::infinity();
    double chosen_avg = 0.0;
    int chosen = -1;
    for (int k2 = k + 1; k2 <= n; ++k2) {
      const double mass = (k2 == n ? total : prefix[k2]) - prefix[k];
      const double avg = mass / static_cast<double>(k2 - k);
      if (avg >= best - kEps) {
        if (avg > best) best = avg;
        chosen_avg = avg;
        chosen = k2;
      }
    }
    for (int j = k; j < chosen; ++j) out[j] = chosen_avg;
    k = chosen;
  }
}

}  // namespace detail

namespace {

struct Chunk {
  double pos;
  double mass;
};

// Discretize mu in type order. Segment pieces are pre-split at the producer
// values so no chunk straddles an acceptability boundary.
std::vector<Chunk> discretize(const Measure& mu, const std::vector<double>& cuts,
                              double step) {
  std::vector<Chunk> chunks;
  struct Item {
    double pos;
    bool is_atom;
    double mass;     // atom
    double to;       // segment
    double density;  // segment
  };
  std::vector<Item> items;
  for (const Atom& a : mu.atoms()) items.push_back({a.t, true, a.mass, 0.0, 0.0});
  for (const Segment& s : mu.segments()) {
    double lo = s.from;
    std::vector<double> inner;
    for (double c : cuts)
      if (c > s.from && c < s.to) inner.push_back(c);
    std::sort(inner.begin(), inner.end());
    inner.push_back(s.to);
    for (double hi : inner) {
      if (hi > lo) items.push_back({lo, false, 0.0, hi, s.density});
      lo = hi;
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) {
              if (a.pos != b.pos) return a.pos < b.pos;
              return a.is_atom && !b.is_atom;  // atom at x precedes mass above x
            });

  for (const Item& it : items) {
    if (it.is_atom) {
      double left = it.mass;
      while (left > 0.0) {
        double m = std::min(step, left);
        chunks.push_back({it.pos, m});
        left -= m;
      }
    } else {
      if (it.density <= 0.0) continue;
      const double width = step / it.density;
      double lo = it.pos;
      while (lo < it.to) {
        double hi = std::min(lo + width, it.to);
        chunks.push_back({lo, it.density * (hi - lo)});
        lo = hi;
      }
    }
  }
  return chunks;
}

LoadVector pour_impl(const Measure& mu, const StrategyProfile& levels,
                     const std::vector<ResponseFunction>* fs, double step) {
  if (step <= 0.0) throw Error("invalid-range", "pour step must be positive");
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  if (fs && static_cast<int>(fs->size()) != n)
    throw Error("arity-mismatch", "one response function per producer");

  LoadVector out;
  out.loads.assign(n, 0.0);
  if (n == 0) {
    out.noconsume = mu.total();
    return out;
  }

  std::vector<int> order = detail::sorted_order(levels);
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = levels[order[i]];

  std::vector<double> loads(n, 0.0);  // sorted-producer order
  const std::vector<Chunk> chunks = discretize(mu, s, step);

  auto level_of = [&](int j) {
    return fs ? (*fs)[order[j]].value_at(loads[j]) : loads[j];
  };

  std::vector<int> argmin;
  for (const Chunk& c : chunks) {
    // Producers acceptable to type c.pos: sorted values <= pos.
    int hi = static_cast<int>(std::upper_bound(s.begin(), s.end(), c.pos) - s.begin());
    if (hi == 0) {
      out.noconsume += c.mass;
      continue;
    }
    double min_level = std::numeric_limits<double>::infinity();
    for (int j = 0; j < hi; ++j) min_level = std::min(min_level, level_of(j));
    argmin.clear();
    for (int j = 0; j < hi; ++j)
      if (level_of(j) <= min_level + 1e-12) argmin.push_back(j);
    const double share = c.mass / static_cast<double>(argmin.size());
    for (int j : argmin) loads[j] += share;
  }

  for (int i = 0; i < n; ++i) out.loads[order[i]] = loads[i];
  return out;
}

// Shared grid machinery -----------------------------------------------------

std::vector<double> quantile_candidates(const Measure& mu, int grid) {
  const double total = mu.total();
  std::vector<double> c;
  c.reserve(grid + 1);
  for (int q = 0; q <= grid; ++q) c.push_back(mu.sup_prefix(total * q / grid));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

std::int64_t quantize(double load) {
  return static_cast<std::int64_t>(std::llround(load * 1e12));
}

struct BestResponseEval {
  const Measure& mu;
  double total;
  std::vector<double> base_prefix;  // opponents' prefix masses, sorted

  explicit BestResponseEval(const Measure& m, const StrategyProfile& others)
      : mu(m), total(m.total()) {
    std::vector<double> sorted(others);
    std::sort(sorted.begin(), sorted.end());
    for (double t : sorted) base_prefix.push_back(m.mass_co(0.0, t));
  }

  double load_at(double candidate_prefix) const {
    const int n = static_cast<int>(base_prefix.size()) + 1;
    double arr[64];
    double out[64];
    int pos = static_cast<int>(std::lower_bound(base_prefix.begin(), base_prefix.end(),
                                                candidate_prefix) -
                               base_prefix.begin());
    for (int i = 0; i < pos; ++i) arr[i] = base_prefix[i];
    arr[pos] = candidate_prefix;
    for (int i = pos; i < n - 1; ++i) arr[i + 1] = base_prefix[i];
    detail::loads_from_sorted_prefixes(arr, n, total, out);
    return out[pos];
  }
};

double grid_best_response_impl(const Measure& mu, const StrategyProfile& others, int grid,
                               Preference, bool parallel) {
  if (grid < 2) throw Error("invalid-range", "grid must be >= 2");
  detail::check_profile(others);
  if (others.size() > 62) throw Error("search-space-too-large", "too many producers");

  std::vector<double> candidates = quantile_candidates(mu, grid);
  for (int q = 0; q <= grid; ++q) candidates.push_back(static_cast<double>(q) / grid);
  for (double t : others) {
    candidates.push_back(std::max(0.0, t - 1e-9));
    candidates.push_back(t);
    candidates.push_back(std::min(1.0, t + 1e-9));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<double> cand_prefix(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    cand_prefix[i] = mu.mass_co(0.0, candidates[i]);

  const BestResponseEval eval(mu, others);
  const int count = static_cast<int>(candidates.size());

  // Coarse and fine preferences agree on the maximizer: both take the largest
  // value among the load maximizers. Ties are judged on quantized loads so the
  // parallel reduction is order-independent.
  std::int64_t best_q = std::numeric_limits<std::int64_t>::min();
  double best_t = 0.0;

#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel
    {
      std::int64_t local_q = std::numeric_limits<std::int64_t>::min();
      double local_t = 0.0;
#pragma omp for nowait
      for (int i = 0; i < count; ++i) {
        const std::int64_t q = quantize(eval.load_at(cand_prefix[i]));
        if (q > local_q || (q == local_q && candidates[i] > local_t)) {
          local_q = q;
          local_t = candidates[i];
        }
      }
#pragma omp critical
      {
        if (local_q > best_q || (local_q == best_q && local_t > best_t)) {
          best_q = local_q;
          best_t = local_t;
        }
      }
    }
    return best_t;
  }
#else
  (void)parallel;
#endif

  for (int i = 0; i < count; ++i) {
    const std::int64_t q = quantize(eval.load_at(cand_prefix[i]));
    if (q > best_q || (q == best_q && candidates[i] > best_t)) {
      best_q = q;
      best_t = candidates[i];
    }
  }
  return best_t;
}

// Joint-deviation search ----------------------------------------------------

struct CoalitionEval {
  int n = 0;
  int m = 0;
  double total = 0.0;
  std::vector<double> fixed_prefix;  // non-members, sorted
  std::vector<double> before;       // member loads at the base profile
  std::vector<double> base_values;  // member strategies at the base profile
  Preference pref = Preference::Coarse;

  // Member candidate prefixes/values are shared.
  std::vector<double> cand_value;
  std::vector<double> cand_prefix;

  bool improves(const int* idx, double* after) const {
    double arr[64];
    int slot[8];
    const int fixed = n - m;
    for (int i = 0; i < fixed; ++i) arr[i] = fixed_prefix[i];
    int size = fixed;
    for (int a = 0; a < m; ++a) {
      const double p = cand_prefix[idx[a]];
      int pos = static_cast<int>(std::lower_bound(arr, arr + size, p) - arr);
      for (int i = size; i > pos; --i) arr[i] = arr[i - 1];
      arr[pos] = p;
      for (int b = 0; b < a; ++b)
        if (slot[b] >= pos) ++slot[b];
      slot[a] = pos;
      ++size;
    }
    double out[64];
    detail::loads_from_sorted_prefixes(arr, n, total, out);

    bool strict = false;
    for (int a = 0; a < m; ++a) {
      after[a] = out[slot[a]];
      const double gain = after[a] - before[a];
      const double dv = cand_value[idx[a]] - base_values[a];
      if (pref == Preference::Coarse) {
        if (gain < -kEps) return false;
        if (gain > kEps) strict = true;
      } else {
        const bool load_up = gain > kEps;
        const bool load_tie = std::abs(gain) <= kEps;
        if (!load_up && !(load_tie && dv >= -1e-12)) return false;
        if (load_up || (load_tie && dv > 1e-12)) strict = true;
      }
    }
    return strict;
  }
};

CoalitionEval make_coalition_eval(const Measure& mu, const StrategyProfile& levels,
                                  const std::vector<int>& coalition, int grid,
                                  Preference pref) {
  detail::check_profile(levels);
  const int n = static_cast<int>(levels.size());
  if (n == 0) throw Error("empty-game", "coalition search needs n >= 1");
  if (n > 62) throw Error("search-space-too-large", "too many producers");
  if (coalition.empty()) throw Error("empty-subset", "coalition must be nonempty");
  std::vector<bool> member(n, false);
  for (int j : coalition) {
    if (j < 0 || j >= n || member[j])
      throw Error("invalid-range", "coalition must be a set of producer indices");
    member[j] = true;
  }
  if (grid < 2) throw Error("invalid-range", "grid must be >= 2");

  CoalitionEval ev;
  ev.n = n;
  ev.m = static_cast<int>(coalition.size());
  if (ev.m > 6) throw Error("search-space-too-large", "coalition cap is 6 members");
  ev.total = mu.total();
  ev.pref = pref;

  for (int j = 0; j < n; ++j)
    if (!member[j]) ev.fixed_prefix.push_back(mu.mass_co(0.0, levels[j]));
  std::sort(ev.fixed_prefix.begin(), ev.fixed_prefix.end());

  const LoadVector base = compute_loads(mu, levels);
  for (int j : coalition) {
    ev.before.push_back(base.loads[j]);
    ev.base_values.push_back(levels[j]);
  }

  ev.cand_value = quantile_candidates(mu, grid);
  for (double v : ev.cand_value) ev.cand_prefix.push_back(mu.mass_co(0.0, v));

  const double tuples = std::pow(static_cast<double>(ev.cand_value.size()), ev.m);
  if (tuples > 2e8) throw Error("search-space-too-large", "candidate grid too fine");
  return ev;
}

std::optional<CoalitionDeviation> deviation_from(const CoalitionEval& ev,
                                                 const std::vector<int>& coalition,
                                                 std::int64_t linear) {
  const int c = static_cast<int>(ev.cand_value.size());
  int idx[8];
  for (int a = ev.m - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(linear % c);
    linear /= c;
  }
  double after[8];
  if (!ev.improves(idx, after)) return std::nullopt;
  CoalitionDeviation dev;
  dev.members = coalition;
  for (int a = 0; a < ev.m; ++a) {
    dev.values.push_back(ev.cand_value[idx[a]]);
    dev.before.push_back(ev.before[a]);
    dev.after.push_back(after[a]);
  }
  return dev;
}

std::optional<CoalitionDeviation> coalition_search_impl(const Measure& mu,
                                                        const StrategyProfile& levels,
                                                        const std::vector<int>& coalition,
                                                        int grid, Preference pref,
                                                        bool parallel) {
  const CoalitionEval ev = make_coalition_eval(mu, levels, coalition, grid, pref);
  const int c = static_cast<int>(ev.cand_value.size());
  std::int64_t tuples = 1;
  for (int a = 0; a < ev.m; ++a) tuples *= c;

  std::int64_t found = std::numeric_limits<std::int64_t>::max();

#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel
    {
      std::int64_t local = std::numeric_limits<std::int64_t>::max();
      int idx[8];
      double after[8];
#pragma omp for nowait schedule(static)
      for (std::int64_t lin = 0; lin < tuples; ++lin) {
        std::int64_t rest = lin;
        for (int a = ev.m - 1; a >= 0; --a) {
          idx[a] = static_cast<int>(rest % c);
          rest /= c;
        }
        if (lin < local && ev.improves(idx, after)) local = lin;
      }
#pragma omp critical
      found = std::min(found, local);
    }
    if (found == std::numeric_limits<std::int64_t>::max()) return std::nullopt;
    return deviation_from(ev, coalition, found);
  }
#else
  (void)parallel;
#endif

  int idx[8];
  double after[8];
  for (std::int64_t lin = 0; lin < tuples; ++lin) {
    std::int64_t rest = lin;
    for (int a = ev.m - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % c);
      rest /= c;
    }
    if (ev.improves(idx, after)) {
      found = lin;
      break;
    }
  }
  if (found == std::numeric_limits<std::int64_t>::max()) return std::nullopt;
  return deviation_from(ev, coalition, found);
}

}  // namespace

LoadVector pour_loads(const Measure& mu, const StrategyProfile& levels, double step) {
  return pour_impl(mu, levels, nullptr, step);
}

LoadVector pour_loads(const Measure& mu, const StrategyProfile& levels,
                      const std::vector<ResponseFunction>& fs, double step) {
  return pour_impl(mu, levels, &fs, step);
}

double grid_best_response(const Measure& mu, const StrategyProfile& others, int grid,
                          Preference pref) {
  return grid_best_response_impl(mu, others, grid, pref, true);
}

double grid_best_response_serial(const Measure& mu, const StrategyProfile& others, int grid,
                                 Preference pref) {
  return grid_best_response_impl(mu, others, grid, pref, false);
}

std::optional<CoalitionDeviation> coalition_search(const Measure& mu,
                                                   const StrategyProfile& levels,
                                                   const std::vector<int>& coalition,
                                                   int grid, Preference pref) {
  return coalition_search_impl(mu, levels, coalition, grid, pref, true);
}

std::optional<CoalitionDeviation> coalition_search_serial(const Measure& mu,
                                                          const StrategyProfile& levels,
                                                          const std::vector<int>& coalition,
                                                          int grid, Preference pref) {
  return coalition_search_impl(mu, levels, coalition, grid, pref, false);
}

Measure InstanceGenerator::random_measure(int max_atoms, int max_segments) {
  for (;;) {
    std::vector<Atom> atoms;
    const int na = random_int(0, max_atoms);
    for (int i = 0; i < na; ++i) atoms.push_back({uniform(0.0, 1.0), uniform(0.05, 0.4)});

    std::vector<Segment> segments;
    const int ns = random_int(0, max_segments);
    if (ns > 0) {
      std::vector<double> cuts;
      for (int i = 0; i < 2 * ns; ++i) cuts.push_back(uniform(0.0, 1.0));
      std::sort(cuts.begin(), cuts.end());
      for (int i = 0; i < ns; ++i) {
        double lo = cuts[2 * i], hi = cuts[2 * i + 1];
        if (hi - lo > 1e-3) segments.push_back({lo, hi, uniform(0.2, 2.5)});
      }
    }
    Measure mu = Measure::create(std::move(atoms), std::move(segments));
    if (mu.total() > 0.1) return mu;
  }
}

Measure InstanceGenerator::random_atomless(int max_segments) {
  for (;;) {
    std::vector<Segment> segments;
    const int ns = random_int(1, std::max(1, max_segments));
    std::vector<double> cuts;
    for (int i = 0; i < 2 * ns; ++i) cuts.push_back(uniform(0.0, 1.0));
    std::sort(cuts.begin(), cuts.end());
    for (int i = 0; i < ns; ++i) {
      double lo = cuts[2 * i], hi = cuts[2 * i + 1];
      if (hi - lo > 1e-3) segments.push_back({lo, hi, uniform(0.2, 2.5)});
    }
    Measure mu = Measure::create({}, std::move(segments));
    if (mu.total() > 0.1) return mu;
  }
}

StrategyProfile InstanceGenerator::random_profile(int n) {
  StrategyProfile t(n);
  for (double& v : t) v = uniform(0.0, 1.0);
  return t;
}

ResponseFunction InstanceGenerator::random_response(double min_slope, double max_slope,
                                                    int max_pieces, double max_offset,
                                                    double domain) {
  const int pieces = random_int(1, max_pieces);
  std::vector<double> xs;
  xs.push_back(0.0);
  for (int i = 1; i < pieces; ++i) xs.push_back(uniform(0.05, domain - 0.05));
  xs.push_back(domain);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<std::pair<double, double>> bps;
  double v = uniform(0.0, max_offset);
  bps.emplace_back(0.0, v);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    v += uniform(min_slope, max_slope) * (xs[i] - xs[i - 1]);
    bps.emplace_back(xs[i], v);
  }
  return ResponseFunction::create(std::move(bps));
}

int InstanceGenerator::random_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

double InstanceGenerator::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

}  // namespace qosmarket
