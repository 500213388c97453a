#include "qosmarket/measure.hpp"

#include <algorithm>
#include <cmath>

namespace qosmarket {

Measure Measure::create(std::vector<Atom> atoms, std::vector<Segment> segments) {
  for (const Atom& a : atoms) {
    if (!(a.t >= 0.0 && a.t <= 1.0) || !std::isfinite(a.mass))
      throw Error("invariant-violation", "atom location must lie in [0,1]");
    if (a.mass < 0.0)
      throw Error("invariant-violation", "atom mass must be nonnegative");
  }
  for (const Segment& s : segments) {
    if (!(s.from >= 0.0 && s.to <= 1.0 && s.from < s.to))
      throw Error("invariant-violation", "segment must satisfy 0 <= from < to <= 1");
    if (!(s.density >= 0.0) || !std::isfinite(s.density))
      throw Error("invariant-violation", "segment density must be nonnegative");
  }

  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& x, const Atom& y) { return x.t < y.t; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (a.mass == 0.0) continue;
    if (!merged.empty() && merged.back().t == a.t)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }

  std::stable_sort(segments.begin(), segments.end(),
                   [](const Segment& x, const Segment& y) { return x.from < y.from; });
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].from < segments[i - 1].to)
      throw Error("invariant-violation", "segments must be pairwise disjoint");
  }

  Measure mu;
  mu.atoms_ = std::move(merged);
  mu.segments_ = std::move(segments);
  for (const Atom& a : mu.atoms_) mu.total_ += a.mass;
  for (const Segment& s : mu.segments_) mu.total_ += s.density * (s.to - s.from);
  return mu;
}

Measure Measure::uniform(double density) {
  return create({}, {{0.0, 1.0, density}});
}

Measure Measure::point(double t, double mass) {
  return create({{t, mass}}, {});
}

double Measure::mass_co(double a, double b) const {
  if (a < 0.0 || a > b) throw Error("invalid-range", "mass_co requires 0 <= a <= b");
  double m = 0.0;
  for (const Atom& at : atoms_)
    if (at.t >= a && at.t < b) m += at.mass;
  for (const Segment& s : segments_) {
    double lo = std::max(s.from, a);
    double hi = std::min(s.to, b);
    if (hi > lo) m += s.density * (hi - lo);
  }
  return m;
}

double Measure::mass_tail(double a) const {
  if (a < 0.0 || a > 1.0) throw Error("invalid-range", "mass_tail requires a in [0,1]");
  return mass_co(a, kTailSentinel);
}

double Measure::sup_prefix(double m) const {
  if (m < 0.0) throw Error("invalid-range", "sup_prefix requires m >= 0");

  std::vector<double> bps;
  bps.reserve(atoms_.size() + 2 * segments_.size() + 2);
  bps.push_back(0.0);
  bps.push_back(1.0);
  for (const Atom& a : atoms_) bps.push_back(a.t);
  for (const Segment& s : segments_) {
    bps.push_back(s.from);
    bps.push_back(s.to);
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  double best = 0.0;
  double prefix = 0.0;  // F(bps[i]) = mu([0, bps[i]))
  for (std::size_t i = 0; i < bps.size(); ++i) {
    if (prefix <= m)
      best = bps[i];
    else
      break;
    if (i + 1 == bps.size()) break;

    double atom_here = 0.0;
    for (const Atom& a : atoms_)
      if (a.t == bps[i]) atom_here += a.mass;
    double density = 0.0;
    double mid = 0.5 * (bps[i] + bps[i + 1]);
    for (const Segment& s : segments_)
      if (s.from <= mid && mid < s.to) density = s.density;

    double room = m - (prefix + atom_here);
    if (room >= 0.0 && density > 0.0) {
      double cross = bps[i] + room / density;
      if (cross < bps[i + 1]) {
        best = cross;
        break;
      }
    }
    // room < 0: F exceeds m immediately past bps[i]; zero density stretches
    // are flat, the next breakpoint picks them up.
    prefix += atom_here + density * (bps[i + 1] - bps[i]);
  }
  return std::min(best, 1.0);
}

Measure Measure::restricted(double a, double b) const {
  if (a < 0.0 || a > b || b > kTailSentinel)
    throw Error("invalid-range", "restricted requires 0 <= a <= b");
  std::vector<Atom> atoms;
  for (const Atom& at : atoms_)
    if (at.t >= a && at.t < b) atoms.push_back(at);
  std::vector<Segment> segments;
  for (const Segment& s : segments_) {
    double lo = std::max(s.from, a);
    double hi = std::min(s.to, b);
    if (hi > lo) segments.push_back({lo, hi, s.density});
  }
  return create(std::move(atoms), std::move(segments));
}

}  // namespace qosmarket
