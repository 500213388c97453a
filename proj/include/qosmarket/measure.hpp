#pragma once

#include <vector>

#include "qosmarket/common.hpp"

namespace qosmarket {

struct Atom {
  double t;
  double mass;
};

struct Segment {
  double from;
  double to;
  double density;
};

/// Finite measure on the QoS space [0,1], represented as point atoms plus
/// piecewise-constant density segments. Immutable once constructed; every
/// interval mass is exact double arithmetic on the input values.
class Measure {
 public:
  Measure() = default;

  /// Sorts and validates; atoms at the same location are merged.
  static Measure create(std::vector<Atom> atoms, std::vector<Segment> segments);

  static Measure uniform(double density = 1.0);
  static Measure point(double t, double mass);

  /// mu([a,b)): an atom at a counts, an atom at b does not. b may exceed 1
  /// (sentinel semantics), in which case an atom at 1 counts.
  double mass_co(double a, double b) const;

  /// mu([a,1]), including an atom at 1.
  double mass_tail(double a) const;

  /// Max{t in [0,1] : mu([0,t)) <= m}. The maximum exists because the prefix
  /// function is left-continuous; flat stretches extend the maximizer right.
  double sup_prefix(double m) const;

  /// Measure agreeing with mu on [a,b) and vanishing elsewhere. b beyond 1
  /// means [a,1] (the atom at 1 survives).
  Measure restricted(double a, double b) const;

  double total() const { return total_; }
  bool atomless() const { return atoms_.empty(); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Atom> atoms_;       // strictly increasing t, positive masses
  std::vector<Segment> segments_; // disjoint, sorted by from, inside [0,1]
  double total_ = 0.0;
};

}  // namespace qosmarket
