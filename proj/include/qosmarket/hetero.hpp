#pragma once

#include <utility>
#include <vector>

#include "qosmarket/consumer.hpp"

namespace qosmarket {

/// Strictly increasing continuous piecewise-linear map from a producer's load
/// to the level consumers compare. Defined by (load, value) breakpoints
/// starting at load 0; extrapolates the last slope beyond the final point.
class ResponseFunction {
 public:
  static ResponseFunction create(std::vector<std::pair<double, double>> breakpoints);

  /// f(x) = x on [0, domain].
  static ResponseFunction identity(double domain = 4.0);
  /// f(x) = slope * x + offset on [0, domain].
  static ResponseFunction linear(double slope, double offset = 0.0, double domain = 4.0);

  double value_at(double load) const;

  /// Load held at surface level v: 0 when v is at or below the vessel floor.
  double load_at_level(double v) const;

  /// d load / d value on the open level interval (lo, hi); 0 below the floor.
  double inv_slope_between(double lo, double hi) const;

  double floor_value() const { return points_.front().second; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Two-way fill: distribute mass so that surfaces equalize at one common
/// level, vessels whose floor sits above the level staying empty. Exact
/// piecewise-linear solve on the candidate levels.
std::vector<double> water_fill(const std::vector<ResponseFunction>& fs, double mass);

/// Equilibrium loads of the consumer game where a consumer compares
/// f_j(load_j) instead of load_j. Reduces to compute_loads for identical fs.
LoadVector hetero_loads(const Measure& mu, const StrategyProfile& levels,
                        const std::vector<ResponseFunction>& fs);

/// Producer-equilibrium loads: the whole market water-filled over all vessels.
std::vector<double> tilde_loads(const Measure& mu, const std::vector<ResponseFunction>& fs);

/// The unique fine Nash equilibrium ordered by pi (position -> producer):
/// t_{pi(j)} = Max{t : mu([0,t)) <= sum of earlier producers' tilde loads}.
StrategyProfile hetero_fine_nash(const Measure& mu, const std::vector<ResponseFunction>& fs,
                                 const std::vector<int>& pi);

namespace detail {
struct Fill {
  std::vector<double> loads;
  double level = 0.0;
};
/// Water fill reporting the common level; mass <= 0 yields the lowest floor.
Fill fill_with_level(const std::vector<const ResponseFunction*>& fs, double mass);
}  // namespace detail

}  // namespace qosmarket
