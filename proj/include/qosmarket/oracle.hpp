#pragma once

#include <optional>
#include <random>
#include <vector>

#include "qosmarket/hetero.hpp"
#include "qosmarket/producer.hpp"

namespace qosmarket {

/// Brute-force load computation: the measure is discretized into increments
/// of at most `step` mass, poured in consumer-type order; each increment
/// joins an acceptable vessel of minimal level (f-level when fs are given),
/// splitting equally on ties. Accurate to O(step * n).
LoadVector pour_loads(const Measure& mu, const StrategyProfile& levels, double step);
LoadVector pour_loads(const Measure& mu, const StrategyProfile& levels,
                      const std::vector<ResponseFunction>& fs, double step);

/// Best response by grid search over prefix quantiles, a uniform grid, and
/// the opponents' values. OpenMP-parallel over candidates with a
/// deterministic reduction; the _serial variant is the reference kept for
/// testing and benchmarking.
double grid_best_response(const Measure& mu, const StrategyProfile& others, int grid,
                          Preference pref = Preference::Fine);
double grid_best_response_serial(const Measure& mu, const StrategyProfile& others, int grid,
                                 Preference pref = Preference::Fine);

struct CoalitionDeviation {
  std::vector<int> members;
  std::vector<double> values;  // deviation strategies, by member order
  std::vector<double> before;  // member loads at the original profile
  std::vector<double> after;   // member loads at the deviation
};

/// Exhaustive product-grid search for a joint deviation where every coalition
/// member weakly gains and someone strictly gains. Candidates per member are
/// the prefix quantiles {sup_prefix(q * mu(T) / grid)}. Returns the first
/// improving deviation in candidate order, or nothing. Parallel; _serial is
/// the reference.
std::optional<CoalitionDeviation> coalition_search(const Measure& mu,
                                                   const StrategyProfile& levels,
                                                   const std::vector<int>& coalition,
                                                   int grid,
                                                   Preference pref = Preference::Coarse);
std::optional<CoalitionDeviation> coalition_search_serial(const Measure& mu,
                                                          const StrategyProfile& levels,
                                                          const std::vector<int>& coalition,
                                                          int grid,
                                                          Preference pref = Preference::Coarse);

/// Seeded source of random test instances; also backs the CLI oracle-check
/// fan-out so runs are reproducible.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  Measure random_measure(int max_atoms = 3, int max_segments = 4);
  Measure random_atomless(int max_segments = 4);
  StrategyProfile random_profile(int n);
  ResponseFunction random_response(double min_slope = 0.2, double max_slope = 5.0,
                                   int max_pieces = 3, double max_offset = 0.3,
                                   double domain = 4.0);
  int random_int(int lo, int hi);
  double uniform(double lo, double hi);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

namespace detail {
/// The block-averaging load computation expressed on sorted prefix masses;
/// the shared inner kernel of the grid searches.
void loads_from_sorted_prefixes(const double* prefix, int n, double total, double* out);
}  // namespace detail

}  // namespace qosmarket
