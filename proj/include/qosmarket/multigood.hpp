#pragma once

#include <string>
#include <vector>

#include "qosmarket/hetero.hpp"

namespace qosmarket {

struct PlanarPlacement {
  int good = 1;  // 1 or 2
  int index = 0;
  double radius = 0.0;
  double angle = 0.0;  // radians, [0, 2pi)
};

struct MainstreetReport {
  bool ok = false;
  std::vector<std::string> violations;
};

/// The super-strong two-good equilibrium: every producer on the ray at
/// `angle`, distances per good as in the single-good fine Nash. Requires all
/// equilibrium loads positive and no nonempty proper subset of one good's
/// loads sharing a sum with one of the other good's.
std::vector<PlanarPlacement> mainstreet_equilibrium(const Measure& mu,
                                                    const std::vector<ResponseFunction>& fs1,
                                                    const std::vector<ResponseFunction>& fs2,
                                                    double angle);

/// Checks the characterization: a placement set is the equilibrium iff all
/// positive-radius placements share one ray and the per-good radii match the
/// single-good fine Nash distances for some ordering.
MainstreetReport verify_mainstreet(const Measure& mu,
                                   const std::vector<ResponseFunction>& fs1,
                                   const std::vector<ResponseFunction>& fs2,
                                   const std::vector<PlanarPlacement>& placements);

}  // namespace qosmarket
