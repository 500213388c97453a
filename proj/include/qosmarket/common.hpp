#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qosmarket {

/// Absolute tolerance used for all mass/position comparisons.
inline constexpr double kEps = 1e-9;

/// Strategy value standing for "beyond the top of the QoS space"; any value
/// above 1 works, interval masses clamp their contributions to [0,1].
inline constexpr double kTailSentinel = 2.0;

/// Producer preference order: coarse maximizes load only; fine breaks load
/// ties toward the larger (cheaper) strategy value.
enum class Preference { Coarse, Fine };

/// Error with a stable machine-readable code ("invalid-range", "not-sorted", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace qosmarket
