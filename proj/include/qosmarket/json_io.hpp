#pragma once

#include <json.hpp>

#include "qosmarket/consumer.hpp"
#include "qosmarket/hetero.hpp"
#include "qosmarket/multigood.hpp"

namespace qosmarket {

using Json = nlohmann::json;

/// Round to 12 significant digits so emitted JSON is stable across runs.
double round_sig12(double x);
Json num(double x);

Json to_json(const Measure& mu);
Measure measure_from_json(const Json& j, const std::string& path);

Json to_json(const ResponseFunction& f);
ResponseFunction response_from_json(const Json& j, const std::string& path);

Json to_json(const LoadVector& lv);
Json to_json(const ConsumerStrategy& s);
Json to_json(const PureAssignment& a);
Json to_json(const PlanarPlacement& p);

}  // namespace qosmarket
