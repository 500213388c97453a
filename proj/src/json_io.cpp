#include "qosmarket/json_io.hpp"

#include <cstdio>
#include <cstdlib>

namespace qosmarket {

double round_sig12(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json num(double x) { return Json(round_sig12(x)); }

namespace {

double require_number(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error("schema-error", path + "/" + key + " must be a number");
  return j[key].get<double>();
}

}  // namespace

Json to_json(const Measure& mu) {
  Json atoms = Json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back({{"t", num(a.t)}, {"mass", num(a.mass)}});
  Json segments = Json::array();
  for (const Segment& s : mu.segments())
    segments.push_back({{"from", num(s.from)}, {"to", num(s.to)}, {"density", num(s.density)}});
  return Json{{"atoms", atoms}, {"segments", segments}};
}

Measure measure_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw Error("schema-error", path + " must be an object");
  std::vector<Atom> atoms;
  std::vector<Segment> segments;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw Error("schema-error", path + "/atoms must be an array");
    int i = 0;
    for (const Json& a : j["atoms"]) {
      const std::string p = path + "/atoms/" + std::to_string(i++);
      atoms.push_back({require_number(a, "t", p), require_number(a, "mass", p)});
      if (atoms.back().mass < 0.0) throw Error("schema-error", p + "/mass must be >= 0");
    }
  }
  if (j.contains("segments")) {
    if (!j["segments"].is_array())
      throw Error("schema-error", path + "/segments must be an array");
    int i = 0;
    for (const Json& s : j["segments"]) {
      const std::string p = path + "/segments/" + std::to_string(i++);
      segments.push_back({require_number(s, "from", p), require_number(s, "to", p),
                          require_number(s, "density", p)});
      if (segments.back().density < 0.0)
        throw Error("schema-error", p + "/density must be >= 0");
    }
  }
  try {
    return Measure::create(std::move(atoms), std::move(segments));
  } catch (const Error& e) {
    throw Error("schema-error", path + ": " + e.what());
  }
}

Json to_json(const ResponseFunction& f) {
  Json bps = Json::array();
  for (auto [load, value] : f.breakpoints())
    bps.push_back({{"load", num(load)}, {"value", num(value)}});
  return Json{{"breakpoints", bps}};
}

ResponseFunction response_from_json(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("breakpoints") || !j["breakpoints"].is_array())
    throw Error("schema-error", path + "/breakpoints must be an array");
  std::vector<std::pair<double, double>> bps;
  int i = 0;
  for (const Json& b : j["breakpoints"]) {
    const std::string p = path + "/breakpoints/" + std::to_string(i++);
    bps.emplace_back(require_number(b, "load", p), require_number(b, "value", p));
  }
  try {
    return ResponseFunction::create(std::move(bps));
  } catch (const Error& e) {
    throw Error("schema-error", path + ": " + e.what());
  }
}

Json to_json(const LoadVector& lv) {
  Json loads = Json::array();
  for (double l : lv.loads) loads.push_back(num(l));
  return Json{{"noconsume", num(lv.noconsume)}, {"loads", loads}};
}

Json to_json(const ConsumerStrategy& s) {
  Json cells = Json::array();
  for (const ConsumerCell& cell : s.cells) {
    Json weights = Json::array();
    for (double w : cell.weights) weights.push_back(num(w));
    cells.push_back({{"lo", num(cell.lo)},
                     {"hi", num(cell.hi)},
                     {"closed", cell.closed},
                     {"weights", weights},
                     {"noconsume", num(cell.noconsume)}});
  }
  return Json{{"producers", s.producers}, {"cells", cells}};
}

Json to_json(const PureAssignment& a) {
  Json pieces = Json::array();
  for (const AssignmentPiece& p : a.pieces)
    pieces.push_back({{"lo", num(p.lo)},
                      {"hi", num(p.hi)},
                      {"closed", p.closed},
                      {"target", p.target}});
  return Json{{"pieces", pieces}};
}

Json to_json(const PlanarPlacement& p) {
  return Json{{"good", p.good}, {"index", p.index}, {"radius", num(p.radius)},
              {"angle", num(p.angle)}};
}

}  // namespace qosmarket
