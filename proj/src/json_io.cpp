#include "ldp/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ldp/error.hpp"

namespace ldp {

json ext_to_json(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  return v;
}

double ext_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::InputParse, "expected a number or \"inf\", got " + j.dump());
}

json grid_to_json(const Vector<double>& knots, const Vector<double>& values) {
  json k = json::array(), v = json::array();
  for (Index i = 0; i < knots.size(); ++i) k.push_back(knots(i));
  for (Index i = 0; i < values.size(); ++i) v.push_back(ext_to_json(values(i)));
  return {{"knots", std::move(k)}, {"values", std::move(v)}};
}

json fn_to_json(const ExtConvexFn<double>& f) {
  return grid_to_json(f.knots(), f.values());
}

ExtConvexFn<double> fn_from_json(const json& j) {
  if (!j.is_object() || !j.contains("knots") || !j.contains("values") ||
      !j["knots"].is_array() || !j["values"].is_array()) {
    throw Error(ErrorCode::InputParse,
                "function grid needs \"knots\" and \"values\" arrays");
  }
  const auto& jk = j["knots"];
  const auto& jv = j["values"];
  Vector<double> knots(Index(jk.size())), values(Index(jv.size()));
  for (std::size_t i = 0; i < jk.size(); ++i) {
    if (!jk[i].is_number()) {
      throw Error(ErrorCode::InputParse, "knots must be numbers");
    }
    knots(Index(i)) = jk[i].get<double>();
  }
  for (std::size_t i = 0; i < jv.size(); ++i) values(Index(i)) = ext_from_json(jv[i]);
  return ExtConvexFn<double>(std::move(knots), std::move(values));
}

json measure_to_json(const DiscreteMeasure& mu) {
  return {{"atoms", mu.atoms()}, {"weights", mu.weights()}};
}

DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("weights")) {
    throw Error(ErrorCode::InputParse,
                "measure needs \"atoms\" and \"weights\" arrays");
  }
  try {
    return DiscreteMeasure(j["atoms"].get<std::vector<double>>(),
                           j["weights"].get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InputParse, std::string("measure: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InputParse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InputParse, path + ": " + e.what());
  }
}

}  // namespace ldp
