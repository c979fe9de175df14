#pragma once

#include <string>

#include "json.hpp"
#include "ldp/convex_fn.hpp"
#include "ldp/entropy.hpp"

namespace ldp {

using json = nlohmann::json;

/// Extended reals: finite doubles as numbers, +inf / -inf as "inf" / "-inf".
json ext_to_json(double v);
double ext_from_json(const json& j);

/// {"knots": [...], "values": [..., "inf", ...]}
json grid_to_json(const Vector<double>& knots, const Vector<double>& values);
json fn_to_json(const ExtConvexFn<double>& f);
ExtConvexFn<double> fn_from_json(const json& j);

/// {"atoms": [...], "weights": [...]}
json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const json& j);

json read_json_file(const std::string& path);

}  // namespace ldp
