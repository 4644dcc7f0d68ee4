#pragma once

#include "weierkern/curve.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace weierkern {

using json = nlohmann::ordered_json;

// Parsed curve file: {"variables":[...], "f":"<expr>", "g":"<expr>",
// "tolerance":1e-9}; plane curves use two variables and omit "g".
struct CurveFile {
    std::optional<SpaceCurve> space;
    std::optional<PlaneCurve> plane;
    double tolerance;
};

CurveFile load_curve_file(const std::string& path);

// JSON array of points, each a length-3 array whose entries are numbers or
// {"re":..., "im":...} objects.
std::vector<Triple> load_points_file(const std::string& path);

// Constant expression "a", "a+bi", "-2.5i"; reuses the polynomial lexer.
Complex parse_scalar(const std::string& text);

// Three comma-separated constant expressions.
Triple parse_triple(const std::string& text);

json complex_json(Complex z);
json triple_json(const Triple& t);

// Shortest round-trip decimal for every number; keys in fixed insertion order.
std::string dump_json(const json& j);

} // namespace weierkern
