#include "weierkern/jsonio.hpp"

#include "weierkern/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace weierkern {

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_usage("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw_usage(path + ": " + e.what());
    }
}

Complex entry_to_complex(const json& v, const std::string& where) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_object() && v.contains("re") && v.contains("im") && v["re"].is_number() &&
        v["im"].is_number())
        return Complex(v["re"].get<double>(), v["im"].get<double>());
    throw_usage(where + ": expected a number or {\"re\":...,\"im\":...}");
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

} // namespace

CurveFile load_curve_file(const std::string& path) {
    json j = read_json(path);
    if (!j.is_object()) throw_usage(path + ": curve file must be a JSON object");
    if (!j.contains("variables") || !j["variables"].is_array())
        throw_usage(path + ": missing \"variables\" array");
    std::vector<std::string> vars;
    for (const auto& v : j["variables"]) {
        if (!v.is_string()) throw_usage(path + ": variable names must be strings");
        vars.push_back(v.get<std::string>());
    }
    if (vars.size() != 2 && vars.size() != 3)
        throw_usage(path + ": need two variables (plane) or three (space)");
    if (!j.contains("f") || !j["f"].is_string())
        throw_usage(path + ": missing \"f\" expression");

    double tol = 1e-9;
    if (j.contains("tolerance")) {
        if (!j["tolerance"].is_number()) throw_usage(path + ": tolerance must be a number");
        tol = j["tolerance"].get<double>();
        if (!(tol > 0.0) || tol >= 1.0) throw_usage(path + ": tolerance must be in (0, 1)");
    }

    CurveFile out;
    out.tolerance = tol;
    MultiPoly f = MultiPoly::parse(j["f"].get<std::string>(), vars);
    if (vars.size() == 3) {
        if (!j.contains("g") || !j["g"].is_string())
            throw_usage(path + ": space curves need a \"g\" expression");
        MultiPoly g = MultiPoly::parse(j["g"].get<std::string>(), vars);
        out.space.emplace(std::move(f), std::move(g), tol);
    } else {
        if (j.contains("g")) throw_usage(path + ": plane curves must omit \"g\"");
        out.plane.emplace(std::move(f), tol);
    }
    return out;
}

std::vector<Triple> load_points_file(const std::string& path) {
    json j = read_json(path);
    if (!j.is_array()) throw_usage(path + ": points file must be a JSON array");
    std::vector<Triple> out;
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& row = j[i];
        std::string where = path + " point " + std::to_string(i);
        if (!row.is_array() || row.size() != 3)
            throw_usage(where + ": expected a length-3 array");
        Triple t;
        for (size_t k = 0; k < 3; ++k) t[k] = entry_to_complex(row[k], where);
        out.push_back(t);
    }
    return out;
}

Complex parse_scalar(const std::string& text) {
    MultiPoly p = MultiPoly::parse(text, {"__scalar"});
    if (p.total_degree() > 0) throw_usage("expected a constant expression: " + text);
    return p.coeff({0, 0, 0, 0});
}

Triple parse_triple(const std::string& text) {
    std::vector<std::string> parts = split_commas(text);
    Triple t;
    if (parts.size() == 3) {
        for (size_t k = 0; k < 3; ++k) t[k] = parse_scalar(parts[k]);
    } else if (parts.size() == 6) {
        // re,im pair per coordinate
        for (size_t k = 0; k < 3; ++k) {
            Complex re = parse_scalar(parts[2 * k]);
            Complex im = parse_scalar(parts[2 * k + 1]);
            if (re.imag() != 0.0 || im.imag() != 0.0)
                throw_usage("re,im components must be real: " + text);
            t[k] = Complex(re.real(), im.real());
        }
    } else {
        throw_usage("expected three coordinates (or three re,im pairs): " + text);
    }
    return t;
}

json complex_json(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw_convergence("non-finite value in output");
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json triple_json(const Triple& t) {
    return json::array({complex_json(t[0]), complex_json(t[1]), complex_json(t[2])});
}

std::string dump_json(const json& j) { return j.dump(); }

} // namespace weierkern
