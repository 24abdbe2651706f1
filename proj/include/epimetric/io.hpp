#pragma once

// JSON encodings of bodies, functions, weights, isometry specs and results.
// Extended reals are written as numbers or the strings "inf" / "-inf".

#include "epimetric/isometry.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace epimetric::io {

using json = nlohmann::json;

inline double number(const json& j, const std::string& what = "number") {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ParseError(what + ": expected a number or \"inf\", got " + j.dump());
}

inline json number_json(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\" in " + j.dump());
    return j.at(key);
}

inline double field_number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
    if (fallback && (!j.is_object() || !j.contains(key))) return *fallback;
    return number(field(j, key), key);
}

inline Vec vec(const json& j, const std::string& what = "vector") {
    if (j.is_number()) return Vec::Constant(1, j.get<double>());
    if (!j.is_array()) throw ParseError(what + ": expected an array, got " + j.dump());
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
    return v;
}

inline json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v[i]));
    return a;
}

/// Square matrix from rows; a bare number is a 1x1 matrix.
inline Mat mat(const json& j, const std::string& what = "matrix") {
    if (j.is_number()) return Mat::Constant(1, 1, j.get<double>());
    if (!j.is_array() || j.empty()) throw ParseError(what + ": expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 1);
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Vec row = vec(j[static_cast<std::size_t>(r)], what);
        if (row.size() != cols) throw ParseError(what + ": ragged rows");
        m.row(r) = row.transpose();
    }
    return m;
}

inline json mat_json(const Mat& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
    return a;
}

// ---------------------------------------------------------------------------
// bodies

inline ConvexBody body_from_json(const json& j) {
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "polygon2d") {
        std::vector<Vec2> pts;
        for (const auto& p : field(j, "vertices")) {
            const Vec v = vec(p, "vertex");
            if (v.size() != 2) throw ParseError("polygon2d: vertices must be [x, y]");
            pts.emplace_back(v[0], v[1]);
        }
        return j.value("hull", false) ? ConvexBody::hull(std::move(pts)) : ConvexBody::polygon(std::move(pts));
    }
    if (kind == "ball") return ConvexBody::ball(vec(field(j, "center")), field_number(j, "radius"));
    if (kind == "box") return ConvexBody::box(vec(field(j, "lo")), vec(field(j, "hi")));
    if (kind == "interval") return ConvexBody::interval(field_number(j, "a"), field_number(j, "b"));
    if (kind == "ellipsoid") return ConvexBody::ellipsoid(vec(field(j, "center")), mat(field(j, "shape")));
    if (kind == "support_sampled") {
        std::vector<Vec> dirs;
        for (const auto& d : field(j, "directions")) dirs.push_back(vec(d, "direction"));
        std::vector<double> vals;
        for (const auto& v : field(j, "values")) vals.push_back(number(v));
        return ConvexBody::support_sampled(std::move(dirs), std::move(vals));
    }
    if (kind == "empty") return ConvexBody::empty(j.value("dim", 1));
    throw ParseError("unknown body kind \"" + kind + "\"");
}

inline json body_to_json(const ConvexBody& k) {
    return std::visit(overloaded{
                          [](const Polygon2D& p) {
                              json v = json::array();
                              for (const auto& q : p.vertices) v.push_back({q.x(), q.y()});
                              return json{{"kind", "polygon2d"}, {"vertices", v}};
                          },
                          [](const Ball& b) { return json{{"kind", "ball"}, {"center", vec_json(b.center)}, {"radius", b.radius}}; },
                          [](const Box& b) {
                              if (b.lo.size() == 1) return json{{"kind", "interval"}, {"a", b.lo[0]}, {"b", b.hi[0]}};
                              return json{{"kind", "box"}, {"lo", vec_json(b.lo)}, {"hi", vec_json(b.hi)}};
                          },
                          [](const Ellipsoid& e) {
                              return json{{"kind", "ellipsoid"}, {"center", vec_json(e.center)}, {"shape", mat_json(e.shape)}};
                          },
                          [](const SupportSampled& s) {
                              json d = json::array();
                              for (const auto& v : s.directions) d.push_back(vec_json(v));
                              return json{{"kind", "support_sampled"}, {"directions", d}, {"values", s.values}};
                          },
                          [](const EmptySet& e) { return json{{"kind", "empty"}, {"dim", e.dim}}; },
                      },
                      k.variant());
}

// ---------------------------------------------------------------------------
// weights

inline WeightFunction weight_from_json(const json& j) {
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "exponential") return WeightFunction::exponential(field_number(j, "c", 1.0));
    if (kind == "power_tail") return WeightFunction::power_tail(field_number(j, "q"), field_number(j, "shift", 1.0));
    if (kind == "tabulated") {
        TabulatedWeight tab;
        for (const auto& t : field(j, "t")) tab.t.push_back(number(t));
        for (const auto& v : field(j, "values")) tab.values.push_back(number(v));
        if (j.contains("sup")) tab.sup = number(j.at("sup"));
        if (j.contains("dominating")) {
            const auto d = weight_from_json(j.at("dominating"));
            if (const auto* e = std::get_if<ExponentialWeight>(&d.form())) {
                tab.dominating = *e;
            } else if (const auto* p = std::get_if<PowerTailWeight>(&d.form())) {
                tab.dominating = *p;
            } else {
                throw ParseError("tabulated: the dominating weight must be exponential or power_tail");
            }
        }
        return WeightFunction::tabulated(std::move(tab));
    }
    throw ParseError("unknown weight kind \"" + kind + "\"");
}

inline json weight_to_json(const WeightFunction& z) {
    return std::visit(overloaded{
                          [](const ExponentialWeight& e) { return json{{"kind", "exponential"}, {"c", e.c}}; },
                          [](const PowerTailWeight& p) { return json{{"kind", "power_tail"}, {"q", p.q}, {"shift", p.shift}}; },
                          [](const TabulatedWeight& t) {
                              json j{{"kind", "tabulated"}, {"t", t.t}, {"values", t.values}};
                              if (t.sup) j["sup"] = number_json(*t.sup);
                              if (t.dominating) {
                                  j["dominating"] = std::visit(
                                      overloaded{
                                          [](const ExponentialWeight& e) { return json{{"kind", "exponential"}, {"c", e.c}}; },
                                          [](const PowerTailWeight& p) {
                                              return json{{"kind", "power_tail"}, {"q", p.q}, {"shift", p.shift}};
                                          },
                                      },
                                      *t.dominating);
                              }
                              return j;
                          },
                      },
                      z.form());
}

// ---------------------------------------------------------------------------
// functions

inline std::vector<double> read_csv_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open value file " + path.string());
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r"), e = cell.find_last_not_of(" \t\r");
            if (b == std::string::npos) continue;
            const auto tok = cell.substr(b, e - b + 1);
            if (tok == "inf" || tok == "+inf") {
                out.push_back(kInf);
                continue;
            }
            try {
                std::size_t used = 0;
                out.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw ParseError("bad value \"" + tok + "\" in " + path.string());
            } catch (const std::logic_error&) {
                throw ParseError("bad value \"" + tok + "\" in " + path.string());
            }
        }
    }
    return out;
}

inline ConvexFunction function_from_json(const json& j, const std::filesystem::path& base = {}) {
    const auto kind = field(j, "kind").get<std::string>();
    const int dim = j.value("dim", 0);
    auto sub = [&](const char* key) { return function_from_json(field(j, key), base); };
    ConvexFunction f = [&]() -> ConvexFunction {
        if (kind == "indicator") return ConvexFunction::indicator(body_from_json(field(j, "body")), field_number(j, "offset", 0.0));
        if (kind == "quadratic") {
            const Mat m = mat(field(j, "m"), "m");
            const Vec l = j.contains("l") ? vec(j.at("l"), "l") : Vec::Zero(m.rows());
            return ConvexFunction::quadratic(m, l, field_number(j, "c", 0.0));
        }
        if (kind == "norm_cone") return ConvexFunction::norm_cone(dim, field_number(j, "lambda"));
        if (kind == "support") return ConvexFunction::support(body_from_json(field(j, "body")));
        if (kind == "affine_norm") return ConvexFunction::affine_norm(dim, field_number(j, "a"), field_number(j, "b", 0.0));
        if (kind == "shifted") return ConvexFunction::shifted(sub("inner"), vec(field(j, "x0"), "x0"), field_number(j, "t0", 0.0));
        if (kind == "linear") return ConvexFunction::linear(sub("inner"), mat(field(j, "m"), "m"));
        if (kind == "tilted") return ConvexFunction::tilted(sub("inner"), vec(field(j, "l"), "l"), field_number(j, "c", 0.0));
        if (kind == "max" || kind == "sum") {
            std::vector<ConvexFunction> terms;
            for (const auto& t : field(j, "terms")) terms.push_back(function_from_json(t, base));
            return kind == "max" ? ConvexFunction::maximum(std::move(terms)) : ConvexFunction::sum(std::move(terms));
        }
        if (kind == "grid") {
            GridData g;
            g.lo = vec(field(j, "lo"), "lo");
            g.hi = vec(field(j, "hi"), "hi");
            for (const auto& r : field(j, "res")) g.res.push_back(r.get<int>());
            if (j.contains("values")) {
                for (const auto& v : j.at("values")) g.values.push_back(number(v, "grid value"));
            } else {
                g.values = read_csv_values(base / field(j, "csv").get<std::string>());
            }
            return ConvexFunction::grid(std::move(g), field_number(j, "eps_cvx", 1e-9));
        }
        if (kind == "rescaled") return ConvexFunction::rescaled(sub("inner"), weight_from_json(field(j, "zeta")), field_number(j, "det"));
        throw ParseError("unknown function kind \"" + kind + "\"");
    }();
    if (dim != 0 && dim != f.dim()) {
        throw ParseError("function spec declares dim " + std::to_string(dim) + " but describes dimension " + std::to_string(f.dim()));
    }
    return f;
}

inline json function_to_json(const ConvexFunction& f) {
    using namespace fn;
    json j = std::visit(
        overloaded{
            [](const IndicatorPlus& s) { return json{{"body", body_to_json(s.body)}, {"offset", s.offset}}; },
            [](const Quadratic& q) { return json{{"m", mat_json(q.m)}, {"l", vec_json(q.l)}, {"c", q.c}}; },
            [](const NormCone& c) { return json{{"lambda", c.lambda}}; },
            [](const SupportFn& s) { return json{{"body", body_to_json(s.body)}}; },
            [](const AffineNorm& a) { return json{{"a", a.a}, {"b", a.b}}; },
            [](const Shifted& s) { return json{{"inner", function_to_json(s.inner)}, {"x0", vec_json(s.x0)}, {"t0", s.t0}}; },
            [](const Linear& l) { return json{{"inner", function_to_json(l.inner)}, {"m", mat_json(l.m)}}; },
            [](const Tilted& t) { return json{{"inner", function_to_json(t.inner)}, {"l", vec_json(t.l)}, {"c", t.c}}; },
            [](const Maximum& m) {
                json terms = json::array();
                for (const auto& t : m.terms) terms.push_back(function_to_json(t));
                return json{{"terms", terms}};
            },
            [](const Sum& m) {
                json terms = json::array();
                for (const auto& t : m.terms) terms.push_back(function_to_json(t));
                return json{{"terms", terms}};
            },
            [](const Grid& g) {
                // Only the sampled box is written; an exact exterior is not representable.
                json vals = json::array();
                for (double v : g.data.values) vals.push_back(number_json(v));
                return json{{"lo", vec_json(g.data.lo)}, {"hi", vec_json(g.data.hi)}, {"res", g.data.res}, {"values", vals}};
            },
            [](const Rescaled& r) {
                return json{{"inner", function_to_json(r.inner)}, {"zeta", weight_to_json(r.zeta)}, {"det", r.det}};
            },
        },
        f.node().v);
    j["kind"] = kind_name(f);
    j["dim"] = f.dim();
    return j;
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

inline ConvexFunction read_function(const std::filesystem::path& path) {
    return function_from_json(read_json_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// isometry specs and results

inline IsometrySpec isometry_from_json(const json& j) {
    const Mat phi = mat(field(j, "phi"), "phi");
    const Vec x0 = j.contains("x0") ? vec(j.at("x0"), "x0") : Vec::Zero(phi.rows());
    const auto z = j.contains("zeta") ? weight_from_json(j.at("zeta")) : WeightFunction::exponential(1.0);
    try {
        return IsometrySpec(phi, x0, z);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

inline json isometry_to_json(const IsometrySpec& s) {
    return json{{"phi", mat_json(s.phi)}, {"x0", vec_json(s.x0)}, {"zeta", weight_to_json(s.zeta)}};
}

inline json result_to_json(const MetricResult& r) {
    json d = json::object();
    for (const auto& [k, v] : r.detail) d[k] = number_json(v);
    return json{{"value", number_json(r.value)},
                {"infinite", r.infinite()},
                {"truncation_bound", number_json(r.truncation_bound)},
                {"quadrature_error", number_json(r.quadrature_error)},
                {"budget", number_json(r.budget())},
                {"method", to_string(r.method)},
                {"detail", d}};
}

inline json report_to_json(const IsometryReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"before", r.before}, {"after", r.after}, {"deviation", r.deviation}, {"budget", r.budget}, {"pass", r.pass()}});
    }
    return json{{"rows", rows}, {"max_deviation", rep.max_deviation()}, {"pass", rep.pass()}};
}

}  // namespace epimetric::io
