#pragma once

// Sequence families k ↦ u_k for convergence experiments. A family is a JSON
// function template in which any number may be written {"k": {"a":..,"b":..,"pow":..}},
// meaning a + b k^pow. The built-in registry below uses the same format, so
// more families can be loaded from a file without recompiling.

#include "epimetric/io.hpp"

#include <map>
#include <string>
#include <vector>

namespace epimetric {

inline constexpr const char* kBuiltinFamilies = R"json([
  {
    "name": "shrinking-ball-indicator",
    "description": "I_{(1-1/k)B} + t in the plane",
    "k_min": 2,
    "k_max": 10000000,
    "epi_convergent": true,
    "super_coercive": true,
    "member": {"dim": 2, "kind": "indicator", "offset": 0.0,
               "body": {"kind": "ball", "center": [0, 0], "radius": {"k": {"a": 1, "b": -1, "pow": -1}}}},
    "limit": {"dim": 2, "kind": "indicator", "offset": 0.0, "body": {"kind": "ball", "center": [0, 0], "radius": 1}}
  },
  {
    "name": "vertical-shift",
    "description": "I_K + 1/k with K = [0, 1]",
    "k_min": 1,
    "k_max": 10000000,
    "epi_convergent": true,
    "super_coercive": true,
    "member": {"dim": 1, "kind": "indicator", "body": {"kind": "interval", "a": 0, "b": 1},
               "offset": {"k": {"a": 0, "b": 1, "pow": -1}}},
    "limit": {"dim": 1, "kind": "indicator", "body": {"kind": "interval", "a": 0, "b": 1}, "offset": 0}
  },
  {
    "name": "cone",
    "description": "n_lambda = |x|/lambda with lambda = 1 + 1/k",
    "k_min": 1,
    "k_max": 10000000,
    "epi_convergent": true,
    "super_coercive": false,
    "member": {"dim": 1, "kind": "norm_cone", "lambda": {"k": {"a": 1, "b": 1, "pow": -1}}},
    "limit": {"dim": 1, "kind": "norm_cone", "lambda": 1}
  },
  {
    "name": "constant",
    "description": "u_k = |x|^2/2 for every k",
    "k_min": 1,
    "k_max": 1000,
    "epi_convergent": true,
    "super_coercive": true,
    "member": {"dim": 1, "kind": "quadratic", "m": 0.5, "l": [0], "c": 0},
    "limit": {"dim": 1, "kind": "quadratic", "m": 0.5, "l": [0], "c": 0}
  },
  {
    "name": "quadratic-vertical",
    "description": "|x|^2/2 + 1/k in the plane",
    "k_min": 1,
    "k_max": 10000000,
    "epi_convergent": true,
    "super_coercive": true,
    "member": {"dim": 2, "kind": "quadratic", "m": [[0.5, 0], [0, 0.5]], "l": [0, 0], "c": {"k": {"a": 0, "b": 1, "pow": -1}}},
    "limit": {"dim": 2, "kind": "quadratic", "m": [[0.5, 0], [0, 0.5]], "l": [0, 0], "c": 0}
  },
  {
    "name": "quadratic-shift",
    "description": "|x - (1/k, 0)|^2/2 in the plane",
    "k_min": 1,
    "k_max": 10000000,
    "epi_convergent": true,
    "super_coercive": true,
    "member": {"dim": 2, "kind": "shifted", "x0": [{"k": {"a": 0, "b": 1, "pow": -1}}, 0], "t0": 0,
               "inner": {"dim": 2, "kind": "quadratic", "m": [[0.5, 0], [0, 0.5]], "l": [0, 0], "c": 0}},
    "limit": {"dim": 2, "kind": "quadratic", "m": [[0.5, 0], [0, 0.5]], "l": [0, 0], "c": 0}
  }
])json";

struct SequenceFamily {
    std::string name;
    std::string description;
    io::json member;  // template
    io::json limit_spec;
    bool epi_convergent = false;
    bool super_coercive = false;
    long k_min = 1;
    long k_max = 1000;

    [[nodiscard]] ConvexFunction make(long k) const;
    [[nodiscard]] ConvexFunction limit() const { return io::function_from_json(limit_spec); }
};

namespace detail {

inline bool is_k_expr(const io::json& j) { return j.is_object() && j.size() == 1 && j.contains("k"); }

inline io::json instantiate(const io::json& j, long k) {
    if (is_k_expr(j)) {
        const auto& e = j.at("k");
        const double a = e.value("a", 0.0), b = e.value("b", 0.0), p = e.value("pow", 1.0);
        return a + b * std::pow(static_cast<double>(k), p);
    }
    if (j.is_object()) {
        io::json out = io::json::object();
        for (const auto& [key, v] : j.items()) out[key] = instantiate(v, k);
        return out;
    }
    if (j.is_array()) {
        io::json out = io::json::array();
        for (const auto& v : j) out.push_back(instantiate(v, k));
        return out;
    }
    return j;
}

}  // namespace detail

inline ConvexFunction SequenceFamily::make(long k) const {
    if (k < k_min) throw std::invalid_argument("family " + name + ": index k = " + std::to_string(k) + " is below k_min = " + std::to_string(k_min));
    return io::function_from_json(detail::instantiate(member, k));
}

inline SequenceFamily family_from_json(const io::json& j) {
    SequenceFamily f;
    f.name = io::field(j, "name").get<std::string>();
    f.description = j.value("description", "");
    f.member = io::field(j, "member");
    f.limit_spec = io::field(j, "limit");
    f.epi_convergent = j.value("epi_convergent", false);
    f.super_coercive = j.value("super_coercive", false);
    f.k_min = j.value("k_min", 1L);
    f.k_max = j.value("k_max", 1000L);
    if (f.k_min < 1 || f.k_max < f.k_min) throw ParseError("family " + f.name + ": need 1 <= k_min <= k_max");
    return f;
}

class FamilyRegistry {
public:
    static FamilyRegistry builtin() {
        FamilyRegistry r;
        r.load(io::json::parse(kBuiltinFamilies));
        return r;
    }

    /// Adds (or replaces) families from a JSON array or {"families": [...]}.
    void load(const io::json& j) {
        const io::json& arr = j.is_object() && j.contains("families") ? j.at("families") : j;
        if (!arr.is_array()) throw ParseError("family registry: expected an array of families");
        for (const auto& f : arr) {
            auto fam = family_from_json(f);
            families_[fam.name] = std::move(fam);
        }
    }

    [[nodiscard]] const SequenceFamily& get(const std::string& name) const {
        auto it = families_.find(name);
        if (it == families_.end()) throw ParseError("unknown family \"" + name + "\"");
        return it->second;
    }

    [[nodiscard]] std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : families_) out.push_back(k);
        return out;
    }

private:
    std::map<std::string, SequenceFamily> families_;
};

/// The k-th member of a named built-in family.
inline ConvexFunction make_sequence(const std::string& family, long k) { return FamilyRegistry::builtin().get(family).make(k); }

/// About `points` geometrically spaced indices in [lo, hi], ending with hi-2, hi-1, hi.
inline std::vector<long> k_schedule(long lo, long hi, int points = 10) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("k_schedule: need 1 <= lo <= hi");
    std::vector<long> ks;
    const double ratio = points > 1 ? std::pow(static_cast<double>(hi) / static_cast<double>(lo), 1.0 / (points - 1)) : 2.0;
    double k = static_cast<double>(lo);
    for (int i = 0; i < points; ++i, k *= ratio) {
        const long kk = std::min(hi, static_cast<long>(std::llround(k)));
        if (ks.empty() || kk > ks.back()) ks.push_back(kk);
    }
    for (long t = std::max(lo, hi - 2); t <= hi; ++t) ks.push_back(t);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

}  // namespace epimetric
