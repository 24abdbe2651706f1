#pragma once

// Convergence experiments: run selected metrics along a family and judge each.

#include "epimetric/families.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace epimetric::lab {

enum class MetricKind { DeltaZetaP, DeltaZeta1ViaMeasure, DeltaZetaH, TildeIntegral, DeltaConjugate, RwEpi };

inline const std::vector<std::pair<std::string, MetricKind>>& metric_names() {
    static const std::vector<std::pair<std::string, MetricKind>> names{
        {"delta-zeta-p", MetricKind::DeltaZetaP},       {"delta-zeta-1-via-measure", MetricKind::DeltaZeta1ViaMeasure},
        {"delta-zeta-H", MetricKind::DeltaZetaH},       {"tilde-integral", MetricKind::TildeIntegral},
        {"delta-conjugate", MetricKind::DeltaConjugate}, {"rw-epi", MetricKind::RwEpi},
    };
    return names;
}

inline MetricKind parse_metric(const std::string& s) {
    for (const auto& [name, kind] : metric_names()) {
        if (name == s) return kind;
    }
    std::string all;
    for (const auto& [name, kind] : metric_names()) all += (all.empty() ? "" : ", ") + name;
    throw ParseError("unknown metric \"" + s + "\" (expected one of: " + all + ")");
}

inline std::string metric_name(MetricKind k) {
    for (const auto& [name, kind] : metric_names()) {
        if (kind == k) return name;
    }
    return "?";
}

struct MetricSettings {
    WeightFunction zeta = WeightFunction::exponential(1.0);
    double p = 1.0;
    MetricOptions options;
};

inline MetricResult run_metric(MetricKind kind, const ConvexFunction& u, const ConvexFunction& v, const MetricSettings& s) {
    switch (kind) {
        case MetricKind::DeltaZetaP: return delta_zeta_p(u, v, s.zeta, s.p, s.options);
        case MetricKind::DeltaZeta1ViaMeasure: return delta_zeta_1_via_measure(u, v, s.zeta, s.options);
        case MetricKind::DeltaZetaH: return delta_zeta_H(u, v, s.zeta, s.options);
        case MetricKind::TildeIntegral: return tilde_integral_metric(u, v, s.zeta, s.options);
        case MetricKind::DeltaConjugate: return delta_conjugate(u, v, s.options);
        default: return epi_distance_rw(u, v, s.options);
    }
}

enum class Verdict { Converged, NotConverged, Diverged, Refused };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::NotConverged: return "not-converged";
        case Verdict::Diverged: return "diverged";
        default: return "refused";
    }
}

struct Row {
    long k = 0;
    MetricKind metric{};
    MetricResult result;
    std::string refusal;  // admissibility message when the metric refused the pair
};

struct MetricVerdict {
    MetricKind metric{};
    Verdict verdict{};
    std::string reason;
};

struct ConvergenceReport {
    std::string family;
    bool epi_convergent = false;
    bool super_coercive = false;
    double tol = 1e-3;
    std::vector<Row> rows;
    std::vector<MetricVerdict> verdicts;

    [[nodiscard]] std::vector<const Row*> series(MetricKind m) const {
        std::vector<const Row*> out;
        for (const auto& r : rows) {
            if (r.metric == m) out.push_back(&r);
        }
        return out;
    }
    [[nodiscard]] Verdict verdict(MetricKind m) const {
        for (const auto& v : verdicts) {
            if (v.metric == m) return v.verdict;
        }
        throw std::invalid_argument("metric " + metric_name(m) + " was not run");
    }
};

/// Converged: the last three values are below tol and the series never rises by
/// more than the two budgets involved.
inline MetricVerdict judge(const std::vector<const Row*>& s, MetricKind m, double tol) {
    MetricVerdict v{m, Verdict::NotConverged, ""};
    for (const auto* r : s) {
        if (!r->refusal.empty()) return {m, Verdict::Refused, r->refusal};
        if (r->result.infinite()) return {m, Verdict::Diverged, "infinite at k = " + std::to_string(r->k)};
    }
    if (s.size() < 3) {
        v.reason = "fewer than three indices";
        return v;
    }
    for (std::size_t i = s.size() - 3; i < s.size(); ++i) {
        if (!(s[i]->result.value < tol)) {
            v.reason = "value at k = " + std::to_string(s[i]->k) + " is not below tol";
            return v;
        }
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const auto& a = s[i]->result;
        const auto& b = s[i + 1]->result;
        if (b.value > a.value + a.budget() + b.budget() + 1e-12) {
            v.reason = "rises between k = " + std::to_string(s[i]->k) + " and k = " + std::to_string(s[i + 1]->k);
            return v;
        }
    }
    v.verdict = Verdict::Converged;
    return v;
}

inline ConvergenceReport converge(const SequenceFamily& fam, const std::vector<MetricKind>& metrics, const std::vector<long>& ks,
                                  double tol, const MetricSettings& settings) {
    ConvergenceReport rep;
    rep.family = fam.name;
    rep.epi_convergent = fam.epi_convergent;
    rep.super_coercive = fam.super_coercive;
    rep.tol = tol;
    const auto limit = fam.limit();
    for (long k : ks) {
        const auto uk = fam.make(k);
        for (auto m : metrics) {
            Row row{k, m, {}, {}};
            try {
                row.result = run_metric(m, uk, limit, settings);
            } catch (const AdmissibilityError& e) {
                row.refusal = e.what();
            }
            rep.rows.push_back(std::move(row));
        }
    }
    for (auto m : metrics) rep.verdicts.push_back(judge(rep.series(m), m, tol));
    return rep;
}

// ---------------------------------------------------------------------------
// Output. Numbers use fixed printf formats so that reports are byte-stable.

inline std::string fmt(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string table(const ConvergenceReport& rep) {
    std::string out = "family " + rep.family + " (epi-convergent: " + (rep.epi_convergent ? "yes" : "no") +
                      ", super-coercive: " + (rep.super_coercive ? "yes" : "no") + ", tol " + fmt(rep.tol) + ")\n";
    char line[256];
    std::snprintf(line, sizeof line, "%12s  %-26s %18s %12s  %s\n", "k", "metric", "value", "budget", "method");
    out += line;
    for (const auto& r : rep.rows) {
        if (!r.refusal.empty()) {
            std::snprintf(line, sizeof line, "%12ld  %-26s refused: ", r.k, metric_name(r.metric).c_str());
            out += line + r.refusal + "\n";
            continue;
        }
        std::snprintf(line, sizeof line, "%12ld  %-26s %18s %12s  %s\n", r.k, metric_name(r.metric).c_str(), fmt(r.result.value).c_str(),
                      fmt(r.result.budget()).c_str(), to_string(r.result.method).c_str());
        out += line;
    }
    for (const auto& v : rep.verdicts) {
        out += "verdict " + metric_name(v.metric) + ": " + to_string(v.verdict) + (v.reason.empty() ? "" : " (" + v.reason + ")") + "\n";
    }
    return out;
}

inline std::string csv(const ConvergenceReport& rep) {
    std::string out = "family,k,metric,value,truncation_bound,quadrature_error,method,refusal\n";
    for (const auto& r : rep.rows) {
        std::string refusal = r.refusal;
        std::replace(refusal.begin(), refusal.end(), ',', ';');
        out += rep.family + "," + std::to_string(r.k) + "," + metric_name(r.metric) + "," +
               (r.refusal.empty() ? fmt(r.result.value) + "," + fmt(r.result.truncation_bound) + "," + fmt(r.result.quadrature_error) + "," +
                                        to_string(r.result.method)
                                  : std::string(",,,")) +
               "," + refusal + "\n";
    }
    return out;
}

inline io::json to_json(const ConvergenceReport& rep) {
    io::json rows = io::json::array();
    for (const auto& r : rep.rows) {
        io::json j{{"k", r.k}, {"metric", metric_name(r.metric)}};
        if (r.refusal.empty()) {
            j["result"] = io::result_to_json(r.result);
        } else {
            j["refusal"] = r.refusal;
        }
        rows.push_back(j);
    }
    io::json verdicts = io::json::object();
    for (const auto& v : rep.verdicts) verdicts[metric_name(v.metric)] = {{"verdict", to_string(v.verdict)}, {"reason", v.reason}};
    return {{"family", rep.family},
            {"epi_convergent", rep.epi_convergent},
            {"super_coercive", rep.super_coercive},
            {"tol", rep.tol},
            {"rows", rows},
            {"verdicts", verdicts}};
}

}  // namespace epimetric::lab
