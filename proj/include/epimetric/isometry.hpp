#pragma once

// Isometries I(u) = f(u ∘ α^{-1}) of (Conv_c^n, δ_{ζ,1}) and their numeric verification.

#include "epimetric/metrics.hpp"

#include <string>
#include <vector>

namespace epimetric {

struct IsometrySpec {
    Mat phi;
    Vec x0;
    WeightFunction zeta;

    IsometrySpec(Mat phi_, Vec x0_, WeightFunction zeta_) : phi(std::move(phi_)), x0(std::move(x0_)), zeta(std::move(zeta_)) {
        if (phi.rows() != phi.cols()) throw DimensionError("IsometrySpec: phi must be square");
        require_dim(static_cast<int>(x0.size()), static_cast<int>(phi.rows()), "IsometrySpec x0");
        if (!(std::abs(phi.determinant()) > 0.0)) throw std::invalid_argument("IsometrySpec: phi is singular");
    }

    [[nodiscard]] int dim() const { return static_cast<int>(phi.rows()); }
    [[nodiscard]] double abs_det() const { return std::abs(phi.determinant()); }
    [[nodiscard]] Vec alpha(const Vec& x) const { return phi * x + x0; }
    [[nodiscard]] Vec alpha_inv(const Vec& y) const { return phi.lu().solve(y - x0); }

    /// f(t) = ζ^{-1}(ζ(t) / |det φ|); throws RangeError where undefined.
    [[nodiscard]] double f(double t) const {
        if (t == kInf) return kInf;
        return zeta.inverse(zeta(t) / abs_det());
    }

    static IsometrySpec identity(int n, WeightFunction z) { return {Mat::Identity(n, n), Vec::Zero(n), std::move(z)}; }
};

struct PhiMembership {
    Verdict verdict = Verdict::Inconclusive;
    bool windowed = false;  // certified on the probe window only
    std::string note;

    [[nodiscard]] std::string label() const {
        if (verdict == Verdict::Member && windowed) return "member (windowed)";
        return to_string(verdict);
    }
};

/// Is φ in Φ(ζ)? Closed answers where the theory gives one, midpoint convexity of f otherwise.
inline PhiMembership check_phi_membership(const Mat& phi, const WeightFunction& z, Interval probe = {-10.0, 10.0},
                                          int checks = 1000) {
    PhiMembership out;
    const double d = std::abs(phi.determinant());
    if (!(d > 0)) throw std::invalid_argument("check_phi_membership: phi is singular");
    if (std::abs(d - 1.0) <= 1e-12) {
        out.verdict = Verdict::Member;
        out.note = "|det phi| = 1: f is the identity";
        return out;
    }
    if (std::holds_alternative<ExponentialWeight>(z.form())) {
        out.verdict = Verdict::Member;
        out.note = "exponential weight: f(t) = t + ln|det phi|/c is affine";
        return out;
    }
    if (std::isfinite(z.sup()) && d < 1.0) {
        out.verdict = Verdict::NotMember;
        out.note = "not in Phi(zeta): zeta is bounded as t -> -inf and |det phi| < 1, so f is undefined for small t";
        return out;
    }
    const IsometrySpec spec(phi, Vec::Zero(phi.rows()), z);
    const double h = probe.length() / checks;
    std::vector<double> fv(checks + 1);
    try {
        for (int i = 0; i <= checks; ++i) fv[i] = spec.f(probe.lo + i * h);
    } catch (const RangeError&) {
        out.verdict = Verdict::NotMember;
        out.note = "not in Phi(zeta): f undefined on the probe window";
        return out;
    }
    for (int i = 1; i < checks; ++i) {
        const double scale = 1.0 + std::abs(fv[i - 1]) + std::abs(fv[i + 1]);
        if (fv[i] > 0.5 * (fv[i - 1] + fv[i + 1]) + 1e-9 * scale) {
            out.verdict = Verdict::NotMember;
            out.note = "not in Phi(zeta): midpoint convexity of f fails at t = " + std::to_string(probe.lo + i * h);
            return out;
        }
    }
    out.verdict = Verdict::Member;
    out.windowed = true;
    out.note = "f convex at " + std::to_string(checks) + " midpoints of the probe window";
    return out;
}

/// I(u) = f ∘ u ∘ α^{-1}.
inline ConvexFunction apply_isometry(const IsometrySpec& spec, const ConvexFunction& u, Interval probe = {-10.0, 10.0}) {
    require_dim(u.dim(), spec.dim(), "apply_isometry");
    const auto m = check_phi_membership(spec.phi, spec.zeta, probe);
    if (m.verdict != Verdict::Member) throw AdmissibilityError("apply_isometry: " + m.note);
    const Mat inv = spec.phi.inverse();
    const auto moved = ConvexFunction::shifted(ConvexFunction::linear(u, inv), spec.x0, 0.0);
    if (const auto* e = std::get_if<ExponentialWeight>(&spec.zeta.form())) {
        const double t0 = std::log(spec.abs_det()) / e->c;
        return t0 == 0.0 ? moved : ConvexFunction::shifted(moved, Vec::Zero(spec.dim()), t0);
    }
    if (std::abs(spec.abs_det() - 1.0) <= 1e-12) return moved;
    return ConvexFunction::rescaled(moved, spec.zeta, spec.abs_det());
}

struct IsometryRow {
    double before = 0.0;
    double after = 0.0;
    double deviation = 0.0;
    double budget = 0.0;
    [[nodiscard]] bool pass() const { return deviation <= budget; }
};

struct IsometryReport {
    std::vector<IsometryRow> rows;
    [[nodiscard]] double max_deviation() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.deviation);
        return m;
    }
    [[nodiscard]] bool pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const IsometryRow& r) { return r.pass(); });
    }
};

namespace detail {

// Closed forms still round; compare with a floating-point allowance on top of the budgets.
inline double rounding_slack(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

inline IsometryRow compare(const MetricResult& a, const MetricResult& b) {
    IsometryRow r;
    r.before = a.value;
    r.after = b.value;
    r.deviation = std::abs(a.value - b.value);
    r.budget = a.budget() + b.budget() + rounding_slack(a.value, b.value);
    return r;
}

}  // namespace detail

using FunctionPair = std::pair<ConvexFunction, ConvexFunction>;

/// |δ_{ζ,1}(I u, I v) - δ_{ζ,1}(u, v)| per pair.
inline IsometryReport verify_isometry(const IsometrySpec& spec, const std::vector<FunctionPair>& corpus,
                                      const MetricOptions& opt = {}) {
    IsometryReport rep;
    for (const auto& [u, v] : corpus) {
        const auto before = delta_zeta_p(u, v, spec.zeta, 1.0, opt);
        const auto after = delta_zeta_p(apply_isometry(spec, u), apply_isometry(spec, v), spec.zeta, 1.0, opt);
        rep.rows.push_back(detail::compare(before, after));
    }
    return rep;
}

/// |Ψ_ζ(I u) - Ψ_ζ(u)| per function.
inline IsometryReport measure_preservation_check(const IsometrySpec& spec, const std::vector<ConvexFunction>& corpus,
                                                 const MetricOptions& opt = {}) {
    IsometryReport rep;
    for (const auto& u : corpus) {
        rep.rows.push_back(detail::compare(epigraph_measure(u, spec.zeta, opt), epigraph_measure(apply_isometry(spec, u), spec.zeta, opt)));
    }
    return rep;
}

struct WitnessReport {
    IsometryReport measure;  // Ψ is preserved
    IsometryReport distance;  // δ is not, on some pair
    int violating_pair = -1;  // first pair with deviation > 3 × budget
};

/// The map u ↦ u(· - Ψ_ζ(u) x0) preserves Ψ_ζ but is not an isometry.
inline WitnessReport non_isometry_witness(const Vec& x0, const WeightFunction& z, const std::vector<FunctionPair>& corpus,
                                          const MetricOptions& opt = {}) {
    WitnessReport rep;
    auto map = [&](const ConvexFunction& u) {
        return ConvexFunction::shifted(u, epigraph_measure(u, z, opt).value * x0, 0.0);
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& [u, v] = corpus[i];
        const auto mu = map(u), mv = map(v);
        rep.measure.rows.push_back(detail::compare(epigraph_measure(u, z, opt), epigraph_measure(mu, z, opt)));
        const auto row = detail::compare(delta_zeta_p(u, v, z, 1.0, opt), delta_zeta_p(mu, mv, z, 1.0, opt));
        if (rep.violating_pair < 0 && row.deviation > 3.0 * row.budget) rep.violating_pair = static_cast<int>(i);
        rep.distance.rows.push_back(row);
    }
    return rep;
}

}  // namespace epimetric
