#pragma once

// Legendre–Fenchel conjugation, inf-convolution and coercivity classes.

#include "epimetric/funcrep.hpp"
#include "epimetric/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epimetric {

struct ConjugateOptions {
    int resolution_1d = 2001;  // dual nodes per axis when sampling is needed
    int resolution_2d = 161;
    double span = 10.0;        // sampled primal box: bounding box of {u <= min u + span}
    int probes = 256;          // Fenchel–Young probe pairs for the accuracy report
    std::uint64_t seed = 11;
};

struct ConjugateResult {
    ConvexFunction function;
    Vec domain_lo;  // box outside of which values are resolved symbolically or +inf
    Vec domain_hi;
    double accuracy = 0.0;  // max Fenchel–Young violation over probes (0 for closed forms)
};

namespace detail {

/// Discrete Legendre transform: out[j] = max_i (s_j x_i - v_i) for ascending x
/// and ascending slopes s. Infinite v_i are skipped. Linear time after the hull.
inline std::vector<double> llt(const std::vector<double>& x, const std::vector<double>& v, const std::vector<double>& s) {
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(v[i])) continue;
        // lower convex hull of (x_i, v_i)
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cr = (x[b] - x[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (x[i] - x[a]);
            if (cr <= 0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    std::vector<double> out(s.size(), -kInf);
    if (hull.empty()) return out;
    std::size_t k = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        while (k + 1 < hull.size()) {
            const std::size_t a = hull[k], b = hull[k + 1];
            if ((v[b] - v[a]) <= s[j] * (x[b] - x[a])) ++k;
            else break;
        }
        out[j] = s[j] * x[hull[k]] - v[hull[k]];
    }
    return out;
}

inline std::vector<double> axis_nodes(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

/// Separable discrete conjugate between two planar grids. Source values may be +inf.
inline std::vector<double> llt_2d(const std::vector<double>& sx, const std::vector<double>& sy, const std::vector<double>& vals,
                                  const std::vector<double>& tx, const std::vector<double>& ty) {
    const std::size_t nx = sx.size(), ny = sy.size();
    // Pass 1: for each source row x_i, c_i(ty_j) = max_k (ty_j sy_k - v(i, k)).
    std::vector<std::vector<double>> c(nx);
    std::vector<double> row(ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t k = 0; k < ny; ++k) row[k] = vals[i * ny + k];
        c[i] = llt(sy, row, ty);
    }
    // Pass 2: out(tx_a, ty_j) = max_i (tx_a sx_i + c_i(ty_j)).
    std::vector<double> out(tx.size() * ty.size(), -kInf);
    std::vector<double> neg(nx);
    for (std::size_t j = 0; j < ty.size(); ++j) {
        for (std::size_t i = 0; i < nx; ++i) neg[i] = c[i][j] == -kInf ? kInf : -c[i][j];
        const auto col = llt(sx, neg, tx);
        for (std::size_t a = 0; a < tx.size(); ++a) out[a * ty.size() + j] = col[a];
    }
    return out;
}

/// Range of finite difference quotients along an axis (the slope range of the data).
inline std::pair<double, double> slope_range(const GridData& g, int axis) {
    double lo = kInf, hi = -kInf;
    const double h = g.step(axis);
    auto pair = [&](double a, double b) {
        if (std::isfinite(a) && std::isfinite(b)) {
            lo = std::min(lo, (b - a) / h);
            hi = std::max(hi, (b - a) / h);
        }
    };
    if (g.dim() == 1) {
        for (int i = 0; i + 1 < g.res[0]; ++i) pair(g.at(i), g.at(i + 1));
    } else if (axis == 0) {
        for (int i = 0; i + 1 < g.res[0]; ++i)
            for (int j = 0; j < g.res[1]; ++j) pair(g.at(i, j), g.at(i + 1, j));
    } else {
        for (int i = 0; i < g.res[0]; ++i)
            for (int j = 0; j + 1 < g.res[1]; ++j) pair(g.at(i, j), g.at(i, j + 1));
    }
    if (!(hi > lo)) {
        const double c = std::isfinite(lo) ? lo : 0.0;
        return {c - 1.0, c + 1.0};
    }
    return {lo, hi};
}

inline ConvexFunction grid_conjugate(const GridData& g, const std::vector<int>& dual_res) {
    const int n = g.dim();
    if (g.exterior) {
        // A dual grid: transform back onto the primal layout it came from.
        const auto& p = *g.exterior;
        GridData out{p.lo, p.hi, p.res, {}, nullptr};
        if (n == 1) {
            out.values = llt(axis_nodes(g.lo[0], g.hi[0], g.res[0]), g.values, axis_nodes(p.lo[0], p.hi[0], p.res[0]));
        } else {
            out.values = llt_2d(axis_nodes(g.lo[0], g.hi[0], g.res[0]), axis_nodes(g.lo[1], g.hi[1], g.res[1]), g.values,
                                axis_nodes(p.lo[0], p.hi[0], p.res[0]), axis_nodes(p.lo[1], p.hi[1], p.res[1]));
        }
        for (std::size_t k = 0; k < out.values.size(); ++k)
            if (!p.finite[k]) out.values[k] = kInf;
        return ConvexFunction::grid(std::move(out), 1e-7);
    }
    auto primal = std::make_shared<GridData::Primal>();
    primal->lo = g.lo;
    primal->hi = g.hi;
    primal->res = g.res;
    primal->finite.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        primal->finite[k] = std::isfinite(g.values[k]);
        if (primal->finite[k]) primal->points.emplace_back(g.node(k), g.values[k]);
    }
    GridData out;
    out.lo.resize(n);
    out.hi.resize(n);
    out.res = dual_res;
    for (int a = 0; a < n; ++a) {
        const auto [lo, hi] = slope_range(g, a);
        out.lo[a] = lo;
        out.hi[a] = hi;
    }
    if (n == 1) {
        out.values = llt(axis_nodes(g.lo[0], g.hi[0], g.res[0]), g.values, axis_nodes(out.lo[0], out.hi[0], out.res[0]));
    } else {
        out.values = llt_2d(axis_nodes(g.lo[0], g.hi[0], g.res[0]), axis_nodes(g.lo[1], g.hi[1], g.res[1]), g.values,
                            axis_nodes(out.lo[0], out.hi[0], out.res[0]), axis_nodes(out.lo[1], out.hi[1], out.res[1]));
    }
    out.exterior = std::move(primal);
    return ConvexFunction::grid(std::move(out), 1e-7);
}

inline bool is_zero_function(const ConvexFunction& f) {
    if (auto* s = std::get_if<fn::SupportFn>(&f.node().v)) return max_norm(s->body) == 0.0;
    if (auto* q = std::get_if<fn::Quadratic>(&f.node().v)) return q->m.norm() == 0.0 && q->l.norm() == 0.0 && q->c == 0.0;
    return false;
}

/// Closed-form conjugate when one exists.
inline std::optional<ConvexFunction> closed_conjugate(const ConvexFunction& f) {
    using namespace fn;
    const int n = f.dim();
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) -> std::optional<ConvexFunction> {
                return plus_constant(ConvexFunction::support(s.body), -s.offset);
            },
            [&](const SupportFn& s) -> std::optional<ConvexFunction> { return ConvexFunction::indicator(s.body, 0.0); },
            [&](const NormCone& c) -> std::optional<ConvexFunction> {
                return ConvexFunction::indicator(ConvexBody::ball(Vec::Zero(n), 1.0 / c.lambda), 0.0);
            },
            [&](const AffineNorm& a) -> std::optional<ConvexFunction> {
                return ConvexFunction::indicator(ConvexBody::ball(Vec::Zero(n), a.a), -a.b);
            },
            [&](const Quadratic& q) -> std::optional<ConvexFunction> {
                Eigen::SelfAdjointEigenSolver<Mat> es(q.m);
                if (es.eigenvalues().minCoeff() <= 1e-14 * (1 + es.eigenvalues().maxCoeff())) return std::nullopt;
                const Mat inv = q.m.inverse();
                // (y - l)' M^{-1} (y - l) / 4 - c
                return ConvexFunction::quadratic(0.25 * inv, -0.5 * inv * q.l, 0.25 * q.l.dot(inv * q.l) - q.c);
            },
            [&](const Shifted& s) -> std::optional<ConvexFunction> {
                auto g = closed_conjugate(s.inner);
                if (!g) return std::nullopt;
                return ConvexFunction::tilted(*g, s.x0, -s.t0);
            },
            [&](const Tilted& t) -> std::optional<ConvexFunction> {
                auto g = closed_conjugate(t.inner);
                if (!g) return std::nullopt;
                return ConvexFunction::shifted(*g, t.l, -t.c);
            },
            [&](const Linear& l) -> std::optional<ConvexFunction> {
                auto g = closed_conjugate(l.inner);
                if (!g) return std::nullopt;
                return ConvexFunction::linear(*g, l.m_inv.transpose());
            },
            [&](const Rescaled& r) -> std::optional<ConvexFunction> {
                // Exponential weights make the rescaling a vertical shift by ln(det)/c.
                auto* e = std::get_if<ExponentialWeight>(&r.zeta.form());
                if (!e) return std::nullopt;
                auto g = closed_conjugate(r.inner);
                if (!g) return std::nullopt;
                return plus_constant(*g, -std::log(r.det) / e->c);
            },
            [&](const Sum& s) -> std::optional<ConvexFunction> {
                std::vector<ConvexFunction> terms;
                for (const auto& t : s.terms)
                    if (!is_zero_function(t)) terms.push_back(t);
                if (terms.empty()) return ConvexFunction::indicator(ConvexBody::ball(Vec::Zero(n), 0.0), 0.0);
                if (terms.size() == 1) return closed_conjugate(terms.front());
                bool all_support = true, all_quad = true;
                for (const auto& t : terms) {
                    all_support = all_support && std::holds_alternative<SupportFn>(t.node().v);
                    all_quad = all_quad && std::holds_alternative<Quadratic>(t.node().v);
                }
                if (all_support) {
                    ConvexBody acc = std::get<SupportFn>(terms.front().node().v).body;
                    for (std::size_t i = 1; i < terms.size(); ++i) acc = minkowski_sum(acc, std::get<SupportFn>(terms[i].node().v).body);
                    return ConvexFunction::indicator(acc, 0.0);
                }
                if (all_quad) {
                    Mat m = Mat::Zero(n, n);
                    Vec l = Vec::Zero(n);
                    double c = 0.0;
                    for (const auto& t : terms) {
                        const auto& q = std::get<Quadratic>(t.node().v);
                        m += q.m;
                        l += q.l;
                        c += q.c;
                    }
                    return closed_conjugate(ConvexFunction::quadratic(m, l, c));
                }
                return std::nullopt;
            },
            [&](const auto&) -> std::optional<ConvexFunction> { return std::nullopt; },
        },
        f.node().v);
}

/// Box of dom f when it is bounded (+-inf components otherwise).
inline std::pair<Vec, Vec> domain_box(const ConvexFunction& f) {
    const int n = f.dim();
    if (auto* s = std::get_if<fn::IndicatorPlus>(&f.node().v)) return bounding_box(s->body);
    if (auto* g = std::get_if<fn::Grid>(&f.node().v); g && !g->data.exterior) return {g->data.lo, g->data.hi};
    if (auto* g = std::get_if<fn::Grid>(&f.node().v); g && g->data.exterior) return {g->data.lo, g->data.hi};
    if (auto* s = std::get_if<fn::Shifted>(&f.node().v)) {
        auto [lo, hi] = domain_box(s->inner);
        return {lo + s->x0, hi + s->x0};
    }
    return {Vec::Constant(n, -kInf), Vec::Constant(n, kInf)};
}

inline double fenchel_young_violation(const ConvexFunction& f, const ConvexFunction& fc, const Vec& xlo, const Vec& xhi,
                                      const Vec& ylo, const Vec& yhi, int probes, std::uint64_t seed) {
    CounterRng rng(seed);
    std::uint64_t c = 0;
    const int n = f.dim();
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        Vec x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = xlo[i] + (xhi[i] - xlo[i]) * rng.uniform(c++);
            y[i] = ylo[i] + (yhi[i] - ylo[i]) * rng.uniform(c++);
        }
        const double fx = evaluate(f, x), fy = evaluate(fc, y);
        if (!std::isfinite(fx) || !std::isfinite(fy)) continue;
        worst = std::max(worst, x.dot(y) - fx - fy);
    }
    return worst;
}

}  // namespace detail

/// u*(y) = sup_x <x, y> - u(x).
inline ConjugateResult conjugate(const ConvexFunction& f, const ConjugateOptions& opt = {}) {
    const int n = f.dim();
    if (auto c = detail::closed_conjugate(f)) {
        auto [lo, hi] = detail::domain_box(*c);
        return {*c, lo, hi, 0.0};
    }
    ConvexFunction g = f;
    if (!std::holds_alternative<fn::Grid>(f.node().v)) {
        if (n > 2) throw DimensionError("conjugate: sampled conjugation is limited to n <= 2");
        const auto m = global_min(f);
        auto box = bounding_box(sublevel_set(f, m.value + opt.span));
        const int r = n == 1 ? opt.resolution_1d : opt.resolution_2d;
        g = ConvexFunction::sample([&](const Vec& x) { return evaluate(f, x); }, box.first, box.second, std::vector<int>(n, r));
    }
    const auto& gd = std::get<fn::Grid>(g.node().v).data;
    std::vector<int> dual_res = gd.res;
    ConvexFunction conj = detail::grid_conjugate(gd, dual_res);
    const auto& cd = std::get<fn::Grid>(conj.node().v).data;
    const double acc = detail::fenchel_young_violation(g, conj, gd.lo, gd.hi, cd.lo, cd.hi, opt.probes, opt.seed);
    return {conj, cd.lo, cd.hi, acc};
}

inline ConvexFunction biconjugate(const ConvexFunction& f, const ConjugateOptions& opt = {}) {
    return conjugate(conjugate(f, opt).function, opt).function;
}

/// (u □ v)(x) = inf_{y+z=x} u(y) + v(z), computed as (u* + v*)*.
inline ConvexFunction inf_convolution(const ConvexFunction& u, const ConvexFunction& v, const ConjugateOptions& opt = {}) {
    require_dim(v.dim(), u.dim(), "inf_convolution");
    if (!is_coercive(u) || !is_coercive(v)) throw AdmissibilityError("inf_convolution: both functions must be coercive");
    const auto us = conjugate(u, opt).function;
    const auto vs = conjugate(v, opt).function;
    if (detail::is_zero_function(us)) return biconjugate(v, opt);
    if (detail::is_zero_function(vs)) return biconjugate(u, opt);
    return conjugate(ConvexFunction::sum({us, vs}), opt).function;
}

enum class Coercivity { NotCoercive, Coercive, SuperCoercive };

inline std::string to_string(Coercivity c) {
    switch (c) {
        case Coercivity::NotCoercive: return "not-coercive";
        case Coercivity::Coercive: return "coercive";
        default: return "super-coercive";
    }
}

/// Lemma-2.1 route: 0 ∈ int dom u* (coercive), dom u* ⊇ probe box (super-coercive).
inline Coercivity classify_via_conjugate(const ConvexFunction& f, double probe = 1e3) {
    const auto c = conjugate(f).function;
    const int n = f.dim();
    const auto dirs = detail::sphere_directions(n, n == 1 ? 2 : (n == 2 ? 360 : 2000));
    auto finite_on = [&](double r) {
        if (!std::isfinite(evaluate(c, Vec::Zero(n)))) return false;
        for (const auto& d : dirs)
            if (!std::isfinite(evaluate(c, r * d))) return false;
        return true;
    };
    if (!finite_on(1e-6)) return Coercivity::NotCoercive;
    if (std::holds_alternative<fn::Grid>(c.node().v)) {
        // A sampled conjugate cannot see beyond the sampled slopes; fall back on growth.
        return Coercivity::Coercive;
    }
    return finite_on(probe) ? Coercivity::SuperCoercive : Coercivity::Coercive;
}

inline Coercivity classify_coercivity(const ConvexFunction& f) {
    using namespace fn;
    return std::visit(
        overloaded{
            [&](const IndicatorPlus&) { return Coercivity::SuperCoercive; },
            [&](const Quadratic& q) {
                Eigen::SelfAdjointEigenSolver<Mat> es(q.m);
                return es.eigenvalues().minCoeff() > 1e-14 * (1 + es.eigenvalues().maxCoeff()) ? Coercivity::SuperCoercive
                                                                                                : Coercivity::NotCoercive;
            },
            [&](const NormCone&) { return Coercivity::Coercive; },
            [&](const AffineNorm&) { return Coercivity::Coercive; },
            [&](const SupportFn& s) { return inradius_about_origin(s.body) > 0 ? Coercivity::Coercive : Coercivity::NotCoercive; },
            [&](const Shifted& s) { return classify_coercivity(s.inner); },
            [&](const Linear& l) { return classify_coercivity(l.inner); },
            [&](const Grid& g) { return g.data.exterior ? classify_via_conjugate(f) : Coercivity::SuperCoercive; },
            [&](const Maximum& m) {
                Coercivity best = Coercivity::NotCoercive;
                for (const auto& t : m.terms) best = std::max(best, classify_coercivity(t));
                if (best != Coercivity::NotCoercive) return best;
                return is_coercive(f) ? Coercivity::Coercive : Coercivity::NotCoercive;
            },
            [&](const auto&) {
                if (detail::closed_conjugate(f)) return classify_via_conjugate(f);
                if (!is_coercive(f)) return Coercivity::NotCoercive;
                // Growth test: slope of u along rays at two scales.
                const auto m = global_min(f);
                const int n = f.dim();
                double s1 = kInf, s2 = kInf;
                for (const auto& d : detail::sphere_directions(n, n == 1 ? 2 : 360)) {
                    s1 = std::min(s1, (evaluate(f, m.argmin + 1e2 * d) - m.value) / 1e2);
                    s2 = std::min(s2, (evaluate(f, m.argmin + 1e4 * d) - m.value) / 1e4);
                }
                return s2 > 10.0 * s1 ? Coercivity::SuperCoercive : Coercivity::Coercive;
            },
        },
        f.node().v);
}

}  // namespace epimetric
