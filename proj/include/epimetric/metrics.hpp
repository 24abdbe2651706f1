#pragma once

// Distances between coercive convex functions, each with an error budget.

#include "epimetric/funcrep.hpp"
#include "epimetric/quadrature.hpp"
#include "epimetric/transforms.hpp"
#include "epimetric/weights.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace epimetric {

enum class Method { Analytic, Quadrature, MonteCarlo, Sampling };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::Analytic: return "analytic";
        case Method::Quadrature: return "quadrature";
        case Method::MonteCarlo: return "monte-carlo";
        default: return "sampling";
    }
}

struct MetricResult {
    double value = 0.0;  // +inf allowed (tilde extension)
    double truncation_bound = 0.0;
    double quadrature_error = 0.0;
    Method method = Method::Analytic;
    std::map<std::string, double> detail;

    [[nodiscard]] double budget() const { return truncation_bound + quadrature_error; }
    [[nodiscard]] bool infinite() const { return value == kInf; }
};

/// Ψ_ζ(epi u) with the same error budget.
using EpiMeasure = MetricResult;

struct MetricOptions {
    double tail_tol = 1e-10;  // absolute target for every truncated tail
    double rel_tol = 1e-10;   // adaptive quadrature
    unsigned max_depth = 15;
    double r_max = 1e6;
    std::size_t mc_samples = 400000;
    std::uint64_t seed = 1;
    bool force_quadrature = false;  // bypass closed-form shortcuts
    // delta_conjugate
    int dual_directions = 720;
    int dual_radii = 32;
    // epi_distance_rw
    double rho_max = 20.0;
    int rw_radii = 200;
    int rw_directions = 720;
};

namespace detail {

inline void require_same_dim(const ConvexFunction& u, const ConvexFunction& v) { require_dim(v.dim(), u.dim(), "metric"); }

inline Envelope require_envelope(const ConvexFunction& f, const char* what) {
    auto e = f.envelope();
    if (!e) throw AdmissibilityError(std::string(what) + ": function is not coercive (no envelope a|x|+b)");
    return *e;
}

/// |A^{1/p} - (A+e)^{1/p}| bound for an error e in A.
inline double root_error(double a, double e, double p) {
    if (e <= 0) return 0.0;
    if (p == 1.0) return e;
    const double crude = std::pow(e, 1.0 / p);
    if (a > 2 * e) return std::min(crude, std::pow(a - e, 1.0 / p - 1.0) * e / p);
    return crude;
}

/// Heights at which the horizontal chords of dom f change combinatorially.
inline void y_breaks(const ConvexFunction& f, std::vector<double>& out) {
    using namespace fn;
    std::visit(overloaded{
                   [&](const IndicatorPlus& s) {
                       if (auto p = s.body.as_polygon()) {
                           for (const auto& v : *p) out.push_back(v.y());
                       } else {
                           const auto [lo, hi] = bounding_box(s.body);
                           out.push_back(lo[1]);
                           out.push_back(hi[1]);
                       }
                   },
                   [&](const Shifted& s) {
                       std::vector<double> in;
                       y_breaks(s.inner, in);
                       for (double y : in) out.push_back(y + s.x0[1]);
                   },
                   [&](const Tilted& t) { y_breaks(t.inner, out); },
                   [&](const Rescaled& r) { y_breaks(r.inner, out); },
                   [&](const Maximum& m) {
                       for (const auto& g : m.terms) y_breaks(g, out);
                   },
                   [&](const Sum& m) {
                       for (const auto& g : m.terms) y_breaks(g, out);
                   },
                   [&](const Grid& g) {
                       if (g.data.exterior) return;
                       for (int j = 0; j < g.data.res[1]; ++j) out.push_back(g.data.coord(1, j));
                   },
                   [&](const Linear& l) {
                       if (!domain_radius(f)) return;
                       // bounded domain: locate its vertical extent
                       if (auto p = feasible_point(f)) {
                           Vec ex(2);
                           ex << 1.0, 0.0;
                           auto nonempty = [&](double y) {
                               Vec q(2);
                               q << (*p)[0], y;
                               return !chord(f, q, ex).empty();
                           };
                           const double r = *domain_radius(f) + 1.0;
                           out.push_back((*p)[1] + bisect_last_true([&](double s) { return nonempty((*p)[1] + s); }, 0.0, r, 80));
                           out.push_back((*p)[1] - bisect_last_true([&](double s) { return nonempty((*p)[1] - s); }, 0.0, r, 80));
                       }
                       (void)l;
                   },
                   [&](const auto&) {},
               },
               f.node().v);
}

/// The apex of a cone-like function: the one point where it is not smooth.
inline std::optional<Vec> apex(const ConvexFunction& f) {
    using namespace fn;
    return std::visit(overloaded{
                          [&](const NormCone&) -> std::optional<Vec> { return Vec::Zero(f.dim()); },
                          [&](const AffineNorm&) -> std::optional<Vec> { return Vec::Zero(f.dim()); },
                          [&](const Shifted& s) -> std::optional<Vec> {
                              auto a = apex(s.inner);
                              if (a) *a += s.x0;
                              return a;
                          },
                          [&](const Linear& l) -> std::optional<Vec> {
                              auto a = apex(l.inner);
                              if (a) *a = l.m_inv * *a;
                              return a;
                          },
                          [&](const Tilted& t) { return apex(t.inner); },
                          [&](const Rescaled& r) { return apex(r.inner); },
                          [&](const auto&) -> std::optional<Vec> { return std::nullopt; },
                      },
                      f.node().v);
}

inline std::vector<double> radial_cuts(double R) {
    std::vector<double> cuts{0.0};
    for (double c = 1.0; c < R; c *= 4.0) {
        cuts.push_back(c);
        cuts.push_back(-c);
    }
    return cuts;
}

/// Adds the sign changes of h on [lo, hi] to the sorted breakpoints in cuts.
/// Each piece is sampled; a sign flip between samples is bisected, and a dip
/// of |h| at a sample is searched for a pair of crossings the samples skipped.
template <class H>
void add_crossings(std::vector<double>& cuts, double lo, double hi, H&& h, int samples = 8) {
    std::vector<double> pts{lo};
    for (double c : cuts) {
        if (c > lo && c < hi) pts.push_back(c);
    }
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    auto bisect = [&](double l, double r, bool left_neg) {
        for (int it = 0; it < 60 && r - l > 1e-15 * (1 + std::abs(l)); ++it) {
            const double m = 0.5 * (l + r);
            ((h(m) < 0) == left_neg ? l : r) = m;
        }
        cuts.push_back(0.5 * (l + r));
    };
    std::vector<double> xs(samples + 1), hs(samples + 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1], w = (b - a) / samples;
        // sample strictly inside: the endpoints may sit on a jump
        for (int k = 0; k <= samples; ++k) {
            xs[k] = k == 0 ? a + 1e-3 * w : (k == samples ? b - 1e-3 * w : a + k * w);
            hs[k] = h(xs[k]);
        }
        for (int k = 1; k <= samples; ++k) {
            if ((hs[k - 1] < 0 && hs[k] > 0) || (hs[k - 1] > 0 && hs[k] < 0)) bisect(xs[k - 1], xs[k], hs[k - 1] < 0);
        }
        for (int k = 1; k < samples; ++k) {
            const double sg = hs[k] > 0 ? 1.0 : (hs[k] < 0 ? -1.0 : 0.0);
            if (sg == 0.0 || sg * hs[k - 1] <= 0 || sg * hs[k + 1] <= 0) continue;
            if (sg * hs[k] > sg * hs[k - 1] || sg * hs[k] > sg * hs[k + 1]) continue;
            if (sg * hs[k] == sg * hs[k - 1] && sg * hs[k] == sg * hs[k + 1]) continue;  // flat, no dip
            // golden section for the minimum of sg * h on [x_{k-1}, x_{k+1}]
            double l = xs[k - 1], r = xs[k + 1];
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = r - g * (r - l), d = l + g * (r - l), hc = sg * h(c), hd = sg * h(d);
            for (int it = 0; it < 80 && r - l > 1e-13 * (1 + std::abs(l)); ++it) {
                if (hc < hd) {
                    r = d, d = c, hd = hc, c = r - g * (r - l), hc = sg * h(c);
                } else {
                    l = c, c = d, hc = hd, d = l + g * (r - l), hd = sg * h(d);
                }
                if (std::min(hc, hd) < 0) break;
            }
            const double xm = hc < hd ? c : d;
            if (std::min(hc, hd) < 0) {
                bisect(xs[k - 1], xm, sg < 0);
                bisect(xm, xs[k + 1], sg > 0);
            }
        }
    }
}

/// ∫ over [-R, R]^n of g(x), with breakpoints from the domains of fs and from
/// the sign changes of the optional kink indicator h.
template <class G>
quad::Estimate integrate_space(const std::vector<const ConvexFunction*>& fs, G&& g, double R, const MetricOptions& opt,
                               Method& method, const std::function<double(const Vec&)>& h = nullptr) {
    const int n = fs.front()->dim();
    const quad::Options qo{opt.rel_tol, opt.max_depth};
    if (n == 1) {
        std::vector<double> cuts = radial_cuts(R);
        const Vec zero = Vec::Zero(1), e = Vec::Ones(1);
        for (const auto* f : fs) {
            const Interval I = chord(*f, zero, e);
            cuts.push_back(I.lo);
            cuts.push_back(I.hi);
            if (auto a = apex(*f)) cuts.push_back((*a)[0]);
        }
        Vec x(1);
        if (h) add_crossings(cuts, -R, R, [&](double t) { x[0] = t; return h(x); }, 64);
        method = Method::Quadrature;
        return quad::integrate([&](double t) { x[0] = t; return g(x); }, -R, R, cuts, qo);
    }
    if (n == 2) {
        std::vector<double> ycuts = radial_cuts(R);
        std::vector<Vec> apexes;
        for (const auto* f : fs) {
            y_breaks(*f, ycuts);
            if (auto a = apex(*f)) {
                ycuts.push_back((*a)[1]);
                apexes.push_back(*a);
            }
        }
        Vec ex(2);
        ex << 1.0, 0.0;
        Vec xh(2);
        constexpr int row_samples = 32;
        if (h) {
            // Rows where the number of sign changes of h jumps are tangent to
            // its zero curve; the row integral has a kink there.
            auto crossings = [&](double y) {
                std::vector<double> c = radial_cuts(R);
                const std::size_t base = c.size();
                add_crossings(c, -R, R, [&](double t) { xh << t, y; return h(xh); }, row_samples);
                return c.size() - base;
            };
            auto pieces = ycuts;
            pieces.push_back(-R);
            pieces.push_back(R);
            std::sort(pieces.begin(), pieces.end());
            for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
                const double a = std::max(pieces[i], -R), b = std::min(pieces[i + 1], R);
                if (!(b > a)) continue;
                const int m = 32;
                double yprev = a + 1e-9 * (b - a);
                std::size_t cprev = crossings(yprev);
                for (int k = 1; k <= m; ++k) {
                    const double y = k == m ? b - 1e-9 * (b - a) : a + (b - a) * k / m;
                    const std::size_t cy = crossings(y);
                    if (cy != cprev) {
                        double l = yprev, r = y;
                        for (int it = 0; it < 50 && r - l > 1e-13 * (1 + std::abs(l)); ++it) {
                            const double mid = 0.5 * (l + r);
                            (crossings(mid) == cprev ? l : r) = mid;
                        }
                        ycuts.push_back(0.5 * (l + r));
                    }
                    yprev = y;
                    cprev = cy;
                }
            }
        }
        auto inner = [&](double y) {
            std::vector<double> cuts = radial_cuts(R);
            Vec q(2);
            q << 0.0, y;
            for (const auto* f : fs) {
                const Interval I = chord(*f, q, ex);
                cuts.push_back(I.lo);
                cuts.push_back(I.hi);
            }
            for (const auto& a : apexes) cuts.push_back(a[0]);
            if (h) add_crossings(cuts, -R, R, [&](double t) { xh << t, y; return h(xh); }, row_samples);
            return cuts;
        };
        method = Method::Quadrature;
        Vec x(2);
        return quad::integrate_2d([&](double a, double b) { x << a, b; return g(x); }, -R, R, -R, R, ycuts, inner, qo);
    }
    method = Method::MonteCarlo;
    return quad::monte_carlo(g, Vec::Constant(n, -R), Vec::Constant(n, R), opt.mc_samples, opt.seed);
}

/// Truncation radius and tail bound for ∫ ζ(f)^p over |x| > R, summed over fs.
inline std::pair<double, double> truncation(const std::vector<const ConvexFunction*>& fs, const WeightFunction& z, double p,
                                            const MetricOptions& opt) {
    const int n = fs.front()->dim();
    double R = 1.0;
    bool all_bounded = true;
    double bounded_r = 0.0;
    for (const auto* f : fs) {
        if (auto r = domain_radius(*f)) {
            bounded_r = std::max(bounded_r, *r);
        } else {
            all_bounded = false;
        }
    }
    if (all_bounded) return {bounded_r * (1 + 1e-12) + 1e-12, 0.0};
    auto tail = [&](double r) {
        double t = 0.0;
        for (const auto* f : fs) {
            if (auto dr = domain_radius(*f); dr && *dr <= r) continue;
            const auto e = require_envelope(*f, "truncation");
            t += z.radial_tail(e.a, e.b, p, n, r);
        }
        return t;
    };
    R = std::max(1.0, bounded_r);
    double t = tail(R);
    while (t > opt.tail_tol && R < opt.r_max) {
        R *= 1.5;
        t = tail(R);
    }
    return {R, t};
}

inline void require_member(const WeightFunction& z, double p, int n, const char* what) {
    const auto m = z.membership(p, n);
    if (m.verdict != Verdict::Member) {
        throw AdmissibilityError(std::string(what) + ": weight is not verified in M^" + std::to_string(p) + "_" +
                                 std::to_string(n) + " (" + to_string(m.verdict) + ")");
    }
}

inline void require_full_dim(const ConvexFunction& f, const char* what) {
    if (!is_full_dimensional(f)) {
        throw AdmissibilityError(std::string(what) + ": dim dom < n; the metric requires Conv_c^n (full-dimensional domain)");
    }
}

}  // namespace detail

/// Ψ_ζ(epi u) = ∫ ζ(u(x)) dx.
inline EpiMeasure epigraph_measure(const ConvexFunction& u, const WeightFunction& z, const MetricOptions& opt = {}) {
    const int n = u.dim();
    detail::require_member(z, 1.0, n, "epigraph_measure");
    if (!opt.force_quadrature) {
        if (auto* s = std::get_if<fn::IndicatorPlus>(&u.node().v)) {
            const auto vb = volume_bounds(s->body);
            EpiMeasure r;
            r.value = z(s->offset) * vb.value;
            r.quadrature_error = z(s->offset) * vb.error();
            r.method = r.quadrature_error > 0 ? Method::Sampling : Method::Analytic;
            return r;
        }
    }
    if (!std::holds_alternative<fn::Maximum>(u.node().v)) detail::require_envelope(u, "epigraph_measure");
    const std::vector<const ConvexFunction*> fs{&u};
    const auto [R, tail] = detail::truncation(fs, z, 1.0, opt);
    EpiMeasure r;
    // The max of two terms has its kink where they cross.
    std::function<double(const Vec&)> h;
    if (auto* m = std::get_if<fn::Maximum>(&u.node().v); m && m->terms.size() == 2) {
        h = [&, m](const Vec& x) { return z(evaluate(m->terms[0], x)) - z(evaluate(m->terms[1], x)); };
    }
    const auto est = detail::integrate_space(fs, [&](const Vec& x) { return z(evaluate(u, x)); }, R, opt, r.method, h);
    r.value = est.value;
    r.quadrature_error = est.error;
    r.truncation_bound = tail;
    r.detail["R"] = R;
    return r;
}

/// δ_{ζ,p}(u, v) = ‖ζ∘u - ζ∘v‖_p.
inline MetricResult delta_zeta_p(const ConvexFunction& u, const ConvexFunction& v, const WeightFunction& z, double p,
                                 const MetricOptions& opt = {}) {
    detail::require_same_dim(u, v);
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("delta_zeta_p: p must be a finite real >= 1");
    const int n = u.dim();
    detail::require_member(z, p, n, "delta_zeta_p");
    detail::require_full_dim(u, "delta_zeta_p");
    detail::require_full_dim(v, "delta_zeta_p");
    auto* su = std::get_if<fn::IndicatorPlus>(&u.node().v);
    auto* sv = std::get_if<fn::IndicatorPlus>(&v.node().v);
    MetricResult r;
    if (su && sv && !opt.force_quadrature) {
        const double zs = z(su->offset), zt = z(sv->offset);
        const auto vk = volume_bounds(su->body), vl = volume_bounds(sv->body);
        const auto vi = intersection_volume(su->body, sv->body, opt.seed, opt.mc_samples);
        const double wi = std::pow(std::abs(zs - zt), p), wk = std::pow(zs, p), wl = std::pow(zt, p);
        const double a = wi * vi.value + wk * std::max(0.0, vk.value - vi.value) + wl * std::max(0.0, vl.value - vi.value);
        const double e = wi * vi.error + wk * (vk.error() + vi.error) + wl * (vl.error() + vi.error);
        r.value = std::pow(a, 1.0 / p);
        r.quadrature_error = detail::root_error(a, e, p);
        r.method = e > 0 ? (n >= 3 ? Method::MonteCarlo : Method::Sampling) : Method::Analytic;
        return r;
    }
    detail::require_envelope(u, "delta_zeta_p");
    detail::require_envelope(v, "delta_zeta_p");
    const std::vector<const ConvexFunction*> fs{&u, &v};
    const auto [R, tail] = detail::truncation(fs, z, p, opt);
    const auto est = detail::integrate_space(
        fs, [&](const Vec& x) { return std::pow(std::abs(z(evaluate(u, x)) - z(evaluate(v, x))), p); }, R, opt, r.method,
        [&](const Vec& x) { return z(evaluate(u, x)) - z(evaluate(v, x)); });
    const double a = std::max(0.0, est.value);
    r.value = std::pow(a, 1.0 / p);
    r.quadrature_error = detail::root_error(a, est.error, p);
    r.truncation_bound = tail > 0 ? std::min(std::pow(tail, 1.0 / p), a > 0 ? std::pow(a, 1.0 / p - 1.0) * tail / p : kInf) : 0.0;
    r.detail["R"] = R;
    return r;
}

/// Ψ(u) + Ψ(v) - 2 Ψ(u ∨ v): δ_{ζ,1} through the epigraph measure.
inline MetricResult delta_zeta_1_via_measure(const ConvexFunction& u, const ConvexFunction& v, const WeightFunction& z,
                                             const MetricOptions& opt = {}) {
    detail::require_same_dim(u, v);
    const int n = u.dim();
    detail::require_member(z, 1.0, n, "delta_zeta_1_via_measure");
    detail::require_full_dim(u, "delta_zeta_1_via_measure");
    detail::require_full_dim(v, "delta_zeta_1_via_measure");
    const auto pu = epigraph_measure(u, z, opt);
    const auto pv = epigraph_measure(v, z, opt);
    EpiMeasure pm;
    auto* su = std::get_if<fn::IndicatorPlus>(&u.node().v);
    auto* sv = std::get_if<fn::IndicatorPlus>(&v.node().v);
    if (su && sv && !opt.force_quadrature) {
        const auto vi = intersection_volume(su->body, sv->body, opt.seed, opt.mc_samples);
        const double zm = z(std::max(su->offset, sv->offset));
        pm.value = zm * vi.value;
        pm.quadrature_error = zm * vi.error;
        pm.method = vi.error > 0 ? Method::Sampling : Method::Analytic;
    } else {
        pm = epigraph_measure(ConvexFunction::maximum({u, v}), z, opt);
    }
    MetricResult r;
    r.value = std::max(0.0, pu.value + pv.value - 2.0 * pm.value);
    r.truncation_bound = pu.truncation_bound + pv.truncation_bound + 2.0 * pm.truncation_bound;
    r.quadrature_error = pu.quadrature_error + pv.quadrature_error + 2.0 * pm.quadrature_error;
    r.method = (pu.method == Method::Analytic && pv.method == Method::Analytic && pm.method == Method::Analytic)
                   ? Method::Analytic
                   : (n >= 3 ? Method::MonteCarlo : Method::Quadrature);
    r.detail["psi_u"] = pu.value;
    r.detail["psi_v"] = pv.value;
    r.detail["psi_max"] = pm.value;
    return r;
}

enum class HausdorffExtension { Hat, Tilde };

/// δ_ζ^H(u, v) = ∫_0^∞ d̂_H({ζ∘u >= s}, {ζ∘v >= s}) ds; the Tilde variant uses d̃_H.
inline MetricResult delta_zeta_H(const ConvexFunction& u, const ConvexFunction& v, const WeightFunction& z,
                                 const MetricOptions& opt = {}, HausdorffExtension ext = HausdorffExtension::Hat) {
    detail::require_same_dim(u, v);
    const auto integ = z.integrability();
    if (integ.verdict != Verdict::Member) throw AdmissibilityError("delta_zeta_H: weight is not verified in M^0 (integrable on [0,inf))");
    const auto eu = detail::require_envelope(u, "delta_zeta_H");
    const auto ev = detail::require_envelope(v, "delta_zeta_H");
    const auto mu = global_min(u), mv = global_min(v);
    const double t1 = std::min(mu.value, mv.value), t2 = std::max(mu.value, mv.value);
    const ConvexFunction& low = mu.value <= mv.value ? u : v;
    MetricResult r;
    if (ext == HausdorffExtension::Tilde && t1 != t2) {
        // On ζ(t2) < s <= ζ(t1) exactly one super-level set is empty: d̃_H = +inf there.
        r.value = kInf;
        r.method = Method::Analytic;
        r.detail["t_low"] = t1;
        r.detail["t_high"] = t2;
        return r;
    }
    auto* su = std::get_if<fn::IndicatorPlus>(&u.node().v);
    auto* sv = std::get_if<fn::IndicatorPlus>(&v.node().v);
    if (su && sv && !opt.force_quadrature) {
        const auto& klow = (su->offset <= sv->offset ? su : sv)->body;
        const auto dh = hausdorff_estimate(su->body, sv->body);
        const double mn = max_norm(klow);
        r.value = (z(t1) - z(t2)) * std::max(1.0, mn) + z(t2) * dh.value;
        r.quadrature_error = z(t2) * dh.error;
        r.method = dh.error > 0 ? Method::Sampling : Method::Analytic;
        return r;
    }
    const quad::Options qo{std::max(opt.rel_tol, 1e-9), 12};
    double gap = 0.0;
    // Piece on which only the lower function has a nonempty level set.
    quad::Estimate part_a;
    if (t2 > t1) {
        part_a = quad::integrate(
            [&](double s) {
                const auto k = sublevel_set(low, z.inverse(s));
                return k.is_empty() ? 1.0 : std::max(1.0, max_norm(k));
            },
            z(t2), z(t1), {}, qo);
    }
    // Tail beyond T, where both level sets lie in the envelope balls.
    const auto ru = domain_radius(u), rv = domain_radius(v);
    auto tail_at = [&](double T) {
        if (ru && rv) return (*ru + *rv) * z(T);
        const double zt = z(T), it = z.tail_integral(T);
        return (std::max(0.0, (T - eu.b) / eu.a) + std::max(0.0, (T - ev.b) / ev.a)) * zt + (1.0 / eu.a + 1.0 / ev.a) * it;
    };
    double T = t2 + 1.0;
    while (tail_at(T) > opt.tail_tol && T - t2 < 1e8) T = t2 + 2.0 * (T - t2);
    const auto part_b = quad::integrate(
        [&](double s) {
            const double t = z.inverse(s);
            const auto a = sublevel_set(u, t), b = sublevel_set(v, t);
            const auto d = hausdorff_estimate(a, b);
            gap = std::max(gap, d.error);
            return d.value;
        },
        z(T), z(t2), {}, qo);
    r.value = part_a.value + part_b.value;
    r.quadrature_error = part_a.error + part_b.error + gap * (z(t2) - z(T));
    r.truncation_bound = tail_at(T);
    r.method = Method::Quadrature;
    r.detail["T"] = T;
    return r;
}

/// The tilde-extension integral: +inf whenever the minima differ.
inline MetricResult tilde_integral_metric(const ConvexFunction& u, const ConvexFunction& v, const WeightFunction& z,
                                          const MetricOptions& opt = {}) {
    return delta_zeta_H(u, v, z, opt, HausdorffExtension::Tilde);
}

namespace detail {

struct SupEstimate {
    double value = 0.0;
    double gap = 0.0;
};

/// sup_{|y| <= rho} |u*(y) - v*(y)| by polar sampling with local refinement.
inline SupEstimate dual_sup(const ConvexFunction& us, const ConvexFunction& vs, double rho, const MetricOptions& opt) {
    const int n = us.dim();
    auto diff = [&](const Vec& y) { return ext_abs_diff(evaluate(us, y), evaluate(vs, y)); };
    SupEstimate out;
    out.value = diff(Vec::Zero(n));
    if (n == 1) {
        const int m = 64 * opt.dual_radii;
        std::vector<double> vals(2 * m + 1);
        int best = m;
        Vec y(1);
        for (int k = -m; k <= m; ++k) {
            y[0] = rho * k / m;
            vals[k + m] = diff(y);
            if (vals[k + m] > vals[best]) best = k + m;
        }
        const double sampled = vals[best];
        const double c = rho * (best - m) / m, h = rho / m;
        const auto [s, neg] = golden_min([&](double t) { y[0] = std::clamp(t, -rho, rho); return -diff(y); }, c - h, c + h, 1e-14);
        out.value = std::max({out.value, sampled, -neg});
        out.gap = out.value - sampled;
        return out;
    }
    const auto dirs = sphere_directions(n, n == 2 ? opt.dual_directions : 4000);
    double best = out.value;
    Vec best_y = Vec::Zero(n);
    for (int k = 1; k <= opt.dual_radii; ++k) {
        const double r = rho * k / opt.dual_radii;
        for (const auto& d : dirs) {
            const double v = diff(r * d);
            if (v > best) {
                best = v;
                best_y = r * d;
            }
        }
    }
    const double sampled = best;
    if (n == 2 && std::isfinite(best) && best_y.norm() > 0) {
        // Alternate golden searches in radius and angle around the best sample.
        double r = best_y.norm(), th = std::atan2(best_y[1], best_y[0]);
        const double dr = rho / opt.dual_radii, dth = 2 * kPi / opt.dual_directions;
        auto at = [&](double rr, double tt) {
            rr = std::clamp(rr, 0.0, rho);
            return diff(from2(rr * polar_dir(tt)));
        };
        for (int pass = 0; pass < 3; ++pass) {
            r = golden_min([&](double rr) { return -at(rr, th); }, std::max(0.0, r - dr), std::min(rho, r + dr), 1e-13).first;
            th = golden_min([&](double tt) { return -at(r, tt); }, th - dth, th + dth, 1e-13).first;
        }
        best = std::max(best, at(r, th));
    }
    out.value = best;
    out.gap = std::isfinite(best) ? best - sampled : 0.0;
    return out;
}

}  // namespace detail

/// δ(u, v) = inf{λ > 0 : sup_{|y| <= 1/λ} |u*(y) - v*(y)| <= λ}.
inline MetricResult delta_conjugate(const ConvexFunction& u, const ConvexFunction& v, const MetricOptions& opt = {}) {
    detail::require_same_dim(u, v);
    const int n = u.dim();
    detail::require_envelope(u, "delta_conjugate");
    detail::require_envelope(v, "delta_conjugate");
    MetricResult r;
    auto solve = [&](auto&& G, double r0) {
        // admissible ρ form [0, ρ*]; δ = 1/ρ*.
        auto ok = [&](double rho) { return rho * G(rho).value <= 1.0; };
        if (std::isfinite(r0)) {
            const double at = r0 * (1 - 1e-12);
            if (ok(at)) return std::pair<double, double>{r0, 0.0};
        }
        double hi = std::isfinite(r0) ? r0 : 1.0;
        if (!std::isfinite(r0)) {
            while (ok(hi) && hi < 1e15) hi *= 2.0;
            if (hi >= 1e15) return std::pair<double, double>{kInf, 0.0};
        }
        double lo = 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        return std::pair<double, double>{0.5 * (lo + hi), hi - lo};
    };
    auto* su = std::get_if<fn::IndicatorPlus>(&u.node().v);
    auto* sv = std::get_if<fn::IndicatorPlus>(&v.node().v);
    if (su && sv && !opt.force_quadrature) {
        // u* - v* = |y| D(y/|y|) - c with D = h_K - h_L.
        const double c = su->offset - sv->offset;
        double dmax, dmin, gap = 0.0;
        const auto pk = su->body.as_polygon(), pl = sv->body.as_polygon();
        if (n == 1) {
            const Vec e = Vec::Ones(1);
            const double dp = support(su->body, e) - support(sv->body, e), dm = support(su->body, -e) - support(sv->body, -e);
            dmax = std::max(dp, dm);
            dmin = std::min(dp, dm);
        } else if (pk && pl) {
            std::tie(dmax, dmin) = poly::support_difference_range(*pk, *pl);
        } else if (n == 2) {
            auto D = [&](double t) {
                const Vec y = detail::from2(polar_dir(t));
                return support(su->body, y) - support(sv->body, y);
            };
            const auto a = detail::circle_sup(D);
            const auto b = detail::circle_sup([&](double t) { return -D(t); });
            dmax = a.first;
            dmin = -b.first;
            gap = std::max(a.second, b.second);
        } else {
            dmax = -kInf;
            dmin = kInf;
            for (const auto& d : detail::sphere_directions(n, 20000)) {
                const double D = support(su->body, d) - support(sv->body, d);
                dmax = std::max(dmax, D);
                dmin = std::min(dmin, D);
            }
            gap = 0.05 * std::max(std::abs(dmax), std::abs(dmin));
        }
        auto G = [&](double rho) { return detail::SupEstimate{std::max({std::abs(c), rho * dmax - c, c - rho * dmin}), 0.0}; };
        const auto [rho, bracket] = solve(G, kInf);
        r.value = std::isfinite(rho) ? 1.0 / rho : 0.0;
        r.quadrature_error = (std::isfinite(rho) && rho > 0 ? bracket / (rho * rho) : 0.0) + gap;
        r.method = gap > 0 ? Method::Sampling : Method::Analytic;
        return r;
    }
    const auto us = conjugate(u).function, vs = conjugate(v).function;
    // Smallest radius at which the dual domains part ways.
    double r0 = kInf;
    const auto dirs = detail::sphere_directions(n, n == 1 ? 2 : (n == 2 ? opt.dual_directions : 4000));
    const Vec zero = Vec::Zero(n);
    for (const auto& d : dirs) {
        const Interval a = chord(us, zero, d), b = chord(vs, zero, d);
        if (a.empty() || b.empty() || a.hi <= 0 || b.hi <= 0)
            throw AdmissibilityError("delta_conjugate: 0 is not interior to dom u*; input is not coercive");
        if (std::abs(a.hi - b.hi) > 1e-12 * (1 + std::min(a.hi, b.hi))) r0 = std::min(r0, std::min(a.hi, b.hi));
    }
    double gap = 0.0;
    auto G = [&](double rho) {
        auto e = detail::dual_sup(us, vs, rho, opt);
        gap = std::max(gap, e.gap);
        return e;
    };
    const auto [rho, bracket] = solve(G, r0);
    r.value = std::isfinite(rho) ? 1.0 / rho : 0.0;
    r.quadrature_error = (std::isfinite(rho) && rho > 0 ? bracket / (rho * rho) : 0.0) + gap;
    const bool closed = detail::closed_conjugate(u).has_value() && detail::closed_conjugate(v).has_value();
    r.method = (closed && bracket == 0.0 && gap == 0.0) ? Method::Analytic : Method::Sampling;
    r.detail["r0"] = r0;
    return r;
}

// ---------------------------------------------------------------------------
// Rockafellar–Wets epi-distance

namespace detail {

/// Euclidean distance from (x, s) to epi f in R^{n+1}.
inline double epi_distance_point(const ConvexFunction& f, const Vec& x, double s) {
    using namespace fn;
    auto cone = [](double r, double s, double lambda) {
        if (s >= r / lambda) return 0.0;
        if (s <= -lambda * r) return std::hypot(r, s);
        return (r - lambda * s) / std::sqrt(1 + lambda * lambda);
    };
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& k) { return std::hypot(distance(k.body, x), std::max(0.0, k.offset - s)); },
            [&](const NormCone& c) { return cone(x.norm(), s, c.lambda); },
            [&](const AffineNorm& a) { return cone(x.norm(), s - a.b, 1.0 / a.a); },
            [&](const Shifted& sh) { return epi_distance_point(sh.inner, x - sh.x0, s - sh.t0); },
            [&](const Quadratic& q) {
                const double qx = x.dot(q.m * x) + q.l.dot(x) + q.c;
                if (qx <= s) return 0.0;
                // KKT: z(μ) = (I + 2μM)^{-1}(x - μ l), μ = q(z(μ)) - s, μ >= 0.
                Eigen::SelfAdjointEigenSolver<Mat> es(q.m);
                const Vec lam = es.eigenvalues();
                const Vec xe = es.eigenvectors().transpose() * x, le = es.eigenvectors().transpose() * q.l;
                auto z_of = [&](double mu) {
                    Vec z(xe.size());
                    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = (xe[i] - mu * le[i]) / (1 + 2 * mu * lam[i]);
                    return z;
                };
                auto phi = [&](double mu) {
                    const Vec z = z_of(mu);
                    double qz = q.c;
                    for (Eigen::Index i = 0; i < z.size(); ++i) qz += lam[i] * z[i] * z[i] + le[i] * z[i];
                    return qz - s - mu;
                };
                double lo = 0.0, hi = 1.0;
                while (phi(hi) > 0 && hi < 1e300) hi *= 2.0;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (phi(mid) > 0 ? lo : hi) = mid;
                }
                const double mu = 0.5 * (lo + hi);
                return std::hypot((z_of(mu) - xe).norm(), mu);
            },
            [&](const auto&) {
                // min_z sqrt(|x - z|^2 + (f(z) - s)_+^2), a convex function of z.
                const int n = f.dim();
                auto obj = [&](const Vec& z) {
                    const double fz = evaluate(f, z);
                    if (!std::isfinite(fz)) return kInf;
                    return std::hypot((x - z).norm(), std::max(0.0, fz - s));
                };
                if (n == 1) {
                    const Vec e = Vec::Ones(1);
                    const Interval I = chord(f, x, e);
                    if (I.empty()) {
                        auto p = feasible_point(f);
                        if (!p) return kInf;
                        const Interval J = chord(f, *p, e);
                        return line_min([&](double t) { return obj(*p + t * e); }, J, 0.0).second;
                    }
                    const double s0 = std::clamp(0.0, I.lo, I.hi);
                    return line_min([&](double t) { return obj(x + t * e); }, I, s0).second;
                }
                if (n != 2) throw DimensionError("epi_distance_rw: generic epigraphs are limited to n <= 2");
                auto p = feasible_point(f);
                if (!p) return kInf;
                Vec ex(2);
                ex << 1.0, 0.0;
                auto row = [&](double y) {
                    Vec q(2);
                    q << (*p)[0], y;
                    const Interval I = chord(f, q, ex);
                    if (I.empty()) return kInf;
                    const double s0 = std::clamp(x[0] - (*p)[0], I.lo, I.hi);
                    return line_min([&](double t) { return obj(q + t * ex); }, I, s0, 1e-10).second;
                };
                const double ylo = -1e6, yhi = 1e6;
                return line_min(row, Interval{ylo, yhi}, (*p)[1], 1e-10).second;
            },
        },
        f.node().v);
}

}  // namespace detail

/// d(epi u, epi v) = ∫_0^∞ d_ρ e^{-ρ} dρ with d_ρ = max_{|x| <= ρ} |dist(x, epi u) - dist(x, epi v)|.
inline MetricResult epi_distance_rw(const ConvexFunction& u, const ConvexFunction& v, const MetricOptions& opt = {}) {
    detail::require_same_dim(u, v);
    const int n = u.dim();
    if (n > 2) throw DimensionError("epi_distance_rw: limited to n <= 2");
    const int m = n + 1;
    const auto dirs = detail::sphere_directions(m, m == 2 ? opt.rw_directions : 2000);
    auto gapf = [&](const Vec& p) {
        const Vec x = p.head(n);
        return std::abs(detail::epi_distance_point(u, x, p[n]) - detail::epi_distance_point(v, x, p[n]));
    };
    const int nr = opt.rw_radii;
    const double rho_max = opt.rho_max;
    std::vector<double> running(nr + 1);
    double best = gapf(Vec::Zero(m));
    running[0] = best;
    for (int j = 1; j <= nr; ++j) {
        const double r = rho_max * j / nr;
        int arg = 0;
        double here = -1.0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            const double g = gapf(r * dirs[k]);
            if (g > here) {
                here = g;
                arg = static_cast<int>(k);
            }
        }
        if (m == 2) {
            const double step = 2 * kPi / static_cast<double>(dirs.size());
            const double th = std::atan2(dirs[arg][1], dirs[arg][0]);
            here = std::max(here, -golden_min([&](double t) { return -gapf(r * detail::from2(polar_dir(t))); }, th - step, th + step, 1e-12).second);
        }
        best = std::max(best, here);
        running[j] = best;
    }
    double lower = 0.0, upper = 0.0;
    for (int j = 0; j < nr; ++j) {
        const double a = rho_max * j / nr, b = rho_max * (j + 1) / nr;
        const double w = std::exp(-a) - std::exp(-b);
        lower += running[j] * w;
        upper += running[j + 1] * w;
    }
    // Sampled sphere points are within r·h of any point of the sphere, and the
    // gap function is 2-Lipschitz: add ∫ 2 r h e^{-r} dr <= 2 h.
    const double h = m == 2 ? kPi / static_cast<double>(dirs.size()) : std::sqrt(4 * kPi / static_cast<double>(dirs.size()));
    const double c0 = std::max(detail::epi_distance_point(u, Vec::Zero(n), 0.0), detail::epi_distance_point(v, Vec::Zero(n), 0.0));
    MetricResult r;
    r.value = 0.5 * (lower + upper);
    r.quadrature_error = 0.5 * (upper - lower) + (best > 0 ? 2.0 * h : 0.0);
    r.truncation_bound = (rho_max + 1.0 + c0) * std::exp(-rho_max);
    r.method = Method::Sampling;
    r.detail["d_rho_max"] = best;
    return r;
}

// ---------------------------------------------------------------------------
// Scheffé consistency

struct ScheffeRow {
    double distance = 0.0;   // ‖f_k - f‖_p
    double norm_gap = 0.0;   // |‖f_k‖_p - ‖f‖_p|
};

struct ScheffeReport {
    std::vector<ScheffeRow> rows;
    bool distance_converges = false;
    bool norms_converge = false;
    [[nodiscard]] bool consistent() const { return distance_converges == norms_converge; }
};

/// Compares ‖f_k - f‖_p -> 0 against ‖f_k‖_p -> ‖f‖_p along a sequence on a 1-D window.
inline ScheffeReport scheffe_check(const std::vector<std::function<double(double)>>& fk, const std::function<double(double)>& f,
                                   double p, double lo, double hi, double tol = 1e-3) {
    ScheffeReport rep;
    std::vector<double> cuts;
    for (double c = std::ceil(lo); c < hi; c += 1.0) cuts.push_back(c);
    const quad::Options qo{1e-10, 15};
    auto norm = [&](auto&& g) { return std::pow(quad::integrate([&](double x) { return std::pow(std::abs(g(x)), p); }, lo, hi, cuts, qo).value, 1 / p); };
    const double nf = norm(f);
    for (const auto& g : fk) {
        ScheffeRow row;
        row.distance = norm([&](double x) { return g(x) - f(x); });
        row.norm_gap = std::abs(norm(g) - nf);
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) {
        rep.distance_converges = rep.rows.back().distance < tol;
        rep.norms_converge = rep.rows.back().norm_gap < tol;
    }
    return rep;
}

}  // namespace epimetric
