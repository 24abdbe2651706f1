#pragma once

// Proper, l.s.c., coercive convex functions on R^n.

#include "epimetric/bodies.hpp"
#include "epimetric/core.hpp"
#include "epimetric/weights.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace epimetric {

/// u(x) >= a|x| + b with a > 0.
struct Envelope {
    double a = 0.0;
    double b = 0.0;
};

/// Samples on a regular grid over a box; +inf marks points outside dom u.
/// Values are row-major with the last axis fastest: values[i0 * res[1] + i1].
struct GridData {
    Vec lo;
    Vec hi;
    std::vector<int> res;
    std::vector<double> values;
    // Set on conjugates of sampled data. Outside the box the function is
    // evaluated exactly as max_i <x_i, y> - u_i over the primal samples.
    struct Primal {
        std::vector<std::pair<Vec, double>> points;  // finite samples (x_i, u_i)
        Vec lo;
        Vec hi;
        std::vector<int> res;
        std::vector<bool> finite;  // per primal node
    };
    std::shared_ptr<const Primal> exterior;

    [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }
    [[nodiscard]] double step(int axis) const { return (hi[axis] - lo[axis]) / (res[axis] - 1); }
    [[nodiscard]] double coord(int axis, int i) const { return lo[axis] + i * step(axis); }
    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] double at(int i) const { return values[static_cast<std::size_t>(i)]; }
    [[nodiscard]] double at(int i, int j) const { return values[static_cast<std::size_t>(i) * res[1] + j]; }
    [[nodiscard]] Vec node(std::size_t k) const {
        Vec x(dim());
        if (dim() == 1) {
            x[0] = coord(0, static_cast<int>(k));
        } else {
            x[0] = coord(0, static_cast<int>(k / res[1]));
            x[1] = coord(1, static_cast<int>(k % res[1]));
        }
        return x;
    }
};

namespace fn {
struct Node;
}

class ConvexFunction {
public:
    static ConvexFunction indicator(ConvexBody body, double offset = 0.0);
    static ConvexFunction quadratic(Mat m, Vec l, double c);
    static ConvexFunction norm_cone(int dim, double lambda);
    static ConvexFunction support(ConvexBody body);
    static ConvexFunction affine_norm(int dim, double a, double b);
    static ConvexFunction shifted(const ConvexFunction& inner, Vec x0, double t0);
    static ConvexFunction linear(const ConvexFunction& inner, Mat m);
    static ConvexFunction tilted(const ConvexFunction& inner, Vec l, double c);
    static ConvexFunction maximum(std::vector<ConvexFunction> terms);
    static ConvexFunction sum(std::vector<ConvexFunction> terms);
    static ConvexFunction grid(GridData data, double eps_cvx = 1e-9);
    /// x -> f(u(x)) with f(t) = ζ⁻¹(ζ(t) / det).
    static ConvexFunction rescaled(const ConvexFunction& inner, WeightFunction zeta, double det);

    /// Sample f on a regular grid (+inf values allowed).
    template <class F>
    static ConvexFunction sample(F&& f, Vec lo, Vec hi, std::vector<int> res) {
        GridData g{std::move(lo), std::move(hi), std::move(res), {}, nullptr};
        if (g.dim() < 1 || g.dim() > 2 || static_cast<int>(g.res.size()) != g.dim())
            throw DimensionError("sample: grids are 1- or 2-dimensional");
        std::size_t total = 1;
        for (int r : g.res) total *= static_cast<std::size_t>(r);
        g.values.resize(total);
        for (std::size_t k = 0; k < total; ++k) g.values[k] = f(g.node(k));
        return grid(std::move(g));
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const fn::Node& node() const { return *node_; }

    double operator()(const Vec& x) const;

    /// Coercivity envelope; empty when none was found (not coercive).
    [[nodiscard]] std::optional<Envelope> envelope() const;

private:
    struct Lazy {
        std::once_flag once;
        std::optional<Envelope> env;
    };

    ConvexFunction(std::shared_ptr<const fn::Node> node, int dim) : node_(std::move(node)), dim_(dim), lazy_(std::make_shared<Lazy>()) {}

    std::shared_ptr<const fn::Node> node_;
    int dim_;
    std::shared_ptr<Lazy> lazy_;
};

namespace fn {

struct IndicatorPlus {
    ConvexBody body;
    double offset;
};
struct Quadratic {
    Mat m;  // u(x) = x'Mx + <l,x> + c
    Vec l;
    double c;
};
struct NormCone {
    double lambda;
};
struct SupportFn {
    ConvexBody body;
};
struct AffineNorm {
    double a;
    double b;
};
struct Shifted {
    ConvexFunction inner;
    Vec x0;
    double t0;
};
struct Linear {
    ConvexFunction inner;  // u(x) = inner(M x)
    Mat m;
    Mat m_inv;
};
struct Tilted {
    ConvexFunction inner;  // u(x) = inner(x) + <l,x> + c
    Vec l;
    double c;
};
struct Maximum {
    std::vector<ConvexFunction> terms;
};
struct Sum {
    std::vector<ConvexFunction> terms;
};
struct Grid {
    GridData data;
};
struct Rescaled {
    ConvexFunction inner;
    WeightFunction zeta;
    double det;

    [[nodiscard]] double apply(double t) const {
        if (t == kInf) return kInf;
        return zeta.inverse(zeta(t) / det);
    }
    [[nodiscard]] double unapply(double s) const {
        const double z = zeta(s) * det;
        if (!(z < zeta.sup())) return -kInf;
        return zeta.inverse(z);
    }
};

struct Node {
    std::variant<IndicatorPlus, Quadratic, NormCone, SupportFn, AffineNorm, Shifted, Linear, Tilted, Maximum, Sum, Grid,
                 Rescaled>
        v;
};

}  // namespace fn

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double grid_eval_1d(const GridData& g, double x) {
    const int n = g.res[0];
    const double h = g.step(0);
    const double tol = 1e-12 * (1 + std::abs(g.lo[0]) + std::abs(g.hi[0]));
    if (x < g.lo[0] - tol || x > g.hi[0] + tol) return kInf;
    const double s = std::clamp((x - g.lo[0]) / h, 0.0, static_cast<double>(n - 1));
    const int i = std::min(static_cast<int>(std::floor(s)), n - 2);
    const double u = s - i;
    const double v0 = g.at(i), v1 = g.at(i + 1);
    if (std::isfinite(v0) && std::isfinite(v1)) return (1 - u) * v0 + u * v1;
    if (u < 1e-9 && std::isfinite(v0)) return v0;
    if (u > 1 - 1e-9 && std::isfinite(v1)) return v1;
    return kInf;
}

inline double grid_eval_2d(const GridData& g, double x, double y) {
    const double tx = 1e-12 * (1 + std::abs(g.lo[0]) + std::abs(g.hi[0]));
    const double ty = 1e-12 * (1 + std::abs(g.lo[1]) + std::abs(g.hi[1]));
    if (x < g.lo[0] - tx || x > g.hi[0] + tx || y < g.lo[1] - ty || y > g.hi[1] + ty) return kInf;
    const int nx = g.res[0], ny = g.res[1];
    const double sx = std::clamp((x - g.lo[0]) / g.step(0), 0.0, static_cast<double>(nx - 1));
    const double sy = std::clamp((y - g.lo[1]) / g.step(1), 0.0, static_cast<double>(ny - 1));
    const int i = std::min(static_cast<int>(std::floor(sx)), nx - 2);
    const int j = std::min(static_cast<int>(std::floor(sy)), ny - 2);
    const double u = sx - i, w = sy - j;
    const double v00 = g.at(i, j), v10 = g.at(i + 1, j), v01 = g.at(i, j + 1), v11 = g.at(i + 1, j + 1);
    const bool f00 = std::isfinite(v00), f10 = std::isfinite(v10), f01 = std::isfinite(v01), f11 = std::isfinite(v11);
    if (f00 && f10 && f01 && f11) {
        return (1 - u) * (1 - w) * v00 + u * (1 - w) * v10 + (1 - u) * w * v01 + u * w * v11;
    }
    // Partial cell: lower limit over the finite sub-simplices containing the point.
    constexpr double e = 1e-9;
    double best = kInf;
    auto tri = [&](bool ok, double a, double b, double c, double la, double lb, double lc) {
        if (ok && la >= -e && lb >= -e && lc >= -e) best = std::min(best, la * a + lb * b + lc * c);
    };
    tri(f00 && f10 && f11, v00, v10, v11, 1 - u, u - w, w);
    tri(f00 && f01 && f11, v00, v01, v11, 1 - w, w - u, u);
    tri(f00 && f10 && f01, v00, v10, v01, 1 - u - w, u, w);
    tri(f10 && f01 && f11, v10, v01, v11, 1 - w, 1 - u, u + w - 1);
    if (best < kInf) return best;
    auto edge = [&](bool ok, double a, double b, double t, double off) {
        if (ok && std::abs(off) < e) best = std::min(best, (1 - t) * a + t * b);
    };
    edge(f00 && f10, v00, v10, u, w);
    edge(f01 && f11, v01, v11, u, 1 - w);
    edge(f00 && f01, v00, v01, w, u);
    edge(f10 && f11, v10, v11, w, 1 - u);
    return best;
}

inline double exterior_eval(const GridData& g, const Vec& y) {
    double best = -kInf;
    for (const auto& [x, v] : g.exterior->points) best = std::max(best, x.dot(y) - v);
    return best;
}

}  // namespace detail

inline double evaluate(const ConvexFunction& f, const Vec& x) {
    require_dim(x.size(), f.dim(), "evaluate");
    using namespace fn;
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) { return contains(s.body, x, 1e-12) ? s.offset : kInf; },
            [&](const Quadratic& q) { return x.dot(q.m * x) + q.l.dot(x) + q.c; },
            [&](const NormCone& c) { return x.norm() / c.lambda; },
            [&](const SupportFn& s) { return epimetric::support(s.body, x); },
            [&](const AffineNorm& a) { return a.a * x.norm() + a.b; },
            [&](const Shifted& s) { return ext_add(evaluate(s.inner, x - s.x0), s.t0); },
            [&](const Linear& l) { return evaluate(l.inner, l.m * x); },
            [&](const Tilted& t) { return ext_add(evaluate(t.inner, x), t.l.dot(x) + t.c); },
            [&](const Maximum& m) {
                double best = -kInf;
                for (const auto& g : m.terms) best = std::max(best, evaluate(g, x));
                return best;
            },
            [&](const Sum& s) {
                double total = 0.0;
                for (const auto& g : s.terms) {
                    total = ext_add(total, evaluate(g, x));
                    if (total == kInf) break;
                }
                return total;
            },
            [&](const Grid& g) {
                const auto& d = g.data;
                double v = d.dim() == 1 ? detail::grid_eval_1d(d, x[0]) : detail::grid_eval_2d(d, x[0], x[1]);
                if (v == kInf && d.exterior) {
                    bool inside = true;
                    for (int i = 0; i < d.dim(); ++i) inside = inside && x[i] >= d.lo[i] && x[i] <= d.hi[i];
                    if (!inside) v = detail::exterior_eval(d, x);
                }
                return v;
            },
            [&](const Rescaled& r) { return r.apply(evaluate(r.inner, x)); },
        },
        f.node().v);
}

inline double ConvexFunction::operator()(const Vec& x) const { return evaluate(*this, x); }

inline std::string kind_name(const ConvexFunction& f) {
    static const char* names[] = {"indicator", "quadratic", "norm_cone", "support", "affine_norm", "shifted",
                                  "linear",    "tilted",    "max",       "sum",     "grid",        "rescaled"};
    return names[f.node().v.index()];
}

// ---------------------------------------------------------------------------
// Construction

inline ConvexFunction ConvexFunction::indicator(ConvexBody body, double offset) {
    if (body.is_empty()) throw std::invalid_argument("indicator: the body must be nonempty (the function would be improper)");
    if (!std::isfinite(offset)) throw std::invalid_argument("indicator: offset must be finite");
    const int n = body.dim();
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::IndicatorPlus{std::move(body), offset}}), n);
}

inline ConvexFunction ConvexFunction::quadratic(Mat m, Vec l, double c) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n || l.size() != n || n < 1) throw DimensionError("quadratic: matrix must be n x n and linear term length n");
    const Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    if (es.eigenvalues().minCoeff() < -1e-12 * (1 + es.eigenvalues().cwiseAbs().maxCoeff()))
        throw std::invalid_argument("quadratic: matrix must be positive semidefinite");
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::Quadratic{sym, std::move(l), c}}), n);
}

inline ConvexFunction ConvexFunction::norm_cone(int dim, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("norm_cone: lambda must be > 0");
    if (dim < 1) throw DimensionError("norm_cone: dim must be >= 1");
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::NormCone{lambda}}), dim);
}

inline ConvexFunction ConvexFunction::support(ConvexBody body) {
    if (body.is_empty()) throw std::invalid_argument("support: empty body");
    const int n = body.dim();
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::SupportFn{std::move(body)}}), n);
}

inline ConvexFunction ConvexFunction::affine_norm(int dim, double a, double b) {
    if (!(a > 0)) throw std::invalid_argument("affine_norm: a must be > 0");
    if (dim < 1) throw DimensionError("affine_norm: dim must be >= 1");
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::AffineNorm{a, b}}), dim);
}

inline ConvexFunction ConvexFunction::shifted(const ConvexFunction& inner, Vec x0, double t0) {
    require_dim(x0.size(), inner.dim(), "shifted");
    using namespace fn;
    const auto& v = inner.node().v;
    if (auto* s = std::get_if<IndicatorPlus>(&v)) return indicator(translate(s->body, x0), s->offset + t0);
    if (auto* q = std::get_if<Quadratic>(&v)) {
        return quadratic(q->m, q->l - 2.0 * q->m * x0, x0.dot(q->m * x0) - q->l.dot(x0) + q->c + t0);
    }
    if (auto* s = std::get_if<Shifted>(&v)) return shifted(s->inner, s->x0 + x0, s->t0 + t0);
    if (x0.norm() == 0.0) {
        if (auto* a = std::get_if<AffineNorm>(&v)) return affine_norm(inner.dim(), a->a, a->b + t0);
        if (t0 == 0.0) return inner;
    }
    return ConvexFunction(std::make_shared<Node>(Node{Shifted{inner, std::move(x0), t0}}), inner.dim());
}

inline ConvexFunction ConvexFunction::linear(const ConvexFunction& inner, Mat m) {
    const int n = inner.dim();
    if (m.rows() != n || m.cols() != n) throw DimensionError("linear: matrix must be n x n");
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw std::invalid_argument("linear: matrix must be invertible");
    const Mat inv = lu.inverse();
    using namespace fn;
    const auto& v = inner.node().v;
    if (auto* q = std::get_if<Quadratic>(&v)) return quadratic(m.transpose() * q->m * m, m.transpose() * q->l, q->c);
    if (auto* s = std::get_if<IndicatorPlus>(&v)) {
        try {
            return indicator(linear_image(s->body, inv), s->offset);
        } catch (const DimensionError&) {
        }
    }
    if (auto* l = std::get_if<Linear>(&v)) return linear(l->inner, l->m * m);
    return ConvexFunction(std::make_shared<Node>(Node{Linear{inner, std::move(m), inv}}), n);
}

inline ConvexFunction ConvexFunction::tilted(const ConvexFunction& inner, Vec l, double c) {
    require_dim(l.size(), inner.dim(), "tilted");
    using namespace fn;
    const auto& v = inner.node().v;
    if (auto* q = std::get_if<Quadratic>(&v)) return quadratic(q->m, q->l + l, q->c + c);
    if (auto* t = std::get_if<Tilted>(&v)) return tilted(t->inner, t->l + l, t->c + c);
    if (l.norm() == 0.0) {
        if (auto* s = std::get_if<IndicatorPlus>(&v)) return indicator(s->body, s->offset + c);
        if (auto* a = std::get_if<AffineNorm>(&v)) return affine_norm(inner.dim(), a->a, a->b + c);
        if (auto* s = std::get_if<Shifted>(&v)) return shifted(s->inner, s->x0, s->t0 + c);
        if (c == 0.0) return inner;
    }
    return ConvexFunction(std::make_shared<Node>(Node{Tilted{inner, std::move(l), c}}), inner.dim());
}

inline ConvexFunction ConvexFunction::maximum(std::vector<ConvexFunction> terms) {
    if (terms.empty()) throw std::invalid_argument("maximum: no terms");
    const int n = terms.front().dim();
    for (const auto& t : terms) require_dim(t.dim(), n, "maximum");
    if (terms.size() == 1) return terms.front();
    // max of indicators: the indicator of the intersection, offset by the largest offset.
    bool all_ind = true;
    for (const auto& t : terms) all_ind = all_ind && std::holds_alternative<fn::IndicatorPlus>(t.node().v);
    if (all_ind) {
        std::optional<ConvexBody> k = std::get<fn::IndicatorPlus>(terms.front().node().v).body;
        double off = -kInf;
        for (const auto& t : terms) {
            const auto& s = std::get<fn::IndicatorPlus>(t.node().v);
            off = std::max(off, s.offset);
            if (k) k = intersect(*k, s.body);
        }
        if (k && !k->is_empty()) return indicator(*k, off);
    }
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::Maximum{std::move(terms)}}), n);
}

inline ConvexFunction ConvexFunction::sum(std::vector<ConvexFunction> terms) {
    if (terms.empty()) throw std::invalid_argument("sum: no terms");
    const int n = terms.front().dim();
    for (const auto& t : terms) require_dim(t.dim(), n, "sum");
    if (terms.size() == 1) return terms.front();
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::Sum{std::move(terms)}}), n);
}

inline ConvexFunction ConvexFunction::grid(GridData g, double eps_cvx) {
    const int n = g.dim();
    if (n < 1 || n > 2) throw DimensionError("grid: only 1- and 2-dimensional grids are supported");
    if (static_cast<int>(g.res.size()) != n || g.hi.size() != n) throw DimensionError("grid: box/resolution mismatch");
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (g.res[i] < 2) throw std::invalid_argument("grid: need at least 2 nodes per axis");
        if (!(g.hi[i] > g.lo[i])) throw std::invalid_argument("grid: box must have positive width");
        total *= static_cast<std::size_t>(g.res[i]);
    }
    if (g.values.size() != total) throw std::invalid_argument("grid: value count does not match resolution");
    bool any = false;
    double scale = 0.0;
    for (double v : g.values) {
        if (std::isnan(v) || v == -kInf) throw std::invalid_argument("grid: values must be real or +inf");
        if (std::isfinite(v)) {
            any = true;
            scale = std::max(scale, std::abs(v));
        }
    }
    if (!any) throw std::invalid_argument("grid: function is identically +inf");
    const double tol = eps_cvx * (1 + scale);
    // Along every axis-parallel line: finite nodes contiguous, midpoint convex.
    auto check_line = [&](auto&& val, int count) {
        int first = -1, last = -1;
        for (int k = 0; k < count; ++k) {
            if (std::isfinite(val(k))) {
                if (first < 0) first = k;
                if (last >= 0 && last != k - 1) throw std::invalid_argument("grid: finite region is not convex along an axis");
                last = k;
            }
        }
        for (int k = first + 1; first >= 0 && k < last; ++k) {
            if (val(k - 1) - 2 * val(k) + val(k + 1) < -tol) throw std::invalid_argument("grid: values violate midpoint convexity");
        }
    };
    if (n == 1) {
        check_line([&](int k) { return g.at(k); }, g.res[0]);
    } else {
        for (int i = 0; i < g.res[0]; ++i) check_line([&](int k) { return g.at(i, k); }, g.res[1]);
        for (int j = 0; j < g.res[1]; ++j) check_line([&](int k) { return g.at(k, j); }, g.res[0]);
    }
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::Grid{std::move(g)}}), n);
}

inline ConvexFunction ConvexFunction::rescaled(const ConvexFunction& inner, WeightFunction zeta, double det) {
    if (!(det > 0)) throw std::invalid_argument("rescaled: det must be > 0");
    return ConvexFunction(std::make_shared<fn::Node>(fn::Node{fn::Rescaled{inner, std::move(zeta), det}}), inner.dim());
}

inline ConvexFunction plus_constant(const ConvexFunction& f, double c) {
    return ConvexFunction::tilted(f, Vec::Zero(f.dim()), c);
}

// ---------------------------------------------------------------------------
// Domain queries

/// {s : f(p + s d) < inf}.
inline Interval chord(const ConvexFunction& f, const Vec& p, const Vec& d) {
    using namespace fn;
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) { return chord(s.body, p, d); },
            [&](const Shifted& s) { return chord(s.inner, p - s.x0, d); },
            [&](const Linear& l) { return chord(l.inner, l.m * p, l.m * d); },
            [&](const Tilted& t) { return chord(t.inner, p, d); },
            [&](const Rescaled& r) { return chord(r.inner, p, d); },
            [&](const Maximum& m) {
                Interval out = Interval::whole();
                for (const auto& g : m.terms) out = out.intersect(chord(g, p, d));
                return out;
            },
            [&](const Sum& m) {
                Interval out = Interval::whole();
                for (const auto& g : m.terms) out = out.intersect(chord(g, p, d));
                return out;
            },
            [&](const Grid& g) {
                if (g.data.exterior) return Interval::whole();
                // Clip to the box, then locate the finite run numerically.
                const auto& gd = g.data;
                const ConvexBody box = ConvexBody::box(gd.lo, gd.hi);
                const Interval in_box = chord(box, p, d);
                if (in_box.empty()) return Interval::none();
                auto finite = [&](double s) { return std::isfinite(evaluate(f, p + s * d)); };
                const int samples = 4 * std::max(gd.res[0], gd.dim() == 2 ? gd.res[1] : 0) + 1;
                double s_in = kInf;
                for (int k = 0; k < samples; ++k) {
                    const double s = in_box.lo + (in_box.hi - in_box.lo) * k / (samples - 1);
                    if (finite(s)) {
                        s_in = s;
                        break;
                    }
                }
                if (!std::isfinite(s_in)) return Interval::none();
                const double hi = finite(in_box.hi) ? in_box.hi : bisect_last_true(finite, s_in, in_box.hi, 80);
                const double lo = finite(in_box.lo) ? in_box.lo : -bisect_last_true([&](double s) { return finite(-s); }, -s_in, -in_box.lo, 80);
                return Interval{lo, hi};
            },
            [&](const auto&) { return Interval::whole(); },
        },
        f.node().v);
}

/// Radius R with dom f ⊆ B(0, R), when the domain is bounded.
inline std::optional<double> domain_radius(const ConvexFunction& f) {
    using namespace fn;
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) -> std::optional<double> { return max_norm(s.body); },
            [&](const Shifted& s) -> std::optional<double> {
                auto r = domain_radius(s.inner);
                if (!r) return std::nullopt;
                return *r + s.x0.norm();
            },
            [&](const Linear& l) -> std::optional<double> {
                auto r = domain_radius(l.inner);
                if (!r) return std::nullopt;
                return *r * l.m_inv.norm();
            },
            [&](const Tilted& t) { return domain_radius(t.inner); },
            [&](const Rescaled& r) { return domain_radius(r.inner); },
            [&](const Maximum& m) {
                std::optional<double> best;
                for (const auto& g : m.terms)
                    if (auto r = domain_radius(g)) best = best ? std::min(*best, *r) : *r;
                return best;
            },
            [&](const Sum& m) {
                std::optional<double> best;
                for (const auto& g : m.terms)
                    if (auto r = domain_radius(g)) best = best ? std::min(*best, *r) : *r;
                return best;
            },
            [&](const Grid& g) -> std::optional<double> {
                if (g.data.exterior) return std::nullopt;
                return g.data.lo.cwiseAbs().cwiseMax(g.data.hi.cwiseAbs()).norm();
            },
            [&](const auto&) -> std::optional<double> { return std::nullopt; },
        },
        f.node().v);
}

namespace detail {

/// Minimise a convex phi on the interval I, starting from a finite point s0.
template <class Phi>
std::pair<double, double> line_min(Phi&& phi, Interval I, double s0, double tol = 1e-12) {
    const double f0 = phi(s0);
    auto expand = [&](double dir) {
        double prev = s0, fprev = f0, h = 1.0;
        const double limit = dir > 0 ? I.hi : I.lo;
        for (int it = 0; it < 80; ++it) {
            double s = s0 + dir * h;
            if ((dir > 0 && s >= limit) || (dir < 0 && s <= limit)) return limit;
            const double fs = phi(s);
            if (fs > fprev) return s;
            prev = s;
            fprev = fs;
            h *= 2.0;
        }
        return prev;
    };
    const double a = expand(-1.0), b = expand(1.0);
    if (!(b > a)) return {s0, f0};
    auto res = golden_min(phi, a, b, tol, 300);
    if (f0 < res.second) return {s0, f0};
    return res;
}

}  // namespace detail

inline std::optional<Vec> feasible_point(const ConvexFunction& f);

struct MinResult {
    Vec argmin;
    double value = kInf;
};

inline MinResult global_min(const ConvexFunction& f);

namespace detail {

inline MinResult numeric_min(const ConvexFunction& f) {
    const int n = f.dim();
    auto p = feasible_point(f);
    if (!p) throw AdmissibilityError("global_min: could not locate a point of the domain");
    if (n == 1) {
        const Vec e = Vec::Ones(1);
        const auto [s, v] = line_min([&](double s) { return evaluate(f, *p + s * e); }, chord(f, *p, e), 0.0);
        return {*p + s * e, v};
    }
    if (n != 2) throw DimensionError("global_min: numeric minimisation is limited to n <= 2");
    Vec ex(2), ey(2);
    ex << 1.0, 0.0;
    ey << 0.0, 1.0;
    auto row = [&](double y, double x_hint) -> std::pair<double, double> {
        Vec q(2);
        q << x_hint, y;
        const Interval I = chord(f, q, ex);
        if (I.empty()) return {x_hint, kInf};
        const double s0 = std::isfinite(I.lo) && std::isfinite(I.hi) ? 0.5 * (I.lo + I.hi) : std::clamp(0.0, I.lo, I.hi);
        return line_min([&](double s) { return evaluate(f, q + s * ex); }, I, s0);
    };
    // y-range of the domain
    auto nonempty = [&](double y) {
        Vec q(2);
        q << (*p)[0], y;
        return !chord(f, q, ex).empty();
    };
    auto reach = [&](double dir) {
        double h = 1.0;
        for (int it = 0; it < 60; ++it, h *= 2.0) {
            if (!nonempty((*p)[1] + dir * h)) return dir * bisect_last_true([&](double s) { return nonempty((*p)[1] + dir * s); }, 0.0, h, 80);
        }
        return dir * kInf;
    };
    const Interval J{(*p)[1] + reach(-1.0), (*p)[1] + reach(1.0)};
    const auto [y, v] = line_min([&](double y) { return row(y, (*p)[0]).second; }, J, (*p)[1]);
    const auto [s, v2] = row(y, (*p)[0]);
    Vec x(2);
    x << (*p)[0] + s, y;
    return {x, v2};
}

inline MinResult grid_min(const GridData& g) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.values[k] < g.values[best]) best = k;
    Vec x = g.node(best);
    double v = g.values[best];
    // Parabolic refinement along each axis through the neighbouring nodes.
    auto refine = [&](double vm, double v0, double vp, double h, int axis) {
        const double curv = vm - 2 * v0 + vp;
        if (!std::isfinite(vm) || !std::isfinite(vp) || curv <= 0) return;
        const double off = 0.5 * h * (vm - vp) / curv;
        if (std::abs(off) > h) return;
        x[axis] += off;
        v -= (vm - vp) * (vm - vp) / (8 * curv);
    };
    if (g.dim() == 1) {
        const int i = static_cast<int>(best);
        if (i > 0 && i + 1 < g.res[0]) refine(g.at(i - 1), g.at(i), g.at(i + 1), g.step(0), 0);
    } else {
        const int i = static_cast<int>(best / g.res[1]), j = static_cast<int>(best % g.res[1]);
        const double v0 = g.at(i, j);
        if (i > 0 && i + 1 < g.res[0]) refine(g.at(i - 1, j), v0, g.at(i + 1, j), g.step(0), 0);
        if (j > 0 && j + 1 < g.res[1]) refine(g.at(i, j - 1), v0, g.at(i, j + 1), g.step(1), 1);
    }
    return {x, v};
}

}  // namespace detail

inline std::optional<Vec> feasible_point(const ConvexFunction& f) {
    using namespace fn;
    const int n = f.dim();
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) -> std::optional<Vec> { return interior_point(s.body); },
            [&](const Shifted& s) -> std::optional<Vec> {
                auto p = feasible_point(s.inner);
                if (!p) return std::nullopt;
                return Vec(*p + s.x0);
            },
            [&](const Linear& l) -> std::optional<Vec> {
                auto p = feasible_point(l.inner);
                if (!p) return std::nullopt;
                return Vec(l.m_inv * *p);
            },
            [&](const Tilted& t) { return feasible_point(t.inner); },
            [&](const Rescaled& r) { return feasible_point(r.inner); },
            [&](const Grid& g) -> std::optional<Vec> { return detail::grid_min(g.data).argmin; },
            [&](const auto& m) -> std::optional<Vec> {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, Maximum> || std::is_same_v<M, Sum>) {
                    std::vector<Vec> cand;
                    for (const auto& g : m.terms)
                        if (auto p = feasible_point(g)) cand.push_back(*p);
                    const std::size_t base = cand.size();
                    for (std::size_t i = 0; i < base; ++i)
                        for (std::size_t j = i + 1; j < base; ++j) cand.push_back(0.5 * (cand[i] + cand[j]));
                    for (const auto& c : cand)
                        if (std::isfinite(evaluate(f, c))) return c;
                    return std::nullopt;
                } else {
                    return Vec::Zero(n);
                }
            },
        },
        f.node().v);
}

/// (argmin, min value) of a coercive function.
inline MinResult global_min(const ConvexFunction& f) {
    using namespace fn;
    const int n = f.dim();
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) { return MinResult{interior_point(s.body), s.offset}; },
            [&](const Quadratic& q) {
                Eigen::LDLT<Mat> ldlt(q.m);
                Eigen::SelfAdjointEigenSolver<Mat> es(q.m);
                if (es.eigenvalues().minCoeff() <= 1e-14 * (1 + es.eigenvalues().maxCoeff()))
                    throw AdmissibilityError("global_min: quadratic with singular matrix is not coercive");
                const Vec x = ldlt.solve(-0.5 * q.l);
                return MinResult{x, x.dot(q.m * x) + q.l.dot(x) + q.c};
            },
            [&](const NormCone&) { return MinResult{Vec::Zero(n), 0.0}; },
            [&](const AffineNorm& a) { return MinResult{Vec::Zero(n), a.b}; },
            [&](const SupportFn& s) {
                if (!(inradius_about_origin(s.body) > 0))
                    throw AdmissibilityError("global_min: support function is coercive only when 0 is interior to the body");
                return MinResult{Vec::Zero(n), 0.0};
            },
            [&](const Shifted& s) {
                auto r = global_min(s.inner);
                return MinResult{r.argmin + s.x0, r.value + s.t0};
            },
            [&](const Linear& l) {
                auto r = global_min(l.inner);
                return MinResult{l.m_inv * r.argmin, r.value};
            },
            [&](const Rescaled& r) {
                auto m = global_min(r.inner);
                return MinResult{m.argmin, r.apply(m.value)};
            },
            [&](const Grid& g) {
                if (g.data.exterior) return detail::numeric_min(f);
                return detail::grid_min(g.data);
            },
            [&](const auto&) { return detail::numeric_min(f); },
        },
        f.node().v);
}

// ---------------------------------------------------------------------------
// Sublevel sets

namespace detail {

/// Sublevel set by radial bisection around a point c with f(c) <= t.
inline ConvexBody radial_sublevel(const ConvexFunction& f, const Vec& c, double t, int directions = 720) {
    const int n = f.dim();
    auto reach = [&](const Vec& d) {
        const Interval I = chord(f, c, d);
        auto ok = [&](double s) { return evaluate(f, c + s * d) <= t; };
        double hi = 1.0;
        while (hi < I.hi && ok(hi) && hi < 1e12) hi *= 2.0;
        hi = std::min(hi, I.hi);
        if (ok(hi)) return hi;
        return bisect_last_true(ok, 0.0, hi, 200);
    };
    if (n == 1) {
        const Vec e = Vec::Ones(1);
        return ConvexBody::interval(c[0] - reach(-e), c[0] + reach(e));
    }
    if (n != 2) throw DimensionError("sublevel_set: numeric level sets are limited to n <= 2");
    std::vector<Vec2> pts;
    for (int k = 0; k < directions; ++k) {
        const Vec2 d = polar_dir(2 * kPi * k / directions);
        pts.push_back(to2(c) + reach(from2(d)) * d);
    }
    return ConvexBody::hull(std::move(pts));
}

inline ConvexBody grid_sublevel(const GridData& g, double t) {
    std::vector<Vec2> pts2;
    double lo = kInf, hi = -kInf;
    auto add = [&](const Vec& x) {
        if (g.dim() == 1) {
            lo = std::min(lo, x[0]);
            hi = std::max(hi, x[0]);
        } else {
            pts2.emplace_back(x[0], x[1]);
        }
    };
    auto cross_edge = [&](std::size_t a, std::size_t b) {
        const double va = g.values[a], vb = g.values[b];
        if (!std::isfinite(va) || !std::isfinite(vb)) return;
        if ((va <= t) == (vb <= t)) return;
        const double s = (t - va) / (vb - va);
        add(g.node(a) + s * (g.node(b) - g.node(a)));
    };
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.values[k] <= t) add(g.node(k));
    }
    if (g.dim() == 1) {
        for (int i = 0; i + 1 < g.res[0]; ++i) cross_edge(i, i + 1);
        if (lo > hi) return ConvexBody::empty(1);
        return ConvexBody::interval(lo, hi);
    }
    const int nx = g.res[0], ny = g.res[1];
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * ny + j;
            if (i + 1 < nx) cross_edge(k, k + ny);
            if (j + 1 < ny) cross_edge(k, k + 1);
        }
    }
    if (pts2.empty()) return ConvexBody::empty(2);
    return ConvexBody::hull(std::move(pts2));
}

/// Polar body t·K° of a planar polygon with 0 in its interior.
inline ConvexBody polar_polygon(const poly::Polygon& p, double t) {
    std::vector<Vec2> pts;
    for (std::size_t i = 0, m = p.size(); i < m; ++i) {
        const Vec2 e = p[(i + 1) % m] - p[i];
        const Vec2 nrm(e.y(), -e.x());
        const double off = nrm.dot(p[i]);
        pts.push_back(t * nrm / off);
    }
    return ConvexBody::hull(std::move(pts));
}

}  // namespace detail

/// {x : f(x) <= t}, or an empty body when t < min f.
inline ConvexBody sublevel_set(const ConvexFunction& f, double t) {
    using namespace fn;
    const int n = f.dim();
    auto radial = [&]() {
        const auto m = global_min(f);
        if (t < m.value) return ConvexBody::empty(n);
        return detail::radial_sublevel(f, m.argmin, t);
    };
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) { return t >= s.offset ? s.body : ConvexBody::empty(n); },
            [&](const NormCone& c) { return t >= 0 ? ConvexBody::ball(Vec::Zero(n), c.lambda * t) : ConvexBody::empty(n); },
            [&](const AffineNorm& a) { return t >= a.b ? ConvexBody::ball(Vec::Zero(n), (t - a.b) / a.a) : ConvexBody::empty(n); },
            [&](const Quadratic& q) {
                const auto m = global_min(f);
                if (t < m.value) return ConvexBody::empty(n);
                // (x - x*)' M (x - x*) <= t - m: shape sqrt(t - m) M^{-1/2}.
                Eigen::SelfAdjointEigenSolver<Mat> es(q.m);
                const Mat inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                     es.eigenvectors().transpose();
                const double r = std::sqrt(t - m.value);
                if (n == 1) return ConvexBody::interval(m.argmin[0] - r * inv_sqrt(0, 0), m.argmin[0] + r * inv_sqrt(0, 0));
                return ConvexBody::ellipsoid(m.argmin, r * inv_sqrt);
            },
            [&](const SupportFn& s) {
                if (!(inradius_about_origin(s.body) > 0))
                    throw AdmissibilityError("sublevel_set: support function is not coercive");
                if (t < 0) return ConvexBody::empty(n);
                if (n == 1) {
                    const double a = -support(s.body, -Vec::Ones(1)), b = support(s.body, Vec::Ones(1));
                    return ConvexBody::interval(t / a, t / b);
                }
                if (auto p = s.body.as_polygon()) {
                    if (t == 0) return ConvexBody::hull({Vec2::Zero()});
                    return detail::polar_polygon(*p, t);
                }
                return detail::radial_sublevel(f, Vec::Zero(n), t);
            },
            [&](const Shifted& s) {
                auto inner = sublevel_set(s.inner, t - s.t0);
                return inner.is_empty() ? inner : translate(inner, s.x0);
            },
            [&](const Linear& l) {
                auto inner = sublevel_set(l.inner, t);
                if (inner.is_empty()) return inner;
                try {
                    return linear_image(inner, l.m_inv);
                } catch (const DimensionError&) {
                    return radial();
                }
            },
            [&](const Rescaled& r) {
                const double s = r.unapply(t);
                if (s == -kInf) return ConvexBody::empty(n);
                return sublevel_set(r.inner, s);
            },
            [&](const Maximum& m) {
                std::optional<ConvexBody> acc;
                for (const auto& g : m.terms) {
                    auto s = sublevel_set(g, t);
                    if (s.is_empty()) return s;
                    if (!acc) {
                        acc = s;
                        continue;
                    }
                    acc = intersect(*acc, s);
                    if (!acc) return radial();
                }
                return *acc;
            },
            [&](const Grid& g) {
                if (g.data.exterior) return radial();
                return detail::grid_sublevel(g.data, t);
            },
            [&](const auto&) { return radial(); },
        },
        f.node().v);
}

// ---------------------------------------------------------------------------
// Coercivity envelope

namespace detail {

/// Envelope from convexity: with m = min u at x*, for |x - x*| >= r,
/// u(x) - m >= |x - x*| (μ / r) where μ = min over the sphere of u - m.
inline std::optional<Envelope> probe_envelope(const ConvexFunction& f) {
    MinResult m;
    try {
        m = global_min(f);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (!std::isfinite(m.value)) return std::nullopt;
    const int n = f.dim();
    const auto dirs = sphere_directions(n, n == 1 ? 2 : (n == 2 ? 720 : 4000));
    for (double r = 1.0; r <= 1e6; r *= 4.0) {
        double mu = kInf;
        for (const auto& d : dirs) mu = std::min(mu, evaluate(f, m.argmin + r * d) - m.value);
        if (mu > 0) {
            mu *= (n == 1 ? 1.0 : 0.9);
            const double a = mu / r;
            return Envelope{a, m.value - mu - a * m.argmin.norm()};
        }
    }
    return std::nullopt;
}

inline std::optional<Envelope> compute_envelope(const ConvexFunction& f) {
    using namespace fn;
    const int n = f.dim();
    return std::visit(
        overloaded{
            [&](const IndicatorPlus& s) -> std::optional<Envelope> { return Envelope{1.0, s.offset - max_norm(s.body)}; },
            [&](const Quadratic& q) -> std::optional<Envelope> {
                Eigen::SelfAdjointEigenSolver<Mat> es(q.m);
                const double lmin = es.eigenvalues().minCoeff();
                if (lmin <= 1e-14 * (1 + es.eigenvalues().maxCoeff())) return std::nullopt;
                // u >= u* + lmin |x - x*|^2 >= |x - x*| + u* - 1 / (4 lmin)
                const Vec xs = -0.5 * es.eigenvectors() * (es.eigenvalues().cwiseInverse().asDiagonal() *
                                                            (es.eigenvectors().transpose() * q.l));
                const double us = q.c + 0.5 * q.l.dot(xs);
                return Envelope{1.0, us - xs.norm() - 1.0 / (4 * lmin)};
            },
            [&](const NormCone& c) -> std::optional<Envelope> { return Envelope{1.0 / c.lambda, 0.0}; },
            [&](const AffineNorm& a) -> std::optional<Envelope> { return Envelope{a.a, a.b}; },
            [&](const SupportFn& s) -> std::optional<Envelope> {
                const double r = inradius_about_origin(s.body);
                if (!(r > 0)) return std::nullopt;
                const bool exact = s.body.as_polygon().has_value() || n == 1 || std::holds_alternative<Ball>(s.body.variant());
                return Envelope{exact ? r : 0.999 * r, 0.0};
            },
            [&](const Shifted& s) -> std::optional<Envelope> {
                auto e = s.inner.envelope();
                if (!e) return std::nullopt;
                return Envelope{e->a, e->b - e->a * s.x0.norm() + s.t0};
            },
            [&](const Linear& l) -> std::optional<Envelope> {
                auto e = l.inner.envelope();
                if (!e) return std::nullopt;
                Eigen::JacobiSVD<Mat> svd(l.m);
                return Envelope{e->a * svd.singularValues().minCoeff(), e->b};
            },
            [&](const Tilted& t) -> std::optional<Envelope> {
                auto e = t.inner.envelope();
                if (e && e->a > 2.0 * t.l.norm()) return Envelope{e->a - t.l.norm(), e->b + t.c};
                return probe_envelope(f);
            },
            [&](const Maximum& m) -> std::optional<Envelope> {
                std::optional<Envelope> best;
                for (const auto& g : m.terms) {
                    auto e = g.envelope();
                    if (e && (!best || e->a > best->a)) best = e;
                }
                if (best) return best;
                return probe_envelope(f);
            },
            [&](const Sum& m) -> std::optional<Envelope> {
                Envelope acc{0.0, 0.0};
                for (const auto& g : m.terms) {
                    auto e = g.envelope();
                    if (!e) return probe_envelope(f);
                    acc.a += e->a;
                    acc.b += e->b;
                }
                return acc;
            },
            [&](const Grid& g) -> std::optional<Envelope> {
                if (g.data.exterior) return probe_envelope(f);
                double vmin = kInf;
                for (double v : g.data.values) vmin = std::min(vmin, v);
                const double b = vmin - 1.0;
                double a = kInf;
                for (std::size_t k = 0; k < g.data.size(); ++k) {
                    const double v = g.data.values[k];
                    const double r = g.data.node(k).norm();
                    if (std::isfinite(v) && r > 0) a = std::min(a, (v - b) / r);
                }
                if (!std::isfinite(a)) a = 1.0;
                return Envelope{a, b};
            },
            [&](const Rescaled&) { return probe_envelope(f); },
        },
        f.node().v);
}

}  // namespace detail

inline std::optional<Envelope> ConvexFunction::envelope() const {
    std::call_once(lazy_->once, [&] { lazy_->env = detail::compute_envelope(*this); });
    return lazy_->env;
}

inline bool is_coercive(const ConvexFunction& f) { return f.envelope().has_value(); }

/// dim dom u = n, tested as V({u <= min u + 1}) > eps_vol.
inline bool is_full_dimensional(const ConvexFunction& f, double eps_vol = 1e-12) {
    const auto m = global_min(f);
    return volume(sublevel_set(f, m.value + 1.0)) > eps_vol;
}

}  // namespace epimetric
