#pragma once

// Compact convex sets ("convex bodies") and the distances between them.

#include "epimetric/core.hpp"
#include "epimetric/polygon.hpp"
#include "epimetric/quadrature.hpp"
#include "epimetric/rng.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace epimetric {

struct Polygon2D {
    poly::Polygon vertices;  // counterclockwise, convex position
};

struct Ball {
    Vec center;
    double radius = 0.0;
};

struct Box {
    Vec lo;
    Vec hi;
};

/// {center + shape * w : |w| <= 1}.
struct Ellipsoid {
    Vec center;
    Mat shape;
};

/// A body known through support values h(K, u_i) on unit directions u_i. In the
/// plane it is handled through the circumscribed polygon of those halfplanes.
struct SupportSampled {
    std::vector<Vec> directions;
    std::vector<double> values;
};

struct EmptySet {
    int dim = 1;
};

using BodyVariant = std::variant<Polygon2D, Ball, Box, Ellipsoid, SupportSampled, EmptySet>;

class ConvexBody {
public:
    static ConvexBody polygon(std::vector<Vec2> vertices) {
        if (vertices.empty()) throw std::invalid_argument("polygon: no vertices");
        poly::Polygon hull = poly::convex_hull(vertices);
        if (hull.size() != vertices.size() || !poly::is_convex_ccw(vertices)) {
            throw std::invalid_argument("polygon: vertices must be distinct, in convex position, counterclockwise");
        }
        return ConvexBody(Polygon2D{std::move(vertices)}, 2);
    }

    /// Convex hull of arbitrary points (no ordering requirement).
    static ConvexBody hull(std::vector<Vec2> points) {
        auto h = poly::convex_hull(std::move(points));
        if (h.empty()) return empty(2);
        return ConvexBody(Polygon2D{std::move(h)}, 2);
    }

    static ConvexBody ball(Vec center, double radius) {
        if (!(radius >= 0.0)) throw std::invalid_argument("ball: radius must be >= 0");
        const int n = static_cast<int>(center.size());
        if (n < 1) throw DimensionError("ball: empty center");
        return ConvexBody(Ball{std::move(center), radius}, n);
    }

    static ConvexBody box(Vec lo, Vec hi) {
        if (lo.size() != hi.size() || lo.size() < 1) throw DimensionError("box: lo/hi dimension mismatch");
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            if (!(lo[i] <= hi[i])) throw std::invalid_argument("box: lo must be <= hi componentwise");
        }
        const int n = static_cast<int>(lo.size());
        return ConvexBody(Box{std::move(lo), std::move(hi)}, n);
    }

    static ConvexBody interval(double a, double b) { return box(Vec::Constant(1, a), Vec::Constant(1, b)); }

    static ConvexBody ellipsoid(Vec center, Mat shape) {
        const int n = static_cast<int>(center.size());
        if (shape.rows() != n || shape.cols() != n) throw DimensionError("ellipsoid: shape must be n x n");
        return ConvexBody(Ellipsoid{std::move(center), std::move(shape)}, n);
    }

    static ConvexBody support_sampled(std::vector<Vec> directions, std::vector<double> values) {
        if (directions.size() != values.size() || directions.size() < 3) {
            throw std::invalid_argument("support_sampled: need >= 3 directions with matching values");
        }
        const int n = static_cast<int>(directions.front().size());
        if (n != 2) throw DimensionError("support_sampled: only planar bodies are supported");
        for (auto& d : directions) {
            require_dim(d.size(), n, "support_sampled direction");
            d.normalize();
        }
        ConvexBody body(SupportSampled{std::move(directions), std::move(values)}, n);
        if (body.outer_polygon().empty()) throw std::invalid_argument("support_sampled: halfplanes have empty intersection");
        return body;
    }

    static ConvexBody empty(int dim) { return ConvexBody(EmptySet{dim}, dim); }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] bool is_empty() const { return std::holds_alternative<EmptySet>(v_); }
    [[nodiscard]] const BodyVariant& variant() const { return v_; }

    /// Polygon for the planar kinds that are polygonal (polygon, box, sampled support).
    [[nodiscard]] std::optional<poly::Polygon> as_polygon() const {
        if (dim_ != 2) return std::nullopt;
        if (auto* p = std::get_if<Polygon2D>(&v_)) return p->vertices;
        if (auto* b = std::get_if<Box>(&v_)) return poly::box_polygon(b->lo.head<2>(), b->hi.head<2>());
        if (std::holds_alternative<SupportSampled>(v_)) return outer_polygon();
        return std::nullopt;
    }

    /// Circumscribed polygon of a SupportSampled body.
    [[nodiscard]] poly::Polygon outer_polygon() const {
        const auto& s = std::get<SupportSampled>(v_);
        std::vector<Vec2> normals;
        double bound = 1.0;
        for (std::size_t i = 0; i < s.directions.size(); ++i) {
            normals.emplace_back(s.directions[i][0], s.directions[i][1]);
            bound = std::max(bound, std::abs(s.values[i]));
        }
        return poly::halfplane_intersection(normals, s.values, 4.0 * bound + 1.0);
    }

private:
    ConvexBody(BodyVariant v, int dim) : v_(std::move(v)), dim_(dim) {}

    BodyVariant v_;
    int dim_;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

inline Vec2 to2(const Vec& v) { return {v[0], v[1]}; }
inline Vec from2(const Vec2& v) {
    Vec out(2);
    out << v.x(), v.y();
    return out;
}

/// Max of g over the unit circle by uniform sampling plus golden refinement of
/// the best samples. Returns {max, estimated sampling gap}.
template <class G>
std::pair<double, double> circle_sup(G&& g, int samples = 720, int refine = 6) {
    std::vector<double> vals(samples);
    const double step = 2 * kPi / samples;
    for (int i = 0; i < samples; ++i) vals[i] = g(i * step);
    std::vector<int> order(samples);
    for (int i = 0; i < samples; ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + std::min(refine, samples), order.end(),
                      [&](int a, int b) { return vals[a] > vals[b]; });
    const double sampled = vals[order[0]];
    double best = sampled;
    for (int r = 0; r < std::min(refine, samples); ++r) {
        const double c = order[r] * step;
        const auto [t, neg] = golden_min([&](double th) { return -g(th); }, c - step, c + step, 1e-13);
        best = std::max(best, -neg);
    }
    return {best, best - sampled};
}

inline std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed = 7) {
    std::vector<Vec> dirs;
    if (n == 1) {
        dirs.push_back(Vec::Constant(1, 1.0));
        dirs.push_back(Vec::Constant(1, -1.0));
        return dirs;
    }
    if (n == 2) {
        for (int i = 0; i < count; ++i) dirs.push_back(from2(polar_dir(2 * kPi * i / count)));
        return dirs;
    }
    CounterRng rng(seed);
    std::uint64_t c = 0;
    for (int i = 0; i < count; ++i) {
        Vec v(n);
        for (int k = 0; k < n; ++k) {
            const double u1 = std::max(rng.uniform(c++), 1e-300), u2 = rng.uniform(c++);
            v[k] = std::sqrt(-2 * std::log(u1)) * std::cos(2 * kPi * u2);
        }
        dirs.push_back(v.normalized());
    }
    return dirs;
}

inline double interval_lo(const ConvexBody& k);
inline double interval_hi(const ConvexBody& k);

}  // namespace detail

inline double support(const ConvexBody& k, const Vec& y) {
    require_dim(y.size(), k.dim(), "support");
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return poly::support(p.vertices, detail::to2(y)); },
                          [&](const Ball& b) { return b.center.dot(y) + b.radius * y.norm(); },
                          [&](const Box& b) {
                              double s = 0.0;
                              for (Eigen::Index i = 0; i < y.size(); ++i) s += std::max(b.lo[i] * y[i], b.hi[i] * y[i]);
                              return s;
                          },
                          [&](const Ellipsoid& e) { return e.center.dot(y) + (e.shape.transpose() * y).norm(); },
                          [&](const SupportSampled&) { return poly::support(k.outer_polygon(), detail::to2(y)); },
                          // h(empty, .) is taken to be 0.
                          [&](const EmptySet&) { return 0.0; },
                      },
                      k.variant());
}

inline bool contains(const ConvexBody& k, const Vec& x, double eps = 1e-12) {
    require_dim(x.size(), k.dim(), "contains");
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return poly::contains(p.vertices, detail::to2(x), eps); },
                          [&](const Ball& b) { return (x - b.center).norm() <= b.radius + eps; },
                          [&](const Box& b) {
                              for (Eigen::Index i = 0; i < x.size(); ++i)
                                  if (x[i] < b.lo[i] - eps || x[i] > b.hi[i] + eps) return false;
                              return true;
                          },
                          [&](const Ellipsoid& e) {
                              Eigen::FullPivLU<Mat> lu(e.shape);
                              if (!lu.isInvertible()) {
                                  // Degenerate ellipsoid: test through the least-squares preimage.
                                  const Vec w = e.shape.completeOrthogonalDecomposition().solve(x - e.center);
                                  return w.norm() <= 1 + eps && (e.center + e.shape * w - x).norm() <= eps;
                              }
                              return lu.solve(x - e.center).norm() <= 1.0 + eps;
                          },
                          [&](const SupportSampled&) { return poly::contains(k.outer_polygon(), detail::to2(x), eps); },
                          [&](const EmptySet&) { return false; },
                      },
                      k.variant());
}

namespace detail {

/// Nearest point of an ellipsoid {c + A w : |w| <= 1}.
inline Vec ellipsoid_project(const Ellipsoid& e, const Vec& x) {
    const Mat g = e.shape * e.shape.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const Vec ax = es.eigenvalues().cwiseMax(0.0);  // squared semi-axes
    const Vec z = es.eigenvectors().transpose() * (x - e.center);
    auto phi = [&](double t) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            if (ax[i] <= 0) continue;
            const double r = std::sqrt(ax[i]) * z[i] / (ax[i] + t);
            s += r * r;
        }
        return s;
    };
    // Inside test in principal coordinates; zero semi-axes must have zero offset.
    bool inside = phi(0.0) <= 1.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (ax[i] <= 0 && std::abs(z[i]) > 1e-14) inside = false;
    if (inside && phi(0.0) <= 1.0) {
        bool all_pos = true;
        for (Eigen::Index i = 0; i < z.size(); ++i) all_pos = all_pos && ax[i] > 0;
        if (all_pos) return x;
    }
    double lo = 0.0, hi = 1.0;
    while (phi(hi) > 1.0) hi *= 2.0;
    if (phi(0.0) <= 1.0) hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 1.0 ? lo : hi) = mid;
    }
    Vec p(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = ax[i] <= 0 ? 0.0 : ax[i] * z[i] / (ax[i] + hi);
    return e.center + es.eigenvectors() * p;
}

}  // namespace detail

/// Euclidean distance from x to K (zero inside).
inline double distance(const ConvexBody& k, const Vec& x) {
    require_dim(x.size(), k.dim(), "distance");
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return poly::distance(p.vertices, detail::to2(x)); },
                          [&](const Ball& b) { return std::max(0.0, (x - b.center).norm() - b.radius); },
                          [&](const Box& b) { return (x - x.cwiseMax(b.lo).cwiseMin(b.hi)).norm(); },
                          [&](const Ellipsoid& e) { return (x - detail::ellipsoid_project(e, x)).norm(); },
                          [&](const SupportSampled&) { return poly::distance(k.outer_polygon(), detail::to2(x)); },
                          [&](const EmptySet&) { return kInf; },
                      },
                      k.variant());
}

/// Parameter interval {s : x + s d in K}.
inline Interval chord(const ConvexBody& k, const Vec& x, const Vec& d) {
    require_dim(x.size(), k.dim(), "chord");
    auto quadratic_chord = [](double a, double b, double c) {
        // a s^2 + 2 b s + c <= 0
        if (a <= 0) return c <= 0 ? Interval::whole() : Interval::none();
        const double disc = b * b - a * c;
        if (disc < 0) return Interval::none();
        const double sq = std::sqrt(disc);
        return Interval{(-b - sq) / a, (-b + sq) / a};
    };
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return poly::chord(p.vertices, detail::to2(x), detail::to2(d)); },
                          [&](const Ball& b) {
                              const Vec r = x - b.center;
                              return quadratic_chord(d.squaredNorm(), r.dot(d), r.squaredNorm() - b.radius * b.radius);
                          },
                          [&](const Box& b) {
                              Interval out = Interval::whole();
                              for (Eigen::Index i = 0; i < x.size(); ++i) {
                                  if (d[i] == 0.0) {
                                      if (x[i] < b.lo[i] || x[i] > b.hi[i]) return Interval::none();
                                      continue;
                                  }
                                  const double s0 = (b.lo[i] - x[i]) / d[i], s1 = (b.hi[i] - x[i]) / d[i];
                                  out = out.intersect({std::min(s0, s1), std::max(s0, s1)});
                              }
                              return out;
                          },
                          [&](const Ellipsoid& e) {
                              Eigen::FullPivLU<Mat> lu(e.shape);
                              if (!lu.isInvertible()) throw std::invalid_argument("chord: degenerate ellipsoid");
                              const Vec p = lu.solve(x - e.center), q = lu.solve(d);
                              return quadratic_chord(q.squaredNorm(), p.dot(q), p.squaredNorm() - 1.0);
                          },
                          [&](const SupportSampled&) {
                              return poly::chord(k.outer_polygon(), detail::to2(x), detail::to2(d));
                          },
                          [&](const EmptySet&) { return Interval::none(); },
                      },
                      k.variant());
}

/// d_H(K, {0}) = max_{x in K} |x|.
inline double max_norm(const ConvexBody& k) {
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return poly::max_norm(p.vertices); },
                          [&](const Ball& b) { return b.center.norm() + b.radius; },
                          [&](const Box& b) {
                              double s = 0.0;
                              for (Eigen::Index i = 0; i < b.lo.size(); ++i) {
                                  const double m = std::max(std::abs(b.lo[i]), std::abs(b.hi[i]));
                                  s += m * m;
                              }
                              return std::sqrt(s);
                          },
                          [&](const Ellipsoid& e) {
                              const int n = static_cast<int>(e.center.size());
                              if (n == 1) return std::abs(e.center[0]) + std::abs(e.shape(0, 0));
                              if (n == 2) {
                                  return detail::circle_sup([&](double t) {
                                             return (e.center + e.shape * detail::from2(polar_dir(t))).norm();
                                         }).first;
                              }
                              double best = 0.0;
                              for (const auto& w : detail::sphere_directions(n, 4096)) best = std::max(best, (e.center + e.shape * w).norm());
                              return best;
                          },
                          [&](const SupportSampled&) { return poly::max_norm(k.outer_polygon()); },
                          [&](const EmptySet&) { return 0.0; },
                      },
                      k.variant());
}

/// Axis-aligned bounding box.
inline std::pair<Vec, Vec> bounding_box(const ConvexBody& k) {
    const int n = k.dim();
    Vec lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        hi[i] = support(k, e);
        lo[i] = -support(k, -e);
    }
    return {lo, hi};
}

/// A point of K (the centre for symmetric kinds, vertex average for polygons).
inline Vec interior_point(const ConvexBody& k) {
    return std::visit(overloaded{
                          [&](const Polygon2D& p) {
                              Vec2 c = Vec2::Zero();
                              for (const auto& v : p.vertices) c += v;
                              return detail::from2(c / static_cast<double>(p.vertices.size()));
                          },
                          [&](const Ball& b) { return b.center; },
                          [&](const Box& b) { return Vec(0.5 * (b.lo + b.hi)); },
                          [&](const Ellipsoid& e) { return e.center; },
                          [&](const SupportSampled&) {
                              Vec2 c = Vec2::Zero();
                              const auto p = k.outer_polygon();
                              for (const auto& v : p) c += v;
                              return detail::from2(c / static_cast<double>(p.size()));
                          },
                          [&](const EmptySet&) -> Vec { throw std::invalid_argument("interior_point: empty body"); },
                      },
                      k.variant());
}

inline ConvexBody translate(const ConvexBody& k, const Vec& x) {
    require_dim(x.size(), k.dim(), "translate");
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return ConvexBody::hull(poly::translate(p.vertices, detail::to2(x))); },
                          [&](const Ball& b) { return ConvexBody::ball(b.center + x, b.radius); },
                          [&](const Box& b) { return ConvexBody::box(b.lo + x, b.hi + x); },
                          [&](const Ellipsoid& e) { return ConvexBody::ellipsoid(e.center + x, e.shape); },
                          [&](const SupportSampled& s) {
                              std::vector<double> vals = s.values;
                              for (std::size_t i = 0; i < vals.size(); ++i) vals[i] += s.directions[i].dot(x);
                              return ConvexBody::support_sampled(s.directions, vals);
                          },
                          [&](const EmptySet& e) { return ConvexBody::empty(e.dim); },
                      },
                      k.variant());
}

/// {m x : x in K} for an invertible matrix m.
inline ConvexBody linear_image(const ConvexBody& k, const Mat& m) {
    const int n = k.dim();
    if (m.rows() != n || m.cols() != n) throw DimensionError("linear_image: matrix must be n x n");
    if (k.is_empty()) return k;
    if (auto p = k.as_polygon()) {
        Eigen::Matrix2d m2 = m;
        return ConvexBody::hull(poly::linear_image(*p, m2));
    }
    return std::visit(overloaded{
                          [&](const Ball& b) { return ConvexBody::ellipsoid(m * b.center, b.radius * m); },
                          [&](const Box& b) {
                              if (n != 1) throw DimensionError("linear_image: boxes only in dimensions 1 and 2");
                              const double a = m(0, 0) * b.lo[0], c = m(0, 0) * b.hi[0];
                              return ConvexBody::interval(std::min(a, c), std::max(a, c));
                          },
                          [&](const Ellipsoid& e) { return ConvexBody::ellipsoid(m * e.center, m * e.shape); },
                          [&](const auto&) -> ConvexBody { throw std::logic_error("linear_image: unreachable"); },
                      },
                      k.variant());
}

/// Lower/upper bounds with a representative value.
struct VolumeEstimate {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    [[nodiscard]] double error() const { return std::max(value - lower, upper - value); }
};

/// Volume with bounds. Exact kinds report lower == upper.
inline VolumeEstimate volume_bounds(const ConvexBody& k) {
    auto exact = [](double v) { return VolumeEstimate{v, v, v}; };
    return std::visit(overloaded{
                          [&](const Polygon2D& p) { return exact(poly::area(p.vertices)); },
                          [&](const Ball& b) { return exact(unit_ball_volume(k.dim()) * std::pow(b.radius, k.dim())); },
                          [&](const Box& b) { return exact((b.hi - b.lo).prod()); },
                          [&](const Ellipsoid& e) { return exact(unit_ball_volume(k.dim()) * std::abs(e.shape.determinant())); },
                          [&](const SupportSampled&) {
                              // The body touches every edge of its circumscribed polygon P, so it
                              // contains one point per edge; the corner triangles cut off by
                              // joining those points bound the missing area.
                              const auto p = k.outer_polygon();
                              const double upper = poly::area(p);
                              double cut = 0.0;
                              for (std::size_t i = 0, n = p.size(); i < n; ++i) {
                                  const Vec2 e0 = p[i] - p[(i + n - 1) % n];
                                  const Vec2 e1 = p[(i + 1) % n] - p[i];
                                  cut += 0.5 * std::abs(poly::cross(e0, e1));
                              }
                              const double lower = std::max(0.0, upper - cut);
                              return VolumeEstimate{0.5 * (lower + upper), lower, upper};
                          },
                          [&](const EmptySet&) { return exact(0.0); },
                      },
                      k.variant());
}

/// n-dimensional volume; the empty set has volume 0.
inline double volume(const ConvexBody& k) { return volume_bounds(k).value; }

inline bool is_degenerate(const ConvexBody& k, double eps_vol = 1e-12) { return volume(k) <= eps_vol; }

namespace detail {

inline double interval_lo(const ConvexBody& k) { return -support(k, Vec::Constant(1, -1.0)); }
inline double interval_hi(const ConvexBody& k) { return support(k, Vec::Constant(1, 1.0)); }

inline double lens_area(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return kPi * r * r;
    }
    const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
    const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
    const double tri = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * a1 + r2 * r2 * a2 - tri;
}

}  // namespace detail

/// Exact intersection when it is representable (intervals, boxes, polygons).
inline std::optional<ConvexBody> intersect(const ConvexBody& a, const ConvexBody& b) {
    require_dim(b.dim(), a.dim(), "intersect");
    if (a.is_empty() || b.is_empty()) return ConvexBody::empty(a.dim());
    if (a.dim() == 1) {
        const double lo = std::max(detail::interval_lo(a), detail::interval_lo(b));
        const double hi = std::min(detail::interval_hi(a), detail::interval_hi(b));
        if (lo > hi) return ConvexBody::empty(1);
        return ConvexBody::interval(lo, hi);
    }
    const auto* ba = std::get_if<Box>(&a.variant());
    const auto* bb = std::get_if<Box>(&b.variant());
    if (ba && bb) {
        const Vec lo = ba->lo.cwiseMax(bb->lo), hi = ba->hi.cwiseMin(bb->hi);
        if ((lo.array() > hi.array()).any()) return ConvexBody::empty(a.dim());
        return ConvexBody::box(lo, hi);
    }
    auto pa = a.as_polygon();
    auto pb = b.as_polygon();
    if (pa && pb) {
        auto p = poly::intersect(*pa, *pb);
        if (p.empty()) return ConvexBody::empty(2);
        return ConvexBody::hull(std::move(p));
    }
    return std::nullopt;
}

struct MeasuredValue {
    double value = 0.0;
    double error = 0.0;
};

/// V_n(K ∩ L); exact for intervals, boxes, polygon pairs, discs/ellipses against
/// polygons and disc pairs; planar leftovers by iterated quadrature of chord
/// overlaps; Monte Carlo in higher dimensions.
inline MeasuredValue intersection_volume(const ConvexBody& a, const ConvexBody& b, std::uint64_t seed = 1,
                                         std::size_t mc_samples = 400000) {
    require_dim(b.dim(), a.dim(), "intersection_volume");
    if (auto k = intersect(a, b)) {
        const auto vb = volume_bounds(*k);
        return {vb.value, vb.error()};
    }
    if (a.dim() == 2) {
        auto disc_vs_poly = [](const ConvexBody& round, const poly::Polygon& p) -> std::optional<double> {
            if (auto* bl = std::get_if<Ball>(&round.variant())) return poly::disk_intersection_area(p, detail::to2(bl->center), bl->radius);
            if (auto* el = std::get_if<Ellipsoid>(&round.variant())) {
                Eigen::Matrix2d m = el->shape;
                const double det = std::abs(m.determinant());
                if (det == 0.0) return 0.0;
                const Eigen::Matrix2d inv = m.inverse();
                poly::Polygon q;
                for (const auto& v : p) q.push_back(inv * (v - detail::to2(el->center)));
                q = poly::convex_hull(q);
                return det * poly::disk_intersection_area(q, Vec2::Zero(), 1.0);
            }
            return std::nullopt;
        };
        if (auto pb = b.as_polygon())
            if (auto v = disc_vs_poly(a, *pb)) return {*v, 0.0};
        if (auto pa = a.as_polygon())
            if (auto v = disc_vs_poly(b, *pa)) return {*v, 0.0};
        const auto* b1 = std::get_if<Ball>(&a.variant());
        const auto* b2 = std::get_if<Ball>(&b.variant());
        if (b1 && b2) return {detail::lens_area(b1->radius, b2->radius, (b1->center - b2->center).norm()), 0.0};
        // Integrate the overlap length of horizontal chords.
        const auto [alo, ahi] = bounding_box(a);
        const auto [blo, bhi] = bounding_box(b);
        const double y0 = std::max(alo[1], blo[1]), y1 = std::min(ahi[1], bhi[1]);
        if (!(y1 > y0)) return {0.0, 0.0};
        Vec dir(2);
        dir << 1.0, 0.0;
        auto overlap = [&](double y) {
            Vec p(2);
            p << 0.0, y;
            return chord(a, p, dir).intersect(chord(b, p, dir)).length();
        };
        const auto est = quad::integrate(overlap, y0, y1, {}, {1e-11, 16});
        return {est.value, est.error};
    }
    const auto [alo, ahi] = bounding_box(a);
    const auto [blo, bhi] = bounding_box(b);
    const Vec lo = alo.cwiseMax(blo), hi = ahi.cwiseMin(bhi);
    if ((lo.array() >= hi.array()).any()) return {0.0, 0.0};
    const auto est = quad::monte_carlo([&](const Vec& x) { return contains(a, x, 0.0) && contains(b, x, 0.0) ? 1.0 : 0.0; },
                                       lo, hi, mc_samples, seed);
    return {est.value, est.error};
}

/// d_S(K, L) = V_n(K Δ L) = V(K) + V(L) - 2 V(K ∩ L), with an error estimate.
inline MeasuredValue symmetric_difference(const ConvexBody& a, const ConvexBody& b, std::uint64_t seed = 1) {
    const auto va = volume_bounds(a), vb = volume_bounds(b);
    const auto vi = intersection_volume(a, b, seed);
    return {std::max(0.0, va.value + vb.value - 2.0 * vi.value), va.error() + vb.error() + 2.0 * vi.error};
}

inline double symmetric_difference_volume(const ConvexBody& a, const ConvexBody& b) {
    return symmetric_difference(a, b).value;
}

/// Hausdorff distance with a sampling-gap estimate (zero for exact cases).
inline MeasuredValue hausdorff_estimate(const ConvexBody& a, const ConvexBody& b) {
    require_dim(b.dim(), a.dim(), "hausdorff");
    if (a.is_empty() || b.is_empty()) throw std::invalid_argument("hausdorff: empty body (use an extended variant)");
    const int n = a.dim();
    if (n == 1) {
        return {std::max(std::abs(detail::interval_lo(a) - detail::interval_lo(b)),
                         std::abs(detail::interval_hi(a) - detail::interval_hi(b))),
                0.0};
    }
    const auto* b1 = std::get_if<Ball>(&a.variant());
    const auto* b2 = std::get_if<Ball>(&b.variant());
    if (b1 && b2) return {(b1->center - b2->center).norm() + std::abs(b1->radius - b2->radius), 0.0};
    if (n == 2) {
        auto pa = a.as_polygon();
        auto pb = b.as_polygon();
        if (pa && pb) return {poly::hausdorff(*pa, *pb), 0.0};
        const auto [v, gap] = detail::circle_sup([&](double t) {
            const Vec u = detail::from2(polar_dir(t));
            return std::abs(support(a, u) - support(b, u));
        });
        return {v, gap};
    }
    double best = 0.0;
    for (const auto& u : detail::sphere_directions(n, 20000)) best = std::max(best, std::abs(support(a, u) - support(b, u)));
    return {best, 0.05 * best};
}

inline double hausdorff(const ConvexBody& a, const ConvexBody& b) { return hausdorff_estimate(a, b).value; }

/// The translation-invariant extension of d_H to the empty set: +inf against ∅.
inline double hausdorff_extended_tilde(const ConvexBody& a, const ConvexBody& b) {
    if (a.is_empty() && b.is_empty()) return 0.0;
    if (a.is_empty() || b.is_empty()) return kInf;
    return hausdorff(a, b);
}

/// The bounded extension: max{1, d_H(K, {0})} against ∅.
inline double hausdorff_extended_hat(const ConvexBody& a, const ConvexBody& b) {
    if (a.is_empty() && b.is_empty()) return 0.0;
    if (a.is_empty()) return std::max(1.0, max_norm(b));
    if (b.is_empty()) return std::max(1.0, max_norm(a));
    return hausdorff(a, b);
}

/// K + L. Exact for polygon pairs, ball pairs, box pairs and intervals;
/// otherwise a SupportSampled body with h_{K+L} = h_K + h_L on 720 directions.
inline ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b, int directions = 720) {
    require_dim(b.dim(), a.dim(), "minkowski_sum");
    if (a.is_empty() || b.is_empty()) throw std::invalid_argument("minkowski_sum: empty body");
    const int n = a.dim();
    if (n == 1) {
        return ConvexBody::interval(detail::interval_lo(a) + detail::interval_lo(b),
                                    detail::interval_hi(a) + detail::interval_hi(b));
    }
    const auto* b1 = std::get_if<Ball>(&a.variant());
    const auto* b2 = std::get_if<Ball>(&b.variant());
    if (b1 && b2) return ConvexBody::ball(b1->center + b2->center, b1->radius + b2->radius);
    const auto* x1 = std::get_if<Box>(&a.variant());
    const auto* x2 = std::get_if<Box>(&b.variant());
    if (x1 && x2) return ConvexBody::box(x1->lo + x2->lo, x1->hi + x2->hi);
    if (n == 2) {
        auto pa = a.as_polygon();
        auto pb = b.as_polygon();
        if (pa && pb) return ConvexBody::hull(poly::minkowski_sum(*pa, *pb));
        std::vector<Vec> dirs = detail::sphere_directions(2, directions);
        std::vector<double> vals;
        for (const auto& u : dirs) vals.push_back(support(a, u) + support(b, u));
        return ConvexBody::support_sampled(std::move(dirs), std::move(vals));
    }
    throw DimensionError("minkowski_sum: unsupported body kinds above dimension 2");
}

/// min over unit directions of h(K, u); positive iff 0 is interior to K.
inline double inradius_about_origin(const ConvexBody& k) {
    const int n = k.dim();
    if (k.is_empty()) return -kInf;
    if (n == 1) return std::min(detail::interval_hi(k), -detail::interval_lo(k));
    if (auto p = k.as_polygon()) {
        if (p->size() < 3) return 0.0;
        double best = kInf;
        for (std::size_t i = 0, m = p->size(); i < m; ++i) {
            const Vec2 a = (*p)[i], e = (*p)[(i + 1) % m] - a;
            best = std::min(best, poly::cross(e, a) / e.norm() * -1.0);
        }
        return best;
    }
    if (auto* b = std::get_if<Ball>(&k.variant())) return b->radius - b->center.norm();
    if (n == 2) {
        const auto [neg, gap] = detail::circle_sup([&](double t) { return -support(k, detail::from2(polar_dir(t))); });
        return -neg;
    }
    double best = kInf;
    for (const auto& u : detail::sphere_directions(n, 20000)) best = std::min(best, support(k, u));
    return best;
}

inline std::string kind_name(const ConvexBody& k) {
    return std::visit(overloaded{
                          [](const Polygon2D&) { return std::string("polygon2d"); },
                          [](const Ball&) { return std::string("ball"); },
                          [](const Box&) { return std::string("box"); },
                          [](const Ellipsoid&) { return std::string("ellipsoid"); },
                          [](const SupportSampled&) { return std::string("support_sampled"); },
                          [](const EmptySet&) { return std::string("empty"); },
                      },
                      k.variant());
}

}  // namespace epimetric
