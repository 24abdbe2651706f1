#pragma once

// Exact algorithms on convex polygons in the plane. Polygons are vertex lists in
// counterclockwise order without repeated vertices; one- and two-vertex lists
// represent a point and a segment.

#include "epimetric/core.hpp"

#include <algorithm>
#include <vector>

namespace epimetric::poly {

using Polygon = std::vector<Vec2>;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); }

/// Andrew's monotone chain. Drops collinear and duplicate points.
inline Polygon convex_hull(std::vector<Vec2> pts, double eps = 0.0) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a == b; }),
              pts.end());
    if (pts.size() <= 2) return pts;
    Polygon hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= eps) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (k >= t && cross(hull[k - 2], hull[k - 1], p) <= eps) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

inline double area(const Polygon& p) {
    if (p.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) s += cross(p[i], p[(i + 1) % n]);
    return 0.5 * s;
}

inline double perimeter(const Polygon& p) {
    if (p.size() < 2) return 0.0;
    if (p.size() == 2) return 2.0 * (p[1] - p[0]).norm();
    double s = 0.0;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) s += (p[(i + 1) % n] - p[i]).norm();
    return s;
}

/// Strictly convex, counterclockwise, no duplicate vertices.
inline bool is_convex_ccw(const Polygon& p, double eps = 1e-14) {
    const std::size_t n = p.size();
    if (n <= 2) return n < 2 || p[0] != p[1];
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        const Vec2& c = p[(i + 2) % n];
        if (a == b) return false;
        const double scale = (b - a).norm() * (c - b).norm();
        if (cross(a, b, c) <= eps * scale) return false;
    }
    return true;
}

inline double support(const Polygon& p, const Vec2& y) {
    double best = -kInf;
    for (const auto& v : p) best = std::max(best, v.dot(y));
    return best;
}

inline double max_norm(const Polygon& p) {
    double best = 0.0;
    for (const auto& v : p) best = std::max(best, v.norm());
    return best;
}

inline double segment_distance(const Vec2& a, const Vec2& b, const Vec2& x) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (x - a).norm();
    const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
    return (a + t * ab - x).norm();
}

inline bool contains(const Polygon& p, const Vec2& x, double eps = 1e-12) {
    const std::size_t n = p.size();
    if (n == 0) return false;
    if (n <= 2) return segment_distance(p.front(), p.back(), x) <= eps;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        if (cross(a, b, x) < -eps * (b - a).norm()) return false;
    }
    return true;
}

/// Euclidean distance from x to the polygon (zero inside).
inline double distance(const Polygon& p, const Vec2& x) {
    if (p.empty()) return kInf;
    if (p.size() >= 3 && contains(p, x, 0.0)) return 0.0;
    double best = kInf;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        best = std::min(best, segment_distance(p[i], p[(i + 1) % n], x));
    }
    return best;
}

/// Nearest point of the polygon to x.
inline Vec2 project(const Polygon& p, const Vec2& x) {
    if (p.size() >= 3 && contains(p, x, 0.0)) return x;
    double best = kInf;
    Vec2 arg = p.front();
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        const Vec2 a = p[i];
        const Vec2 ab = p[(i + 1) % n] - a;
        const double len2 = ab.squaredNorm();
        const double t = len2 == 0.0 ? 0.0 : std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
        const Vec2 q = a + t * ab;
        const double d = (q - x).norm();
        if (d < best) {
            best = d;
            arg = q;
        }
    }
    return arg;
}

/// Exact Hausdorff distance between convex polygons: the farthest vertex of
/// one polygon from the other, in both directions.
inline double hausdorff(const Polygon& a, const Polygon& b) {
    double d = 0.0;
    for (const auto& v : a) d = std::max(d, distance(b, v));
    for (const auto& v : b) d = std::max(d, distance(a, v));
    return d;
}

/// Removes consecutive near-duplicate vertices and collinear middle vertices.
inline Polygon tidy(const Polygon& in, double eps = 1e-13) {
    if (in.size() <= 1) return in;
    std::vector<Vec2> pts = in;
    double scale = 0.0;
    for (const auto& v : pts) scale = std::max(scale, v.norm());
    return convex_hull(std::move(pts), eps * std::max(1.0, scale * scale));
}

/// Sutherland-Hodgman clipping of a convex subject against a convex clipper
/// with at least three vertices.
inline Polygon clip(const Polygon& subject, const Polygon& clipper) {
    Polygon out = subject;
    const std::size_t m = clipper.size();
    for (std::size_t i = 0; i < m && !out.empty(); ++i) {
        const Vec2& a = clipper[i];
        const Vec2& b = clipper[(i + 1) % m];
        Polygon in = std::move(out);
        out.clear();
        const std::size_t k = in.size();
        for (std::size_t j = 0; j < k; ++j) {
            const Vec2& p = in[j];
            const Vec2& q = in[(j + 1) % k];
            const double sp = cross(a, b, p);
            const double sq = cross(a, b, q);
            if (sp >= 0) out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                out.push_back(p + t * (q - p));
            }
        }
    }
    return tidy(out);
}

/// Intersection of two convex polygons (possibly degenerate inputs).
inline Polygon intersect(const Polygon& a, const Polygon& b) {
    if (a.empty() || b.empty()) return {};
    if (b.size() >= 3) return clip(a, b);
    if (a.size() >= 3) return clip(b, a);
    // Both are points or segments; keep the points of each lying on the other.
    std::vector<Vec2> pts;
    for (const auto& v : a)
        if (contains(b, v, 1e-12)) pts.push_back(v);
    for (const auto& v : b)
        if (contains(a, v, 1e-12)) pts.push_back(v);
    return convex_hull(pts);
}

/// Minkowski sum by merging edge sequences sorted by angle.
inline Polygon minkowski_sum(const Polygon& a, const Polygon& b) {
    if (a.empty() || b.empty()) return {};
    if (a.size() < 3 || b.size() < 3) {
        std::vector<Vec2> pts;
        for (const auto& p : a)
            for (const auto& q : b) pts.push_back(p + q);
        return convex_hull(pts);
    }
    auto lowest = [](const Polygon& p) {
        std::size_t idx = 0;
        for (std::size_t i = 1; i < p.size(); ++i) {
            if (p[i].y() < p[idx].y() || (p[i].y() == p[idx].y() && p[i].x() < p[idx].x())) idx = i;
        }
        return idx;
    };
    const std::size_t n = a.size(), m = b.size();
    const std::size_t ia = lowest(a), ib = lowest(b);
    Polygon out;
    out.reserve(n + m);
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        const Vec2 cur = a[(ia + i) % n] + b[(ib + j) % m];
        out.push_back(cur);
        const Vec2 ea = a[(ia + i + 1) % n] - a[(ia + i) % n];
        const Vec2 eb = b[(ib + j + 1) % m] - b[(ib + j) % m];
        const double c = cross(ea, eb);
        if (j >= m || (i < n && c > 0)) {
            ++i;
        } else if (i >= n || c < 0) {
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    return tidy(out);
}

/// Intersection of the halfplanes {x : <n_i, x> <= c_i}, starting from a bounding square.
inline Polygon halfplane_intersection(const std::vector<Vec2>& normals, const std::vector<double>& offsets,
                                      double bound) {
    Polygon out{{-bound, -bound}, {bound, -bound}, {bound, bound}, {-bound, bound}};
    for (std::size_t i = 0; i < normals.size() && !out.empty(); ++i) {
        const Vec2& nrm = normals[i];
        const double c = offsets[i];
        Polygon in = std::move(out);
        out.clear();
        for (std::size_t j = 0, k = in.size(); j < k; ++j) {
            const Vec2& p = in[j];
            const Vec2& q = in[(j + 1) % k];
            const double sp = c - nrm.dot(p);
            const double sq = c - nrm.dot(q);
            if (sp >= 0) out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                out.push_back(p + t * (q - p));
            }
        }
    }
    return tidy(out);
}

/// Parameter range {s : x + s d in P}.
inline Interval chord(const Polygon& p, const Vec2& x, const Vec2& d) {
    if (p.empty()) return Interval::none();
    if (p.size() <= 2) {
        // Point or segment: intersect the line with it.
        const Vec2 a = p.front(), b = p.back();
        const Vec2 e = b - a;
        const double den = cross(d, e);
        if (std::abs(den) < 1e-300) {
            if (std::abs(cross(d, a - x)) > 1e-12 * (1.0 + a.norm())) return Interval::none();
            const double dd = d.squaredNorm();
            const double s0 = (a - x).dot(d) / dd, s1 = (b - x).dot(d) / dd;
            return {std::min(s0, s1), std::max(s0, s1)};
        }
        const double s = cross(a - x, e) / den;
        const double t = e.squaredNorm() > 0 ? (x + s * d - a).dot(e) / e.squaredNorm() : 0.0;
        if (t < -1e-12 || t > 1 + 1e-12) return Interval::none();
        return {s, s};
    }
    Interval r = Interval::whole();
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        // inside: cross(a,b,x + s d) >= 0  <=>  c0 + s c1 >= 0
        const double c0 = cross(a, b, x);
        const double c1 = cross(b - a, d);
        if (c1 == 0.0) {
            if (c0 < 0) return Interval::none();
        } else if (c1 > 0) {
            r.lo = std::max(r.lo, -c0 / c1);
        } else {
            r.hi = std::min(r.hi, -c0 / c1);
        }
    }
    return r;
}

/// Area of the intersection of the disk B(c, r) with a convex polygon.
inline double disk_intersection_area(const Polygon& p, const Vec2& c, double r) {
    if (p.size() < 3 || r <= 0) return 0.0;
    // Signed area of (disk centred at origin) ∩ triangle(0, a, b), summed over edges.
    auto tri = [r](Vec2 a, Vec2 b) {
        const double r2 = r * r;
        auto sector = [r2](const Vec2& u, const Vec2& v) {
            return 0.5 * r2 * std::atan2(cross(u, v), u.dot(v));
        };
        const double la = a.squaredNorm(), lb = b.squaredNorm();
        const Vec2 d = b - a;
        const double A = d.squaredNorm();
        if (A == 0.0) return 0.0;
        const double B = a.dot(d);
        const double C = la - r2;
        const double disc = B * B - A * C;
        const bool ain = la <= r2, bin = lb <= r2;
        if (ain && bin) return 0.5 * cross(a, b);
        if (disc <= 0) return sector(a, b);
        const double sq = std::sqrt(disc);
        const double t1 = (-B - sq) / A, t2 = (-B + sq) / A;
        if (ain) {
            const Vec2 q = a + t2 * d;
            return 0.5 * cross(a, q) + sector(q, b);
        }
        if (bin) {
            const Vec2 q = a + t1 * d;
            return sector(a, q) + 0.5 * cross(q, b);
        }
        if (t1 >= 1.0 || t2 <= 0.0) return sector(a, b);
        const Vec2 q1 = a + t1 * d, q2 = a + t2 * d;
        return sector(a, q1) + 0.5 * cross(q1, q2) + sector(q2, b);
    };
    double s = 0.0;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) s += tri(p[i] - c, p[(i + 1) % n] - c);
    return std::abs(s);
}

/// Outward edge-normal angles in [0, 2pi): the breakpoints of the support function.
inline std::vector<double> normal_angles(const Polygon& p) {
    std::vector<double> out;
    const std::size_t n = p.size();
    if (n < 2) return out;
    for (std::size_t i = 0; i < (n == 2 ? 2u : n); ++i) {
        const Vec2 e = p[(i + 1) % n] - p[i];
        double a = std::atan2(-e.x(), e.y());
        if (a < 0) a += 2 * kPi;
        out.push_back(a);
    }
    return out;
}

/// Exact max and min over the unit circle of h(A, .) - h(B, .).
inline std::pair<double, double> support_difference_range(const Polygon& a, const Polygon& b) {
    std::vector<double> cuts = normal_angles(a);
    const auto nb = normal_angles(b);
    cuts.insert(cuts.end(), nb.begin(), nb.end());
    cuts.push_back(0.0);
    cuts.push_back(2 * kPi);
    std::sort(cuts.begin(), cuts.end());
    double hi = -kInf, lo = kInf;
    auto arg_support = [](const Polygon& p, const Vec2& u) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < p.size(); ++i)
            if (p[i].dot(u) > p[best].dot(u)) best = i;
        return p[best];
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t0 = cuts[i], t1 = cuts[i + 1];
        for (double t : {t0, t1}) {
            const double v = support(a, polar_dir(t)) - support(b, polar_dir(t));
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        if (t1 - t0 <= 0) continue;
        // On this arc both maximisers are fixed vertices, so the difference is
        // <v - w, u(theta)>, a pure sinusoid.
        const Vec2 u = polar_dir(0.5 * (t0 + t1));
        const Vec2 w = arg_support(a, u) - arg_support(b, u);
        const double r = w.norm();
        if (r == 0.0) continue;
        double psi = std::atan2(w.y(), w.x());
        auto in_arc = [&](double ang) {
            ang = std::fmod(ang, 2 * kPi);
            if (ang < 0) ang += 2 * kPi;
            return ang >= t0 && ang <= t1;
        };
        if (in_arc(psi)) hi = std::max(hi, r);
        if (in_arc(psi + kPi)) lo = std::min(lo, -r);
    }
    return {hi, lo};
}

inline Polygon translate(const Polygon& p, const Vec2& x) {
    Polygon out = p;
    for (auto& v : out) v += x;
    return out;
}

/// Image under an invertible linear map; keeps counterclockwise orientation.
inline Polygon linear_image(const Polygon& p, const Eigen::Matrix2d& m) {
    std::vector<Vec2> pts;
    pts.reserve(p.size());
    for (const auto& v : p) pts.push_back(m * v);
    return convex_hull(pts);
}

inline Polygon box_polygon(const Vec2& lo, const Vec2& hi) {
    if (lo == hi) return {lo};
    if (lo.x() == hi.x() || lo.y() == hi.y()) return {lo, hi};
    return {{lo.x(), lo.y()}, {hi.x(), lo.y()}, {hi.x(), hi.y()}, {lo.x(), hi.y()}};
}

}  // namespace epimetric::poly
