#pragma once

// Reference computations for the tests. Everything here is written from
// scratch with plain loops so that it shares no code path with the library:
// polygon areas by brute-force vertex enumeration, Hausdorff distances by
// point-segment distances, integrals by composite Simpson, conjugates by a
// dense grid supremum.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using P = std::array<double, 2>;
using Poly = std::vector<P>;

inline double cross(const P& o, const P& a, const P& b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); }

inline double shoelace(const Poly& p) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const P& a = p[i];
        const P& b = p[(i + 1) % p.size()];
        s += a[0] * b[1] - a[1] * b[0];
    }
    return std::abs(s) / 2;
}

inline bool inside(const Poly& ccw, const P& x, double eps = 1e-12) {
    for (std::size_t i = 0; i < ccw.size(); ++i) {
        if (cross(ccw[i], ccw[(i + 1) % ccw.size()], x) < -eps) return false;
    }
    return true;
}

// Gift wrapping; points are assumed to be in general enough position.
inline Poly hull(std::vector<P> pts) {
    if (pts.size() < 3) return pts;
    std::size_t start = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i][0] < pts[start][0] || (pts[i][0] == pts[start][0] && pts[i][1] < pts[start][1])) start = i;
    }
    Poly out;
    std::size_t cur = start;
    do {
        out.push_back(pts[cur]);
        std::size_t next = (cur + 1) % pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double c = cross(pts[cur], pts[next], pts[i]);
            const double di = std::hypot(pts[i][0] - pts[cur][0], pts[i][1] - pts[cur][1]);
            const double dn = std::hypot(pts[next][0] - pts[cur][0], pts[next][1] - pts[cur][1]);
            if (c < 0 || (c == 0 && di > dn)) next = i;
        }
        cur = next;
    } while (cur != start && out.size() <= pts.size());
    return out;
}

// Area of A ∩ B for convex polygons: hull of the vertices of each inside the
// other plus all pairwise edge crossings.
inline double intersection_area(const Poly& a, const Poly& b) {
    std::vector<P> pts;
    for (const auto& v : a) {
        if (inside(b, v)) pts.push_back(v);
    }
    for (const auto& v : b) {
        if (inside(a, v)) pts.push_back(v);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const P& p = a[i];
        const P& p2 = a[(i + 1) % a.size()];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const P& q = b[j];
            const P& q2 = b[(j + 1) % b.size()];
            const double rx = p2[0] - p[0], ry = p2[1] - p[1], sx = q2[0] - q[0], sy = q2[1] - q[1];
            const double den = rx * sy - ry * sx;
            if (std::abs(den) < 1e-300) continue;
            const double t = ((q[0] - p[0]) * sy - (q[1] - p[1]) * sx) / den;
            const double u = ((q[0] - p[0]) * ry - (q[1] - p[1]) * rx) / den;
            if (t >= 0 && t <= 1 && u >= 0 && u <= 1) pts.push_back({p[0] + t * rx, p[1] + t * ry});
        }
    }
    // drop near-duplicates before wrapping
    std::vector<P> uniq;
    for (const auto& v : pts) {
        bool dup = false;
        for (const auto& w : uniq) dup = dup || std::hypot(v[0] - w[0], v[1] - w[1]) < 1e-13;
        if (!dup) uniq.push_back(v);
    }
    if (uniq.size() < 3) return 0.0;
    return shoelace(hull(uniq));
}

inline double symmetric_difference_area(const Poly& a, const Poly& b) {
    return shoelace(a) + shoelace(b) - 2 * intersection_area(a, b);
}

inline double point_segment(const P& x, const P& a, const P& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    double t = ((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / (dx * dx + dy * dy);
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(x[0] - a[0] - t * dx, x[1] - a[1] - t * dy);
}

inline double point_polygon(const P& x, const Poly& ccw) {
    if (inside(ccw, x, 0.0)) return 0.0;
    double d = INFINITY;
    for (std::size_t i = 0; i < ccw.size(); ++i) d = std::min(d, point_segment(x, ccw[i], ccw[(i + 1) % ccw.size()]));
    return d;
}

// dist(., B) is convex, so its max over A sits at a vertex of A.
inline double hausdorff(const Poly& a, const Poly& b) {
    double h = 0;
    for (const auto& v : a) h = std::max(h, point_polygon(v, b));
    for (const auto& v : b) h = std::max(h, point_polygon(v, a));
    return h;
}

// Counterclockwise convex polygon: sorted random angles on a random ellipse.
inline Poly random_polygon(std::mt19937_64& g, int min_vertices = 3, int max_vertices = 9) {
    std::uniform_int_distribution<int> nv(min_vertices, max_vertices);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = nv(g);
    const double cx = -0.5 + U(g), cy = -0.5 + U(g), rx = 0.4 + U(g), ry = 0.4 + U(g);
    std::vector<double> ang(n);
    for (auto& a : ang) a = 2 * M_PI * U(g);
    std::sort(ang.begin(), ang.end());
    Poly p;
    for (double a : ang) p.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    // reject slivers where consecutive angles coincide
    if (shoelace(p) < 1e-3) return random_polygon(g, min_vertices, max_vertices);
    return p;
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

// Composite Simpson with the given breakpoints (kinks) as panel edges.
inline double simpson_pieces(const std::function<double(double)>& f, std::vector<double> cuts, int per_piece = 4000) {
    std::sort(cuts.begin(), cuts.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += simpson(f, cuts[i], cuts[i + 1], per_piece);
    return s;
}

inline double simpson_2d(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1, int n = 800) {
    return simpson([&](double y) { return simpson([&](double x) { return f(x, y); }, x0, x1, n); }, y0, y1, n);
}

// sup_x (x y - f(x)) over a uniform grid on [a, b].
inline double grid_conjugate(const std::function<double(double)>& f, double a, double b, double y, int n = 200001) {
    double best = -INFINITY;
    for (int i = 0; i < n; ++i) {
        const double x = a + (b - a) * i / (n - 1);
        best = std::max(best, x * y - f(x));
    }
    return best;
}

// Golden-section minimiser of a unimodal f on [a, b].
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-10) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    double c = b - r * (b - a), d = a + r * (b - a);
    while (b - a > tol) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    const double x = (a + b) / 2;
    return {x, f(x)};
}

// ∫_0^∞ ζ(t)^p t^{n-1} dt < ∞ for ζ = e^{-ct} always, for ζ = (t + s)^{-q} iff pq > n.
inline bool exponential_moment_finite(double /*c*/, double /*p*/, int /*n*/) { return true; }
inline bool power_tail_moment_finite(double q, double p, int n) { return p * q > n; }

}  // namespace oracle
