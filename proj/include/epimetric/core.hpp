#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace epimetric {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when an argument has the wrong ambient dimension.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an input is outside the class a construction is defined on
/// (weight not in the moment class, function not coercive, dim dom < n, ...).
class AdmissibilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Value outside the range of an invertible map.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_dim(Eigen::Index got, int want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

// Extended-real helpers. +inf is the only non-finite value a convex function
// may take; it absorbs addition and is neutral for min.
inline bool is_pos_inf(double v) { return v == kInf; }

inline double ext_add(double a, double b) {
    if (is_pos_inf(a) || is_pos_inf(b)) return kInf;
    return a + b;
}

/// |a - b| with the convention inf - inf = 0 (two functions agreeing on being infinite).
inline double ext_abs_diff(double a, double b) {
    const bool ia = is_pos_inf(a), ib = is_pos_inf(b);
    if (ia && ib) return 0.0;
    if (ia || ib) return kInf;
    return std::abs(a - b);
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Surface area of the unit sphere in R^n (n * volume of the unit ball).
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

inline Vec2 polar_dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Closed interval [lo, hi] on the real line, possibly with infinite ends; empty when lo > hi.
struct Interval {
    double lo = 1.0;
    double hi = 0.0;

    [[nodiscard]] bool empty() const { return lo > hi; }
    [[nodiscard]] double length() const { return empty() ? 0.0 : hi - lo; }
    [[nodiscard]] bool contains(double s) const { return s >= lo && s <= hi; }

    static Interval whole() { return {-kInf, kInf}; }
    static Interval none() { return {1.0, 0.0}; }

    [[nodiscard]] Interval intersect(const Interval& o) const {
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
};

/// Golden-section minimisation of a unimodal function on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx <= fc && fx <= fd) return {x, fx};
    return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Largest s in [lo, hi] with pred(s) true, assuming pred is true at lo and monotone.
template <class P>
double bisect_last_true(P&& pred, double lo, double hi, int iters = 100) {
    for (int i = 0; i < iters && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace epimetric
