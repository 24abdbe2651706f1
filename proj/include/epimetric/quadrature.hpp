#pragma once

// Adaptive quadrature with an error estimate. One-dimensional integrals use
// Boost's Gauss-Kronrod rule, refined globally over the pieces between caller-supplied
// breakpoints (jumps and kinks of the integrand); planar integrals are iterated.

#include "epimetric/core.hpp"
#include "epimetric/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <queue>
#include <functional>
#include <vector>

namespace epimetric::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct Options {
    double rel_tol = 1e-10;
    unsigned max_depth = 14;  // at most 2^max_depth subdivisions
    double abs_tol = 1e-15;
};

inline std::vector<double> sorted_cuts(double a, double b, std::vector<double> cuts) {
    std::vector<double> out{a};
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts) {
        if (std::isfinite(c) && c > out.back() + 1e-14 * (1.0 + std::abs(c)) && c < b) out.push_back(c);
    }
    out.push_back(b);
    return out;
}

/// Integral of f over [a, b], split at the given breakpoints. Globally
/// adaptive: the interval with the largest Gauss-Kronrod error estimate is
/// bisected until the summed error meets the tolerance relative to ∫|f|.
template <class F>
Estimate integrate(F&& f, double a, double b, std::vector<double> cuts = {}, const Options& opt = {}) {
    Estimate total;
    if (!(b > a)) return total;
    struct Piece {
        double lo, hi, value, error, l1;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto rule = [&](double lo, double hi) {
        double err = 0.0, l1 = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 0, 0.0, &err, &l1);
        // |K - G| can dwarf the piece itself when a jump sits inside a sliver
        // a few ulps wide; the Kronrod sum of |f| still bounds what it can add.
        err = std::min(err, 2.0 * l1);
        return Piece{lo, hi, v, err, l1};
    };
    std::priority_queue<Piece> heap;
    double value = 0.0, error = 0.0, l1 = 0.0;
    const auto pts = sorted_cuts(a, b, std::move(cuts));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Piece p = rule(pts[i], pts[i + 1]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        heap.push(p);
    }
    const std::size_t max_pieces = pts.size() + (std::size_t{1} << std::min(opt.max_depth, 20u));
    while (error > opt.rel_tol * l1 && error > opt.abs_tol && heap.size() < max_pieces) {
        const Piece p = heap.top();
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi) || p.hi - p.lo < 1e-13 * (1.0 + std::abs(mid))) break;
        heap.pop();
        const Piece left = rule(p.lo, mid), right = rule(mid, p.hi);
        value += left.value + right.value - p.value;
        error += left.error + right.error - p.error;
        l1 += left.l1 + right.l1 - p.l1;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    total.value = 0.0;
    total.error = 0.0;
    while (!heap.empty()) {
        total.value += heap.top().value;
        total.error += heap.top().error;
        heap.pop();
    }
    return total;
}

/// Iterated integral over [x0,x1] x [y0,y1]. `inner_cuts(y)` supplies the
/// breakpoints of x -> f(x, y) on the horizontal line at height y.
template <class F, class Cuts>
Estimate integrate_2d(F&& f, double x0, double x1, double y0, double y1, std::vector<double> y_cuts,
                      Cuts&& inner_cuts, const Options& opt = {}) {
    double inner_err_max = 0.0;
    auto row = [&](double y) {
        const auto cuts = inner_cuts(y);
        const Estimate e = integrate([&](double x) { return f(x, y); }, x0, x1, cuts, opt);
        inner_err_max = std::max(inner_err_max, e.error);
        return e.value;
    };
    // Rows carry the inner rule's noise; asking the outer rule for more than
    // that only exhausts its depth.
    const Options outer{std::min(1e-3, opt.rel_tol * 10.0), opt.max_depth, opt.abs_tol};
    Estimate out = integrate(row, y0, y1, std::move(y_cuts), outer);
    out.error += inner_err_max * (y1 - y0);
    return out;
}

/// Stratified Monte Carlo over an axis-aligned box; error is a 95% half-width.
template <class F>
Estimate monte_carlo(F&& f, const Vec& lo, const Vec& hi, std::size_t samples, std::uint64_t seed) {
    const int n = static_cast<int>(lo.size());
    const std::size_t strata = std::max<std::size_t>(1, std::min<std::size_t>(64, samples / 16));
    const std::size_t per = std::max<std::size_t>(2, samples / strata);
    CounterRng rng(seed);
    double vol = 1.0;
    for (int i = 0; i < n; ++i) vol *= hi[i] - lo[i];
    double total = 0.0, var = 0.0;
    Vec x(n);
    std::uint64_t counter = 0;
    for (std::size_t s = 0; s < strata; ++s) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t k = 0; k < per; ++k) {
            for (int i = 0; i < n; ++i) {
                double u = rng.uniform(counter++);
                if (i == 0) u = (static_cast<double>(s) + u) / static_cast<double>(strata);
                x[i] = lo[i] + u * (hi[i] - lo[i]);
            }
            const double v = f(x);
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / static_cast<double>(per);
        const double svar = std::max(0.0, (sum2 / static_cast<double>(per) - mean * mean)) *
                            static_cast<double>(per) / static_cast<double>(per - 1);
        const double w = vol / static_cast<double>(strata);
        total += w * mean;
        var += w * w * svar / static_cast<double>(per);
    }
    return {total, 1.96 * std::sqrt(var)};
}

}  // namespace epimetric::quad
