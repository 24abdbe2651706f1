#pragma once

// Weights ζ: R -> (0, ∞), strictly decreasing and continuous, and the moment
// classes M^p_n they may belong to.

#include "epimetric/core.hpp"
#include "epimetric/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace epimetric {

/// t -> exp(-c t).
struct ExponentialWeight {
    double c = 1.0;
};

/// t -> (t + shift)^(-q) for t >= 0. For t < 0 it continues as
/// shift^(-q) exp(-q t / shift), which keeps ζ positive, strictly decreasing and C¹.
struct PowerTailWeight {
    double q = 2.0;
    double shift = 1.0;
};

/// Log-linear interpolation of strictly decreasing samples.
struct TabulatedWeight {
    std::vector<double> t;
    std::vector<double> values;
    std::optional<double> sup;  // declared lim_{t->-inf} ζ(t); unbounded when absent
    // Declared majorant for large t; needed to certify moments.
    std::optional<std::variant<ExponentialWeight, PowerTailWeight>> dominating;
};

enum class Verdict { Member, NotMember, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Member: return "member";
        case Verdict::NotMember: return "not-member";
        default: return "inconclusive";
    }
}

struct MembershipReport {
    Verdict verdict = Verdict::Inconclusive;
    double integral = kInf;    // ∫_0^∞ ζ^p t^{n-1} dt (best estimate)
    double tail_bound = kInf;  // bound on the part not covered by quadrature
    std::string note;
};

class WeightFunction {
public:
    using Form = std::variant<ExponentialWeight, PowerTailWeight, TabulatedWeight>;

    static WeightFunction exponential(double c = 1.0) {
        if (!(c > 0)) throw std::invalid_argument("exponential weight: c must be > 0");
        return WeightFunction(ExponentialWeight{c});
    }

    static WeightFunction power_tail(double q, double shift = 1.0) {
        if (!(q > 0) || !(shift > 0)) throw std::invalid_argument("power-tail weight: q and shift must be > 0");
        return WeightFunction(PowerTailWeight{q, shift});
    }

    static WeightFunction tabulated(TabulatedWeight tab) {
        const auto& t = tab.t;
        const auto& v = tab.values;
        if (t.size() < 2 || t.size() != v.size()) throw std::invalid_argument("tabulated weight: need >= 2 samples");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!(v[i] > 0) || !std::isfinite(v[i])) throw std::invalid_argument("tabulated weight: values must be positive");
            if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("tabulated weight: t must increase");
            if (i > 0 && !(v[i] < v[i - 1])) throw std::invalid_argument("tabulated weight: values must strictly decrease");
        }
        if (tab.sup && !(*tab.sup > v.front())) throw std::invalid_argument("tabulated weight: sup must exceed the first sample");
        return WeightFunction(std::move(tab));
    }

    [[nodiscard]] const Form& form() const { return form_; }

    /// ζ(t); ζ(+inf) = 0.
    double operator()(double t) const {
        if (t == kInf) return 0.0;
        return std::visit(
            [&](const auto& w) -> double {
                using W = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<W, ExponentialWeight>) {
                    return std::exp(-w.c * t);
                } else if constexpr (std::is_same_v<W, PowerTailWeight>) {
                    if (t >= 0) return std::pow(t + w.shift, -w.q);
                    return std::pow(w.shift, -w.q) * std::exp(-w.q * t / w.shift);
                } else {
                    return eval_tab(w, t);
                }
            },
            form_);
    }

    /// lim_{t -> -inf} ζ(t), possibly +inf.
    [[nodiscard]] double sup() const {
        if (auto* tab = std::get_if<TabulatedWeight>(&form_)) return tab->sup.value_or(kInf);
        return kInf;
    }

    /// ζ⁻¹(s) for s in (0, sup ζ).
    [[nodiscard]] double inverse(double s) const {
        if (!(s > 0) || !(s < sup()) || !std::isfinite(s)) {
            throw RangeError("zeta_inverse: " + std::to_string(s) + " is outside the range of the weight");
        }
        if (auto* e = std::get_if<ExponentialWeight>(&form_)) return -std::log(s) / e->c;
        if (auto* p = std::get_if<PowerTailWeight>(&form_)) {
            const double s0 = std::pow(p->shift, -p->q);
            if (s <= s0) return std::pow(s, -1.0 / p->q) - p->shift;
            return -(p->shift / p->q) * std::log(s / s0);
        }
        // Bisection with bracket expansion.
        double lo = -1.0, hi = 1.0;
        while ((*this)(lo) < s) lo = 2 * lo - 1;
        while ((*this)(hi) > s) hi = 2 * hi + 1;
        for (int it = 0; it < 300 && hi - lo > 1e-13 * (1 + std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            ((*this)(mid) > s ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// ∫_T^∞ ζ(t) dt (possibly +inf).
    [[nodiscard]] double tail_integral(double T) const {
        return std::visit(
            [&](const auto& w) -> double {
                using W = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<W, ExponentialWeight>) {
                    return std::exp(-w.c * T) / w.c;
                } else if constexpr (std::is_same_v<W, PowerTailWeight>) {
                    if (w.q <= 1) return kInf;
                    if (T >= 0) return std::pow(T + w.shift, 1 - w.q) / (w.q - 1);
                    const double left = std::pow(w.shift, -w.q) * (w.shift / w.q) * std::expm1(-w.q * T / w.shift);
                    return left + std::pow(w.shift, 1 - w.q) / (w.q - 1);
                } else {
                    return tab_tail(w, T);
                }
            },
            form_);
    }

    /// ∫_{|x| > R} ζ(a|x| + b)^p dx over R^n, for a > 0.
    [[nodiscard]] double radial_tail(double a, double b, double p, int n, double R) const {
        const double omega = unit_sphere_area(n);
        if (auto* e = std::get_if<ExponentialWeight>(&form_)) {
            // ∫_R^∞ e^{-k r} r^{n-1} dr = Γ(n, kR) / k^n, k = p c a.
            // For integer n, Γ(n, x) = (n-1)! e^{-x} Σ_{j<n} x^j / j!; the two
            // exponentials are merged so a very negative b cannot give inf * 0.
            const double k = p * e->c * a;
            const double x = k * R;
            double sum = 0.0, term = 1.0;
            for (int j = 0; j < n; ++j) {
                if (j > 0) term *= x / j;
                sum += term;
            }
            return omega * boost::math::factorial<double>(static_cast<unsigned>(n - 1)) * sum *
                   std::exp(-p * e->c * b - x) / std::pow(k, n);
        }
        if (auto* pt = std::get_if<PowerTailWeight>(&form_)) {
            if (p * pt->q <= n) return kInf;
        }
        auto f = [&](double r) {
            const double z = (*this)(a * r + b);
            return z == 0.0 ? 0.0 : std::pow(z, p) * std::pow(r, n - 1);
        };
        boost::math::quadrature::exp_sinh<double> integrator;
        double err = 0.0;
        const double v = integrator.integrate([&](double r) { return f(R + r); }, 1e-12, &err);
        return omega * v;
    }

    /// Verdict for ζ ∈ M^p_n, cached per (p, n).
    [[nodiscard]] MembershipReport membership(double p, int n) const {
        if (!(p >= 1.0) || n < 1) throw std::invalid_argument("membership: need p >= 1, n >= 1");
        {
            std::lock_guard<std::mutex> lock(cache_->mu);
            auto it = cache_->moments.find({p, n});
            if (it != cache_->moments.end()) return it->second;
        }
        MembershipReport r = compute_membership(p, n);
        std::lock_guard<std::mutex> lock(cache_->mu);
        return cache_->moments.emplace(std::pair{p, n}, r).first->second;
    }

    /// ζ ∈ M^0, i.e. ∫_0^∞ ζ < ∞.
    [[nodiscard]] MembershipReport integrability() const {
        MembershipReport r;
        if (auto* tab = std::get_if<TabulatedWeight>(&form_)) {
            if (!tab->dominating) {
                r.note = "tabulated weight without a dominating form";
                return r;
            }
            const WeightFunction dom = from_dominating(*tab->dominating);
            if (!dominated_by(*tab, dom)) {
                r.note = "declared dominating form does not dominate the samples";
                return r;
            }
            const auto d = dom.integrability();
            r.verdict = d.verdict == Verdict::Member ? Verdict::Member : Verdict::Inconclusive;
            r.integral = tab_tail(*tab, 0.0);
            r.tail_bound = d.integral;
            return r;
        }
        r.integral = tail_integral(0.0);
        r.tail_bound = 0.0;
        r.verdict = std::isfinite(r.integral) ? Verdict::Member : Verdict::NotMember;
        return r;
    }

private:
    explicit WeightFunction(Form f) : form_(std::move(f)), cache_(std::make_shared<Cache>()) {}

    struct Cache {
        std::mutex mu;
        std::map<std::pair<double, int>, MembershipReport> moments;
    };

    static WeightFunction from_dominating(const std::variant<ExponentialWeight, PowerTailWeight>& d) {
        if (auto* e = std::get_if<ExponentialWeight>(&d)) return exponential(e->c);
        const auto& p = std::get<PowerTailWeight>(d);
        return power_tail(p.q, p.shift);
    }

    static bool dominated_by(const TabulatedWeight& tab, const WeightFunction& dom) {
        const WeightFunction self(tab);
        const double t_end = 10.0 * std::max(1.0, tab.t.back());
        for (int i = 0; i <= 2000; ++i) {
            const double t = t_end * i / 2000.0;
            if (self(t) > dom(t) * (1 + 1e-12)) return false;
        }
        return true;
    }

    static double log_slope(double t0, double v0, double t1, double v1) { return (std::log(v1) - std::log(v0)) / (t1 - t0); }

    static double eval_tab(const TabulatedWeight& w, double t) {
        const auto& ts = w.t;
        const auto& vs = w.values;
        const std::size_t n = ts.size();
        if (t >= ts.back()) return vs.back() * std::exp(log_slope(ts[n - 2], vs[n - 2], ts[n - 1], vs[n - 1]) * (t - ts.back()));
        if (t < ts.front()) {
            const double k = log_slope(ts[0], vs[0], ts[1], vs[1]);
            if (!w.sup) return vs[0] * std::exp(k * (t - ts[0]));
            // Approach the declared sup with matching slope at the first sample.
            const double gap = *w.sup - vs[0];
            const double kappa = -vs[0] * k / gap;
            return *w.sup - gap * std::exp(kappa * (t - ts[0]));
        }
        const std::size_t i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
        const double u = (t - ts[i]) / (ts[i + 1] - ts[i]);
        return std::exp((1 - u) * std::log(vs[i]) + u * std::log(vs[i + 1]));
    }

    // ∫ of a log-linear piece from value v0 to v1 over a length h.
    static double loglinear_piece(double v0, double v1, double h) {
        const double r = v1 / v0;
        if (std::abs(r - 1) < 1e-12) return v0 * h;
        return v0 * h * (r - 1) / std::log(r);
    }

    static double tab_tail(const TabulatedWeight& w, double T) {
        const auto& ts = w.t;
        const auto& vs = w.values;
        const std::size_t n = ts.size();
        const double k_end = log_slope(ts[n - 2], vs[n - 2], ts[n - 1], vs[n - 1]);
        if (T >= ts.back()) return eval_tab(w, T) / -k_end;
        double total = vs.back() / -k_end;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (ts[i + 1] <= T) continue;
            const double a = std::max(T, ts[i]);
            total += loglinear_piece(eval_tab(w, a), vs[i + 1], ts[i + 1] - a);
        }
        if (T < ts.front()) {
            const double h = ts.front() - T;
            if (!w.sup) {
                total += loglinear_piece(eval_tab(w, T), vs[0], h);
            } else {
                const double gap = *w.sup - vs[0];
                const double kappa = -vs[0] * log_slope(ts[0], vs[0], ts[1], vs[1]) / gap;
                total += *w.sup * h - gap * (1 - std::exp(-kappa * h)) / kappa;
            }
        }
        return total;
    }

    MembershipReport compute_membership(double p, int n) const {
        MembershipReport r;
        if (auto* e = std::get_if<ExponentialWeight>(&form_)) {
            r.verdict = Verdict::Member;
            r.integral = std::tgamma(static_cast<double>(n)) / std::pow(p * e->c, n);
            r.tail_bound = 0.0;
            r.note = "analytic";
            return r;
        }
        if (auto* pt = std::get_if<PowerTailWeight>(&form_)) {
            const double m = p * pt->q;
            auto integrand = [&](double t) { return std::pow(t + pt->shift, -m) * std::pow(t, n - 1); };
            if (m <= n) {
                // The comparison integral diverges; partial integrals keep growing.
                const double i1 = quad::integrate(integrand, 0.0, 1e3, {1.0, 10.0, 100.0}).value;
                const double i2 = i1 + quad::integrate(integrand, 1e3, 1e6, {1e4, 1e5}).value;
                r.verdict = Verdict::NotMember;
                r.integral = kInf;
                r.note = "partial integrals " + std::to_string(i1) + " -> " + std::to_string(i2) + " (divergent, p q <= n)";
                return r;
            }
            // ∫_T^∞ (t+s)^{-m} t^{n-1} <= ∫_T^∞ t^{n-1-m} = T^{n-m} / (m-n).
            double T = 10.0 * pt->shift;
            auto tail = [&](double t) { return std::pow(t, n - m) / (m - n); };
            const double head0 = quad::integrate(integrand, 0.0, T, {pt->shift}).value;
            while (tail(T) > 1e-10 * head0 && T < 1e12) T *= 4.0;
            std::vector<double> cuts;
            for (double c = pt->shift; c < T; c *= 4.0) cuts.push_back(c);
            const auto head = quad::integrate(integrand, 0.0, T, cuts);
            r.verdict = Verdict::Member;
            r.tail_bound = tail(T);
            r.integral = head.value + 0.5 * r.tail_bound;
            r.note = "quadrature on [0, " + std::to_string(T) + "] with a comparison tail bound";
            return r;
        }
        const auto& tab = std::get<TabulatedWeight>(form_);
        if (!tab.dominating) {
            r.note = "tabulated weight without a dominating form";
            return r;
        }
        const WeightFunction dom = from_dominating(*tab.dominating);
        if (!dominated_by(tab, dom)) {
            r.note = "declared dominating form does not dominate the samples";
            return r;
        }
        const auto d = dom.membership(p, n);
        if (d.verdict != Verdict::Member) {
            r.note = "dominating form is not in the class";
            return r;
        }
        const double T = tab.t.back();
        auto integrand = [&](double t) { return std::pow((*this)(t), p) * std::pow(t, n - 1); };
        auto head = quad::integrate(integrand, 0.0, T, tab.t);
        auto dom_tail = quad::integrate([&](double t) { return std::pow(dom(t), p) * std::pow(t, n - 1); }, 0.0, T, {});
        r.verdict = Verdict::Member;
        r.tail_bound = std::max(0.0, d.integral - dom_tail.value);
        r.integral = head.value + 0.5 * r.tail_bound;
        r.note = "certified through the dominating form";
        return r;
    }

    Form form_;
    std::shared_ptr<Cache> cache_;
};

/// Verdicts respect M^p_n ⊆ M^q_n (p <= q): member at p implies member at q.
inline bool membership_monotonicity_check(const WeightFunction& z, double p, double q, int n) {
    if (q < p) throw std::invalid_argument("membership_monotonicity_check: need p <= q");
    const auto a = z.membership(p, n);
    const auto b = z.membership(q, n);
    return !(a.verdict == Verdict::Member && b.verdict == Verdict::NotMember);
}

inline double zeta_inverse(const WeightFunction& z, double s) { return z.inverse(s); }

/// ν_ζ([a, b)) = ζ(a) - ζ(b).
inline double nu_measure(const WeightFunction& z, double a, double b) { return z(a) - z(b); }

inline std::string describe(const WeightFunction& z) {
    return std::visit(
        [](const auto& w) -> std::string {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, ExponentialWeight>) return "exp(-" + std::to_string(w.c) + " t)";
            else if constexpr (std::is_same_v<W, PowerTailWeight>)
                return "(t+" + std::to_string(w.shift) + ")^-" + std::to_string(w.q);
            else return "tabulated(" + std::to_string(w.t.size()) + " samples)";
        },
        z.form());
}

}  // namespace epimetric
