// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

using namespace epimetric;
using testsupport::m2;
using testsupport::to_body;
using testsupport::v1;
using testsupport::v2;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %-34s %s  (%s; %.1f s of %.0f s)\n", id, title, pass ? "PASS" : "FAIL", o.detail.c_str(), secs, limit_s);
    std::fflush(stdout);
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

// Mixed pools of admissible functions, drawn once per seed.
std::vector<ConvexFunction> pool_1d(std::mt19937_64& g, int count) {
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<ConvexFunction> out;
    for (int i = 0; i < count; ++i) {
        const double s = -1 + 2 * U(g), c = -0.5 + U(g);
        switch (i % 5) {
            case 0: {
                const double a = -1.5 + U(g), w = 0.3 + 1.5 * U(g);
                out.push_back(ConvexFunction::indicator(ConvexBody::interval(a, a + w), c));
                break;
            }
            case 1: out.push_back(ConvexFunction::shifted(ConvexFunction::quadratic(Mat::Constant(1, 1, 0.3 + 2 * U(g)), v1(0), 0), v1(s), c)); break;
            case 2: out.push_back(ConvexFunction::shifted(ConvexFunction::norm_cone(1, 0.5 + 1.5 * U(g)), v1(s), c)); break;
            case 3: out.push_back(ConvexFunction::shifted(ConvexFunction::affine_norm(1, 0.5 + U(g), c), v1(s), 0)); break;
            default:
                out.push_back(ConvexFunction::sum({ConvexFunction::shifted(ConvexFunction::norm_cone(1, 1 + U(g)), v1(s), 0),
                                                   ConvexFunction::quadratic(Mat::Constant(1, 1, 0.2 + U(g)), v1(0), c)}));
        }
    }
    return out;
}

std::vector<ConvexFunction> pool_2d(std::mt19937_64& g, int count) {
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<ConvexFunction> out;
    for (int i = 0; i < count; ++i) {
        const Vec s = v2(-0.5 + U(g), -0.5 + U(g));
        const double c = -0.5 + U(g);
        switch (i % 4) {
            case 0: out.push_back(ConvexFunction::indicator(to_body(oracle::random_polygon(g)), c)); break;
            case 1: out.push_back(ConvexFunction::indicator(ConvexBody::ball(s, 0.4 + U(g)), c)); break;
            case 2: {
                const double a = 0.3 + U(g), b = 0.3 + U(g), o = 0.4 * (U(g) - 0.5);
                out.push_back(ConvexFunction::shifted(ConvexFunction::quadratic(m2(a, o, o, b), v2(0, 0), 0), s, c));
                break;
            }
            default: out.push_back(ConvexFunction::shifted(ConvexFunction::norm_cone(2, 0.6 + U(g)), s, c));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome indicator_formula() {
    std::mt19937_64 g(101);
    const auto z = WeightFunction::exponential(1.0);
    MetricOptions forced;
    forced.force_quadrature = true;
    double worst_analytic = 0, worst_rel_budget = 0;
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
        const auto a = oracle::random_polygon(g), b = oracle::random_polygon(g);
        const auto u = ConvexFunction::indicator(to_body(a)), v = ConvexFunction::indicator(to_body(b));
        for (double p : {1.0, 2.0}) {
            const double want = z(0.0) * std::pow(oracle::symmetric_difference_area(a, b), 1 / p);
            const auto exact = delta_zeta_p(u, v, z, p);
            const double dev = std::abs(exact.value - want);
            worst_analytic = std::max(worst_analytic, dev / want);
            ok = ok && dev <= exact.budget() + 1e-12 * want;
            const auto quad = delta_zeta_p(u, v, z, p, forced);
            worst_rel_budget = std::max(worst_rel_budget, quad.budget() / want);
            ok = ok && std::abs(quad.value - want) <= quad.budget() && quad.budget() <= 1e-6 * want;
        }
    }
    return {ok, "closed form rel dev " + num(worst_analytic) + ", quadrature budget/value <= " + num(worst_rel_budget)};
}

Outcome conjugate_formula() {
    std::mt19937_64 g(202);
    MetricOptions forced;
    forced.force_quadrature = true;
    double worst = 0, worst_generic = 0;
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
        const auto a = oracle::random_polygon(g), b = oracle::random_polygon(g);
        const auto u = ConvexFunction::indicator(to_body(a)), v = ConvexFunction::indicator(to_body(b));
        const double want = std::sqrt(oracle::hausdorff(a, b));
        const auto r = delta_conjugate(u, v);
        worst = std::max(worst, std::abs(r.value - want) / want);
        const auto gen = delta_conjugate(u, v, forced);
        worst_generic = std::max(worst_generic, std::abs(gen.value - want) / want);
        ok = ok && std::abs(r.value - want) <= 1e-6 * want && std::abs(gen.value - want) <= std::max(1e-6 * want, gen.budget());
    }
    return {ok, "rel dev " + num(worst) + " closed form, " + num(worst_generic) + " sampled dual route"};
}

Outcome counterexample_cones() {
    bool ok = true;
    double prev = kInf, last = kInf, worst = 0;
    std::string series;
    for (double lam : {1.5, 1.1, 1.01, 1.001}) {
        for (int n : {1, 2}) {
            const auto d = delta_conjugate(ConvexFunction::norm_cone(n, lam), ConvexFunction::norm_cone(n, 1.0));
            worst = std::max(worst, std::abs(d.value - lam));
            ok = ok && std::abs(d.value - lam) <= 1e-6;
        }
        const auto rw = epi_distance_rw(ConvexFunction::norm_cone(1, lam), ConvexFunction::norm_cone(1, 1.0));
        ok = ok && rw.value < prev;
        prev = last = rw.value;
        series += (series.empty() ? "" : " > ") + num(rw.value);
    }
    ok = ok && last < 1e-2;
    return {ok, "max |delta - lambda| " + num(worst) + "; rw " + series};
}

Outcome counterexample_vertical_shift() {
    // ζ = e^{-ct}: both metrics equal 1 - e^{-c/j}, below 1e-3 at j = 100 only for c < ~0.1
    const auto z = WeightFunction::exponential(0.05);
    const auto k = ConvexBody::interval(0, 1);
    const auto u = ConvexFunction::indicator(k);
    bool tilde_inf = true, decreasing = true;
    double prev_h = kInf;
    MetricResult h, p1, p2;
    for (int j = 1; j <= 100; ++j) {
        const auto uj = ConvexFunction::indicator(k, 1.0 / j);
        tilde_inf = tilde_inf && tilde_integral_metric(uj, u, z).infinite();
        h = delta_zeta_H(uj, u, z);
        decreasing = decreasing && h.value <= prev_h;
        prev_h = h.value;
        p1 = delta_zeta_p(uj, u, z, 1.0);
        p2 = delta_zeta_p(uj, u, z, 2.0);
    }
    const bool ok = tilde_inf && decreasing && h.value < 1e-3 && p1.value < 1e-3 && p2.value < 1e-3;
    return {ok, std::string("tilde inf for all j: ") + (tilde_inf ? "yes" : "no") + "; at j = 100: H " + num(h.value) + ", p=1 " +
                    num(p1.value) + ", p=2 " + num(p2.value)};
}

Outcome metric_axioms() {
    const auto z = WeightFunction::exponential(1.0);
    using Metric = std::function<MetricResult(const ConvexFunction&, const ConvexFunction&)>;
    const std::vector<std::pair<std::string, Metric>> metrics{
        {"p1", [&](const auto& a, const auto& b) { return delta_zeta_p(a, b, z, 1.0); }},
        {"p2", [&](const auto& a, const auto& b) { return delta_zeta_p(a, b, z, 2.0); }},
        {"H", [&](const auto& a, const auto& b) { return delta_zeta_H(a, b, z); }},
        {"conj", [&](const auto& a, const auto& b) { return delta_conjugate(a, b); }},
    };
    std::mt19937_64 g(303);
    const auto p1 = pool_1d(g, 20), p2 = pool_2d(g, 12);
    int tri_bad = 0, sym_bad = 0, self_bad = 0, triples = 0;
    std::string per_metric;
    for (const auto& [name, d] : metrics) {
        int count = 0;
        for (const auto* pool : {&p1, &p2}) {
            const int n = static_cast<int>(pool->size());
            std::map<std::pair<int, int>, MetricResult> cache;
            auto dist = [&](int i, int j) -> const MetricResult& {
                auto it = cache.find({i, j});
                if (it == cache.end()) it = cache.emplace(std::pair{i, j}, d((*pool)[i], (*pool)[j])).first;
                return it->second;
            };
            std::uniform_int_distribution<int> pick(0, n - 1);
            for (int t = 0; t < 100; ++t, ++count) {
                int i = pick(g), j = pick(g), k = pick(g);
                while (j == i) j = pick(g);
                while (k == i || k == j) k = pick(g);
                const auto &ij = dist(i, j), &jk = dist(j, k), &ik = dist(i, k), &ji = dist(j, i);
                if (ik.value > ij.value + jk.value + ik.budget() + ij.budget() + jk.budget() + 1e-9) ++tri_bad;
                if (std::abs(ij.value - ji.value) > ij.budget() + ji.budget() + 1e-12) ++sym_bad;
                const auto& ii = dist(i, i);
                if (ii.value > ii.budget() + 1e-12) ++self_bad;
            }
        }
        triples += count;
        per_metric += (per_metric.empty() ? "" : ", ") + name + " " + std::to_string(count);
    }
    return {tri_bad == 0 && sym_bad == 0 && self_bad == 0,
            std::to_string(triples) + " triples (" + per_metric + "); violations: triangle " + std::to_string(tri_bad) + ", symmetry " +
                std::to_string(sym_bad) + ", d(u,u) " + std::to_string(self_bad)};
}

Outcome cross_route() {
    const auto z = WeightFunction::exponential(1.0);
    std::mt19937_64 g(404);
    const auto a = pool_1d(g, 10), b = pool_2d(g, 10);
    int bad = 0, pairs = 0;
    double worst = 0;
    for (const auto* pool : {&a, &b}) {
        for (std::size_t i = 0; i < pool->size() && pairs < 50; ++i) {
            for (std::size_t j = i + 1; j < pool->size() && pairs < 50; j += 2, ++pairs) {
                const auto x = delta_zeta_p((*pool)[i], (*pool)[j], z, 1.0), y = delta_zeta_1_via_measure((*pool)[i], (*pool)[j], z);
                const double dev = std::abs(x.value - y.value);
                worst = std::max(worst, dev);
                if (dev > x.budget() + y.budget() + 1e-12) ++bad;
            }
        }
    }
    return {bad == 0 && pairs == 50, std::to_string(pairs) + " pairs, max deviation " + num(worst) + ", " + std::to_string(bad) + " beyond budgets"};
}

Outcome isometry_verification() {
    std::mt19937_64 g(505);
    std::uniform_real_distribution<double> U(-1, 1);
    const std::vector<ConvexFunction> fs{
        ConvexFunction::indicator(to_body(oracle::random_polygon(g))),
        ConvexFunction::indicator(to_body(oracle::random_polygon(g)), 0.3),
        ConvexFunction::indicator(ConvexBody::ball(v2(0.2, -0.1), 0.9), -0.2),
        ConvexFunction::quadratic(m2(0.5, 0, 0, 0.5), v2(0, 0), 0),
        ConvexFunction::shifted(ConvexFunction::quadratic(m2(1, 0.2, 0.2, 0.6), v2(0, 0), 0), v2(0.4, 0.3), 0.1),
        ConvexFunction::norm_cone(2, 1.25),
        ConvexFunction::shifted(ConvexFunction::norm_cone(2, 0.8), v2(-0.3, 0.2), 0.4),
    };
    std::vector<FunctionPair> corpus;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size() && corpus.size() < 20; ++j) corpus.emplace_back(fs[i], fs[j]);
    }
    bool ok = corpus.size() == 20;
    double worst = 0;
    int rows = 0;
    for (double c : {0.5, 1.0, 2.0}) {
        const auto z = WeightFunction::exponential(c);
        std::vector<MetricResult> before;
        std::vector<MetricResult> measure_before;
        for (const auto& [u, v] : corpus) before.push_back(delta_zeta_p(u, v, z, 1.0));
        for (const auto& u : fs) measure_before.push_back(epigraph_measure(u, z));
        for (int s = 0; s < 5; ++s) {
            Mat phi(2, 2);
            do {
                phi << U(g) * 1.5, U(g) * 1.5, U(g) * 1.5, U(g) * 1.5;
            } while (std::abs(phi.determinant()) < 0.3 || std::abs(phi.determinant()) > 3);
            const IsometrySpec spec(phi, v2(U(g), U(g)), z);
            ok = ok && check_phi_membership(spec.phi, z).verdict == Verdict::Member;
            for (std::size_t i = 0; i < corpus.size(); ++i, ++rows) {
                const auto after = delta_zeta_p(apply_isometry(spec, corpus[i].first), apply_isometry(spec, corpus[i].second), z, 1.0);
                const auto row = detail::compare(before[i], after);
                worst = std::max(worst, row.deviation);
                ok = ok && row.pass();
            }
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const auto row = detail::compare(measure_before[i], epigraph_measure(apply_isometry(spec, fs[i]), z));
                ok = ok && row.pass();
            }
        }
    }
    return {ok, std::to_string(rows) + " pair checks, max deviation " + num(worst) + ", measures preserved"};
}

Outcome biconjugation() {
    const double h = 1e-3;
    const std::vector<std::pair<std::string, std::function<double(double)>>> fs{
        {"x^2", [](double x) { return x * x; }},
        {"x^4", [](double x) { return x * x * x * x; }},
        {"|x|", [](double x) { return std::abs(x); }},
        {"max(x,0)^2", [](double x) { return x > 0 ? x * x : 0.0; }},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [name, f] : fs) {
        const auto u = ConvexFunction::sample([&](const Vec& x) { return f(x[0]); }, v1(-3), v1(3), {6001});
        const auto bb = biconjugate(u);
        double worst = 0;
        for (int i = -2950; i <= 2950; ++i) {
            const double x = i * h;
            worst = std::max(worst, std::abs(evaluate(bb, v1(x)) - f(x)));
        }
        ok = ok && worst <= 5 * h;
        detail += (detail.empty() ? "" : ", ") + name + " " + num(worst);
    }
    return {ok, "sup |u** - u| on |x| <= 2.95: " + detail};
}

Outcome epi_convergence_forward() {
    const auto reg = FamilyRegistry::builtin();
    lab::MetricSettings s;
    bool ok = true;
    std::string detail;
    for (const auto& name : reg.names()) {
        const auto& fam = reg.get(name);
        if (!fam.epi_convergent) continue;
        std::vector<lab::MetricKind> ms{lab::MetricKind::DeltaZetaP};
        if (fam.super_coercive) ms.push_back(lab::MetricKind::DeltaConjugate);
        const auto rep = lab::converge(fam, ms, k_schedule(fam.k_min, fam.k_max), 1e-3, s);
        for (const auto& v : rep.verdicts) {
            const bool good = v.verdict == lab::Verdict::Converged;
            ok = ok && good;
            if (!good) detail += (detail.empty() ? "" : "; ") + name + " " + lab::metric_name(v.metric) + ": " + v.reason;
        }
    }
    return {ok, detail.empty() ? "all built-in families converge in delta_{zeta,1}; super-coercive ones also in delta" : detail};
}

Outcome moment_classes() {
    struct Case {
        bool exponential;
        double q;
        double p;
        int n;
    };
    // Exponential is in every M^p_n; (t + 1)^{-q} is in M^p_n iff pq > n.
    const std::vector<Case> table{
        {true, 0, 1, 1},    {true, 0, 2, 2},   {true, 0, 1, 3},    {true, 0, 2, 3},
        {false, 2, 1, 1},   {false, 1, 1, 1},  {false, 0.5, 2, 1}, {false, 0.75, 2, 1},
        {false, 2, 1, 2},   {false, 2.5, 1, 2}, {false, 1.5, 2, 3}, {false, 1.6, 2, 3},
    };
    int wrong = 0, inclusion = 0;
    for (const auto& c : table) {
        const auto z = c.exponential ? WeightFunction::exponential(1.0) : WeightFunction::power_tail(c.q, 1.0);
        const bool truth = c.exponential ? oracle::exponential_moment_finite(1.0, c.p, c.n) : oracle::power_tail_moment_finite(c.q, c.p, c.n);
        if ((z.membership(c.p, c.n).verdict == Verdict::Member) != truth) ++wrong;
        if (z.membership(1.0, c.n).verdict == Verdict::Member && z.membership(2.0, c.n).verdict != Verdict::Member) ++inclusion;
    }
    for (double q = 0.25; q <= 4.0; q += 0.25) {
        for (int n = 1; n <= 3; ++n) {
            const auto z = WeightFunction::power_tail(q, 1.0);
            if (z.membership(1.0, n).verdict == Verdict::Member && z.membership(2.0, n).verdict != Verdict::Member) ++inclusion;
        }
    }
    return {wrong == 0 && inclusion == 0, std::to_string(table.size()) + " cases, " + std::to_string(wrong) + " wrong verdicts, " +
                                              std::to_string(inclusion) + " inclusion violations"};
}

}  // namespace

int main() {
    run(1, "indicator formula", 10, indicator_formula);
    run(2, "conjugate metric of indicators", 30, conjugate_formula);
    run(3, "cone counterexample", 60, counterexample_cones);
    run(4, "vertical-shift counterexample", 60, counterexample_vertical_shift);
    run(5, "metric axioms", 300, metric_axioms);
    run(6, "cross-route identity", 300, cross_route);
    run(7, "isometry verification", 180, isometry_verification);
    run(8, "biconjugation", 300, biconjugation);
    run(9, "epi-convergence forward direction", 300, epi_convergence_forward);
    run(10, "moment classes", 60, moment_classes);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
