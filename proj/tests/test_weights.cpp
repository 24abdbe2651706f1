#include "support.hpp"

#include <gtest/gtest.h>

using namespace epimetric;

TEST(Weight, ExponentialValuesAndInverse) {
    const auto z = WeightFunction::exponential(2.0);
    EXPECT_NEAR(z(0.0), 1.0, 0);
    EXPECT_NEAR(z(1.0), std::exp(-2.0), 1e-16);
    EXPECT_EQ(z(kInf), 0.0);
    for (double t : {-3.0, 0.0, 0.4, 10.0}) EXPECT_NEAR(z.inverse(z(t)), t, 1e-13);
    EXPECT_NEAR(z.tail_integral(1.0), std::exp(-2.0) / 2, 1e-16);
    EXPECT_THROW((void)z.inverse(0.0), RangeError);
    EXPECT_THROW(WeightFunction::exponential(-1), std::invalid_argument);
}

TEST(Weight, PowerTailValuesAndInverse) {
    const auto z = WeightFunction::power_tail(3.0, 1.0);
    EXPECT_NEAR(z(1.0), 0.125, 1e-16);
    EXPECT_NEAR(z.tail_integral(0.0), 0.5, 1e-15);
    for (double t : {-2.0, -0.1, 0.0, 0.3, 50.0}) EXPECT_NEAR(z.inverse(z(t)), t, 1e-10);
    // strictly decreasing and continuous across t = 0
    EXPECT_NEAR(z(-1e-9), z(1e-9), 1e-8);
    EXPECT_GT(z(-1.0), z(0.0));
    EXPECT_EQ(WeightFunction::power_tail(1.0).tail_integral(0.0), kInf);
}

TEST(Weight, TabulatedRejectsBadSamples) {
    TabulatedWeight t;
    t.t = {0, 1, 2};
    t.values = {1, 1, 0.5};
    EXPECT_THROW(WeightFunction::tabulated(t), std::invalid_argument);
    t.values = {1, 0.5, 0.25};
    const auto z = WeightFunction::tabulated(t);
    EXPECT_NEAR(z(0.5), std::sqrt(0.5), 1e-15);  // log-linear between samples
    EXPECT_NEAR(z.inverse(z(1.5)), 1.5, 1e-10);
}

TEST(Weight, RadialTailMatchesQuadrature) {
    // ∫_{|x|>R} e^{-(a|x|+b)} dx in the plane = 2π e^{-b} ∫_R^∞ e^{-ar} r dr
    const auto z = WeightFunction::exponential(1.0);
    const double a = 0.5, b = 0.2, R = 3.0;
    const double ref = 2 * kPi * std::exp(-b) * oracle::simpson([&](double r) { return std::exp(-a * r) * r; }, R, R + 200, 200000);
    EXPECT_NEAR(z.radial_tail(a, b, 1.0, 2, R), ref, 1e-9 * ref);
    const auto pt = WeightFunction::power_tail(4.0, 1.0);
    const double ref2 = 2 * kPi * oracle::simpson([&](double r) { return std::pow(a * r + b + 1, -4.0) * r; }, R, R + 1e4, 2000000);
    EXPECT_NEAR(pt.radial_tail(a, b, 1.0, 2, R), ref2, 1e-4 * ref2);
}

// Moment classes M^p_n: verdicts against the analytic rule, and M^1 ⊆ M^2.
TEST(Weight, MomentClassTable) {
    struct Case {
        double q;
        double p;
        int n;
    };
    for (const Case& c : std::vector<Case>{{2, 1, 1}, {1, 1, 1}, {2, 1, 2}, {3, 1, 2}, {1.5, 2, 2}, {1, 2, 3}, {4, 1, 3}, {0.5, 2, 1}}) {
        const auto z = WeightFunction::power_tail(c.q, 1.0);
        const bool want = oracle::power_tail_moment_finite(c.q, c.p, c.n);
        const auto r = z.membership(c.p, c.n);
        EXPECT_EQ(r.verdict, want ? Verdict::Member : Verdict::NotMember) << "q=" << c.q << " p=" << c.p << " n=" << c.n << ": " << r.note;
    }
    for (double c : {0.1, 1.0, 5.0}) {
        for (int n = 1; n <= 3; ++n) {
            for (double p : {1.0, 2.0}) EXPECT_EQ(WeightFunction::exponential(c).membership(p, n).verdict, Verdict::Member);
        }
    }
    for (double q : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}) {
        for (int n = 1; n <= 3; ++n) {
            const auto z = WeightFunction::power_tail(q);
            if (z.membership(1.0, n).verdict == Verdict::Member) EXPECT_EQ(z.membership(2.0, n).verdict, Verdict::Member);
        }
    }
}

TEST(Weight, MomentIntegralValue) {
    // ∫_0^∞ e^{-t} t dt = 1 ; ∫_0^∞ (t+1)^{-3} dt = 1/2
    const auto e = WeightFunction::exponential(1.0).membership(1.0, 2);
    EXPECT_NEAR(e.integral, 1.0, 1e-9);
    const auto p = WeightFunction::power_tail(3.0).membership(1.0, 1);
    EXPECT_NEAR(p.integral, 0.5, 1e-8);
}

TEST(Weight, IntegrabilityClassIsTrackedSeparately) {
    EXPECT_EQ(WeightFunction::power_tail(1.5).integrability().verdict, Verdict::Member);
    EXPECT_EQ(WeightFunction::power_tail(1.0).integrability().verdict, Verdict::NotMember);
}
