#include "support.hpp"

#include <gtest/gtest.h>

using namespace epimetric;
using testsupport::m2;
using testsupport::v1;
using testsupport::v2;

namespace {

ConvexFunction paraboloid() { return ConvexFunction::quadratic(m2(0.5, 0, 0, 0.5), v2(0, 0), 0.0); }

// min over a dense grid on [lo, hi]^2; the reference for global_min
double grid_min_2d(const ConvexFunction& f, double lo, double hi, int n = 801) {
    double best = kInf;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) best = std::min(best, evaluate(f, v2(lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1))));
    }
    return best;
}

}  // namespace

TEST(Evaluate, ClosedForms) {
    const auto k = ConvexBody::box(v2(0, 0), v2(1, 1));
    const auto ind = ConvexFunction::indicator(k, 0.25);
    EXPECT_EQ(evaluate(ind, v2(0.5, 0.5)), 0.25);
    EXPECT_EQ(evaluate(ind, v2(1.5, 0.5)), kInf);
    EXPECT_NEAR(evaluate(paraboloid(), v2(3, 4)), 12.5, 1e-14);
    EXPECT_NEAR(evaluate(ConvexFunction::norm_cone(2, 2.0), v2(3, 4)), 2.5, 1e-14);
    EXPECT_NEAR(evaluate(ConvexFunction::support(k), v2(-1, 2)), 2.0, 1e-14);
    EXPECT_NEAR(evaluate(ConvexFunction::affine_norm(1, 3.0, -1.0), v1(-2)), 5.0, 1e-14);
}

TEST(Evaluate, CompositionsFollowTheirDefinitions) {
    const auto q = paraboloid();
    const Vec x0 = v2(1, -2);
    const auto sh = ConvexFunction::shifted(q, x0, 0.5);
    const Mat m = m2(2, 1, 0, 1);
    const auto lin = ConvexFunction::linear(q, m);
    const auto tl = ConvexFunction::tilted(q, v2(0.3, -0.1), 2.0);
    const auto mx = ConvexFunction::maximum({q, ConvexFunction::norm_cone(2, 1.0)});
    const auto sm = ConvexFunction::sum({q, ConvexFunction::norm_cone(2, 1.0)});
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 100; ++i) {
        const Vec x = v2(U(g), U(g));
        EXPECT_NEAR(evaluate(sh, x), evaluate(q, x - x0) + 0.5, 1e-12);
        EXPECT_NEAR(evaluate(lin, x), evaluate(q, m * x), 1e-12);
        EXPECT_NEAR(evaluate(tl, x), evaluate(q, x) + 0.3 * x[0] - 0.1 * x[1] + 2.0, 1e-12);
        EXPECT_NEAR(evaluate(mx, x), std::max(evaluate(q, x), x.norm()), 1e-12);
        EXPECT_NEAR(evaluate(sm, x), evaluate(q, x) + x.norm(), 1e-12);
    }
}

TEST(Grid, RejectsNonConvexSamples) {
    GridData g;
    g.lo = v1(0);
    g.hi = v1(1);
    g.res = {5};
    g.values = {0, 1, 0.5, 1, 2};
    EXPECT_THROW(ConvexFunction::grid(g), std::invalid_argument);
    g.values = {1, kInf, 0, 1, 2};
    EXPECT_THROW(ConvexFunction::grid(g), std::invalid_argument);
    g.values = {kInf, 1, 0, 1, kInf};
    EXPECT_NO_THROW(ConvexFunction::grid(g));
}

TEST(Grid, InterpolatesSampledFunction) {
    const auto f = ConvexFunction::sample([](const Vec& x) { return x[0] * x[0]; }, v1(-2), v1(2), {4001});
    for (double x : {-1.7, -0.3, 0.0, 0.55, 1.99}) EXPECT_NEAR(evaluate(f, v1(x)), x * x, 1e-6);
    EXPECT_EQ(evaluate(f, v1(2.5)), kInf);
}

TEST(Minimum, MatchesDenseGrid) {
    const std::vector<ConvexFunction> fs{
        ConvexFunction::shifted(paraboloid(), v2(0.7, -0.4), 1.5),
        ConvexFunction::tilted(paraboloid(), v2(1, 0.5), 0.0),
        ConvexFunction::maximum({ConvexFunction::shifted(paraboloid(), v2(1, 0), 0), ConvexFunction::shifted(paraboloid(), v2(-1, 0), 0)}),
        ConvexFunction::sum({ConvexFunction::norm_cone(2, 1.0), ConvexFunction::tilted(ConvexFunction::norm_cone(2, 2.0), v2(0.2, 0.1), 0)}),
        ConvexFunction::indicator(ConvexBody::ball(v2(1, 1), 0.5), -2.0),
    };
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto m = global_min(fs[i]);
        const double ref = grid_min_2d(fs[i], -3, 3);
        EXPECT_LE(m.value, ref + 1e-9) << "function " << i;
        EXPECT_NEAR(m.value, ref, 1e-4) << "function " << i;
        EXPECT_NEAR(evaluate(fs[i], m.argmin), m.value, 1e-9);
    }
}

TEST(Coercivity, EnvelopeBoundsFunctionFromBelow) {
    const std::vector<ConvexFunction> fs{paraboloid(), ConvexFunction::norm_cone(2, 3.0), ConvexFunction::affine_norm(2, 0.5, 1.0),
                                         ConvexFunction::shifted(ConvexFunction::norm_cone(2, 1.0), v2(5, -5), -1.0),
                                         ConvexFunction::indicator(ConvexBody::box(v2(-1, -1), v2(4, 2)))};
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> U(-50, 50);
    for (const auto& f : fs) {
        const auto env = f.envelope();
        ASSERT_TRUE(env.has_value()) << kind_name(f);
        EXPECT_GT(env->a, 0.0);
        for (int i = 0; i < 500; ++i) {
            const Vec x = v2(U(g), U(g));
            EXPECT_GE(evaluate(f, x), env->a * x.norm() + env->b - 1e-9) << kind_name(f);
        }
    }
}

TEST(Coercivity, DetectsNonCoerciveInput) {
    // x -> x_1^2 is flat along x_2
    EXPECT_FALSE(is_coercive(ConvexFunction::quadratic(m2(1, 0, 0, 0), v2(0, 0), 0)));
    // a tilt steeper than the cone slope destroys coercivity
    EXPECT_FALSE(is_coercive(ConvexFunction::tilted(ConvexFunction::norm_cone(1, 1.0), v1(1.5), 0)));
    EXPECT_TRUE(is_coercive(ConvexFunction::tilted(ConvexFunction::norm_cone(1, 1.0), v1(0.5), 0)));
}

TEST(Sublevel, VolumesOfKnownSets) {
    // {|x|^2/2 <= 2} is the disk of radius 2
    EXPECT_NEAR(volume(sublevel_set(paraboloid(), 2.0)), 4 * kPi, 1e-3);
    // {|x|/2 <= 1} is the disk of radius 2
    EXPECT_NEAR(volume(sublevel_set(ConvexFunction::norm_cone(2, 2.0), 1.0)), 4 * kPi, 1e-3);
    EXPECT_TRUE(sublevel_set(paraboloid(), -1.0).is_empty());
    EXPECT_TRUE(is_full_dimensional(paraboloid()));
    EXPECT_FALSE(is_full_dimensional(ConvexFunction::indicator(ConvexBody::hull({{0, 0}, {1, 1}}))));
}

TEST(Domain, ChordAndRadius) {
    const auto f = ConvexFunction::indicator(ConvexBody::ball(v2(0, 0), 2.0));
    const auto c = chord(f, v2(0, 0), v2(1, 0));
    EXPECT_NEAR(c.lo, -2, 1e-12);
    EXPECT_NEAR(c.hi, 2, 1e-12);
    ASSERT_TRUE(domain_radius(f).has_value());
    EXPECT_NEAR(*domain_radius(f), 2.0, 1e-12);
    EXPECT_FALSE(domain_radius(paraboloid()).has_value());
}

TEST(Minimum, SampledQuarticMatchesGoldenSection) {
    auto f = [](double x) { return x * x * x * x - x; };
    const auto g = ConvexFunction::sample([&](const Vec& x) { return f(x[0]); }, v1(-2), v1(2), {4001});
    const auto ref = oracle::golden_min(f, -2, 2);
    const auto m = global_min(g);
    EXPECT_NEAR(m.argmin[0], ref.first, 1e-3);  // node spacing
    EXPECT_NEAR(m.value, ref.second, 1e-6);
    EXPECT_NEAR(ref.first, 0.62996, 1e-5);
    EXPECT_NEAR(ref.second, -0.47247, 1e-5);
}
