#include "support.hpp"

#include <gtest/gtest.h>

using namespace epimetric;
using testsupport::m2;
using testsupport::to_body;
using testsupport::v2;

namespace {

std::vector<ConvexFunction> small_corpus() {
    return {
        ConvexFunction::indicator(ConvexBody::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}})),
        ConvexFunction::indicator(ConvexBody::ball(v2(0.3, 0.2), 0.8), 0.5),
        ConvexFunction::quadratic(m2(0.5, 0, 0, 1), v2(0.2, 0), 0.1),
        ConvexFunction::norm_cone(2, 1.25),
    };
}

std::vector<FunctionPair> all_pairs(const std::vector<ConvexFunction>& fs) {
    std::vector<FunctionPair> out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) out.emplace_back(fs[i], fs[j]);
    }
    return out;
}

}  // namespace

TEST(IsometrySpec, Validation) {
    const auto z = WeightFunction::exponential(1.0);
    EXPECT_THROW(IsometrySpec(m2(1, 2, 2, 4), v2(0, 0), z), std::invalid_argument);
    EXPECT_THROW(IsometrySpec(Mat::Identity(2, 3), v2(0, 0), z), DimensionError);
    EXPECT_THROW(IsometrySpec(Mat::Identity(2, 2), testsupport::v1(0), z), DimensionError);
}

TEST(IsometrySpec, ExponentialProfileIsAShift) {
    const IsometrySpec s(m2(2, 0, 0, 1.5), v2(1, 0), WeightFunction::exponential(0.5));
    for (double t : {-1.0, 0.0, 2.5}) EXPECT_NEAR(s.f(t), t + std::log(3.0) / 0.5, 1e-13);
}

TEST(ApplyIsometry, PointwiseDefinition) {
    // (I u)(α x) = f(u(x))
    const IsometrySpec s(m2(1.2, 0.3, -0.2, 0.9), v2(0.5, -1), WeightFunction::exponential(2.0));
    const auto u = ConvexFunction::quadratic(m2(0.5, 0, 0, 0.5), v2(0.1, 0), 0);
    const auto iu = apply_isometry(s, u);
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const Vec x = v2(U(g), U(g));
        EXPECT_NEAR(evaluate(iu, s.alpha(x)), s.f(evaluate(u, x)), 1e-11);
    }
}

TEST(ApplyIsometry, PowerTailRescaling) {
    const auto z = WeightFunction::power_tail(3.0, 1.0);
    const Mat phi = m2(2, 0, 0, 1);  // |det| = 2
    const auto mem = check_phi_membership(phi, z);
    ASSERT_EQ(mem.verdict, Verdict::Member) << mem.note;
    const IsometrySpec s(phi, v2(0, 0), z);
    const auto u = ConvexFunction::norm_cone(2, 1.0);
    const auto iu = apply_isometry(s, u);
    for (double r : {0.0, 0.5, 3.0}) {
        const Vec x = v2(r, -r / 2);
        EXPECT_NEAR(z(evaluate(iu, s.alpha(x))), z(evaluate(u, x)) / 2, 1e-12);
    }
}

TEST(PhiMembership, ClosedAnswers) {
    const auto pt = WeightFunction::power_tail(3.0, 1.0);
    EXPECT_EQ(check_phi_membership(m2(2, 1, 1, 1), pt).verdict, Verdict::Member);  // unimodular
    EXPECT_EQ(check_phi_membership(m2(0.1, 0, 0, 0.1), WeightFunction::exponential(1)).verdict, Verdict::Member);
    const auto refused = check_phi_membership(m2(0.5, 0, 0, 0.625), pt);
    EXPECT_EQ(refused.verdict, Verdict::NotMember);
    EXPECT_NE(refused.note.find("not in Phi(zeta)"), std::string::npos);
}

TEST(VerifyIsometry, ExponentialWeightsPreserveDistances) {
    const auto fs = small_corpus();
    const auto pairs = all_pairs(fs);
    for (double c : {0.5, 1.0, 2.0}) {
        const IsometrySpec s(m2(1.5, 0.5, 0, 0.8), v2(0.3, -0.2), WeightFunction::exponential(c));
        const auto rep = verify_isometry(s, pairs);
        EXPECT_TRUE(rep.pass()) << "c = " << c << " max deviation " << rep.max_deviation();
        EXPECT_TRUE(measure_preservation_check(s, fs).pass()) << "c = " << c;
    }
}

TEST(VerifyIsometry, TranslationWithTabulatedWeight) {
    TabulatedWeight t;
    t.t = {0, 1, 2, 4};
    t.values = {1, 0.4, 0.2, 0.01};
    t.dominating = ExponentialWeight{0.5};
    const auto z = WeightFunction::tabulated(t);
    const IsometrySpec s(Mat::Identity(2, 2), v2(2, 1), z);
    const auto fs = small_corpus();
    const std::vector<FunctionPair> pairs{{fs[0], fs[1]}};
    EXPECT_TRUE(verify_isometry(s, pairs).pass());
}

TEST(Witness, MeasurePreservingMapThatIsNotAnIsometry) {
    const auto fs = small_corpus();
    const auto rep = non_isometry_witness(v2(1, 0), WeightFunction::exponential(1.0), all_pairs(fs));
    EXPECT_TRUE(rep.measure.pass());
    EXPECT_GE(rep.violating_pair, 0);
}
