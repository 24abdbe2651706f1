#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using namespace epimetric;
using io::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run epilab(const std::string& args) {
    const std::string cmd = std::string("cd ") + EXAMPLES_DATA + " && " + EPILAB_PATH + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / ("epilab_test_" + name)).string(); }

}  // namespace

TEST(Io, FunctionRoundTrip) {
    const std::vector<std::string> specs{
        R"({"dim": 2, "kind": "indicator", "offset": 0.5, "body": {"kind": "polygon2d", "vertices": [[0,0],[1,0],[0,1]]}})",
        R"({"dim": 2, "kind": "quadratic", "m": [[1, 0.2], [0.2, 2]], "l": [0.1, 0], "c": 3})",
        R"({"dim": 1, "kind": "norm_cone", "lambda": 2})",
        R"({"dim": 2, "kind": "shifted", "x0": [1, 2], "t0": 0.5, "inner": {"dim": 2, "kind": "norm_cone", "lambda": 1}})",
        R"({"dim": 1, "kind": "grid", "lo": [0], "hi": [1], "res": [3], "values": [1, 0, "inf"]})",
        R"({"dim": 2, "kind": "rescaled", "det": 2, "zeta": {"kind": "power_tail", "q": 3, "shift": 1},
            "inner": {"dim": 2, "kind": "indicator", "body": {"kind": "ball", "center": [0, 0], "radius": 1}}})",
    };
    for (const auto& s : specs) {
        const auto f = io::function_from_json(json::parse(s));
        const auto back = io::function_from_json(io::function_to_json(f));
        EXPECT_EQ(io::function_to_json(back).dump(), io::function_to_json(f).dump());
        Vec x = Vec::Constant(f.dim(), 0.3);
        EXPECT_EQ(evaluate(back, x), evaluate(f, x)) << s;
    }
}

TEST(Io, ParseErrors) {
    EXPECT_THROW(io::function_from_json(json::parse(R"({"kind": "banana"})")), ParseError);
    EXPECT_THROW(io::function_from_json(json::parse(R"({"dim": 3, "kind": "quadratic", "m": [[1, 0], [0, 1]], "l": [0, 0], "c": 0})")), ParseError);
    EXPECT_THROW(io::function_from_json(json::parse(R"({"dim": 1, "kind": "norm_cone"})")), ParseError);
    EXPECT_THROW(io::weight_from_json(json::parse(R"({"kind": "gaussian"})")), ParseError);
    EXPECT_THROW(io::parse_json_text("{nope", "--zeta"), ParseError);
}

TEST(Io, WeightAndSpecRoundTrip) {
    const auto z = io::weight_from_json(json::parse(R"({"kind": "power_tail", "q": 2.5, "shift": 0.5})"));
    EXPECT_EQ(io::weight_to_json(z).dump(), R"({"kind":"power_tail","q":2.5,"shift":0.5})");
    const auto spec = io::isometry_from_json(json::parse(R"({"phi": [[2, 0], [0, 1]]})"));
    EXPECT_EQ(spec.x0, Vec::Zero(2));
    EXPECT_EQ(io::isometry_from_json(io::isometry_to_json(spec)).phi, spec.phi);
}

TEST(Families, RegistryAndSchedule) {
    const auto reg = FamilyRegistry::builtin();
    for (const char* name : {"shrinking-ball-indicator", "vertical-shift", "cone", "constant", "quadratic-vertical", "quadratic-shift"}) {
        EXPECT_NO_THROW((void)reg.get(name));
    }
    EXPECT_THROW((void)reg.get("nope"), ParseError);
    EXPECT_NEAR(evaluate(make_sequence("cone", 4), testsupport::v1(1.25)), 1.0, 1e-15);
    const auto ks = k_schedule(1, 100, 5);
    ASSERT_GE(ks.size(), 5u);
    EXPECT_EQ(ks.front(), 1);
    EXPECT_EQ(ks[ks.size() - 3], 98);
    EXPECT_EQ(ks.back(), 100);
    EXPECT_TRUE(std::is_sorted(ks.begin(), ks.end()));
}

TEST(Cli, MetricAndExitCodes) {
    auto r = epilab("metric square.json triangle.json --metric delta-zeta-p --p 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("delta-zeta-p = 0.75"), std::string::npos) << r.out;
    EXPECT_EQ(epilab("metric square.json missing.json").code, 1);
    EXPECT_EQ(epilab("metric square.json triangle.json --metric nonsense").code, 1);
    EXPECT_EQ(epilab("metric square.json cone_1d.json").code, 1);
    EXPECT_EQ(epilab("metric square.json triangle.json --zeta '{\"kind\":\"exponential\"'").code, 1);
    EXPECT_EQ(epilab("metric square.json paraboloid.json --metric delta-zeta-H --tol 1e-30").code, 3);
    EXPECT_EQ(epilab("--bogus").code, 1);
    // (t + 1)^{-1} is not in M^1_2
    EXPECT_EQ(epilab("metric square.json triangle.json --zeta '{\"kind\":\"power_tail\",\"q\":1}'").code, 2);
}

TEST(Cli, ConeFamilyShowsConjugateMetricStuck) {
    const auto r = epilab("converge --config converge_cone.json");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verdict delta-conjugate: not-converged"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("verdict rw-epi: converged"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("1.001"), std::string::npos);
}

TEST(Cli, VerticalShiftShowsTildeInfinite) {
    const auto r = epilab("converge --config converge_vertical_shift.json");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verdict delta-zeta-H: converged"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("verdict tilde-integral: diverged"), std::string::npos) << r.out;
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
    const std::string j1 = tmp("a.json"), j2 = tmp("b.json"), c1 = tmp("a.csv"), c2 = tmp("b.csv");
    const auto a = epilab("converge --family quadratic-shift --metric delta-zeta-p,delta-conjugate --k-range 1..200 --seed 3 --json " + j1 +
                          " --csv " + c1);
    const auto b = epilab("converge --family quadratic-shift --metric delta-zeta-p,delta-conjugate --k-range 1..200 --seed 3 --json " + j2 +
                          " --csv " + c2);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(slurp(j1).empty());
    EXPECT_EQ(slurp(j1), slurp(j2));
    EXPECT_EQ(slurp(c1), slurp(c2));
    const auto rep = json::parse(slurp(j1));
    EXPECT_EQ(rep.at("family"), "quadratic-shift");
    EXPECT_TRUE(rep.at("rows").at(0).at("result").contains("truncation_bound"));
}

TEST(Cli, Conjugate) {
    auto r = epilab("conjugate n2.json");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("kind"), "indicator");
    EXPECT_EQ(j.at("body").at("radius"), 0.5);
    r = epilab("conjugate square.json");
    EXPECT_EQ(json::parse(r.out).at("kind"), "support");
    const std::string out = tmp("pc.json");
    EXPECT_EQ(epilab("conjugate paraboloid.json --roundtrip -o " + out).code, 0);
    EXPECT_EQ(json::parse(slurp(out)), json::parse(slurp(std::string(EXAMPLES_DATA) + "/paraboloid.json")));
}

TEST(Cli, Isometry) {
    const auto ok = epilab("isometry --config isometry_spec.json corpus");
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_NE(ok.out.find("isometry: PASS"), std::string::npos);
    const auto refused = epilab("isometry --config isometry_spec_refused.json corpus");
    EXPECT_EQ(refused.code, 2);
    EXPECT_NE(refused.out.find("not in Phi(zeta)"), std::string::npos);
    EXPECT_EQ(epilab("isometry --config isometry_spec.json no_such_dir").code, 1);
}
