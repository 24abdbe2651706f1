// epilab: metrics, convergence experiments, isometry checks and conjugates
// for coercive convex functions given as JSON specs.
//
// Exit codes: 0 ok, 1 input error, 2 admissibility refusal, 3 tolerance failure.

#include "epimetric/lab.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace epimetric;
using io::json;

namespace {

constexpr int kOk = 0, kInputError = 1, kAdmissibility = 2, kToleranceFailure = 3;

struct Common {
    std::string config;
    std::string zeta;
    std::string k_range;
    std::string metric;
    double p = 1.0;
    double tol = -1.0;
    std::uint64_t seed = 1;
    std::string json_out;
    std::string csv_out;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

std::pair<long, long> parse_k_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw ParseError("--k-range: expected a..b, got \"" + s + "\"");
    try {
        return {std::stol(s.substr(0, dots)), std::stol(s.substr(dots + 2))};
    } catch (const std::logic_error&) {
        throw ParseError("--k-range: expected integers a..b, got \"" + s + "\"");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

lab::MetricSettings settings_from(const Common& c, const json& cfg) {
    lab::MetricSettings s;
    if (!c.zeta.empty()) {
        s.zeta = io::weight_from_json(io::parse_json_text(c.zeta, "--zeta"));
    } else if (cfg.contains("zeta")) {
        s.zeta = io::weight_from_json(cfg.at("zeta"));
    }
    s.p = cfg.value("p", c.p);
    if (c.p != 1.0) s.p = c.p;
    s.options.seed = cfg.value("seed", c.seed);
    if (c.seed != 1) s.options.seed = c.seed;
    if (cfg.contains("rel_tol")) s.options.rel_tol = io::number(cfg.at("rel_tol"));
    if (cfg.contains("mc_samples")) s.options.mc_samples = cfg.at("mc_samples").get<std::size_t>();
    return s;
}

json load_config(const Common& c) { return c.config.empty() ? json::object() : io::read_json_file(c.config); }

// ---------------------------------------------------------------------------

int cmd_metric(const Common& c, const std::string& u_path, const std::string& v_path) {
    const json cfg = load_config(c);
    const auto s = settings_from(c, cfg);
    const auto kind = lab::parse_metric(!c.metric.empty() ? c.metric : cfg.value("metric", std::string("delta-zeta-p")));
    const auto u = io::read_function(u_path), v = io::read_function(v_path);
    const auto r = lab::run_metric(kind, u, v, s);
    std::cout << lab::metric_name(kind) << " = " << lab::fmt(r.value) << "  (budget " << lab::fmt(r.budget()) << ": truncation "
              << lab::fmt(r.truncation_bound) << ", quadrature " << lab::fmt(r.quadrature_error) << "; " << to_string(r.method) << ")\n";
    json out = io::result_to_json(r);
    out["metric"] = lab::metric_name(kind);
    if (!c.json_out.empty()) write_file(c.json_out, out.dump(2) + "\n");
    if (!c.csv_out.empty()) {
        write_file(c.csv_out, "metric,value,truncation_bound,quadrature_error,method\n" + lab::metric_name(kind) + "," + lab::fmt(r.value) + "," +
                                  lab::fmt(r.truncation_bound) + "," + lab::fmt(r.quadrature_error) + "," + to_string(r.method) + "\n");
    }
    const double tol = c.tol >= 0 ? c.tol : cfg.value("tol", -1.0);
    if (tol >= 0 && !(r.budget() <= tol * std::max(1.0, std::isfinite(r.value) ? std::abs(r.value) : 1.0))) {
        std::cerr << "error budget " << lab::fmt(r.budget()) << " exceeds --tol " << lab::fmt(tol) << "\n";
        return kToleranceFailure;
    }
    return kOk;
}

int cmd_converge(const Common& c, const std::string& family_flag, const std::string& families_file) {
    const json cfg = load_config(c);
    auto reg = FamilyRegistry::builtin();
    if (cfg.contains("families")) reg.load(cfg.at("families"));
    if (!families_file.empty()) reg.load(io::read_json_file(families_file));
    const std::string name = !family_flag.empty() ? family_flag : cfg.value("family", std::string());
    if (name.empty()) throw ParseError("converge: name a family with --family or \"family\" in --config");
    const auto& fam = reg.get(name);

    std::vector<lab::MetricKind> metrics;
    if (!c.metric.empty()) {
        for (const auto& m : split(c.metric, ',')) metrics.push_back(lab::parse_metric(m));
    } else if (cfg.contains("metrics")) {
        for (const auto& m : cfg.at("metrics")) metrics.push_back(lab::parse_metric(m.get<std::string>()));
    } else {
        metrics = {lab::MetricKind::DeltaZetaP, lab::MetricKind::DeltaZetaH, lab::MetricKind::DeltaConjugate};
    }

    long lo = fam.k_min, hi = fam.k_max;
    if (!c.k_range.empty()) {
        std::tie(lo, hi) = parse_k_range(c.k_range);
    } else if (cfg.contains("k_range")) {
        const auto& kr = cfg.at("k_range");
        if (kr.is_string()) {
            std::tie(lo, hi) = parse_k_range(kr.get<std::string>());
        } else {
            lo = kr.at(0).get<long>();
            hi = kr.at(1).get<long>();
        }
    }
    if (lo < fam.k_min) throw ParseError("--k-range starts below k_min = " + std::to_string(fam.k_min) + " for family " + fam.name);
    if (hi < lo) throw ParseError("--k-range must be nonempty");
    const double tol = c.tol >= 0 ? c.tol : cfg.value("tol", 1e-3);
    const int points = cfg.value("points", 10);

    const auto rep = lab::converge(fam, metrics, k_schedule(lo, hi, points), tol, settings_from(c, cfg));
    std::cout << lab::table(rep);
    if (!c.json_out.empty()) write_file(c.json_out, lab::to_json(rep).dump(2) + "\n");
    if (!c.csv_out.empty()) write_file(c.csv_out, lab::csv(rep));
    return kOk;
}

int cmd_isometry(const Common& c, const std::string& corpus_dir) {
    if (c.config.empty()) throw ParseError("isometry: the spec is required (--config spec.json)");
    json spec_json = io::read_json_file(c.config);
    if (!c.zeta.empty()) spec_json["zeta"] = io::parse_json_text(c.zeta, "--zeta");
    const auto spec = io::isometry_from_json(spec_json);

    std::vector<fs::path> files;
    if (!fs::is_directory(corpus_dir)) throw ParseError("isometry: corpus directory " + corpus_dir + " not found");
    for (const auto& e : fs::directory_iterator(corpus_dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.size() < 2) throw ParseError("isometry: the corpus needs at least two function specs");
    std::vector<ConvexFunction> corpus;
    for (const auto& f : files) corpus.push_back(io::read_function(f));
    std::vector<FunctionPair> pairs;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t j = i + 1; j < corpus.size(); ++j) pairs.emplace_back(corpus[i], corpus[j]);
    }

    const auto membership = check_phi_membership(spec.phi, spec.zeta);
    std::cout << "phi membership: " << membership.label() << " (" << membership.note << ")\n";
    if (membership.verdict != epimetric::Verdict::Member) {
        std::cerr << "refused: phi is not in Phi(zeta)\n";
        return kAdmissibility;
    }
    MetricOptions opt;
    opt.seed = c.seed;
    const auto dist = verify_isometry(spec, pairs, opt);
    const auto meas = measure_preservation_check(spec, corpus, opt);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t j = i + 1; j < corpus.size(); ++j, ++idx) {
            const auto& r = dist.rows[idx];
            std::cout << "pair " << files[i].filename().string() << " " << files[j].filename().string() << ": before " << lab::fmt(r.before)
                      << " after " << lab::fmt(r.after) << " deviation " << lab::fmt(r.deviation) << " budget " << lab::fmt(r.budget)
                      << (r.pass() ? " PASS" : " FAIL") << "\n";
        }
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& r = meas.rows[i];
        std::cout << "measure " << files[i].filename().string() << ": " << lab::fmt(r.before) << " -> " << lab::fmt(r.after) << " deviation "
                  << lab::fmt(r.deviation) << " budget " << lab::fmt(r.budget) << (r.pass() ? " PASS" : " FAIL") << "\n";
    }
    const bool pass = dist.pass() && meas.pass();
    std::cout << "isometry: " << (pass ? "PASS" : "FAIL") << " (max deviation " << lab::fmt(dist.max_deviation()) << ")\n";
    if (!c.json_out.empty()) {
        json out{{"spec", io::isometry_to_json(spec)},
                 {"membership", membership.label()},
                 {"distances", io::report_to_json(dist)},
                 {"measures", io::report_to_json(meas)},
                 {"pass", pass}};
        write_file(c.json_out, out.dump(2) + "\n");
    }
    return pass ? kOk : kToleranceFailure;
}

int cmd_conjugate(const Common& c, const std::string& in_path, const std::string& out_path, bool roundtrip) {
    const auto f = io::read_function(in_path);
    ConjugateOptions opt;
    opt.seed = c.seed;
    const auto res = conjugate(f, opt);
    const std::string text = io::function_to_json(res.function).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
    if (roundtrip) {
        const auto bb = biconjugate(f, opt);
        auto [lo, hi] = detail::domain_box(f);
        lo = lo.cwiseMax(-3.0);  // unbounded domains: compare on [-3, 3]^n
        hi = hi.cwiseMin(3.0);
        double dev = 0.0;
        const int n = f.dim();
        const int m = n == 1 ? 2001 : 101;
        Vec x(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < (n == 1 ? 1 : m); ++j) {
                x[0] = lo[0] + (hi[0] - lo[0]) * i / (m - 1);
                if (n == 2) x[1] = lo[1] + (hi[1] - lo[1]) * j / (m - 1);
                const double a = evaluate(f, x);
                if (std::isfinite(a)) dev = std::max(dev, std::abs(evaluate(bb, x) - a));
            }
        }
        std::cerr << "biconjugate sup deviation: " << lab::fmt(dev) << "\n";
        if (c.tol >= 0 && dev > c.tol) return kToleranceFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epilab: metrics and epi-convergence experiments for coercive convex functions"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", c.config, "JSON config (or isometry spec) file");
        sub->add_option("--zeta", c.zeta, "weight as JSON, e.g. {\"kind\":\"exponential\",\"c\":1}");
        sub->add_option("--metric", c.metric, "metric name (comma-separated list for converge)");
        sub->add_option("--p", c.p, "exponent p >= 1 for delta-zeta-p");
        sub->add_option("--k-range", c.k_range, "index range a..b");
        sub->add_option("--tol", c.tol, "tolerance");
        sub->add_option("--seed", c.seed, "seed for Monte Carlo and sampling");
        sub->add_option("--json", c.json_out, "write a JSON report");
        sub->add_option("--csv", c.csv_out, "write a CSV report");
    };

    std::string u_path, v_path;
    auto* metric = app.add_subcommand("metric", "distance between two function specs");
    add_common(metric);
    metric->add_option("u", u_path, "first function spec")->required();
    metric->add_option("v", v_path, "second function spec")->required();

    std::string family, families_file;
    auto* conv = app.add_subcommand("converge", "run metrics along a sequence family");
    add_common(conv);
    conv->add_option("--family", family, "family name");
    conv->add_option("--families", families_file, "extra family registry (JSON)");

    std::string corpus;
    auto* iso = app.add_subcommand("isometry", "verify an isometry spec on a corpus of function specs");
    add_common(iso);
    iso->add_option("corpus", corpus, "directory of function specs")->required();

    std::string in_path, out_path;
    bool roundtrip = false;
    auto* conj = app.add_subcommand("conjugate", "Legendre-Fenchel conjugate of a function spec");
    add_common(conj);
    conj->add_option("input", in_path, "function spec")->required();
    conj->add_option("-o,--output", out_path, "output file (default: stdout)");
    conj->add_flag("--roundtrip", roundtrip, "report sup |u** - u| on the domain box");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*metric) return cmd_metric(c, u_path, v_path);
        if (*conv) return cmd_converge(c, family, families_file);
        if (*iso) return cmd_isometry(c, corpus);
        return cmd_conjugate(c, in_path, out_path, roundtrip);
    } catch (const AdmissibilityError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kAdmissibility;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::out_of_range& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    }
}
