#include "whitney/cli.hpp"

#include "whitney/error.hpp"
#include "whitney/harness.hpp"
#include "whitney/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace whitney::cli {

namespace {

// Comma-separated floats; a single value is broadcast to `dim` coordinates.
Point parse_point(const std::string& text, std::size_t dim, const std::string& flag) {
    Point out;
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw Error("cli", "bad_value", flag + " expects comma-separated numbers, got '" + text + "'");
        }
    }
    if (out.size() == 1 && dim > 1) out.assign(dim, out.front());
    if (out.size() != dim)
        throw Error("cli", "dimension_mismatch",
                    flag + " has " + std::to_string(out.size()) + " coordinates, expected " + std::to_string(dim));
    return out;
}

// Writes to the --out path, or to `fallback` when no path was given.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}

    std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }

    void commit() {
        if (path_.empty()) return;
        std::ofstream file(path_, std::ios::binary);
        if (!file) throw Error("cli", "io", "cannot write '" + path_ + "'");
        file << buffer_.str();
    }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ostringstream buffer_;
};

struct ExtendOptions {
    std::string field;
    std::string points;
    std::optional<int> m;
    std::optional<double> t;
    std::string mode = "classical";
    std::optional<std::size_t> samples;
    std::uint64_t seed = 0;
    std::string origin;
    double truncation = 1.0;
    int alpha_max = 0;
    std::string out;
};

int run_extend(const ExtendOptions& o, unsigned jobs, std::ostream& out) {
    const WhitneyField field = load_field(o.field);
    const std::size_t n = field.dim();
    const int m = field.degree();
    if (o.m && *o.m != m)
        throw Error("cli", "degree_mismatch",
                    "--m " + std::to_string(*o.m) + " differs from the field degree " + std::to_string(m));
    if (o.alpha_max < 0 || o.alpha_max > SigmaProfile::kMaxOrder)
        throw Error("cli", "bad_value", "--alpha-max must lie in [0, 8]");
    const bool averaged = o.mode == "averaged";

    ExtensionConfig cfg = averaged ? ExtensionConfig::averaged(n, m) : ExtensionConfig::classical(n, m);
    if (o.t) cfg.t = *o.t;
    cfg.truncation = o.truncation;
    cfg.max_order = std::max(cfg.max_order, o.alpha_max);
    if (!o.origin.empty() && !averaged) cfg.origin = parse_point(o.origin, n, "--origin");
    cfg.validate(n);

    const std::size_t samples = o.samples.value_or(averaged ? 256 : 1);
    if (!averaged && samples != 1) throw Error("cli", "bad_value", "--samples applies to --mode averaged only");
    if (samples == 0) throw Error("averaging", "zero_samples", "N must be at least 1");

    const Extension ext(field);
    const std::vector<Point> points = load_points(o.points);
    for (const Point& x : points)
        if (x.size() != n)
            throw Error("cli", "dimension_mismatch",
                        "point with " + std::to_string(x.size()) + " coordinates, field has n = " + std::to_string(n));
    const auto& alphas = multi_indices(n, o.alpha_max);

    AveragingPlan plan;
    if (averaged) {
        plan.samples = samples;
        plan.seed = o.seed;
        plan.common_random_numbers = true;
        if (!o.origin.empty()) {
            if (samples != 1)
                throw Error("cli", "bad_value", "--origin in averaged mode pins the single sample; use --samples 1");
            plan.origins = {parse_point(o.origin, n, "--origin")};
        } else {
            // one shared period dominating every query point
            double tau = 0.0;
            for (const Point& x : points)
                if (!field.find_point(x)) tau = std::max(tau, period_at(ext, x));
            plan.tau = tau > 0.0 ? power_of_two_ceil(tau) : 1.0;
        }
    }

    std::vector<std::vector<Estimate>> results(points.size());
    auto evaluate = [&](std::size_t k) {
        const Point& x = points[k];
        if (const auto idx = field.find_point(x)) {
            for (const auto& a : alphas) {
                if (a.order() > 0)
                    throw Error("extension", "point_in_E", "derivatives on E are limits; evaluate on E^c");
                results[k].push_back({field.jet(*idx).coeffs()[0], 0.0});
            }
            return;
        }
        if (averaged) {
            results[k] = averaged_derivatives(ext, x, alphas, plan, cfg, k, jobs);
        } else {
            const LocalFrame frame(ext, x, cfg, o.alpha_max);
            for (const auto& a : alphas) results[k].push_back({frame.derivative(a), 0.0});
        }
    };
    if (averaged) {
        for (std::size_t k = 0; k < points.size(); ++k) evaluate(k);
    } else {
        parallel_for(points.size(), jobs, evaluate);
    }

    Output sink(o.out, out);
    std::ostream& csv = sink.stream();
    for (std::size_t i = 0; i < n; ++i) csv << 'x' << (i + 1) << ',';
    csv << "alpha,value";
    if (averaged) csv << ",N,seed,std_error";
    csv << '\n';
    for (std::size_t k = 0; k < points.size(); ++k) {
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            for (double c : points[k]) csv << format_double(c) << ',';
            csv << a << ',' << format_double(results[k][a].mean);
            if (averaged)
                csv << ',' << (plan.origins.empty() ? samples : plan.origins.size()) << ',' << o.seed << ','
                    << format_double(results[k][a].std_error);
            csv << '\n';
        }
    }
    sink.commit();
    return kExitOk;
}

struct RestrictOptions {
    std::string function;
    std::string set;
    int m = 1;
    bool norm = false;
    std::string out;
};

int run_restrict(const RestrictOptions& o, unsigned jobs, std::ostream& out) {
    const std::vector<Point> E = load_points(o.set);
    if (E.empty()) throw Error("fields", "empty_set", "the set file has no points");
    const SmoothTestFunction F = SmoothTestFunction::parse(o.function, E.front().size());
    const WhitneyField f = restrict_function(F, E, o.m);
    Output sink(o.out, out);
    write_field_json(sink.stream(), f);
    sink.commit();
    if (o.norm) out << "cm_norm," << format_double(cm_norm(f, jobs)) << '\n';
    return kExitOk;
}

struct DecomposeOptions {
    std::string set;
    std::string box;
    std::string origin;
    int min_level = -8;
    std::string out;
};

int run_decompose(const DecomposeOptions& o, std::ostream& out, std::ostream& err) {
    const std::vector<Point> E = load_points(o.set);
    if (E.empty()) throw Error("fields", "empty_set", "the set file has no points");
    const std::size_t n = E.front().size();
    const Point corners = parse_point(o.box, 2 * n, "--box");
    const Point lo(corners.begin(), corners.begin() + static_cast<std::ptrdiff_t>(n));
    const Point hi(corners.begin() + static_cast<std::ptrdiff_t>(n), corners.end());
    const Point origin = o.origin.empty() ? Point(n, 0.0) : parse_point(o.origin, n, "--origin");
    const DistanceOracle oracle(E);
    const auto result = enumerate_whitney_cubes(oracle, lo, hi, origin, o.min_level);

    Output sink(o.out, out);
    std::ostream& json = sink.stream();
    json << "[";
    for (std::size_t k = 0; k < result.cubes.size(); ++k) {
        const auto& c = result.cubes[k];
        json << (k ? ",\n" : "\n") << "  { \"level\": " << c.cube.level << ", \"anchor\": [";
        for (std::size_t i = 0; i < n; ++i) json << (i ? ", " : "") << c.cube.anchor[i];
        json << "], \"dist_to_E\": " << format_double(c.dist_to_E) << " }";
    }
    json << "\n]\n";
    sink.commit();
    if (result.truncated > 0)
        err << "note: " << result.truncated << " cells reached level " << o.min_level << " unresolved\n";
    return kExitOk;
}

struct VerifyOptions {
    std::string suite = "all";
    std::optional<std::size_t> n;
    std::optional<int> m;
    std::uint64_t seed = 7;
    std::size_t samples = 4096;
    std::size_t growth_samples = 512;
    std::size_t n_max = 6;
    std::string out;
};

int run_verify(const VerifyOptions& o, unsigned jobs, std::ostream& out) {
    VerifyConfig cfg;
    cfg.n = o.n;
    cfg.m = o.m;
    cfg.seed = o.seed;
    cfg.samples = o.samples;
    cfg.growth_samples = o.growth_samples;
    cfg.growth_n_max = o.n_max;
    cfg.jobs = jobs;
    if (cfg.n && (*cfg.n < 1 || *cfg.n > 8)) throw Error("cli", "bad_value", "--n must lie in [1, 8] for verify");
    if (cfg.m && (*cfg.m < 0 || *cfg.m > 4)) throw Error("cli", "bad_value", "--m must lie in [0, 4] for verify");
    const SuiteResult result = verify_suite(o.suite, cfg);
    Output sink(o.out, out);
    result.write(sink.stream());
    sink.commit();
    return result.passed() ? kExitOk : kExitGateFailed;
}

struct BenchOptions {
    std::string study = "growth";
    std::size_t n_min = 1;
    std::size_t n_max = 6;
    int m = 1;
    std::string family = "adversarial";
    std::string function = "sines";
    std::size_t probes = 16;
    std::size_t samples = 512;
    std::uint64_t seed = 7;
    bool runtime = false;
    std::string gnuplot;
    std::string out;
};

int run_bench(const BenchOptions& o, unsigned jobs, std::ostream& out, std::ostream& err) {
    ExperimentReport report;
    bool passed = true;
    std::string summary;
    if (o.study == "growth") {
        NormGrowthConfig g;
        g.n_min = o.n_min;
        g.n_max = o.n_max;
        g.m = o.m;
        g.family = parse_field_family(o.family);
        g.probes = o.probes;
        g.samples = o.samples;
        g.seed = o.seed;
        g.jobs = jobs;
        g.record_runtime = o.runtime;
        report = norm_growth_study(g);
        if (o.n_max > o.n_min) {
            const double averaged = report.exponent("averaged", "all", kAllOrders);
            const double classical = report.exponent("classical", "corner", kAllOrders);
            const double gate = 2.5 * o.m + kGrowthSlack;
            passed = averaged <= gate && classical > averaged;
            summary = "averaged slope " + format_double(averaged) + " (gate " + format_double(gate) +
                      "), classical corner slope " + format_double(classical);
        }
    } else if (o.study == "restriction") {
        RestrictionConfig r;
        r.function = o.function;
        r.m = o.m;
        r.n_min = o.n_min;
        r.n_max = o.n_max;
        r.seed = o.seed;
        r.jobs = jobs;
        r.record_runtime = o.runtime;
        report = restriction_norm_study(r);
        const double slope = report.rows.front().fitted_exponent;
        if (o.n_max > o.n_min) {
            passed = slope <= o.m + kRestrictionSlack;
            summary = "restriction slope " + format_double(slope) + " (gate " +
                      format_double(o.m + kRestrictionSlack) + ")";
        }
    } else {
        throw Error("cli", "bad_value", "--study must be growth or restriction");
    }
    Output sink(o.out, out);
    report.write_csv(sink.stream());
    sink.commit();
    if (!o.gnuplot.empty()) report.write_gnuplot(o.gnuplot, o.study);
    if (!summary.empty()) err << (passed ? "PASS " : "FAIL ") << summary << '\n';
    return passed ? kExitOk : kExitGateFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Whitney extension operators: classical and origin-averaged", "whitney"};
    app.fallthrough();
    app.require_subcommand(1);
    unsigned jobs = 1;
    app.add_option("--jobs", jobs, "worker threads (0 = hardware concurrency)");

    ExtendOptions ext;
    auto* extend = app.add_subcommand("extend", "evaluate F and its derivatives at points");
    extend->add_option("--field", ext.field, "field JSON")->required();
    extend->add_option("--points", ext.points, "query points CSV")->required();
    extend->add_option("--m", ext.m, "jet degree (must match the field)");
    extend->add_option("--t", ext.t, "cutoff width; default 1/8 classical, 1/n averaged");
    extend->add_option("--mode", ext.mode)->check(CLI::IsMember({"classical", "averaged"}));
    extend->add_option("--samples", ext.samples, "Monte Carlo origins (averaged)");
    extend->add_option("--seed", ext.seed);
    extend->add_option("--origin", ext.origin, "grid origin b, comma separated");
    extend->add_option("--truncation", ext.truncation, "numerator keeps cubes with dist(Q, E) <= this");
    extend->add_option("--alpha-max", ext.alpha_max, "emit every |alpha| <= this");
    extend->add_option("--out", ext.out, "output CSV (default stdout)");

    RestrictOptions res;
    auto* restrict_cmd = app.add_subcommand("restrict", "Taylor jets of a built-in function on a point set");
    restrict_cmd->add_option("--function", res.function, "constant:c | monomial:g1,.. | sines[:scale[:freq]] | gaussian:w")
        ->required();
    restrict_cmd->add_option("--set", res.set, "points CSV")->required();
    restrict_cmd->add_option("--m", res.m)->required();
    restrict_cmd->add_flag("--norm", res.norm, "print the C^m(E) norm of the result");
    restrict_cmd->add_option("--out", res.out, "output field JSON (default stdout)");

    DecomposeOptions dec;
    auto* decompose = app.add_subcommand("decompose", "Whitney cubes meeting a box (n <= 3)");
    decompose->add_option("--set", dec.set, "points CSV")->required();
    decompose->add_option("--box", dec.box, "lo1,..,lon,hi1,..,hin")->required();
    decompose->add_option("--origin", dec.origin);
    decompose->add_option("--min-level", dec.min_level);
    decompose->add_option("--out", dec.out, "output JSON (default stdout)");

    VerifyOptions ver;
    auto* verify = app.add_subcommand("verify", "run invariant suites");
    verify->add_option("--suite", ver.suite)->check(CLI::IsMember(suite_names()));
    verify->add_option("--n", ver.n);
    verify->add_option("--m", ver.m);
    verify->add_option("--seed", ver.seed);
    verify->add_option("--samples", ver.samples);
    verify->add_option("--growth-samples", ver.growth_samples);
    verify->add_option("--n-max", ver.n_max, "largest n of the growth studies");
    verify->add_option("--out", ver.out);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench-norms", "norm growth or restriction norm study");
    bench_cmd->add_option("--study", bench.study)->check(CLI::IsMember({"growth", "restriction"}));
    bench_cmd->add_option("--n-min", bench.n_min);
    bench_cmd->add_option("--n-max", bench.n_max);
    bench_cmd->add_option("--m", bench.m);
    bench_cmd->add_option("--field", bench.family, "adversarial | random | both | constant");
    bench_cmd->add_option("--function", bench.function, "restriction study function");
    bench_cmd->add_option("--probes", bench.probes);
    bench_cmd->add_option("--samples", bench.samples);
    bench_cmd->add_option("--seed", bench.seed);
    bench_cmd->add_flag("--runtime", bench.runtime, "add the runtime column");
    bench_cmd->add_option("--gnuplot", bench.gnuplot, "directory for per-curve data files");
    bench_cmd->add_option("--out", bench.out, "report CSV (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "E:cli:usage: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (*extend) return run_extend(ext, jobs, out);
        if (*restrict_cmd) return run_restrict(res, jobs, out);
        if (*decompose) return run_decompose(dec, out, err);
        if (*verify) return run_verify(ver, jobs, out);
        if (*bench_cmd) return run_bench(bench, jobs, out, err);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "E:cli:internal: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace whitney::cli
