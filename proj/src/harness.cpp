#include "whitney/harness.hpp"

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"
#include "whitney/rng.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace whitney {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw Error("harness", "bad_csv", "not a number: '" + s + "'");
    return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
    Int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw Error("harness", "bad_csv", "not an integer: '" + s + "'");
    return v;
}

std::string order_label(int order) { return order == kAllOrders ? "all" : std::to_string(order); }

const char* kColumns = "n,m,t,operator,alpha_order,probe_kind,sup_value,fitted_exponent,N,seed";

// Unit vector, uniform on the sphere by rejection from the cube.
Point random_direction(Rng& rng, std::size_t n) {
    while (true) {
        Point v(n);
        double norm2 = 0.0;
        for (double& c : v) {
            c = rng.uniform(-1.0, 1.0);
            norm2 += c * c;
        }
        if (norm2 > 1e-4 && norm2 <= 1.0) {
            const double norm = std::sqrt(norm2);
            for (double& c : v) c /= norm;
            return v;
        }
    }
}

// Uniform in [-0.2, 1.2]^n with 0 < delta <= max_delta.
Point random_probe(Rng& rng, const DistanceOracle& oracle, std::size_t n, double max_delta) {
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        Point x(n);
        for (double& v : x) v = rng.uniform(-0.2, 1.2);
        const double d = oracle.nearest(x).distance;
        if (d > 1e-6 && d <= max_delta) return x;
    }
    throw Error("harness", "probe_budget", "no probe found with delta <= " + format_double(max_delta));
}

template <typename G>
double central_difference(G&& g, const Point& x, std::size_t axis, double h) {
    auto at = [&](double offset) {
        Point y = x;
        y[axis] += offset;
        return g(y);
    };
    return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

std::vector<std::size_t> dims(const VerifyConfig& cfg, std::size_t lo, std::size_t hi) {
    if (cfg.n) return {*cfg.n};
    std::vector<std::size_t> out;
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    return out;
}

std::vector<int> degrees(const VerifyConfig& cfg, int lo, int hi) {
    if (cfg.m) return {*cfg.m};
    std::vector<int> out;
    for (int m = lo; m <= hi; ++m) out.push_back(m);
    return out;
}

std::string count_detail(std::size_t count, const std::string& what) {
    return std::to_string(count) + " " + what;
}

} // namespace

bool operator==(const ReportRow& a, const ReportRow& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.n == b.n && a.m == b.m && a.t == b.t && a.op == b.op && a.alpha_order == b.alpha_order &&
           a.probe_kind == b.probe_kind && same(a.sup_value, b.sup_value) &&
           same(a.fitted_exponent, b.fitted_exponent) && a.samples == b.samples && a.seed == b.seed &&
           same(a.runtime, b.runtime);
}

void ExperimentReport::write_csv(std::ostream& out) const {
    for (const auto& note : notes) out << "# " << note << '\n';
    out << kColumns << (include_runtime ? ",runtime" : "") << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << r.m << ',' << format_double(r.t) << ',' << r.op << ',' << order_label(r.alpha_order)
            << ',' << r.probe_kind << ',' << format_double(r.sup_value) << ',' << format_double(r.fitted_exponent)
            << ',' << r.samples << ',' << r.seed;
        if (include_runtime) out << ',' << format_double(r.runtime);
        out << '\n';
    }
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

ExperimentReport ExperimentReport::read_csv(std::istream& in) {
    ExperimentReport report;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen && line.rfind("# ", 0) == 0) {
            report.notes.push_back(line.substr(2));
            continue;
        }
        if (!header_seen) {
            if (line == kColumns) {
                report.include_runtime = false;
            } else if (line == std::string(kColumns) + ",runtime") {
                report.include_runtime = true;
            } else {
                throw Error("harness", "bad_csv", "unexpected column line: '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        const std::size_t expected = report.include_runtime ? 11 : 10;
        if (cells.size() != expected)
            throw Error("harness", "bad_csv", "row has " + std::to_string(cells.size()) + " cells: '" + line + "'");
        ReportRow r;
        r.n = parse_int<std::size_t>(cells[0]);
        r.m = parse_int<int>(cells[1]);
        r.t = parse_double(cells[2]);
        r.op = cells[3];
        r.alpha_order = cells[4] == "all" ? kAllOrders : parse_int<int>(cells[4]);
        r.probe_kind = cells[5];
        r.sup_value = parse_double(cells[6]);
        r.fitted_exponent = parse_double(cells[7]);
        r.samples = parse_int<std::size_t>(cells[8]);
        r.seed = parse_int<std::uint64_t>(cells[9]);
        if (report.include_runtime) r.runtime = parse_double(cells[10]);
        report.rows.push_back(std::move(r));
    }
    if (!header_seen) throw Error("harness", "bad_csv", "missing column line");
    return report;
}

ExperimentReport ExperimentReport::from_csv(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

std::vector<ReportRow> ExperimentReport::series(const std::string& op, const std::string& probe_kind,
                                                int alpha_order) const {
    std::vector<ReportRow> out;
    for (const auto& r : rows)
        if (r.op == op && r.probe_kind == probe_kind && r.alpha_order == alpha_order) out.push_back(r);
    return out;
}

double ExperimentReport::exponent(const std::string& op, const std::string& probe_kind, int alpha_order) const {
    const auto s = series(op, probe_kind, alpha_order);
    if (s.empty())
        throw Error("harness", "missing_series", op + "/" + probe_kind + "/" + order_label(alpha_order));
    return s.front().fitted_exponent;
}

std::vector<std::string> ExperimentReport::write_gnuplot(const std::string& directory,
                                                         const std::string& prefix) const {
    std::map<std::string, std::vector<const ReportRow*>> curves;
    for (const auto& r : rows)
        curves[prefix + "_" + r.op + "_" + r.probe_kind + "_" + order_label(r.alpha_order) + ".dat"].push_back(&r);
    std::filesystem::create_directories(directory);
    std::vector<std::string> written;
    for (const auto& [name, curve] : curves) {
        const std::string path = (std::filesystem::path(directory) / name).string();
        std::ofstream out(path);
        if (!out) throw Error("harness", "io", "cannot write " + path);
        out << "# n sup_value\n";
        for (const ReportRow* r : curve) out << r->n << ' ' << format_double(r->sup_value) << '\n';
        written.push_back(path);
    }
    return written;
}

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error("harness", "fit", "x and y differ in length");
    if (xs.size() < 2) throw Error("harness", "fit", "need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw Error("harness", "fit", "log-log fit needs positive data");
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ys[i]) - my);
    }
    if (sxx == 0.0) throw Error("harness", "fit", "need two distinct x values");
    return sxy / sxx;
}

FieldFamily parse_field_family(const std::string& name) {
    if (name == "adversarial") return FieldFamily::adversarial;
    if (name == "random") return FieldFamily::random;
    if (name == "both") return FieldFamily::both;
    if (name == "constant") return FieldFamily::constant;
    throw Error("harness", "unknown_family", "field family '" + name + "'");
}

namespace {

struct NamedField {
    WhitneyField field;
    std::optional<Point> hole;
};

std::vector<NamedField> growth_fields(FieldFamily family, std::size_t n, int m, std::uint64_t seed) {
    std::vector<NamedField> out;
    if (family == FieldFamily::adversarial || family == FieldFamily::both)
        out.push_back({adversarial_field(n, m, seed), adversarial_hole(n, seed)});
    if (family == FieldFamily::random || family == FieldFamily::both)
        out.push_back({random_field(n, m, 8, mix(seed, 1)), std::nullopt});
    if (family == FieldFamily::constant) {
        const WhitneyField base = random_field(n, m, 8, mix(seed, 2));
        std::vector<Jet> jets;
        for (const Point& p : base.points()) {
            Jet j(p, m);
            j.coeffs()[0] = 1.0;
            jets.push_back(std::move(j));
        }
        out.push_back({WhitneyField(n, m, base.points(), std::move(jets)), std::nullopt});
    }
    return out;
}

struct Probe {
    Point x;
    bool corner = false;
};

// Interior probes: half near the midpoint of two points of E at most 1 apart
// (where neighbouring jets blend), half along a ray from a point of E (toward
// the hole for adversarial fields); all with 0 < delta <= 1/2. Corner probes
// sit within t s of a vertex of the standard-origin Whitney cube of an
// interior probe.
std::vector<Probe> growth_probes(const Extension& ext, const std::optional<Point>& hole, std::size_t count,
                                 double corner_t, std::uint64_t seed) {
    const std::size_t n = ext.field().dim();
    const DistanceOracle& oracle = ext.oracle();
    const auto& E = ext.field().points();
    Rng rng(seed, 0x70726f62u);
    std::vector<Probe> interior;
    for (std::size_t attempt = 0; interior.size() < count; ++attempt) {
        if (attempt > 10000 * (count + 1)) throw Error("harness", "probe_budget", "interior probes not found");
        const Point& a = E[rng.below(E.size())];
        Point x(n);
        if (interior.size() % 2 == 0 && E.size() > 1) {
            const Point& b = E[rng.below(E.size())];
            double gap = 0.0;
            for (std::size_t i = 0; i < n; ++i) gap += (a[i] - b[i]) * (a[i] - b[i]);
            if (gap == 0.0 || gap > 1.0) continue;
            const Point jitter = random_direction(rng, n);
            const double r = rng.uniform(0.0, 0.1);
            for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 * (a[i] + b[i]) + r * jitter[i];
        } else {
            Point dir;
            if (hole && rng.uniform() < 0.5) {
                dir = *hole;
                double norm = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dir[i] -= a[i];
                    norm += dir[i] * dir[i];
                }
                norm = std::sqrt(norm);
                for (double& c : dir) c /= norm;
            } else {
                dir = random_direction(rng, n);
            }
            const double r = rng.uniform(1.0 / 16.0, 0.5);
            for (std::size_t i = 0; i < n; ++i) x[i] = a[i] + r * dir[i];
        }
        const double d = oracle.nearest(x).distance;
        if (d > 1e-9 && d <= 0.5) interior.push_back({std::move(x), false});
    }
    std::vector<Probe> out = interior;
    const Point zero(n, 0.0);
    for (const Probe& p : interior) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 1000) throw Error("harness", "probe_budget", "corner probe not found");
            const DyadicCube q = whitney_cube_at(oracle, p.x, zero);
            const double s = q.side();
            const Point c = q.corner();
            Point x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = c[i] + s * static_cast<double>(rng.below(2)) + rng.uniform(-corner_t, corner_t) * s;
            if (oracle.nearest(x).distance > 1e-9) {
                out.push_back({std::move(x), true});
                break;
            }
        }
    }
    return out;
}

} // namespace

ExperimentReport norm_growth_study(const NormGrowthConfig& cfg) {
    if (cfg.n_min < 1 || cfg.n_max < cfg.n_min)
        throw Error("harness", "bad_range", "dimension range must satisfy 1 <= n_min <= n_max");
    if (cfg.n_max > 12)
        throw Error("harness", "resource_cap", "2^n candidate enumeration is capped at n <= 12");
    if (cfg.m < 0 || cfg.m > 6) throw Error("harness", "bad_degree", "m outside [0, 6]");
    if (cfg.probes == 0 || cfg.samples == 0) throw Error("harness", "bad_config", "probes and N must be positive");

    ExperimentReport report;
    report.include_runtime = cfg.record_runtime;
    report.notes.push_back("norm growth study: m=" + std::to_string(cfg.m) + " n=" + std::to_string(cfg.n_min) +
                           ".." + std::to_string(cfg.n_max) + " probes=" + std::to_string(cfg.probes) +
                           " N=" + std::to_string(cfg.samples) + " seed=" + std::to_string(cfg.seed));
    report.notes.push_back("classical: t=1/8 origin 0; averaged: default averaged t, common random numbers");
    for (const auto& [criterion, id] : criterion_map())
        report.notes.push_back("criterion " + std::to_string(criterion) + " -> " + id);

    const std::vector<std::string> ops{"classical", "averaged"};
    const std::vector<std::string> kinds{"interior", "corner", "all"};
    std::vector<int> orders;
    for (int k = 0; k <= cfg.m; ++k) orders.push_back(k);
    orders.push_back(kAllOrders);

    for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
        const auto classical = ExtensionConfig::classical(n, cfg.m);
        const auto averaged = ExtensionConfig::averaged(n, cfg.m);
        const auto& alphas = multi_indices(n, cfg.m);
        const std::uint64_t n_seed = mix(cfg.seed, n);

        struct Task {
            std::size_t field;
            Probe probe;
        };
        std::vector<Extension> exts;
        std::vector<Task> tasks;
        const auto fields = growth_fields(cfg.family, n, cfg.m, n_seed);
        for (std::size_t f = 0; f < fields.size(); ++f) exts.emplace_back(fields[f].field);
        for (std::size_t f = 0; f < fields.size(); ++f)
            for (auto& p : growth_probes(exts[f], fields[f].hole, cfg.probes, classical.t, mix(n_seed, 10 + f)))
                tasks.push_back({f, std::move(p)});

        // per task: |d^alpha F| for every alpha, for each operator
        std::vector<std::vector<double>> classical_values(tasks.size()), averaged_values(tasks.size());
        double classical_time = 0.0, averaged_time = 0.0;
        auto start = Clock::now();
        parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
            const LocalFrame frame(exts[tasks[i].field], tasks[i].probe.x, classical, cfg.m);
            for (const auto& a : alphas) classical_values[i].push_back(std::abs(frame.derivative(a)));
        });
        classical_time = seconds_since(start);
        start = Clock::now();
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            AveragingPlan plan;
            plan.tau = period_at(exts[tasks[i].field], tasks[i].probe.x);
            plan.samples = cfg.samples;
            plan.seed = n_seed;
            plan.common_random_numbers = true;
            for (const auto& e : averaged_derivatives(exts[tasks[i].field], tasks[i].probe.x, alphas, plan, averaged,
                                                      0, cfg.jobs))
                averaged_values[i].push_back(std::abs(e.mean));
        }
        averaged_time = seconds_since(start);

        for (const auto& op : ops) {
            const auto& values = op == "classical" ? classical_values : averaged_values;
            for (const auto& kind : kinds) {
                for (int order : orders) {
                    double sup = 0.0;
                    for (std::size_t i = 0; i < tasks.size(); ++i) {
                        if (kind == "interior" && tasks[i].probe.corner) continue;
                        if (kind == "corner" && !tasks[i].probe.corner) continue;
                        for (std::size_t a = 0; a < alphas.size(); ++a)
                            if (order == kAllOrders || alphas[a].order() == order) sup = std::max(sup, values[i][a]);
                    }
                    ReportRow row;
                    row.n = n;
                    row.m = cfg.m;
                    row.t = op == "classical" ? classical.t : averaged.t;
                    row.op = op;
                    row.alpha_order = order;
                    row.probe_kind = kind;
                    row.sup_value = sup;
                    row.samples = op == "classical" ? 1 : cfg.samples;
                    row.seed = cfg.seed;
                    row.runtime = op == "classical" ? classical_time : averaged_time;
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }

    // one slope per curve across n
    for (const auto& op : ops) {
        for (const auto& kind : kinds) {
            for (int order : orders) {
                std::vector<double> xs, ys;
                for (const auto& r : report.rows) {
                    if (r.op != op || r.probe_kind != kind || r.alpha_order != order) continue;
                    xs.push_back(static_cast<double>(r.n));
                    ys.push_back(r.sup_value);
                }
                double slope = std::numeric_limits<double>::quiet_NaN();
                const bool positive = std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; });
                if (xs.size() >= 2 && positive) slope = fit_loglog_slope(xs, ys);
                for (auto& r : report.rows)
                    if (r.op == op && r.probe_kind == kind && r.alpha_order == order) r.fitted_exponent = slope;
            }
        }
    }
    return report;
}

namespace {

SmoothTestFunction restriction_function(const std::string& spec, std::size_t n) {
    if (spec == "linear") return SmoothTestFunction::monomial(MultiIndex::unit(n, 0));
    return SmoothTestFunction::parse(spec, n);
}

} // namespace

ExperimentReport restriction_norm_study(const RestrictionConfig& cfg) {
    if (cfg.n_min < 1 || cfg.n_max < cfg.n_min || cfg.n_max > kMaxDimension)
        throw Error("harness", "bad_range", "dimension range must satisfy 1 <= n_min <= n_max <= 16");
    if (cfg.points < 2 || cfg.sets == 0) throw Error("harness", "bad_config", "need >= 2 points and >= 1 set");

    ExperimentReport report;
    report.include_runtime = cfg.record_runtime;
    report.notes.push_back("restriction norm study: F=" + cfg.function + " m=" + std::to_string(cfg.m) +
                           " |E|=" + std::to_string(cfg.points) + " sets=" + std::to_string(cfg.sets) +
                           " seed=" + std::to_string(cfg.seed));
    std::vector<double> xs, ys;
    for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
        const auto start = Clock::now();
        const SmoothTestFunction F = restriction_function(cfg.function, n);
        double sup = 0.0;
        for (std::size_t s = 0; s < cfg.sets; ++s) {
            Rng rng(mix(cfg.seed, n), s);
            std::vector<Point> E(cfg.points, Point(n));
            for (auto& p : E)
                for (double& c : p) c = rng.uniform();
            sup = std::max(sup, cm_norm(restrict_function(F, E, cfg.m), cfg.jobs));
        }
        ReportRow row;
        row.n = n;
        row.m = cfg.m;
        row.t = 0.0;
        row.op = "restriction";
        row.alpha_order = kAllOrders;
        row.probe_kind = "pairs";
        row.sup_value = sup;
        row.samples = cfg.sets;
        row.seed = cfg.seed;
        row.runtime = seconds_since(start);
        report.rows.push_back(row);
        xs.push_back(static_cast<double>(n));
        ys.push_back(sup);
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (xs.size() >= 2 && std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; }))
        slope = fit_loglog_slope(xs, ys);
    for (auto& r : report.rows) r.fitted_exponent = slope;
    return report;
}

// ---------------------------------------------------------------------------
// verify suites

namespace {

using CheckFn = std::function<CheckResult(const VerifyConfig&)>;

struct CheckEntry {
    std::string suite;
    std::string name;
    int criterion;
    CheckFn run;
};

CheckResult make_result(bool passed, double measured, double tolerance, std::string detail) {
    CheckResult r;
    r.passed = passed;
    r.measured = measured;
    r.tolerance = tolerance;
    r.detail = std::move(detail);
    return r;
}

// --- jets

CheckResult check_reciprocal_factorials(const VerifyConfig& cfg) {
    std::size_t mismatches = 0, cases = 0;
    for (std::size_t n : dims(cfg, 1, 8)) {
        for (int r = 0; r <= 6; ++r) {
            std::int64_t num = 1, den = 1;
            for (int k = 0; k < r; ++k) num *= static_cast<std::int64_t>(n);
            for (int k = 2; k <= r; ++k) den *= k;
            const std::int64_t g = std::gcd(num, den);
            const Rational got = sum_reciprocal_factorials(static_cast<int>(n), r);
            ++cases;
            if (got.num != num / g || got.den != den / g) ++mismatches;
        }
    }
    const Rational example = sum_reciprocal_factorials(3, 2);
    if (example.num != 9 || example.den != 2) ++mismatches;
    return make_result(mismatches == 0, static_cast<double>(mismatches), 0.0,
                       count_detail(cases, "(n, r) cases, 0 mismatches allowed"));
}

CheckResult check_grlex_roundtrip(const VerifyConfig& cfg) {
    std::size_t failures = 0, total = 0;
    for (std::size_t n : dims(cfg, 1, 8)) {
        const auto& all = multi_indices(n, 6);
        if (all.size() != multi_index_count(n, 6)) ++failures;
        for (std::size_t rank = 0; rank < all.size(); ++rank) {
            ++total;
            if (grlex_rank(all[rank]) != rank || !(grlex_unrank(n, rank) == all[rank])) ++failures;
            if (rank > 0 && all[rank].order() < all[rank - 1].order()) ++failures;
        }
    }
    return make_result(failures == 0, static_cast<double>(failures), 0.0, count_detail(total, "multi-indices"));
}

CheckResult check_recenter(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x6a657473u);
    double worst = 0.0;
    for (std::size_t n : dims(cfg, 1, 6)) {
        for (int m : degrees(cfg, 0, 4)) {
            for (int trial = 0; trial < 20; ++trial) {
                Point base(n), other(n), x(n);
                for (std::size_t i = 0; i < n; ++i) {
                    base[i] = rng.uniform(-1.0, 1.0);
                    other[i] = rng.uniform(-1.0, 1.0);
                    x[i] = rng.uniform(-1.0, 1.0);
                }
                Jet p(base, m);
                for (double& c : p.coeffs()) c = rng.uniform(-1.0, 1.0);
                const Jet q = recenter_jet(p, other);
                for (const auto& a : multi_indices(n, m)) {
                    const double lhs = jet_derivative_at(p, a, x);
                    const double rhs = jet_derivative_at(q, a, x);
                    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
                }
            }
        }
    }
    return make_result(worst <= 1e-10, worst, 1e-10, "recentred jets agree in every derivative");
}

// --- cutoff

CheckResult check_sigma_shape(const VerifyConfig&) {
    std::size_t violations = 0;
    double prev = sigma_deriv(-1.1, 0);
    for (int i = 1; i <= 12000; ++i) {
        const double x = -1.1 + 1.2 * i / 12000.0;
        const double v = sigma_deriv(x, 0);
        if (v < prev) ++violations;
        if (x <= -1.0 && v != 0.0) ++violations;
        if (x >= 0.0 && v != 1.0) ++violations;
        prev = v;
    }
    return make_result(violations == 0, static_cast<double>(violations), 0.0,
                       "step is monotone, 0 left of -1, 1 right of 0 on a 12000-point grid");
}

CheckResult check_lattice_estimate(const VerifyConfig&) {
    std::size_t violations = 0, total = 0;
    double worst = 0.0;
    for (double t : {0.05, 0.125, 0.2}) {
        const CutoffParams p(t);
        for (int j = 0; j <= SigmaProfile::kMaxOrder; ++j) {
            const double c = lattice_sum_constant(j);
            for (int i = 0; i < 1000; ++i) {
                const double x = -1.0 + 2.0 * (i + 0.5) / 1000.0;
                const double lhs = lattice_theta_sum(Point{x}, MultiIndex({j}), p);
                const double bound = c * std::pow(t, -j) * (psi(x, t) + 1);
                worst = std::max(worst, lhs / bound);
                ++total;
                if (lhs > bound * (1.0 + 1e-12)) ++violations;
            }
        }
    }
    return make_result(violations == 0, worst, 1.0,
                       count_detail(total, "grid points; measured = max lattice sum / bound"));
}

CheckResult check_product_structure(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x63757466u);
    double worst = 0.0;
    for (std::size_t n : dims(cfg, 1, 4)) {
        const CutoffParams p(0.125);
        for (int trial = 0; trial < 200; ++trial) {
            Point x(n);
            for (double& v : x) v = rng.uniform(-0.3, 1.3);
            for (const auto& a : multi_indices(n, 3)) {
                double product = 1.0;
                for (std::size_t i = 0; i < n; ++i) product *= theta1_deriv(x[i], a[i], p);
                const double got = theta_n_deriv(x, a, p);
                worst = std::max(worst, std::abs(got - product) / std::max(1.0, std::abs(product)));
            }
        }
    }
    return make_result(worst <= 1e-14, worst, 1e-14, "cube cutoff equals the product of interval cutoffs");
}

// --- cubes

CheckResult check_canonical_line(const VerifyConfig&) {
    const Point zero{0.0};
    const DistanceOracle oracle(std::vector<Point>{zero});
    std::vector<std::string> failures;
    const DyadicCube q = whitney_cube_at(oracle, Point{1.5}, zero);
    if (q.level != 0 || q.corner()[0] != 1.0) failures.push_back("x=1.5 cube is not [1,2]");
    if (!is_whitney(oracle, q)) failures.push_back("[1,2] is not maximal admissible");
    const DyadicCube small = whitney_cube_at(oracle, Point{0.1}, zero);
    if (small.level != -4) failures.push_back("x=0.1 cube level " + std::to_string(small.level));
    const auto covering = cubes_covering_support(oracle, Point{0.99}, zero, 0.125);
    bool has_left = false, has_right = false;
    for (const auto& c : covering) {
        if (c.cube.level == -1 && c.cube.anchor[0] == 1) has_left = true;
        if (c.cube.level == 0 && c.cube.anchor[0] == 1) has_right = true;
    }
    if (!has_left || !has_right) failures.push_back("x=0.99 is not covered by [1/2,1]* and [1,2]*");
    const auto decomposition = enumerate_whitney_cubes(oracle, Point{0.0}, Point{4.0}, zero, -6);
    for (const auto& c : decomposition.cubes)
        if (!is_whitney(oracle, c.cube)) failures.push_back("enumerated cube is not Whitney");
    std::string detail = "E={0} in R";
    for (const auto& f : failures) detail += "; " + f;
    return make_result(failures.empty(), static_cast<double>(failures.size()), 0.0, detail);
}

CheckResult check_cube_geometry(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x67656f6du);
    std::size_t violations = 0, pairs = 0, cubes_seen = 0;
    const auto ns = dims(cfg, 1, 6);
    std::vector<Extension> exts;
    for (std::size_t n : ns) exts.emplace_back(random_field(n, 0, 8, mix(cfg.seed, 100 + n)));
    const double sqrt_tol = 1e-12;
    for (std::size_t k = 0; k < 1000; ++k) {
        const std::size_t slot = k % ns.size();
        const std::size_t n = ns[slot];
        const DistanceOracle& oracle = exts[slot].oracle();
        const Point x = random_probe(rng, oracle, n, 2.0);
        Point b(n);
        for (double& v : b) v = rng.uniform();
        ++pairs;
        const double d = oracle.nearest(x).distance;
        const DyadicCube q = whitney_cube_at(oracle, x, b);
        const double dist = oracle.nearest_to_cube(q).distance;
        if (!(q.diameter() <= dist && dist <= 4.0 * q.diameter())) ++violations;
        try {
            const auto covering = cubes_covering_support(oracle, x, b, 0.125);
            for (const auto& a : covering) {
                ++cubes_seen;
                const double da = a.dist_to_E;
                if (!(a.cube.diameter() <= da && da <= 4.0 * a.cube.diameter())) ++violations;
                const double ratio = d / (a.cube.side() * std::sqrt(static_cast<double>(n)));
                if (ratio < 0.5 - sqrt_tol || ratio > 5.5 + sqrt_tol) ++violations;
                for (const auto& c : covering) {
                    const double r = a.cube.side() / c.cube.side();
                    if (r < 0.25 || r > 4.0) ++violations;
                }
            }
        } catch (const Error&) {
            ++violations;
        }
    }
    return make_result(violations == 0, static_cast<double>(violations), 0.0,
                       count_detail(pairs, "(x, b) pairs, ") + std::to_string(cubes_seen) + " covering cubes");
}

CheckResult check_origin_period(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x6f726967u);
    std::size_t violations = 0, total = 0;
    for (std::size_t n : dims(cfg, 1, 4)) {
        const Extension ext(random_field(n, 0, 6, mix(cfg.seed, 200 + n)));
        for (int k = 0; k < 50; ++k) {
            const Point x = random_probe(rng, ext.oracle(), n, 0.5);
            const double tau = period_at(ext, x);
            Point b(n);
            for (double& v : b) v = rng.uniform(0.0, tau);
            const DyadicCube q = whitney_cube_at(ext.oracle(), x, b);
            for (std::size_t i = 0; i < n; ++i) {
                Point shifted = b;
                shifted[i] += tau;
                const DyadicCube r = whitney_cube_at(ext.oracle(), x, shifted);
                ++total;
                const auto steps = static_cast<std::int64_t>(std::llround(tau / q.side()));
                if (r.level != q.level || r.anchor[i] != q.anchor[i] - steps) ++violations;
            }
        }
    }
    return make_result(violations == 0, static_cast<double>(violations), 0.0,
                       count_detail(total, "shifted origins select the translated cube"));
}

// --- extension

CheckResult check_partition_of_unity(const VerifyConfig& cfg) {
    double worst = 0.0;
    std::size_t probes = 0;
    for (std::size_t n : dims(cfg, 1, 6)) {
        const Extension ext(random_field(n, 1, 8, mix(cfg.seed, 300 + n)));
        Rng rng(cfg.seed, 300 + n);
        std::vector<Point> xs, bs;
        std::vector<double> ts;
        for (int k = 0; k < 1000; ++k) {
            xs.push_back(random_probe(rng, ext.oracle(), n, 2.0));
            Point b(n, 0.0);
            if (k % 2 == 1)
                for (double& v : b) v = rng.uniform();
            bs.push_back(std::move(b));
            ts.push_back(k % 3 == 0 ? 0.125 : rng.uniform(0.01, 0.24));
        }
        std::vector<double> err(xs.size());
        parallel_for(xs.size(), cfg.jobs, [&](std::size_t k) {
            auto c = ExtensionConfig::classical(n, 1).with_origin(bs[k]);
            c.t = ts[k];
            err[k] = std::abs(LocalFrame(ext, xs[k], c, 0).partition_sum() - 1.0);
        });
        for (double e : err) worst = std::max(worst, e);
        probes += xs.size();
    }
    return make_result(worst <= kPartitionTolerance, worst, kPartitionTolerance,
                       count_detail(probes, "probes, random origins and widths"));
}

CheckResult check_derivative_oracle(const VerifyConfig& cfg) {
    double worst_first = 0.0, worst_high = 0.0;
    std::size_t comparisons = 0;
    for (std::size_t n : dims(cfg, 1, 4)) {
        for (int m : degrees(cfg, 0, 2)) {
            const Extension ext(random_field(n, m, 6, mix(cfg.seed, 400 + 10 * n + m)));
            const auto c = ExtensionConfig::classical(n, m);
            Rng rng(cfg.seed, 400 + 10 * n + m);
            std::vector<Point> xs;
            for (int k = 0; k < 100; ++k) xs.push_back(random_probe(rng, ext.oracle(), n, 0.5));
            std::vector<double> first(xs.size(), 0.0), high(xs.size(), 0.0);
            std::vector<std::size_t> counts(xs.size(), 0);
            parallel_for(xs.size(), cfg.jobs, [&](std::size_t k) {
                const Point& x = xs[k];
                const double dx = ext.oracle().nearest(x).distance;
                const double h = 3e-4 * c.t * dx / (4.0 * std::sqrt(static_cast<double>(n)));
                for (const auto& a : multi_indices(n, m + 1)) {
                    if (a.order() == 0) continue;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (a[i] == 0) continue;
                        const MultiIndex lower = a - MultiIndex::unit(n, i);
                        const double fd = central_difference(
                            [&](const Point& y) { return eval_extension_deriv(ext, y, lower, c); }, x, i, h);
                        const double exact = eval_extension_deriv(ext, x, a, c);
                        const double err = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
                        ++counts[k];
                        if (a.order() == 1)
                            first[k] = std::max(first[k], err);
                        else
                            high[k] = std::max(high[k], err);
                    }
                }
            });
            for (std::size_t k = 0; k < xs.size(); ++k) {
                worst_first = std::max(worst_first, first[k]);
                worst_high = std::max(worst_high, high[k]);
                comparisons += counts[k];
            }
        }
    }
    const bool ok = worst_first <= kFirstOrderFdTolerance && worst_high <= kHighOrderFdTolerance;
    return make_result(ok, worst_first, kFirstOrderFdTolerance,
                       count_detail(comparisons, "comparisons; order>=2 max error ") + format_double(worst_high) +
                           " (tol " + format_double(kHighOrderFdTolerance) + ")");
}

// Sum of |summands| of the Leibniz expansion of d^alpha F at the frame point:
// the magnitude that rounding acts on.
double leibniz_magnitude(const Extension& ext, const LocalFrame& frame, const MultiIndex& alpha, double truncation) {
    const std::size_t n = alpha.dim();
    const auto& cubes = frame.cubes();
    double total = 0.0;
    for (const auto& beta : multi_indices(n, alpha.order())) {
        if (!beta.dominated_by(alpha)) continue;
        double coefficient = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            coefficient *= static_cast<double>(binomial(static_cast<std::uint64_t>(alpha[i]),
                                                        static_cast<std::uint64_t>(beta[i])));
        const auto weights = frame.normalized_derivatives(beta);
        for (std::size_t k = 0; k < cubes.size(); ++k) {
            if (cubes[k].dist_to_E > truncation) continue;
            const Jet& p = ext.field().jet(cubes[k].anchor_index);
            total += coefficient * std::abs(weights[k]) * std::abs(jet_derivative_at(p, alpha - beta, frame.point()));
        }
    }
    return total;
}

// Gate on the points of each sequence where a is the nearest point of E (the
// approach regime); the ratio to |x - a|^(m - |alpha|) over the points with
// |x - a| <= 2 delta(x) is reported alongside.
CheckResult check_jet_reproduction(const VerifyConfig& cfg) {
    constexpr double kRoundoffFloor = 1e-12;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;
    std::size_t sequences = 0, fitted = 0, unfitted = 0;
    for (std::size_t n : dims(cfg, 1, 4)) {
        for (int m : degrees(cfg, 1, 2)) {
            const Extension ext(random_field(n, m, 4u << n, mix(cfg.seed, 500 + 10 * n + m)));
            const auto c = ExtensionConfig::classical(n, m);
            const auto& E = ext.field().points();
            Rng rng(cfg.seed, 500 + 10 * n + m);
            for (std::size_t a_index = 0; a_index < E.size(); ++a_index) {
                const Point& a = E[a_index];
                const Jet& pa = ext.field().jet(a_index);
                const Point dir = random_direction(rng, n);
                ++sequences;
                for (const auto& alpha : multi_indices(n, m)) {
                    std::vector<double> rs, ys;
                    for (int j = 3; j <= 12; ++j) {
                        const double r = std::ldexp(1.0, -j);
                        Point x(n);
                        for (std::size_t i = 0; i < n; ++i) x[i] = a[i] + r * dir[i];
                        const LocalFrame frame(ext, x, c, alpha.order());
                        const double residual = std::abs(frame.derivative(alpha) - jet_derivative_at(pa, alpha, x));
                        const Nearest near = ext.oracle().nearest(x);
                        if (r <= 2.0 * near.distance)
                            worst_ratio = std::max(worst_ratio, residual / std::pow(r, m - alpha.order()));
                        if (near.index != a_index) continue;
                        const double floor = kRoundoffFloor * leibniz_magnitude(ext, frame, alpha, c.truncation);
                        if (residual > floor) {
                            rs.push_back(r);
                            ys.push_back(residual);
                        }
                    }
                    if (rs.size() < 2) {  // at most one point above roundoff: nothing to fit
                        ++unfitted;
                        continue;
                    }
                    ++fitted;
                    const double slope = fit_loglog_slope(rs, ys);
                    worst_margin = std::min(worst_margin, slope - static_cast<double>(m - alpha.order()));
                }
            }
        }
    }
    const bool ok = sequences > 0 && worst_margin >= -kApproachSlack;
    return make_result(ok, worst_margin, -kApproachSlack,
                       count_detail(sequences, "approach sequences, ") + std::to_string(fitted) + " fitted curves, " +
                           std::to_string(unfitted) + " within roundoff; measured = min(slope - (m - |alpha|)); " +
                           "max |d(F - P_a)| / |x - a|^(m - |alpha|) where |x - a| <= 2 delta = " + format_double(worst_ratio));
}

// --- averaging

CheckResult check_psi_bound(const VerifyConfig& cfg) {
    std::size_t violations = 0, estimates = 0;
    double worst_ratio = 0.0;
    for (std::size_t n : dims(cfg, 1, 8)) {
        const double t = 1.0 / static_cast<double>(n);
        const Extension ext(random_field(n, 0, 8, mix(cfg.seed, 600 + n)));
        Rng rng(cfg.seed, 600 + n);
        for (int probe = 0; probe < 5; ++probe) {
            const Point x = random_probe(rng, ext.oracle(), n, 0.5);
            const double d = ext.oracle().nearest(x).distance;
            const double count = static_cast<double>(p_range(d, n, 1.0 / 32.0, 8.0).size());
            for (int k = 1; k <= 3; ++k) {
                const Estimate e = avg_psi_power(ext.oracle(), x, k, cfg.samples, mix(cfg.seed, 610 + probe), t);
                const double bound = std::pow(count, k) * std::pow(1.0 + t * std::ldexp(1.0, k + 1), n);
                ++estimates;
                worst_ratio = std::max(worst_ratio, (e.mean - kSigmaAllowance * e.std_error) / bound);
                if (e.mean > bound + kSigmaAllowance * e.std_error) ++violations;
            }
        }
    }
    // one-dimensional building block
    std::string closed;
    for (int k = 1; k <= 3; ++k) {
        const Estimate e = avg_indicator_power(k, 0.1, cfg.samples, mix(cfg.seed, 620 + k));
        const double exact = 1.0 + 2.0 * 0.1 * (std::ldexp(1.0, k) - 1.0);
        ++estimates;
        if (std::abs(e.mean - exact) > kSigmaAllowance * e.std_error) ++violations;
        closed += " k=" + std::to_string(k) + ":" + format_double(e.mean) + "~" + format_double(exact);
    }
    return make_result(violations == 0, worst_ratio, 1.0,
                       count_detail(estimates, "estimates; measured = max (mean - 3 se) / bound;") + closed);
}

CheckResult check_periodicity(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x70657269u);
    double worst = 0.0;
    std::size_t comparisons = 0;
    const auto ns = dims(cfg, 1, 4);
    const auto ms = degrees(cfg, 0, 2);
    for (std::size_t k = 0; k < 100; ++k) {
        const std::size_t n = ns[k % ns.size()];
        const int m = ms[(k / ns.size()) % ms.size()];
        const Extension ext(random_field(n, m, 6, mix(cfg.seed, 700 + 10 * n + m)));
        const Point x = random_probe(rng, ext.oracle(), n, 0.5);
        const double tau = period_at(ext, x);
        Point b(n);
        for (double& v : b) v = rng.uniform(0.0, tau);
        const auto base_cfg = ExtensionConfig::averaged(n, m);
        const double base = eval_extension(ext, x, base_cfg.with_origin(b));
        for (std::size_t i = 0; i < n; ++i) {
            Point shifted = b;
            shifted[i] += tau;
            const double v = eval_extension(ext, x, base_cfg.with_origin(shifted));
            const double scale = std::max(std::abs(base), std::abs(v));
            const double diff = std::abs(v - base);
            worst = std::max(worst, scale == 0.0 ? diff : diff / scale);
            ++comparisons;
        }
    }
    return make_result(worst <= kPeriodicityTolerance, worst, kPeriodicityTolerance,
                       count_detail(comparisons, "shifted-origin comparisons over 100 (x, b) pairs"));
}

CheckResult check_interchange(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x696e7463u);
    const auto ns = dims(cfg, 1, 3);
    const auto ms = degrees(cfg, 1, 2);
    double worst = 0.0;  // max |fd - mean| / allowance
    std::size_t comparisons = 0;
    for (std::size_t k = 0; k < 50; ++k) {
        const std::size_t n = ns[k % ns.size()];
        const int m = ms[(k / ns.size()) % ms.size()];
        const Extension ext(random_field(n, m, 6, mix(cfg.seed, 800 + 10 * n + m)));
        const auto c = ExtensionConfig::averaged(n, m);
        const Point x = random_probe(rng, ext.oracle(), n, 0.5);
        const double dx = ext.oracle().nearest(x).distance;
        const double h = 1e-3 * c.t * dx / (4.0 * std::sqrt(static_cast<double>(n)));
        AveragingPlan plan;
        plan.samples = cfg.samples;
        plan.seed = mix(cfg.seed, 810 + k);
        plan.common_random_numbers = true;
        double tau = period_at(ext, x);
        for (std::size_t i = 0; i < n; ++i) {
            for (double off : {-2 * h, -h, h, 2 * h}) {
                Point y = x;
                y[i] += off;
                tau = std::max(tau, period_at(ext, y));
            }
        }
        plan.tau = tau;
        std::vector<MultiIndex> units;
        for (std::size_t i = 0; i < n; ++i) units.push_back(MultiIndex::unit(n, i));
        const auto derivs = averaged_derivatives(ext, x, units, plan, c, 0, cfg.jobs);
        const MultiIndex zero = MultiIndex::zero(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double fd = central_difference(
                [&](const Point& y) { return averaged_extension(ext, y, zero, plan, c, 0, cfg.jobs).mean; }, x, i,
                h);
            const double allowance =
                std::max(kInterchangeRelative * std::abs(derivs[i].mean), kSigmaAllowance * derivs[i].std_error);
            const double diff = std::abs(fd - derivs[i].mean);
            worst = std::max(worst, allowance > 0.0 ? diff / allowance : (diff == 0.0 ? 0.0 : INFINITY));
            ++comparisons;
        }
    }
    return make_result(worst <= 1.0, worst, 1.0,
                       count_detail(comparisons, "comparisons on 50 probes; measured = max |fd - mean| / allowance"));
}

CheckResult check_doubling_tau(const VerifyConfig& cfg) {
    Rng rng(cfg.seed, 0x646f7562u);
    double worst = 0.0;
    std::size_t comparisons = 0;
    for (std::size_t n : dims(cfg, 1, 3)) {
        for (int m : degrees(cfg, 1, 1)) {
            const Extension ext(random_field(n, m, 6, mix(cfg.seed, 900 + n)));
            const auto c = ExtensionConfig::averaged(n, m);
            for (int k = 0; k < 5; ++k) {
                const Point x = random_probe(rng, ext.oracle(), n, 0.5);
                AveragingPlan plan;
                plan.samples = std::min<std::size_t>(cfg.samples, 1024);
                plan.seed = mix(cfg.seed, 910 + k);
                plan.tau = period_at(ext, x);
                const Estimate a = averaged_extension(ext, x, MultiIndex::zero(n), plan, c, 0, cfg.jobs);
                plan.tau *= 2.0;
                plan.seed = mix(plan.seed, 1);
                const Estimate b = averaged_extension(ext, x, MultiIndex::zero(n), plan, c, 0, cfg.jobs);
                const double joint = std::hypot(a.std_error, b.std_error);
                const double diff = std::abs(a.mean - b.mean);
                worst = std::max(worst, joint > 0.0 ? diff / joint : (diff <= 1e-12 ? 0.0 : INFINITY));
                ++comparisons;
            }
        }
    }
    return make_result(worst <= kSigmaAllowance, worst, kSigmaAllowance,
                       count_detail(comparisons, "comparisons; measured = max |diff| / joint standard error"));
}

// --- growth

int growth_degree(const VerifyConfig& cfg) { return cfg.m ? std::max(*cfg.m, 1) : 1; }

CheckResult check_norm_growth(const VerifyConfig& cfg) {
    NormGrowthConfig g;
    g.n_min = 1;
    g.n_max = std::max<std::size_t>(cfg.growth_n_max, 2);
    g.m = growth_degree(cfg);
    g.family = FieldFamily::adversarial;
    g.probes = 24;
    g.samples = cfg.growth_samples;
    g.seed = cfg.seed;
    g.jobs = cfg.jobs;
    const auto report = norm_growth_study(g);
    const double averaged = report.exponent("averaged", "all", kAllOrders);
    const double classical = report.exponent("classical", "corner", kAllOrders);
    const double gate = 2.5 * g.m + kGrowthSlack;
    const bool ok = averaged <= gate && classical > averaged;
    return make_result(ok, averaged, gate,
                       "averaged slope " + format_double(averaged) + " (gate " + format_double(gate) +
                           "), classical corner slope " + format_double(classical) + " (must exceed averaged)");
}

CheckResult check_restriction_norm(const VerifyConfig& cfg) {
    double worst_margin = -std::numeric_limits<double>::infinity();
    std::string detail;
    for (int m : degrees(cfg, 1, 2)) {
        for (const std::string f : {"constant:1", "linear", "sines"}) {
            RestrictionConfig r;
            r.function = f;
            r.m = m;
            r.n_max = std::max<std::size_t>(cfg.growth_n_max, 2);
            r.seed = cfg.seed;
            r.jobs = cfg.jobs;
            const auto report = restriction_norm_study(r);
            const double slope = report.rows.front().fitted_exponent;
            worst_margin = std::max(worst_margin, slope - m);
            detail += " " + f + "/m=" + std::to_string(m) + ":" + format_double(slope);
        }
    }
    return make_result(worst_margin <= kRestrictionSlack, worst_margin, kRestrictionSlack,
                       "measured = max(slope - m);" + detail);
}

CheckResult check_report_determinism(const VerifyConfig& cfg) {
    NormGrowthConfig g;
    g.n_min = 1;
    g.n_max = 3;
    g.m = growth_degree(cfg);
    g.probes = 3;
    g.samples = 64;
    g.seed = cfg.seed;
    g.jobs = 1;
    const std::string first = norm_growth_study(g).to_csv();
    const std::string second = norm_growth_study(g).to_csv();
    g.jobs = 2;
    const std::string threaded = norm_growth_study(g).to_csv();
    RestrictionConfig r;
    r.n_max = 3;
    r.seed = cfg.seed;
    const std::string restricted = restriction_norm_study(r).to_csv();
    std::size_t differences = (first != second) + (first != threaded) +
                              (restricted != restriction_norm_study(r).to_csv());
    const ExperimentReport parsed = ExperimentReport::from_csv(first);
    if (parsed.to_csv() != first) ++differences;
    return make_result(differences == 0, static_cast<double>(differences), 0.0,
                       "repeat, threaded and CSV round-trip reports compared byte for byte");
}

const std::vector<CheckEntry>& registry() {
    static const std::vector<CheckEntry> entries{
        {"jets", "reciprocal_factorials", 1, check_reciprocal_factorials},
        {"jets", "grlex_roundtrip", 0, check_grlex_roundtrip},
        {"jets", "recenter", 0, check_recenter},
        {"cutoff", "sigma_shape", 0, check_sigma_shape},
        {"cutoff", "lattice_estimate", 0, check_lattice_estimate},
        {"cutoff", "product_structure", 0, check_product_structure},
        {"cubes", "canonical_line", 0, check_canonical_line},
        {"cubes", "geometry", 3, check_cube_geometry},
        {"cubes", "origin_period", 0, check_origin_period},
        {"extension", "partition_of_unity", 2, check_partition_of_unity},
        {"extension", "derivative_oracle", 4, check_derivative_oracle},
        {"extension", "jet_reproduction", 5, check_jet_reproduction},
        {"averaging", "psi_bound", 6, check_psi_bound},
        {"averaging", "periodicity", 7, check_periodicity},
        {"averaging", "interchange", 8, check_interchange},
        {"averaging", "doubling_tau", 0, check_doubling_tau},
        {"growth", "norm_growth", 9, check_norm_growth},
        {"growth", "restriction_norm", 10, check_restriction_norm},
        {"growth", "report_determinism", 11, check_report_determinism},
    };
    return entries;
}

CheckResult run_entry(const CheckEntry& entry, const VerifyConfig& cfg) {
    const auto start = Clock::now();
    CheckResult r;
    try {
        r = entry.run(cfg);
    } catch (const Error& e) {
        r = make_result(false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what());
    }
    r.suite = entry.suite;
    r.name = entry.name;
    r.criterion = entry.criterion;
    r.seconds = seconds_since(start);
    return r;
}

} // namespace

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void SuiteResult::write(std::ostream& out) const {
    for (const auto& [criterion, id] : criterion_map())
        out << "# criterion " << criterion << " -> " << id << '\n';
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.id() << " measured=" << format_double(c.measured)
            << " tolerance=" << format_double(c.tolerance);
        if (c.criterion > 0) out << " criterion=" << c.criterion;
        out << " seconds=" << format_double(std::round(c.seconds * 100.0) / 100.0) << " | " << c.detail << '\n';
    }
    out << (passed() ? "PASS" : "FAIL") << " " << checks.size() << " checks\n";
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"jets", "cutoff", "cubes", "extension", "averaging", "growth", "all"};
    return names;
}

std::vector<std::pair<int, std::string>> criterion_map() {
    std::vector<std::pair<int, std::string>> out;
    for (const auto& e : registry())
        if (e.criterion > 0) out.emplace_back(e.criterion, e.suite + "." + e.name);
    std::sort(out.begin(), out.end());
    return out;
}

SuiteResult verify_suite(const std::string& name, const VerifyConfig& cfg) {
    if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
        throw Error("harness", "unknown_suite", "no suite named '" + name + "'");
    SuiteResult result;
    for (const auto& entry : registry())
        if (name == "all" || entry.suite == name) result.checks.push_back(run_entry(entry, cfg));
    return result;
}

CheckResult run_check(const std::string& id, const VerifyConfig& cfg) {
    for (const auto& entry : registry())
        if (entry.suite + "." + entry.name == id) return run_entry(entry, cfg);
    throw Error("harness", "unknown_check", "no check named '" + id + "'");
}

} // namespace whitney
