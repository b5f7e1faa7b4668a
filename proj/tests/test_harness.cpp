#include "whitney/error.hpp"
#include "whitney/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace whitney;

namespace {

std::string check_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.check();
    }
    return "";
}

ExperimentReport sample_report(bool runtime) {
    ExperimentReport r;
    r.include_runtime = runtime;
    r.notes = {"first note", "second, with comma"};
    for (std::size_t n = 1; n <= 3; ++n) {
        ReportRow row;
        row.n = n;
        row.m = 2;
        row.t = 0.125;
        row.op = "classical";
        row.alpha_order = n == 3 ? kAllOrders : static_cast<int>(n);
        row.probe_kind = "corner";
        row.sup_value = 0.1 * static_cast<double>(n) + 1.0 / 3.0;
        row.samples = 512;
        row.seed = 18446744073709551615ull;
        row.runtime = runtime ? 0.25 * static_cast<double>(n) : 0.0;
        r.rows.push_back(row);
    }
    r.rows[0].fitted_exponent = 1.75;
    return r;
}

} // namespace

TEST(Report, CsvRoundTripKeepsEveryField) {
    for (bool runtime : {false, true}) {
        const ExperimentReport r = sample_report(runtime);
        const std::string text = r.to_csv();
        const ExperimentReport back = ExperimentReport::from_csv(text);
        EXPECT_EQ(back.notes, r.notes);
        EXPECT_EQ(back.include_runtime, runtime);
        ASSERT_EQ(back.rows.size(), r.rows.size());
        for (std::size_t i = 0; i < r.rows.size(); ++i) EXPECT_TRUE(back.rows[i] == r.rows[i]) << i;
        EXPECT_TRUE(std::isnan(back.rows[1].fitted_exponent));
        EXPECT_EQ(back.to_csv(), text);
    }
}

TEST(Report, RuntimeColumnOnlyWhenRequested) {
    const std::string plain = sample_report(false).to_csv();
    const std::string timed = sample_report(true).to_csv();
    EXPECT_NE(plain.find("n,m,t,operator,alpha_order,probe_kind,sup_value,fitted_exponent,N,seed\n"),
              std::string::npos);
    EXPECT_EQ(plain.find("runtime"), std::string::npos);
    EXPECT_NE(timed.find(",seed,runtime\n"), std::string::npos);
    EXPECT_NE(plain.find(",all,"), std::string::npos);
}

TEST(Report, MalformedCsvIsRejected) {
    EXPECT_EQ(check_of([] { ExperimentReport::from_csv("# only a note\n"); }), "bad_csv");
    EXPECT_EQ(check_of([] { ExperimentReport::from_csv("a,b\n1,2\n"); }), "bad_csv");
    const std::string good = sample_report(false).to_csv();
    EXPECT_EQ(check_of([&] { ExperimentReport::from_csv(good + "1,2,3\n"); }), "bad_csv");
}

TEST(Report, SeriesAndExponentLookup) {
    const ExperimentReport r = sample_report(false);
    EXPECT_EQ(r.series("classical", "corner", 1).size(), 1u);
    EXPECT_EQ(r.series("averaged", "corner", 1).size(), 0u);
    EXPECT_DOUBLE_EQ(r.exponent("classical", "corner", 1), 1.75);
    EXPECT_EQ(check_of([&] { r.exponent("averaged", "corner", 1); }), "missing_series");
}

TEST(Report, GnuplotFilesPerCurve) {
    const auto dir = std::filesystem::temp_directory_path() / "whitney_gnuplot_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto paths = sample_report(false).write_gnuplot(dir.string(), "g");
    EXPECT_EQ(paths.size(), 3u);
    for (const auto& p : paths) {
        ASSERT_TRUE(std::filesystem::exists(p)) << p;
        std::ifstream in(p);
        std::string first;
        std::getline(in, first);
        EXPECT_EQ(first.rfind("#", 0), 0u);
    }
    std::filesystem::remove_all(dir);
}

TEST(Fit, RecoversExactPowerLaw) {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, 2.5));
    EXPECT_NEAR(fit_loglog_slope(xs, ys), 2.5, 1e-12);
}

TEST(Fit, RejectsDegenerateInput) {
    const std::vector<double> one{1.0}, two{1.0, 2.0}, same{2.0, 2.0}, neg{1.0, -1.0}, three{1.0, 2.0, 3.0};
    EXPECT_EQ(check_of([&] { fit_loglog_slope(one, one); }), "fit");
    EXPECT_EQ(check_of([&] { fit_loglog_slope(two, three); }), "fit");
    EXPECT_EQ(check_of([&] { fit_loglog_slope(same, two); }), "fit");
    EXPECT_EQ(check_of([&] { fit_loglog_slope(two, neg); }), "fit");
}

TEST(Family, ParsesNames) {
    EXPECT_EQ(parse_field_family("adversarial"), FieldFamily::adversarial);
    EXPECT_EQ(parse_field_family("random"), FieldFamily::random);
    EXPECT_EQ(parse_field_family("both"), FieldFamily::both);
    EXPECT_EQ(parse_field_family("constant"), FieldFamily::constant);
    EXPECT_EQ(check_of([] { parse_field_family("odd"); }), "unknown_family");
}

TEST(NormGrowth, ConstantFieldOfDegreeZeroHasUnitSup) {
    NormGrowthConfig cfg;
    cfg.n_min = 1;
    cfg.n_max = 3;
    cfg.m = 0;
    cfg.family = FieldFamily::constant;
    cfg.probes = 6;
    cfg.samples = 16;
    const ExperimentReport r = norm_growth_study(cfg);
    ASSERT_FALSE(r.rows.empty());
    for (const auto& row : r.rows) EXPECT_NEAR(row.sup_value, 1.0, 1e-12) << row.op << ' ' << row.probe_kind;
    EXPECT_NEAR(r.exponent("classical", "all", kAllOrders), 0.0, 1e-9);
}

TEST(NormGrowth, RowsCoverOperatorsKindsAndOrders) {
    NormGrowthConfig cfg;
    cfg.n_max = 2;
    cfg.m = 1;
    cfg.family = FieldFamily::random;
    cfg.probes = 4;
    cfg.samples = 8;
    const ExperimentReport r = norm_growth_study(cfg);
    for (const char* op : {"classical", "averaged"})
        for (const char* kind : {"interior", "corner", "all"})
            for (int order : {0, 1, kAllOrders}) EXPECT_EQ(r.series(op, kind, order).size(), 2u);
    for (const auto& row : r.rows) {
        EXPECT_GT(row.sup_value, 0.0);
        EXPECT_EQ(row.samples, row.op == "classical" ? 1u : 8u);
    }
}

TEST(NormGrowth, DeterministicAcrossRunsAndThreads) {
    NormGrowthConfig cfg;
    cfg.n_max = 3;
    cfg.probes = 4;
    cfg.samples = 16;
    const std::string a = norm_growth_study(cfg).to_csv();
    EXPECT_EQ(norm_growth_study(cfg).to_csv(), a);
    cfg.jobs = 3;
    EXPECT_EQ(norm_growth_study(cfg).to_csv(), a);
}

TEST(NormGrowth, ConfigLimits) {
    NormGrowthConfig cfg;
    cfg.n_max = 13;
    EXPECT_EQ(check_of([&] { norm_growth_study(cfg); }), "resource_cap");
    cfg.n_max = 2;
    cfg.n_min = 3;
    EXPECT_EQ(check_of([&] { norm_growth_study(cfg); }), "bad_range");
    cfg.n_min = 1;
    cfg.probes = 0;
    EXPECT_EQ(check_of([&] { norm_growth_study(cfg); }), "bad_config");
}

TEST(Restriction, ConstantAndLinearHaveUnitNorm) {
    for (const char* f : {"constant:1", "linear"}) {
        RestrictionConfig cfg;
        cfg.function = f;
        cfg.n_max = 4;
        cfg.points = 6;
        cfg.sets = 2;
        const ExperimentReport r = restriction_norm_study(cfg);
        ASSERT_EQ(r.rows.size(), 4u);
        for (const auto& row : r.rows) {
            EXPECT_NEAR(row.sup_value, 1.0, 1e-9) << f << " n=" << row.n;
            EXPECT_EQ(row.op, "restriction");
        }
    }
}

TEST(Restriction, DeterministicAcrossThreads) {
    RestrictionConfig cfg;
    cfg.n_max = 3;
    cfg.points = 8;
    const std::string a = restriction_norm_study(cfg).to_csv();
    cfg.jobs = 2;
    EXPECT_EQ(restriction_norm_study(cfg).to_csv(), a);
}

TEST(Verify, SuiteNamesAndErrors) {
    const auto& names = suite_names();
    ASSERT_FALSE(names.empty());
    EXPECT_EQ(names.back(), "all");
    EXPECT_EQ(check_of([] { verify_suite("nope", VerifyConfig{}); }), "unknown_suite");
    EXPECT_EQ(check_of([] { run_check("cubes.nope", VerifyConfig{}); }), "unknown_check");
}

TEST(Verify, CriterionMapCoversElevenGates) {
    std::set<int> criteria;
    for (const auto& [k, id] : criterion_map()) {
        criteria.insert(k);
        EXPECT_EQ(run_check(id, VerifyConfig{}).criterion == k, true) << id;
        if (k >= 4) break;  // the rest are exercised by the acceptance driver
    }
    std::set<int> all;
    for (const auto& [k, id] : criterion_map()) all.insert(k);
    EXPECT_EQ(all.size(), 11u);
    EXPECT_EQ(*all.begin(), 1);
    EXPECT_EQ(*all.rbegin(), 11);
}

TEST(Verify, CubesSuitePassesAndWrites) {
    const SuiteResult r = verify_suite("cubes", VerifyConfig{});
    EXPECT_TRUE(r.passed());
    ASSERT_FALSE(r.checks.empty());
    for (const auto& c : r.checks) EXPECT_EQ(c.suite, "cubes");
    std::ostringstream out;
    r.write(out);
    const std::string text = out.str();
    EXPECT_NE(text.find("PASS cubes."), std::string::npos);
    EXPECT_NE(text.find("PASS " + std::to_string(r.checks.size()) + " checks"), std::string::npos);
}

TEST(Verify, NarrowedJetsSuiteIsDeterministic) {
    VerifyConfig cfg;
    cfg.n = 2;
    cfg.m = 2;
    const SuiteResult a = verify_suite("jets", cfg);
    const SuiteResult b = verify_suite("jets", cfg);
    EXPECT_TRUE(a.passed());
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        EXPECT_EQ(a.checks[i].passed, b.checks[i].passed);
        EXPECT_EQ(a.checks[i].detail, b.checks[i].detail);
    }
}
