#include "whitney/averaging.hpp"
#include "whitney/error.hpp"
#include "whitney/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace whitney;

namespace {

Point random_probe(Rng& rng, const DistanceOracle& oracle, std::size_t n) {
    while (true) {
        Point x(n);
        for (double& v : x) v = rng.uniform(-0.2, 1.2);
        const double d = oracle.nearest(x).distance;
        if (d > 1e-3 && d <= 0.5) return x;
    }
}

AveragingPlan plan_for(const Extension& ext, const Point& x, std::size_t samples, std::uint64_t seed) {
    AveragingPlan plan;
    plan.tau = period_at(ext, x);
    plan.samples = samples;
    plan.seed = seed;
    return plan;
}

} // namespace

TEST(PeriodTest, Examples) {
    const Extension ext(WhitneyField(1, 0, {Point{0.0}}, {Jet(Point{0.0}, 0, {1.0})}));
    EXPECT_EQ(period_at(ext, Point{1.5}), 16.0);
    const Extension scaled(WhitneyField(1, 0, {Point{0.0}}, {Jet(Point{0.0}, 0, {1.0})}));
    EXPECT_EQ(period_at(scaled, Point{3.0}), 32.0);
    EXPECT_THROW(period_at(ext, Point{0.0}), Error);
}

TEST(PeriodTest, ScalingDoublesPeriod) {
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        std::vector<Point> E{Point{rng.uniform(), rng.uniform()}, Point{rng.uniform(), rng.uniform()}};
        std::vector<Point> E2 = E;
        for (auto& p : E2)
            for (double& v : p) v *= 2.0;
        const Point x{rng.uniform(), rng.uniform()};
        const Point x2{2 * x[0], 2 * x[1]};
        auto field = [](const std::vector<Point>& pts) {
            std::vector<Jet> jets;
            for (const auto& p : pts) jets.emplace_back(p, 0);
            return WhitneyField(2, 0, pts, jets);
        };
        EXPECT_EQ(period_at(Extension(field(E2)), x2), 2.0 * period_at(Extension(field(E)), x));
    }
}

TEST(PowerOfTwoTest, Ceiling) {
    EXPECT_EQ(power_of_two_ceil(1.0), 1.0);
    EXPECT_EQ(power_of_two_ceil(3.0), 4.0);
    EXPECT_EQ(power_of_two_ceil(0.3), 0.5);
    EXPECT_THROW(power_of_two_ceil(0.0), Error);
}

TEST(SummaryTest, MeanAndStandardError) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = summarize(v);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt((2.25 * 2 + 0.25 * 2) / 3.0 / 4.0));
    EXPECT_EQ(summarize(std::vector<double>{7.0}).std_error, 0.0);
}

TEST(AveragingTest, SingleAnchorConstantInOrigin) {
    Rng rng(2);
    const Point zero{0.0, 0.0};
    Jet p(zero, 1, {0.5, -1.0, 2.0});
    const Extension ext(WhitneyField(2, 1, {zero}, {p}));
    const auto cfg = ExtensionConfig::averaged(2, 1);
    for (int k = 0; k < 10; ++k) {
        const Point x = random_probe(rng, ext.oracle(), 2);
        const auto est = averaged_derivatives(ext, x, {MultiIndex({0, 0}), MultiIndex({1, 0})},
                                              plan_for(ext, x, 64, k), cfg);
        EXPECT_NEAR(est[0].mean, eval_jet(p, x), 1e-12);
        EXPECT_NEAR(est[1].mean, -1.0, 1e-9);
        EXPECT_LE(est[0].std_error, 1e-12);
    }
}

TEST(AveragingTest, DegenerateSampleIsClassical) {
    Rng rng(3);
    const auto f = random_field(3, 1, 6, 5);
    const Extension ext(f);
    auto cfg = ExtensionConfig::averaged(3, 1);
    for (int k = 0; k < 20; ++k) {
        const Point x = random_probe(rng, ext.oracle(), 3);
        AveragingPlan plan;
        plan.origins = {Point(3, 0.0)};
        for (const auto& a : multi_indices(3, 1)) {
            const auto est = averaged_extension(ext, x, a, plan, cfg);
            EXPECT_EQ(est.mean, eval_extension_deriv(ext, x, a, cfg));
            EXPECT_EQ(est.std_error, 0.0);
        }
    }
}

TEST(AveragingTest, SamplesArePeriodicInOrigin) {
    Rng rng(4);
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto f = random_field(n, 1, 5, 40 + n);
        const Extension ext(f);
        const auto cfg = ExtensionConfig::averaged(n, 1);
        for (int k = 0; k < 20; ++k) {
            const Point x = random_probe(rng, ext.oracle(), n);
            const double tau = period_at(ext, x);
            Point b(n);
            for (double& v : b) v = tau * rng.uniform();
            const double base = eval_extension(ext, x, cfg.with_origin(b));
            for (std::size_t i = 0; i < n; ++i) {
                for (double mult : {1.0, 2.0, 4.0}) {
                    Point shifted = b;
                    shifted[i] += mult * tau;
                    const double v = eval_extension(ext, x, cfg.with_origin(shifted));
                    EXPECT_LE(std::abs(v - base), 1e-12 * std::max(1.0, std::abs(base)));
                }
            }
        }
    }
}

TEST(AveragingTest, DoublingPeriodKeepsMean) {
    Rng rng(5);
    const auto f = random_field(2, 1, 5, 9);
    const Extension ext(f);
    const auto cfg = ExtensionConfig::averaged(2, 1);
    for (int k = 0; k < 5; ++k) {
        const Point x = random_probe(rng, ext.oracle(), 2);
        auto plan = plan_for(ext, x, 1024, 11);
        const auto a = averaged_extension(ext, x, MultiIndex({1, 0}), plan, cfg);
        plan.tau *= 2.0;
        plan.seed = 12;
        const auto b = averaged_extension(ext, x, MultiIndex({1, 0}), plan, cfg);
        EXPECT_LE(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.std_error, b.std_error) + 1e-12);
    }
}

TEST(AveragingTest, InterchangeWithCommonRandomNumbers) {
    Rng rng(6);
    for (std::size_t n = 1; n <= 2; ++n) {
        const auto f = random_field(n, 1, 5, 60 + n);
        const Extension ext(f);
        const auto cfg = ExtensionConfig::averaged(n, 1);
        for (int k = 0; k < 5; ++k) {
            const Point x = random_probe(rng, ext.oracle(), n);
            const double dx = ext.oracle().nearest(x).distance;
            const double h = 1e-3 * cfg.t * dx / (4.0 * std::sqrt(static_cast<double>(n)));
            AveragingPlan plan;
            plan.tau = 2.0 * period_at(ext, x);
            plan.samples = 256;
            plan.seed = 7;
            for (std::size_t i = 0; i < n; ++i) {
                auto value_at = [&](double offset) {
                    Point y = x;
                    y[i] += offset;
                    return averaged_extension(ext, y, MultiIndex::zero(n), plan, cfg).mean;
                };
                const double fd = (8.0 * (value_at(h) - value_at(-h)) - (value_at(2 * h) - value_at(-2 * h))) / (12.0 * h);
                const auto d = averaged_extension(ext, x, MultiIndex::unit(n, i), plan, cfg);
                EXPECT_LE(std::abs(fd - d.mean), std::max(1e-5 * std::abs(d.mean), 3.0 * d.std_error));
            }
        }
    }
}

TEST(AveragingTest, DeterministicAcrossJobs) {
    const auto f = random_field(2, 1, 5, 13);
    const Extension ext(f);
    const auto cfg = ExtensionConfig::averaged(2, 1);
    const Point x{0.37, 1.11};
    const auto plan = plan_for(ext, x, 200, 99);
    const auto a = averaged_derivatives(ext, x, multi_indices(2, 1), plan, cfg, 0, 1);
    const auto b = averaged_derivatives(ext, x, multi_indices(2, 1), plan, cfg, 0, 3);
    for (std::size_t r = 0; r < a.size(); ++r) {
        EXPECT_EQ(a[r].mean, b[r].mean);
        EXPECT_EQ(a[r].std_error, b[r].std_error);
    }
}

TEST(AveragingTest, StreamsDifferWithoutCommonNumbers) {
    AveragingPlan plan;
    plan.tau = 4.0;
    plan.samples = 3;
    plan.seed = 1;
    EXPECT_EQ(sample_origin(plan, 0, 2, 0), sample_origin(plan, 0, 2, 0));
    EXPECT_NE(sample_origin(plan, 0, 2, 0), sample_origin(plan, 0, 2, 5));
    EXPECT_NE(sample_origin(plan, 0, 2, 0), sample_origin(plan, 1, 2, 0));
    for (double v : sample_origin(plan, 2, 2, 0)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 4.0);
    }
}

TEST(AveragingTest, Errors) {
    const auto f = random_field(1, 1, 3, 1);
    const Extension ext(f);
    const auto cfg = ExtensionConfig::averaged(1, 1);
    const Point x{f.points()[0][0] + 0.01};
    AveragingPlan plan = plan_for(ext, x, 4, 1);
    plan.samples = 0;
    EXPECT_THROW(averaged_extension(ext, x, MultiIndex({0}), plan, cfg), Error);
    plan.samples = 4;
    plan.tau = 3.0;
    EXPECT_THROW(averaged_extension(ext, x, MultiIndex({0}), plan, cfg), Error);
    plan.tau = period_at(ext, x) / 2;
    EXPECT_THROW(averaged_extension(ext, x, MultiIndex({0}), plan, cfg), Error);
}

TEST(PsiAverageTest, IndicatorClosedForm) {
    const auto e = avg_indicator_power(1, 0.1, 4096, 7);
    EXPECT_LE(std::abs(e.mean - 1.2), 3.0 * e.std_error);
    for (int k = 1; k <= 3; ++k) {
        for (double t : {0.05, 0.2}) {
            const auto est = avg_indicator_power(k, t, 4096, 100 + k);
            const double exact = 1.0 + 2.0 * t * (std::pow(2.0, k) - 1.0);
            EXPECT_LE(std::abs(est.mean - exact), 3.0 * est.std_error) << k << " " << t;
        }
    }
}

TEST(PsiAverageTest, VanishingWidthCountsScales) {
    const DistanceOracle o({Point{0.0, 0.0, 0.0}});
    const Point x{0.3, 0.55, 0.71};
    const double dx = o.nearest(x).distance;
    const double count = static_cast<double>(p_range(dx, 3, 1.0 / 32, 8.0).size());
    const auto e = avg_psi_power(o, x, 2, 512, 3, 1e-12);
    EXPECT_DOUBLE_EQ(e.mean, count * count);
}

TEST(PsiAverageTest, HolderBound) {
    Rng rng(8);
    for (std::size_t n = 1; n <= 4; ++n) {
        const double t = 1.0 / static_cast<double>(n);
        std::vector<Point> E(4, Point(n));
        for (auto& p : E)
            for (double& v : p) v = rng.uniform();
        const DistanceOracle o(E);
        for (int probe = 0; probe < 5; ++probe) {
            Point x(n);
            for (double& v : x) v = rng.uniform();
            const double count = static_cast<double>(p_range(o.nearest(x).distance, n, 1.0 / 32, 8.0).size());
            for (int k = 1; k <= 3; ++k) {
                const auto e = avg_psi_power(o, x, k, 1024, probe, t);
                EXPECT_LE(e.mean, std::pow(count, k) * std::pow(1.0 + t * std::pow(2.0, k + 1), n) + 3.0 * e.std_error);
            }
        }
    }
}

TEST(PsiAverageTest, Errors) {
    const DistanceOracle o({Point{0.0}});
    EXPECT_THROW(avg_psi_power(o, Point{0.5}, 0, 10, 1, 0.1), Error);
    EXPECT_THROW(avg_psi_power(o, Point{0.0}, 1, 10, 1, 0.1), Error);
    EXPECT_THROW(avg_psi_power(o, Point{0.5}, 1, 0, 1, 0.1), Error);
}
