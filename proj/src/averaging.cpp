#include "whitney/averaging.hpp"

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"
#include "whitney/rng.hpp"

#include <cmath>
#include <string>

namespace whitney {

namespace {

void validate_plan(const AveragingPlan& plan) {
    if (plan.origins.empty() && plan.samples == 0) throw Error("averaging", "zero_samples", "N must be at least 1");
    int exponent = 0;
    if (!(plan.tau > 0.0) || std::frexp(plan.tau, &exponent) != 0.5)
        throw Error("averaging", "invalid_period", "tau must be a positive power of two");
}

std::size_t sample_count(const AveragingPlan& plan) {
    return plan.origins.empty() ? plan.samples : plan.origins.size();
}

std::uint64_t stream_for(const AveragingPlan& plan, std::uint64_t point_stream) {
    return plan.common_random_numbers ? 0 : point_stream;
}

// Runs body(sample_index, origin) -> vector of values; returns per-slot samples.
template <typename Body>
std::vector<std::vector<double>> run_samples(const AveragingPlan& plan, std::size_t dim, std::size_t slots,
                                             std::uint64_t stream, unsigned jobs, Body&& body) {
    const std::size_t count = sample_count(plan);
    std::vector<std::vector<double>> per_sample(count);
    parallel_for(count, jobs, [&](std::size_t i) { per_sample[i] = body(sample_origin(plan, i, dim, stream)); });
    std::vector<std::vector<double>> per_slot(slots, std::vector<double>(count));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t s = 0; s < slots; ++s) per_slot[s][i] = per_sample[i][s];
    return per_slot;
}

void check_period(const Extension& ext, std::span<const double> x, const AveragingPlan& plan) {
    if (!plan.origins.empty()) return;
    const double local = period_at(ext, x);
    if (plan.tau < local)
        throw Error("averaging", "invalid_period",
                    "tau = " + std::to_string(plan.tau) + " is below the local period " + std::to_string(local));
}

} // namespace

Estimate summarize(std::span<const double> samples) {
    if (samples.empty()) throw Error("averaging", "zero_samples", "no samples to summarize");
    CompensatedSum sum;
    for (double v : samples) sum.add(v);
    const double n = static_cast<double>(samples.size());
    const double mean = sum.value() / n;
    if (samples.size() == 1) return {mean, 0.0};
    CompensatedSum sq;
    for (double v : samples) sq.add((v - mean) * (v - mean));
    const double variance = sq.value() / (n - 1.0);
    return {mean, std::sqrt(variance / n)};
}

double period_at(const Extension& ext, std::span<const double> x) {
    if (ext.field().find_point(x)) throw Error("averaging", "point_in_E", "period is defined on E^c only");
    const Point zero(x.size(), 0.0);
    return 16.0 * whitney_cube_at(ext.oracle(), x, zero).side();
}

double power_of_two_ceil(double value) {
    if (!(value > 0.0)) throw Error("averaging", "invalid_period", "power of two of a non-positive value");
    int exponent = 0;
    const double mantissa = std::frexp(value, &exponent);
    return mantissa == 0.5 ? value : std::ldexp(1.0, exponent);
}

Point sample_origin(const AveragingPlan& plan, std::size_t i, std::size_t dim, std::uint64_t stream) {
    if (!plan.origins.empty()) {
        const Point& b = plan.origins.at(i);
        if (b.size() != dim) throw Error("averaging", "dimension_mismatch", "explicit origin dimension differs");
        return b;
    }
    Rng rng(plan.seed ^ (stream * 0x9e3779b97f4a7c15ull), static_cast<std::uint64_t>(i));
    Point b(dim);
    for (double& v : b) v = plan.tau * rng.uniform();
    return b;
}

std::vector<Estimate> averaged_derivatives(const Extension& ext, std::span<const double> x,
                                           const std::vector<MultiIndex>& alphas, const AveragingPlan& plan,
                                           const ExtensionConfig& cfg, std::uint64_t point_stream, unsigned jobs) {
    validate_plan(plan);
    const std::size_t n = ext.field().dim();
    int order = 0;
    for (const auto& a : alphas) order = std::max(order, a.order());
    if (const auto idx = ext.field().find_point(x)) {
        // Every origin reproduces the jet on E.
        if (order > 0) throw Error("averaging", "point_in_E", "derivatives on E are limits; evaluate on E^c");
        return std::vector<Estimate>(alphas.size(), Estimate{ext.field().jet(*idx).coeffs()[0], 0.0});
    }
    check_period(ext, x, plan);
    const auto per_slot = run_samples(plan, n, alphas.size(), stream_for(plan, point_stream), jobs, [&](const Point& b) {
        const LocalFrame frame(ext, x, cfg.with_origin(b), order);
        std::vector<double> values;
        values.reserve(alphas.size());
        for (const auto& a : alphas) values.push_back(frame.derivative(a));
        return values;
    });
    std::vector<Estimate> out;
    for (const auto& samples : per_slot) out.push_back(summarize(samples));
    return out;
}

std::vector<Estimate> averaged_abs_derivatives(const Extension& ext, std::span<const double> x,
                                               const std::vector<MultiIndex>& alphas, const AveragingPlan& plan,
                                               const ExtensionConfig& cfg, std::uint64_t point_stream,
                                               unsigned jobs) {
    validate_plan(plan);
    const std::size_t n = ext.field().dim();
    int order = 0;
    for (const auto& a : alphas) order = std::max(order, a.order());
    check_period(ext, x, plan);
    const auto per_slot = run_samples(plan, n, alphas.size(), stream_for(plan, point_stream), jobs, [&](const Point& b) {
        const LocalFrame frame(ext, x, cfg.with_origin(b), order);
        std::vector<double> values;
        for (const auto& a : alphas) values.push_back(std::abs(frame.derivative(a)));
        return values;
    });
    std::vector<Estimate> out;
    for (const auto& samples : per_slot) out.push_back(summarize(samples));
    return out;
}

Estimate averaged_extension(const Extension& ext, std::span<const double> x, const MultiIndex& alpha,
                            const AveragingPlan& plan, const ExtensionConfig& cfg, std::uint64_t point_stream,
                            unsigned jobs) {
    return averaged_derivatives(ext, x, {alpha}, plan, cfg, point_stream, jobs).front();
}

Estimate avg_psi_power(const DistanceOracle& oracle, std::span<const double> x, int k, std::size_t samples,
                       std::uint64_t seed, double t, double c1p, double c2p) {
    if (k < 1) throw Error("averaging", "psi_power", "k must be at least 1");
    if (samples == 0) throw Error("averaging", "zero_samples", "N must be at least 1");
    const double delta_x = oracle.nearest(x).distance;
    if (delta_x == 0.0) throw Error("averaging", "point_in_E", "Psi is defined on E^c only");
    AveragingPlan plan;
    plan.tau = power_of_two_ceil(c2p * delta_x / std::sqrt(static_cast<double>(x.size())));
    plan.samples = samples;
    plan.seed = seed;
    std::vector<double> values(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const Point b = sample_origin(plan, i, x.size());
        values[i] = std::pow(psi_b(oracle, x, b, t, c1p, c2p), k);
    }
    return summarize(values);
}

Estimate avg_indicator_power(int k, double t, std::size_t samples, std::uint64_t seed) {
    if (k < 1) throw Error("averaging", "psi_power", "k must be at least 1");
    if (samples == 0) throw Error("averaging", "zero_samples", "N must be at least 1");
    AveragingPlan plan;
    plan.tau = 1.0;
    plan.samples = samples;
    plan.seed = seed;
    std::vector<double> values(samples);
    for (std::size_t i = 0; i < samples; ++i)
        values[i] = std::pow(1.0 + psi(sample_origin(plan, i, 1)[0], t), k);
    return summarize(values);
}

} // namespace whitney
