#pragma once

#include "whitney/extension.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace whitney {

/// Monte Carlo plan for averaging over origins b in [0, tau)^n.
struct AveragingPlan {
    double tau = 1.0;                   ///< power of two; must dominate the local period
    std::size_t samples = 1;            ///< N
    std::uint64_t seed = 0;
    bool common_random_numbers = true;  ///< reuse one u-sample set across query points
    std::vector<Point> origins;         ///< explicit origins; when set, replaces sampling
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and its standard error (sample variance / N); zero error for N = 1.
Estimate summarize(std::span<const double> samples);

/// 16 s0 where s0 is the side of the Whitney cube containing x for the standard origin.
double period_at(const Extension& ext, std::span<const double> x);

/// Smallest power of two >= value.
double power_of_two_ceil(double value);

/// Origin of sample i: tau * u with u uniform in [0,1)^n from a substream keyed by
/// (seed, i, stream). Explicit plan origins take precedence.
Point sample_origin(const AveragingPlan& plan, std::size_t i, std::size_t dim, std::uint64_t stream = 0);

/// Mean over sampled origins of d^alpha E_[b](f)(x). `point_stream` separates
/// the streams of distinct points when common random numbers are off.
Estimate averaged_extension(const Extension& ext, std::span<const double> x, const MultiIndex& alpha,
                            const AveragingPlan& plan, const ExtensionConfig& cfg, std::uint64_t point_stream = 0,
                            unsigned jobs = 1);

/// One estimate per requested multi-index, sharing one local frame per sample.
std::vector<Estimate> averaged_derivatives(const Extension& ext, std::span<const double> x,
                                           const std::vector<MultiIndex>& alphas, const AveragingPlan& plan,
                                           const ExtensionConfig& cfg, std::uint64_t point_stream = 0,
                                           unsigned jobs = 1);

/// Mean of |d^alpha E_[b](f)(x)| per requested multi-index.
std::vector<Estimate> averaged_abs_derivatives(const Extension& ext, std::span<const double> x,
                                               const std::vector<MultiIndex>& alphas, const AveragingPlan& plan,
                                               const ExtensionConfig& cfg, std::uint64_t point_stream = 0,
                                               unsigned jobs = 1);

/// Monte Carlo estimate of < Psi_[b](x)^k > with b uniform in [0, tau]^n, tau the
/// smallest power of two >= c2p delta(x) n^-1/2. Width t may be any positive value.
Estimate avg_psi_power(const DistanceOracle& oracle, std::span<const double> x, int k, std::size_t samples,
                       std::uint64_t seed, double t, double c1p = 1.0 / 32.0, double c2p = 8.0);

/// Monte Carlo estimate of < (1 + psi(b))^k > for b uniform in [0, 1].
Estimate avg_indicator_power(int k, double t, std::size_t samples, std::uint64_t seed);

} // namespace whitney
