#include "whitney/cutoff.hpp"

#include "whitney/error.hpp"

#include <array>
#include <cmath>
#include <string>

namespace whitney {

namespace {

constexpr std::size_t kSlots = SigmaProfile::kMaxOrder + 1;

void check_order(int order, int max_order) {
    if (order < 0 || order > max_order)
        throw Error("cutoff", "order_exceeds_max",
                    "derivative order " + std::to_string(order) + " outside [0, " + std::to_string(max_order) + "]");
}

} // namespace

SigmaProfile::SigmaProfile(int max_order) : max_order_(max_order) {
    if (max_order < 0 || max_order > kMaxOrder)
        throw Error("cutoff", "order_cap", "sigma profile order must lie in [0, 8]");
    polys_.push_back({1.0});
    for (int j = 0; j < max_order_; ++j) {
        const auto& r = polys_.back();
        // v^2 (R - R'), coefficients lowest power first.
        std::vector<double> next(r.size() + 2, 0.0);
        for (std::size_t k = 0; k < r.size(); ++k) next[k + 2] += r[k];
        for (std::size_t k = 1; k < r.size(); ++k) next[k + 1] -= static_cast<double>(k) * r[k];
        polys_.push_back(std::move(next));
    }

    sup_abs_.assign(static_cast<std::size_t>(max_order_) + 1, 0.0);
    constexpr int kGrid = 20000;
    std::vector<double> values(static_cast<std::size_t>(max_order_) + 1);
    std::vector<double> best_x(sup_abs_.size(), -0.5);
    for (int g = 0; g <= kGrid; ++g) {
        const double x = -1.0 + static_cast<double>(g) / kGrid;
        derivatives(x, values);
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (std::abs(values[j]) > sup_abs_[j]) {
                sup_abs_[j] = std::abs(values[j]);
                best_x[j] = x;
            }
        }
    }
    // Ternary refinement around each grid maximum.
    for (std::size_t j = 0; j < sup_abs_.size(); ++j) {
        double lo = std::max(-1.0, best_x[j] - 1.0 / kGrid);
        double hi = std::min(0.0, best_x[j] + 1.0 / kGrid);
        for (int it = 0; it < 60; ++it) {
            const double a = lo + (hi - lo) / 3.0;
            const double b = hi - (hi - lo) / 3.0;
            if (std::abs(derivative(a, static_cast<int>(j))) < std::abs(derivative(b, static_cast<int>(j))))
                lo = a;
            else
                hi = b;
        }
        sup_abs_[j] = std::max(sup_abs_[j], std::abs(derivative(0.5 * (lo + hi), static_cast<int>(j))));
    }
}

void SigmaProfile::h_derivatives(double u, std::span<double> out) const {
    if (u < kSingularCrossover) {
        for (double& v : out) v = 0.0;
        return;
    }
    const double v = 1.0 / u;
    const double e = std::exp(-v);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const auto& poly = polys_[j];
        double acc = 0.0;
        for (std::size_t k = poly.size(); k-- > 0;) acc = acc * v + poly[k];
        out[j] = acc * e;
    }
}

void SigmaProfile::derivatives(double x, std::span<double> out) const {
    const int top = static_cast<int>(out.size()) - 1;
    check_order(top, max_order_);
    if (x <= -1.0 || x >= 0.0) {
        for (double& v : out) v = 0.0;
        if (x >= 0.0 && !out.empty()) out[0] = 1.0;
        return;
    }
    const std::size_t count = out.size();
    std::array<double, kSlots> g1{}, g2{}, denom{}, recip{};
    h_derivatives(x + 1.0, std::span<double>(g1.data(), count));
    h_derivatives(-x, std::span<double>(g2.data(), count));
    for (std::size_t j = 0; j < count; ++j) {
        if (j % 2 == 1) g2[j] = -g2[j];
        denom[j] = g1[j] + g2[j];
    }
    // One side of the quotient vanishes identically: exact plateau.
    if (g1[0] == 0.0 || g2[0] == 0.0) {
        for (double& v : out) v = 0.0;
        out[0] = g2[0] == 0.0 ? 1.0 : 0.0;
        return;
    }
    // (1/D)^(j) = -(1/D) sum_{i=1..j} C(j,i) D^(i) (1/D)^(j-i)
    recip[0] = 1.0 / denom[0];
    for (std::size_t j = 1; j < count; ++j) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= j; ++i) acc += static_cast<double>(binomial(j, i)) * denom[i] * recip[j - i];
        recip[j] = -recip[0] * acc;
    }
    for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= j; ++i) acc += static_cast<double>(binomial(j, i)) * g1[i] * recip[j - i];
        out[j] = acc;
    }
    // 1 / (1 + b/a) is monotone under rounding, unlike a * (1/(a+b)).
    out[0] = 1.0 / (1.0 + g2[0] / g1[0]);
}

double SigmaProfile::derivative(double x, int order) const {
    check_order(order, max_order_);
    std::array<double, kSlots> values{};
    derivatives(x, std::span<double>(values.data(), static_cast<std::size_t>(order) + 1));
    return values[static_cast<std::size_t>(order)];
}

std::shared_ptr<const SigmaProfile> default_sigma() {
    static const auto profile = std::make_shared<const SigmaProfile>(SigmaProfile::kMaxOrder);
    return profile;
}

CutoffParams::CutoffParams(double t, std::shared_ptr<const SigmaProfile> sigma) : t_(t), sigma_(std::move(sigma)) {
    if (!(t > 0.0 && t < 0.25)) throw Error("cutoff", "t_range", "t must lie in (0, 1/4), got " + std::to_string(t));
    if (!sigma_) throw Error("cutoff", "sigma_missing", "a sigma profile is required");
}

double sigma_deriv(double x, int order, const SigmaProfile& sigma) { return sigma.derivative(x, order); }

void theta1_derivs(double x, const CutoffParams& params, std::span<double> out) {
    const double t = params.t();
    for (double& v : out) v = 0.0;
    if (out.empty() || x <= -t || x >= 1.0 + t) return;
    if (x >= 0.0 && x <= 1.0) {
        out[0] = 1.0;
        return;
    }
    const bool rising = x < 0.0;
    params.sigma().derivatives(rising ? x / t : (1.0 - x) / t, out);
    // Chain rule: d/dx of sigma(x/t) is t^-1, of sigma((1-x)/t) is -t^-1.
    const double factor = rising ? 1.0 / t : -1.0 / t;
    double scale = 1.0;
    for (double& v : out) {
        v *= scale;
        scale *= factor;
    }
}

double theta1_deriv(double x, int order, const CutoffParams& params) {
    check_order(order, params.max_order());
    std::array<double, kSlots> values{};
    theta1_derivs(x, params, std::span<double>(values.data(), static_cast<std::size_t>(order) + 1));
    return values[static_cast<std::size_t>(order)];
}

double theta_n_deriv(std::span<const double> x, const MultiIndex& alpha, const CutoffParams& params) {
    if (alpha.dim() != x.size()) throw Error("cutoff", "dimension_mismatch", "alpha and x dimensions differ");
    double v = 1.0;
    for (std::size_t i = 0; i < x.size() && v != 0.0; ++i) v *= theta1_deriv(x[i], alpha[i], params);
    return v;
}

double phi_Q_deriv(std::span<const double> x, std::span<const double> corner, double side, const MultiIndex& alpha,
                   const CutoffParams& params) {
    if (corner.size() != x.size()) throw Error("cutoff", "dimension_mismatch", "corner and x dimensions differ");
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - corner[i]) / side;
    return std::pow(side, -alpha.order()) * theta_n_deriv(u, alpha, params);
}

int psi(double x, double t) {
    if (!(t > 0.0)) throw Error("cutoff", "t_range", "psi requires t > 0");
    return std::abs(x - std::nearbyint(x)) <= t ? 1 : 0;
}

double lattice_theta_sum(std::span<const double> x, const MultiIndex& alpha, const CutoffParams& params) {
    if (alpha.dim() != x.size()) throw Error("cutoff", "dimension_mismatch", "alpha and x dimensions differ");
    const double t = params.t();
    double product = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // theta1(x - k) != 0 only when x - k lies in (-t, 1 + t).
        const auto k_lo = static_cast<long long>(std::ceil(x[i] - 1.0 - t));
        const auto k_hi = static_cast<long long>(std::floor(x[i] + t));
        double sum = 0.0;
        for (long long k = k_lo; k <= k_hi; ++k)
            sum += std::abs(theta1_deriv(x[i] - static_cast<double>(k), alpha[i], params));
        product *= sum;
    }
    return product;
}

double lattice_sum_constant(int order, const SigmaProfile& sigma) {
    return order == 0 ? 1.0 : 2.0 * sigma.sup_abs_derivative(order);
}

} // namespace whitney
