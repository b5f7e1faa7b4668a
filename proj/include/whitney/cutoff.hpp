#pragma once

#include "whitney/jets.hpp"

#include <memory>
#include <span>
#include <vector>

namespace whitney {

/// The smooth step sigma(x) = h(x+1) / (h(x+1) + h(-x)), h(u) = exp(-1/u) for
/// u > 0, else 0. sigma = 0 on (-inf, -1], 1 on [0, inf), nondecreasing.
///
/// Derivatives use h^(j)(u) = R_j(1/u) exp(-1/u), R_0 = 1,
/// R_{j+1}(v) = v^2 (R_j(v) - R_j'(v)), then the reciprocal recurrence for
/// 1/(h(x+1) + h(-x)) and Leibniz. For u below kSingularCrossover, h and all its
/// derivatives are taken as 0: exp(-1/u) underflows there while R_j(1/u) is
/// still finite, so the limit value is exact in double precision.
class SigmaProfile {
public:
    static constexpr int kMaxOrder = 8;
    static constexpr double kSingularCrossover = 1e-3;

    explicit SigmaProfile(int max_order = kMaxOrder);

    int max_order() const { return max_order_; }

    double derivative(double x, int order) const;
    /// out[j] = sigma^(j)(x) for j = 0 .. out.size()-1.
    void derivatives(double x, std::span<double> out) const;

    /// sup_x |sigma^(j)(x)|, located on a dense grid over [-1, 0] and refined locally.
    double sup_abs_derivative(int order) const { return sup_abs_.at(static_cast<std::size_t>(order)); }

    /// Integer coefficients of R_j, lowest power first.
    const std::vector<double>& recurrence_polynomial(int order) const { return polys_.at(static_cast<std::size_t>(order)); }

private:
    void h_derivatives(double u, std::span<double> out) const;

    int max_order_;
    std::vector<std::vector<double>> polys_;
    std::vector<double> sup_abs_;
};

/// Shared default profile of maximal order.
std::shared_ptr<const SigmaProfile> default_sigma();

/// Transition width t in (0, 1/4) together with the step profile.
class CutoffParams {
public:
    explicit CutoffParams(double t, std::shared_ptr<const SigmaProfile> sigma = default_sigma());

    double t() const { return t_; }
    const SigmaProfile& sigma() const { return *sigma_; }
    int max_order() const { return sigma_->max_order(); }

private:
    double t_;
    std::shared_ptr<const SigmaProfile> sigma_;
};

double sigma_deriv(double x, int order, const SigmaProfile& sigma = *default_sigma());

/// j-th derivative of the interval cutoff: 0, sigma(x/t), 1, sigma((1-x)/t), 0 on
/// (-inf,-t], [-t,0], [0,1], [1,1+t], [1+t,inf).
double theta1_deriv(double x, int order, const CutoffParams& params);
/// out[j] = theta1^(j)(x) for j = 0 .. out.size()-1.
void theta1_derivs(double x, const CutoffParams& params, std::span<double> out);

/// Derivative of the unit-cube cutoff Theta(x) = prod_i theta1(x_i).
double theta_n_deriv(std::span<const double> x, const MultiIndex& alpha, const CutoffParams& params);

/// Derivative of phi_Q(x) = Theta((x - corner) / side).
double phi_Q_deriv(std::span<const double> x, std::span<const double> corner, double side, const MultiIndex& alpha,
                   const CutoffParams& params);

/// 1 when dist(x, Z) <= t, else 0. Any t > 0 is accepted.
int psi(double x, double t);

/// sum over a in Z^n of |d^alpha Theta(x - a)|, using the <= 2 contributing translates per axis.
double lattice_theta_sum(std::span<const double> x, const MultiIndex& alpha, const CutoffParams& params);

/// One-dimensional lattice-sum constant c_j = 2 sup|sigma^(j)| for j > 0 and 1 for j = 0:
/// sum_k |theta1^(j)(x - k)| <= c_j t^-j (psi(x) + 1).
double lattice_sum_constant(int order, const SigmaProfile& sigma = *default_sigma());

} // namespace whitney
