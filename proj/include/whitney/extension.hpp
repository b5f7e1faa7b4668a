#pragma once

#include "whitney/cubes.hpp"
#include "whitney/cutoff.hpp"
#include "whitney/fields.hpp"

#include <memory>
#include <span>
#include <vector>

namespace whitney {

/// Parameters of the single-origin operator.
struct ExtensionConfig {
    int m = 1;
    double t = 0.125;
    Point origin;              ///< empty means the standard origin 0
    double truncation = 1.0;   ///< numerator keeps cubes with dist(Q, E) <= truncation
    int max_order = 3;         ///< K, largest derivative order served
    double c1p = 1.0 / 32.0;   ///< lower bracket constant of the p-range
    double c2p = 8.0;          ///< upper bracket constant of the p-range
    std::shared_ptr<const SigmaProfile> sigma = default_sigma();

    /// t = 1/8 at the standard origin, K = m + 2 (capped at 8).
    static ExtensionConfig classical(std::size_t dim, int m);
    /// t = default_averaged_t(dim), K = m + 2 (capped at 8).
    static ExtensionConfig averaged(std::size_t dim, int m);

    /// Throws on t outside (0, 1/4), non-positive truncation, bad c1p/c2p, K out of range.
    void validate(std::size_t dim) const;
    CutoffParams cutoff() const { return CutoffParams(t, sigma); }
    Point origin_or_zero(std::size_t dim) const;
    ExtensionConfig with_origin(Point b) const;
};

/// t = 1/n, clamped to 1/5 where 1/n leaves (0, 1/4).
double default_averaged_t(std::size_t dim);

/// A Whitney field bound to its distance oracle.
class Extension {
public:
    explicit Extension(WhitneyField field);

    const WhitneyField& field() const { return field_; }
    const DistanceOracle& oracle() const { return oracle_; }

private:
    WhitneyField field_;
    DistanceOracle oracle_;
};

/// Everything needed to evaluate F and its derivatives up to a fixed order at
/// one point of E^c: the covering cubes, their per-axis cutoff derivative
/// tables, and their anchor jets.
class LocalFrame {
public:
    LocalFrame(const Extension& ext, std::span<const double> x, const ExtensionConfig& cfg, int order);

    const Point& point() const { return x_; }
    int order() const { return order_; }
    const std::vector<CoveringCube>& cubes() const { return cubes_; }

    /// S(x) = sum of phi_k(x) over all covering cubes.
    double cutoff_sum() const;
    /// sum over all covering cubes of phi_k(x) / S(x).
    double partition_sum() const;
    /// d^alpha of phi_k at x for cube k.
    double phi_derivative(std::size_t k, const MultiIndex& alpha) const;
    /// d^alpha of phi_k / S at x for every cube.
    std::vector<double> normalized_derivatives(const MultiIndex& alpha) const;

    double value() const;
    double derivative(const MultiIndex& alpha) const;
    double partition_derivative_sum(const MultiIndex& alpha) const;

private:
    struct SubBox;
    std::vector<double> reciprocal_derivatives(const SubBox& box) const;

    const Extension* ext_;
    Point x_;
    int order_;
    double truncation_;
    std::vector<CoveringCube> cubes_;
    // tables_[k][i][j] = d^j/dx_i^j of the axis-i factor of phi_k at x.
    std::vector<std::vector<std::vector<double>>> tables_;
};

/// F(x): P_x(x) on E, else the truncated partition-of-unity blend of anchor jets.
double eval_extension(const Extension& ext, std::span<const double> x, const ExtensionConfig& cfg);
double eval_extension(const WhitneyField& f, std::span<const double> x, const ExtensionConfig& cfg);

/// d^alpha F(x) for x in E^c, |alpha| <= K.
double eval_extension_deriv(const Extension& ext, std::span<const double> x, const MultiIndex& alpha,
                            const ExtensionConfig& cfg);
double eval_extension_deriv(const WhitneyField& f, std::span<const double> x, const MultiIndex& alpha,
                            const ExtensionConfig& cfg);

/// Powers of two p with c1p delta n^-1/2 <= p <= c2p delta n^-1/2, ascending.
std::vector<double> p_range(double delta, std::size_t dim, double c1p, double c2p);

/// Psi_[b](x) = sum over p_range of prod_i (psi((x_i - b_i)/p) + 1), with psi's width t.
double psi_b(const DistanceOracle& oracle, std::span<const double> x, std::span<const double> origin, double t,
             double c1p = 1.0 / 32.0, double c2p = 8.0);
double psi_b(const Extension& ext, std::span<const double> x, const ExtensionConfig& cfg);

/// sum_k |d^alpha phi_k^*(x)| over the covering cubes.
double partition_derivative_sum(const Extension& ext, std::span<const double> x, const MultiIndex& alpha,
                                const ExtensionConfig& cfg);

} // namespace whitney
