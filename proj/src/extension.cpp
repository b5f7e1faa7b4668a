#include "whitney/extension.hpp"

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace whitney {

namespace {

bool is_power_of_two(double v) {
    int exponent = 0;
    return v > 0.0 && std::frexp(v, &exponent) == 0.5;
}

} // namespace

ExtensionConfig ExtensionConfig::classical(std::size_t dim, int m) {
    ExtensionConfig cfg;
    cfg.m = m;
    cfg.t = 0.125;
    cfg.origin = Point(dim, 0.0);
    cfg.max_order = std::min(m + 2, SigmaProfile::kMaxOrder);
    return cfg;
}

ExtensionConfig ExtensionConfig::averaged(std::size_t dim, int m) {
    ExtensionConfig cfg = classical(dim, m);
    cfg.t = default_averaged_t(dim);
    return cfg;
}

void ExtensionConfig::validate(std::size_t dim) const {
    if (!(t > 0.0 && t < 0.25)) throw Error("extension", "t_range", "t must lie in (0, 1/4), got " + std::to_string(t));
    if (!(truncation > 0.0)) throw Error("extension", "truncation", "truncation threshold must be positive");
    if (!(is_power_of_two(c1p) && is_power_of_two(c2p) && c2p >= 2.0 * c1p))
        throw Error("extension", "bracket_constants", "c1p < c2p must be powers of two with c2p/c1p >= 2");
    if (m < 0 || m > kMaxDegree) throw Error("extension", "degree_cap", "m must lie in [0, 8]");
    if (max_order < 0 || max_order > SigmaProfile::kMaxOrder || (sigma && max_order > sigma->max_order()))
        throw Error("extension", "order_cap", "K must lie in [0, 8] and within the sigma profile");
    if (!origin.empty() && origin.size() != dim)
        throw Error("extension", "dimension_mismatch", "origin dimension differs from n");
    if (!sigma) throw Error("extension", "sigma_missing", "a sigma profile is required");
}

Point ExtensionConfig::origin_or_zero(std::size_t dim) const { return origin.empty() ? Point(dim, 0.0) : origin; }

ExtensionConfig ExtensionConfig::with_origin(Point b) const {
    ExtensionConfig cfg = *this;
    cfg.origin = std::move(b);
    return cfg;
}

double default_averaged_t(std::size_t dim) { return dim >= 5 ? 1.0 / static_cast<double>(dim) : 0.2; }

Extension::Extension(WhitneyField field) : field_(std::move(field)), oracle_(field_.points()) {}

std::vector<double> p_range(double delta, std::size_t dim, double c1p, double c2p) {
    const double scale = delta / std::sqrt(static_cast<double>(dim));
    const double lo = c1p * scale;
    const double hi = c2p * scale;
    int j = static_cast<int>(std::floor(std::log2(lo)));
    while (std::ldexp(1.0, j) < lo) ++j;
    while (std::ldexp(1.0, j - 1) >= lo) --j;
    std::vector<double> out;
    for (; std::ldexp(1.0, j) <= hi; ++j) out.push_back(std::ldexp(1.0, j));
    return out;
}

double psi_b(const DistanceOracle& oracle, std::span<const double> x, std::span<const double> origin, double t,
             double c1p, double c2p) {
    const double delta_x = oracle.nearest(x).distance;
    if (delta_x == 0.0) throw Error("extension", "point_in_E", "Psi is defined on E^c only");
    const auto ps = p_range(delta_x, x.size(), c1p, c2p);
    if (ps.empty()) throw Error("extension", "empty_p_range", "no power of two in the p bracket");
    double total = 0.0;
    for (double p : ps) {
        double product = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) product *= psi((x[i] - origin[i]) / p, t) + 1;
        total += product;
    }
    return total;
}

double psi_b(const Extension& ext, std::span<const double> x, const ExtensionConfig& cfg) {
    const Point b = cfg.origin_or_zero(x.size());
    return psi_b(ext.oracle(), x, b, cfg.t, cfg.c1p, cfg.c2p);
}

// Multi-indices beta <= alpha in mixed-radix order; every beta precedes the
// indices that dominate it.
struct LocalFrame::SubBox {
    explicit SubBox(const MultiIndex& alpha) : bound(alpha.exponents()), stride(bound.size(), 1) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < bound.size(); ++i) {
            stride[i] = count;
            count *= static_cast<std::size_t>(bound[i]) + 1;
        }
        elems.reserve(count);
        std::vector<int> e(bound.size(), 0);
        for (std::size_t idx = 0; idx < count; ++idx) {
            elems.push_back(e);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (++e[i] <= bound[i]) break;
                e[i] = 0;
            }
        }
    }

    std::size_t size() const { return elems.size(); }
    std::size_t index(const std::vector<int>& e) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < e.size(); ++i) idx += stride[i] * static_cast<std::size_t>(e[i]);
        return idx;
    }
    bool dominated(const std::vector<int>& gamma, const std::vector<int>& beta) const {
        for (std::size_t i = 0; i < gamma.size(); ++i)
            if (gamma[i] > beta[i]) return false;
        return true;
    }
    double binomial_coeff(const std::vector<int>& beta, const std::vector<int>& gamma) const {
        double c = 1.0;
        for (std::size_t i = 0; i < beta.size(); ++i)
            c *= static_cast<double>(binomial(static_cast<std::uint64_t>(beta[i]), static_cast<std::uint64_t>(gamma[i])));
        return c;
    }
    std::vector<int> difference(const std::vector<int>& beta, const std::vector<int>& gamma) const {
        std::vector<int> d(beta.size());
        for (std::size_t i = 0; i < beta.size(); ++i) d[i] = beta[i] - gamma[i];
        return d;
    }

    std::vector<int> bound;
    std::vector<std::size_t> stride;
    std::vector<std::vector<int>> elems;
};

LocalFrame::LocalFrame(const Extension& ext, std::span<const double> x, const ExtensionConfig& cfg, int order)
    : ext_(&ext), x_(x.begin(), x.end()), order_(order), truncation_(cfg.truncation) {
    const std::size_t n = ext.field().dim();
    if (x.size() != n) throw Error("extension", "dimension_mismatch", "x dimension differs from the field");
    cfg.validate(n);
    if (order < 0 || order > cfg.max_order)
        throw Error("extension", "order_exceeds_K",
                    "derivative order " + std::to_string(order) + " exceeds K = " + std::to_string(cfg.max_order));
    if (ext.field().find_point(x)) throw Error("extension", "point_in_E", "local frames are built on E^c only");

    const Point b = cfg.origin_or_zero(n);
    cubes_ = cubes_covering_support(ext.oracle(), x, b, cfg.t);

    const double delta_x = ext.oracle().nearest(x).distance;
    const double scale = delta_x / std::sqrt(static_cast<double>(n));
    const double p_lo = cfg.c1p * scale;
    const double p_hi = cfg.c2p * scale;
    const CutoffParams params = cfg.cutoff();
    std::vector<double> column(static_cast<std::size_t>(order) + 1);
    tables_.reserve(cubes_.size());
    for (const CoveringCube& c : cubes_) {
        const double s = c.cube.side();
        if (!(s / 4.0 >= p_lo && 4.0 * s <= p_hi))
            throw Error("extension", "bracket_containment",
                        "[s/4, 4s] not inside [c1p delta n^-1/2, c2p delta n^-1/2] for s = " + std::to_string(s));
        std::vector<std::vector<double>> axes(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (x[i] - b[i]) / s - static_cast<double>(c.cube.anchor[i]);
            theta1_derivs(u, params, column);
            double chain = 1.0;
            for (double& v : column) {
                v *= chain;
                chain /= s;
            }
            axes[i] = column;
        }
        tables_.push_back(std::move(axes));
    }
    if (cubes_.empty()) throw Error("extension", "empty_cover", "no Whitney cube covers x");
}

double LocalFrame::cutoff_sum() const {
    CompensatedSum sum;
    for (const auto& axes : tables_) {
        double v = 1.0;
        for (const auto& column : axes) v *= column[0];
        sum.add(v);
    }
    return sum.value();
}

double LocalFrame::partition_sum() const {
    const double s = cutoff_sum();
    CompensatedSum sum;
    for (const auto& axes : tables_) {
        double v = 1.0;
        for (const auto& column : axes) v *= column[0];
        sum.add(v / s);
    }
    return sum.value();
}

double LocalFrame::phi_derivative(std::size_t k, const MultiIndex& alpha) const {
    if (alpha.order() > order_) throw Error("extension", "order_exceeds_frame", "frame built for a lower order");
    double v = 1.0;
    for (std::size_t i = 0; i < alpha.dim(); ++i) v *= tables_[k][i][static_cast<std::size_t>(alpha[i])];
    return v;
}

std::vector<double> LocalFrame::reciprocal_derivatives(const SubBox& box) const {
    const std::size_t n = x_.size();
    std::vector<double> ds(box.size());
    for (std::size_t bi = 0; bi < box.size(); ++bi) {
        CompensatedSum sum;
        for (const auto& axes : tables_) {
            double v = 1.0;
            for (std::size_t i = 0; i < n; ++i) v *= axes[i][static_cast<std::size_t>(box.elems[bi][i])];
            sum.add(v);
        }
        ds[bi] = sum.value();
    }
    // d^beta (1/S) = -(1/S) sum_{0 < gamma <= beta} C(beta, gamma) d^gamma S d^(beta-gamma) (1/S)
    std::vector<double> inv(box.size());
    inv[0] = 1.0 / ds[0];
    for (std::size_t bi = 1; bi < box.size(); ++bi) {
        const auto& beta = box.elems[bi];
        CompensatedSum acc;
        for (std::size_t gi = 1; gi <= bi; ++gi) {
            const auto& gamma = box.elems[gi];
            if (!box.dominated(gamma, beta)) continue;
            acc.add(box.binomial_coeff(beta, gamma) * ds[gi] * inv[box.index(box.difference(beta, gamma))]);
        }
        inv[bi] = -inv[0] * acc.value();
    }
    return inv;
}

std::vector<double> LocalFrame::normalized_derivatives(const MultiIndex& alpha) const {
    if (alpha.order() > order_) throw Error("extension", "order_exceeds_frame", "frame built for a lower order");
    const SubBox box(alpha);
    const auto inv = reciprocal_derivatives(box);
    const std::size_t top = box.size() - 1;
    const auto& beta = box.elems[top];
    std::vector<double> out(cubes_.size());
    for (std::size_t k = 0; k < cubes_.size(); ++k) {
        CompensatedSum sum;
        for (std::size_t gi = 0; gi < box.size(); ++gi) {
            const auto& gamma = box.elems[gi];
            double phi = 1.0;
            for (std::size_t i = 0; i < gamma.size(); ++i) phi *= tables_[k][i][static_cast<std::size_t>(gamma[i])];
            sum.add(box.binomial_coeff(beta, gamma) * phi * inv[box.index(box.difference(beta, gamma))]);
        }
        out[k] = sum.value();
    }
    return out;
}

double LocalFrame::derivative(const MultiIndex& alpha) const {
    if (alpha.dim() != x_.size()) throw Error("extension", "dimension_mismatch", "alpha dimension differs from x");
    if (alpha.order() > order_) throw Error("extension", "order_exceeds_frame", "frame built for a lower order");
    const SubBox box(alpha);
    const auto inv = reciprocal_derivatives(box);
    const auto& alpha_e = box.elems.back();

    // d^(alpha - beta) P_anchor(x) for every anchor in use and every beta <= alpha.
    std::map<std::size_t, std::vector<double>> jet_terms;
    bool truncated = false;
    for (const CoveringCube& c : cubes_) {
        if (c.dist_to_E > truncation_) {
            truncated = true;
            continue;
        }
        if (jet_terms.count(c.anchor_index)) continue;
        const Jet& jet = ext_->field().jet(c.anchor_index);
        std::vector<double> terms(box.size());
        for (std::size_t bi = 0; bi < box.size(); ++bi)
            terms[bi] = jet_derivative_at(jet, MultiIndex(box.difference(alpha_e, box.elems[bi])), x_);
        jet_terms.emplace(c.anchor_index, std::move(terms));
    }

    // Without truncation the weights sum to one, so F = P_r + sum_k (P_k - P_r) phi_k^*
    // for a reference anchor r; cubes anchored at r then contribute nothing and
    // the blend carries no cancellation of large equal terms.
    CompensatedSum total;
    const std::vector<double>* reference = nullptr;
    if (!truncated && !jet_terms.empty()) {
        const std::size_t nearest = ext_->oracle().nearest(x_).index;
        const auto it = jet_terms.find(nearest);
        reference = it != jet_terms.end() ? &it->second : &jet_terms.begin()->second;
        total.add(reference->front());
    }

    std::vector<double> normalized(box.size());
    for (std::size_t k = 0; k < cubes_.size(); ++k) {
        if (cubes_[k].dist_to_E > truncation_) continue;
        const auto& terms = jet_terms.at(cubes_[k].anchor_index);
        if (&terms == reference) continue;
        // d^beta (phi_k / S) for beta <= alpha.
        for (std::size_t bi = 0; bi < box.size(); ++bi) {
            const auto& beta = box.elems[bi];
            CompensatedSum sum;
            for (std::size_t gi = 0; gi <= bi; ++gi) {
                const auto& gamma = box.elems[gi];
                if (!box.dominated(gamma, beta)) continue;
                double phi = 1.0;
                for (std::size_t i = 0; i < gamma.size(); ++i) phi *= tables_[k][i][static_cast<std::size_t>(gamma[i])];
                if (phi == 0.0) continue;
                sum.add(box.binomial_coeff(beta, gamma) * phi * inv[box.index(box.difference(beta, gamma))]);
            }
            normalized[bi] = sum.value();
        }
        for (std::size_t bi = 0; bi < box.size(); ++bi) {
            const double jet_term = reference ? terms[bi] - (*reference)[bi] : terms[bi];
            total.add(box.binomial_coeff(alpha_e, box.elems[bi]) * jet_term * normalized[bi]);
        }
    }
    return total.value();
}

double LocalFrame::value() const { return derivative(MultiIndex::zero(x_.size())); }

double LocalFrame::partition_derivative_sum(const MultiIndex& alpha) const {
    double sum = 0.0;
    for (double v : normalized_derivatives(alpha)) sum += std::abs(v);
    return sum;
}

double eval_extension(const Extension& ext, std::span<const double> x, const ExtensionConfig& cfg) {
    if (const auto idx = ext.field().find_point(x)) return ext.field().jet(*idx).coeffs()[0];
    return LocalFrame(ext, x, cfg, 0).value();
}

double eval_extension(const WhitneyField& f, std::span<const double> x, const ExtensionConfig& cfg) {
    return eval_extension(Extension(f), x, cfg);
}

double eval_extension_deriv(const Extension& ext, std::span<const double> x, const MultiIndex& alpha,
                            const ExtensionConfig& cfg) {
    if (alpha.order() > cfg.max_order)
        throw Error("extension", "order_exceeds_K",
                    "|alpha| = " + std::to_string(alpha.order()) + " exceeds K = " + std::to_string(cfg.max_order));
    if (ext.field().find_point(x))
        throw Error("extension", "point_in_E", "derivatives on E are limits; evaluate on E^c");
    return LocalFrame(ext, x, cfg, alpha.order()).derivative(alpha);
}

double eval_extension_deriv(const WhitneyField& f, std::span<const double> x, const MultiIndex& alpha,
                            const ExtensionConfig& cfg) {
    return eval_extension_deriv(Extension(f), x, alpha, cfg);
}

double partition_derivative_sum(const Extension& ext, std::span<const double> x, const MultiIndex& alpha,
                                const ExtensionConfig& cfg) {
    return LocalFrame(ext, x, cfg, alpha.order()).partition_derivative_sum(alpha);
}

} // namespace whitney
