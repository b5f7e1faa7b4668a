#include "whitney/jets.hpp"

#include "whitney/error.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

namespace whitney {

namespace {

void require_dim(std::size_t expected, std::size_t actual, const char* check) {
    if (expected != actual)
        throw Error("jets", check,
                    "dimension mismatch: expected " + std::to_string(expected) + ", got " + std::to_string(actual));
}

void check_caps(std::size_t dim, int degree) {
    if (dim == 0 || dim > kMaxDimension)
        throw Error("jets", "dimension_cap", "dimension " + std::to_string(dim) + " outside [1, 16]");
    if (degree < 0 || degree > kMaxDegree)
        throw Error("jets", "degree_cap", "degree " + std::to_string(degree) + " outside [0, 8]");
}

// Number of compositions of `total` into `parts` non-negative parts.
std::uint64_t compositions(int total, std::size_t parts) {
    if (parts == 0) return total == 0 ? 1 : 0;
    return binomial(static_cast<std::uint64_t>(total) + parts - 1, parts - 1);
}

} // namespace

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
    for (int e : exponents_) {
        if (e < 0) throw Error("jets", "negative_exponent", "multi-index entries must be non-negative");
        order_ += e;
    }
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis, int power) {
    std::vector<int> e(dim, 0);
    e.at(axis) = power;
    return MultiIndex(std::move(e));
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
    if (dim() != other.dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (exponents_[i] > other.exponents_[i]) return false;
    return true;
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int e : exponents_) f *= whitney::factorial(e);
    return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    require_dim(dim(), other.dim(), "multi_index_sum");
    std::vector<int> e(exponents_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
    require_dim(dim(), other.dim(), "multi_index_difference");
    std::vector<int> e(exponents_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.exponents_[i];
    return MultiIndex(std::move(e));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

std::size_t multi_index_count(std::size_t dim, int degree) {
    return static_cast<std::size_t>(binomial(dim + static_cast<std::size_t>(degree), static_cast<std::size_t>(degree)));
}

std::size_t grlex_rank(const MultiIndex& alpha) {
    const std::size_t n = alpha.dim();
    const int d = alpha.order();
    std::size_t rank = d == 0 ? 0 : multi_index_count(n, d - 1);
    int remaining = d;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Every index agreeing on positions < i with a larger entry at i comes first.
        for (int v = remaining; v > alpha[i]; --v) rank += compositions(remaining - v, n - i - 1);
        remaining -= alpha[i];
    }
    return rank;
}

MultiIndex grlex_unrank(std::size_t dim, std::size_t rank) {
    int d = 0;
    while (multi_index_count(dim, d) <= rank) ++d;
    std::size_t offset = rank - (d == 0 ? 0 : multi_index_count(dim, d - 1));
    std::vector<int> e(dim, 0);
    int remaining = d;
    for (std::size_t i = 0; i + 1 < dim; ++i) {
        int v = remaining;
        while (true) {
            const std::uint64_t block = compositions(remaining - v, dim - i - 1);
            if (offset < block) break;
            offset -= block;
            --v;
        }
        e[i] = v;
        remaining -= v;
    }
    e[dim - 1] = remaining;
    return MultiIndex(std::move(e));
}

const std::vector<MultiIndex>& multi_indices(std::size_t dim, int degree) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, std::unique_ptr<const std::vector<MultiIndex>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, degree}];
    if (!slot) {
        auto table = std::make_unique<std::vector<MultiIndex>>();
        for (int r = 0; r <= degree; ++r) {
            auto level = multi_indices_of_order(dim, r);
            table->insert(table->end(), level.begin(), level.end());
        }
        slot = std::move(table);
    }
    return *slot;
}

std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int order) {
    std::vector<MultiIndex> out;
    std::vector<int> e(dim, 0);
    // Depth-first with larger leading entries first yields descending lex order.
    auto recurse = [&](auto&& self, std::size_t i, int remaining) -> void {
        if (i + 1 == dim) {
            e[i] = remaining;
            out.emplace_back(e);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            e[i] = v;
            self(self, i + 1, remaining - v);
        }
    };
    if (dim > 0) recurse(recurse, 0, order);
    return out;
}

Jet::Jet(Point base, int degree) : base_(std::move(base)), degree_(degree) {
    check_caps(base_.size(), degree_);
    coeffs_.assign(multi_index_count(base_.size(), degree_), 0.0);
}

Jet::Jet(Point base, int degree, std::vector<double> coeffs)
    : base_(std::move(base)), degree_(degree), coeffs_(std::move(coeffs)) {
    check_caps(base_.size(), degree_);
    if (coeffs_.size() != multi_index_count(base_.size(), degree_))
        throw Error("jets", "coefficient_count",
                    "expected " + std::to_string(multi_index_count(base_.size(), degree_)) + " coefficients, got " +
                        std::to_string(coeffs_.size()));
}

double Jet::coeff(const MultiIndex& alpha) const {
    require_dim(dim(), alpha.dim(), "coeff");
    if (alpha.order() > degree_) return 0.0;
    return coeffs_[grlex_rank(alpha)];
}

void Jet::set_coeff(const MultiIndex& alpha, double value) {
    require_dim(dim(), alpha.dim(), "set_coeff");
    if (alpha.order() > degree_) throw Error("jets", "order_exceeds_degree", "cannot set a coefficient above degree");
    coeffs_[grlex_rank(alpha)] = value;
}

double Jet::derivative_at_base(const MultiIndex& alpha) const { return alpha.factorial() * coeff(alpha); }

Jet& Jet::operator+=(const Jet& other) {
    if (base_ != other.base_ || degree_ != other.degree_)
        throw Error("jets", "incompatible_sum", "jets must share base point and degree");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

Jet& Jet::operator*=(double scale) {
    for (double& c : coeffs_) c *= scale;
    return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator*(double scale, Jet a) { return a *= scale; }

namespace {

// powers[i][k] = h_i^k for k <= degree.
std::vector<std::vector<double>> power_table(std::span<const double> h, int degree) {
    std::vector<std::vector<double>> powers(h.size(), std::vector<double>(static_cast<std::size_t>(degree) + 1, 1.0));
    for (std::size_t i = 0; i < h.size(); ++i)
        for (int k = 1; k <= degree; ++k) powers[i][k] = powers[i][k - 1] * h[i];
    return powers;
}

std::vector<double> offset(const Point& base, std::span<const double> x) {
    std::vector<double> h(base.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = x[i] - base[i];
    return h;
}

} // namespace

double eval_jet(const Jet& p, std::span<const double> x) {
    require_dim(p.dim(), x.size(), "eval_jet");
    const auto powers = power_table(offset(p.base(), x), p.degree());
    const auto& indices = multi_indices(p.dim(), p.degree());
    const auto coeffs = p.coeffs();
    double sum = 0.0;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (coeffs[r] == 0.0) continue;
        double term = coeffs[r];
        for (std::size_t i = 0; i < p.dim(); ++i) term *= powers[i][indices[r][i]];
        sum += term;
    }
    return sum;
}

double jet_derivative_at(const Jet& p, const MultiIndex& alpha, std::span<const double> x) {
    require_dim(p.dim(), x.size(), "jet_derivative_at");
    require_dim(p.dim(), alpha.dim(), "jet_derivative_at");
    if (alpha.order() > p.degree()) return 0.0;
    const auto powers = power_table(offset(p.base(), x), p.degree());
    const auto& indices = multi_indices(p.dim(), p.degree());
    const auto coeffs = p.coeffs();
    double sum = 0.0;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const MultiIndex& beta = indices[r];
        if (coeffs[r] == 0.0 || !alpha.dominated_by(beta)) continue;
        double term = coeffs[r];
        for (std::size_t i = 0; i < p.dim(); ++i) {
            for (int k = 0; k < alpha[i]; ++k) term *= beta[i] - k;
            term *= powers[i][beta[i] - alpha[i]];
        }
        sum += term;
    }
    return sum;
}

Jet diff_jet(const Jet& p, const MultiIndex& alpha) {
    require_dim(p.dim(), alpha.dim(), "diff_jet");
    if (alpha.order() > p.degree())
        throw Error("jets", "order_exceeds_degree",
                    "|alpha| = " + std::to_string(alpha.order()) + " > m = " + std::to_string(p.degree()));
    Jet out(p.base(), p.degree() - alpha.order());
    const auto& indices = multi_indices(p.dim(), out.degree());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const MultiIndex& gamma = indices[r];
        double multiplier = 1.0;
        for (std::size_t i = 0; i < p.dim(); ++i)
            for (int k = 1; k <= alpha[i]; ++k) multiplier *= gamma[i] + k;
        out.coeffs()[r] = multiplier * p.coeff(gamma + alpha);
    }
    return out;
}

Jet recenter_jet(const Jet& p, const Point& new_base) {
    require_dim(p.dim(), new_base.size(), "recenter_jet");
    if (new_base == p.base()) return p;
    const auto powers = power_table(offset(p.base(), new_base), p.degree());
    const auto& indices = multi_indices(p.dim(), p.degree());
    const auto coeffs = p.coeffs();
    Jet out(new_base, p.degree());
    for (std::size_t g = 0; g < indices.size(); ++g) {
        const MultiIndex& gamma = indices[g];
        double sum = 0.0;
        for (std::size_t r = g; r < indices.size(); ++r) {
            const MultiIndex& beta = indices[r];
            if (coeffs[r] == 0.0 || !gamma.dominated_by(beta)) continue;
            double term = coeffs[r];
            for (std::size_t i = 0; i < p.dim(); ++i)
                term *= static_cast<double>(binomial(beta[i], gamma[i])) * powers[i][beta[i] - gamma[i]];
            sum += term;
        }
        out.coeffs()[g] = sum;
    }
    return out;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error("jets", "zero_denominator", "rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

Rational sum_reciprocal_factorials(int n, int r) {
    if (n < 1 || r < 0) throw Error("jets", "reciprocal_factorial_domain", "requires n >= 1 and r >= 0");
    if (n > static_cast<int>(kMaxDimension) || r > kMaxDegree)
        throw Error("jets", "reciprocal_factorial_overflow", "n <= 16 and r <= 8 required for exact int64 arithmetic");
    std::int64_t r_factorial = 1;
    for (int i = 2; i <= r; ++i) r_factorial *= i;
    // Common denominator r!: each term contributes the multinomial r!/beta!.
    std::int64_t numerator = 0;
    for (const MultiIndex& beta : multi_indices_of_order(static_cast<std::size_t>(n), r)) {
        std::int64_t multinomial = r_factorial;
        for (int e : beta.exponents())
            for (int i = 2; i <= e; ++i) multinomial /= i;
        numerator += multinomial;
    }
    return make_rational(numerator, r_factorial);
}

} // namespace whitney
