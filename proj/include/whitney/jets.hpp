#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace whitney {

using Point = std::vector<double>;

inline constexpr std::size_t kMaxDimension = 16;
inline constexpr int kMaxDegree = 8;

/// Exponent tuple indexing mixed partials and monomials.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents);

    static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }
    static MultiIndex unit(std::size_t dim, std::size_t axis, int power = 1);

    std::size_t dim() const { return exponents_.size(); }
    int order() const { return order_; }
    int operator[](std::size_t i) const { return exponents_[i]; }
    const std::vector<int>& exponents() const { return exponents_; }

    /// Componentwise <=.
    bool dominated_by(const MultiIndex& other) const;
    /// alpha! as a double (exact for the capped orders).
    double factorial() const;

    MultiIndex operator+(const MultiIndex& other) const;
    /// Requires other.dominated_by(*this).
    MultiIndex operator-(const MultiIndex& other) const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.exponents_ == b.exponents_; }

private:
    std::vector<int> exponents_;
    int order_ = 0;
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);
double factorial(int k);

/// Number of multi-indices in `dim` variables with order <= degree, C(dim+degree, degree).
std::size_t multi_index_count(std::size_t dim, int degree);

/// Position of alpha in the graded-lex enumeration (total degree ascending,
/// descending lex within a degree: x1^d comes first). Independent of any cap
/// on the degree, so ranks agree across jets of different degrees.
std::size_t grlex_rank(const MultiIndex& alpha);
MultiIndex grlex_unrank(std::size_t dim, std::size_t rank);

/// All multi-indices with order <= degree in graded-lex order. Cached per (dim, degree).
const std::vector<MultiIndex>& multi_indices(std::size_t dim, int degree);
/// Multi-indices of exactly the given order, in graded-lex order.
std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int order);

/// Polynomial of degree <= m stored as Taylor coefficients about a base point:
/// coeff(alpha) = d^alpha P(base) / alpha!.
class Jet {
public:
    Jet() = default;
    Jet(Point base, int degree);
    Jet(Point base, int degree, std::vector<double> coeffs);

    std::size_t dim() const { return base_.size(); }
    int degree() const { return degree_; }
    const Point& base() const { return base_; }
    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }

    double coeff(const MultiIndex& alpha) const;
    void set_coeff(const MultiIndex& alpha, double value);
    /// d^alpha P(base) = alpha! * coeff(alpha).
    double derivative_at_base(const MultiIndex& alpha) const;

    Jet& operator+=(const Jet& other);
    Jet& operator*=(double scale);

    friend bool operator==(const Jet&, const Jet&) = default;

private:
    Point base_;
    int degree_ = 0;
    std::vector<double> coeffs_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator*(double scale, Jet a);

double eval_jet(const Jet& p, std::span<const double> x);
/// d^alpha P evaluated at x without building the intermediate jet; zero when |alpha| > m.
double jet_derivative_at(const Jet& p, const MultiIndex& alpha, std::span<const double> x);
/// Jet of d^alpha P, degree m - |alpha|, same base.
Jet diff_jet(const Jet& p, const MultiIndex& alpha);
/// Same polynomial re-expanded about new_base.
Jet recenter_jet(const Jet& p, const Point& new_base);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    friend bool operator==(const Rational&, const Rational&) = default;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational make_rational(std::int64_t num, std::int64_t den);

/// Sum over |beta| = r of 1/beta!, by explicit enumeration, in lowest terms.
/// Caps: n <= 16, r <= 8.
Rational sum_reciprocal_factorials(int n, int r);

} // namespace whitney
