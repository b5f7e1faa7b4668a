#pragma once

#include "whitney/jets.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace whitney {

/// A jet attached to every point of a finite set E. For finite E the
/// vanishing-limit condition of C^m(E) holds trivially and is not checked.
class WhitneyField {
public:
    WhitneyField() = default;
    /// Validates distinct points, jet bases equal to their points, and a shared (n, m).
    WhitneyField(std::size_t dim, int degree, std::vector<Point> points, std::vector<Jet> jets);

    std::size_t dim() const { return dim_; }
    int degree() const { return degree_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<Jet>& jets() const { return jets_; }
    const Jet& jet(std::size_t i) const { return jets_[i]; }

    /// Index of x in E when x is bitwise one of the stored points.
    std::optional<std::size_t> find_point(std::span<const double> x) const;

    WhitneyField scaled(double factor) const;
    /// Pointwise sum; requires identical point lists.
    WhitneyField operator+(const WhitneyField& other) const;

private:
    std::size_t dim_ = 0;
    int degree_ = 0;
    std::vector<Point> points_;
    std::vector<Jet> jets_;
};

/// C^m(E) norm: the larger of sup |d^alpha P_x(x)| and
/// sup_{x != y} |d^alpha (P_x - P_y)(x)| / |x - y|^{m - |alpha|}, Euclidean |.|.
/// Exact double loop over ordered pairs; `jobs` splits the outer loop.
double cm_norm(const WhitneyField& f, unsigned jobs = 1);

/// Built-in analytic functions with closed-form derivatives of every order.
/// A function is a weighted sum of terms so linear combinations stay closed form.
class SmoothTestFunction {
public:
    enum class Kind { constant, monomial, sine_product, gaussian };

    struct Term {
        Kind kind = Kind::constant;
        double weight = 1.0;
        double frequency = 1.0;   // sine_product
        double width = 1.0;       // gaussian
        std::vector<int> powers;  // monomial
        Point center;             // gaussian
    };

    static SmoothTestFunction constant(double value);
    /// scale * x^gamma
    static SmoothTestFunction monomial(const MultiIndex& gamma, double scale = 1.0);
    /// scale * prod_i sin(frequency * x_i); unit C^m(R^n) norm when scale = 1, frequency <= 1.
    static SmoothTestFunction sine_product(double scale = 1.0, double frequency = 1.0);
    /// scale * exp(-|x - center|^2 / (2 width^2))
    static SmoothTestFunction gaussian(Point center, double width, double scale = 1.0);

    /// Parses `constant:c`, `monomial:g1,g2,...`, `sines[:scale[:frequency]]`, `gaussian:width` (centered at 0.5).
    static SmoothTestFunction parse(const std::string& spec, std::size_t dim);

    double derivative(const MultiIndex& alpha, std::span<const double> x) const;
    double value(std::span<const double> x) const;
    /// Sum over terms of weight * d^alpha term(x) / alpha!.
    double taylor_coefficient(const MultiIndex& alpha, std::span<const double> x) const;

    const std::vector<Term>& terms() const { return terms_; }

    SmoothTestFunction operator+(const SmoothTestFunction& other) const;
    friend SmoothTestFunction operator*(double scale, SmoothTestFunction f);

private:
    std::vector<Term> terms_;
};

/// Taylor jets of F at every point of E.
WhitneyField restrict_function(const SmoothTestFunction& F, const std::vector<Point>& E, int degree);

/// Random points in [0,1]^n with random Taylor coefficients, rescaled to unit C^m(E) norm.
WhitneyField random_field(std::size_t dim, int degree, std::size_t count, std::uint64_t seed);

/// Vertices of {0,1}^n with one seeded vertex removed; constant terms alternate
/// in sign with vertex parity, higher coefficients random. Unit C^m(E) norm.
WhitneyField adversarial_field(std::size_t dim, int degree, std::uint64_t seed);

/// The vertex removed by adversarial_field for this (dim, seed).
Point adversarial_hole(std::size_t dim, std::uint64_t seed);

// Interchange formats.
WhitneyField read_field_json(std::istream& in);
void write_field_json(std::ostream& out, const WhitneyField& f);
WhitneyField load_field(const std::string& path);
void save_field(const std::string& path, const WhitneyField& f);

/// One point per row, comma separated decimal floats. Blank lines and lines
/// starting with '#' are skipped.
std::vector<Point> read_points_csv(std::istream& in);
std::vector<Point> load_points(const std::string& path);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

} // namespace whitney
