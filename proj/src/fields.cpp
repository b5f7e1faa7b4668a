#include "whitney/fields.hpp"

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"
#include "whitney/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace whitney {

WhitneyField::WhitneyField(std::size_t dim, int degree, std::vector<Point> points, std::vector<Jet> jets)
    : dim_(dim), degree_(degree), points_(std::move(points)), jets_(std::move(jets)) {
    if (points_.empty()) throw Error("fields", "empty_set", "E must contain at least one point");
    if (points_.size() != jets_.size()) throw Error("fields", "jet_count", "one jet per point required");
    std::set<Point> seen;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].size() != dim_) throw Error("fields", "dimension_mismatch", "point dimension differs from n");
        if (jets_[i].dim() != dim_ || jets_[i].degree() != degree_)
            throw Error("fields", "jet_shape", "every jet must share n and m");
        if (jets_[i].base() != points_[i]) throw Error("fields", "jet_base", "jet base must equal its point");
        if (!seen.insert(points_[i]).second) throw Error("fields", "duplicate_point", "points of E must be distinct");
    }
}

std::optional<std::size_t> WhitneyField::find_point(std::span<const double> x) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (std::equal(points_[i].begin(), points_[i].end(), x.begin(), x.end())) return i;
    return std::nullopt;
}

WhitneyField WhitneyField::scaled(double factor) const {
    std::vector<Jet> jets = jets_;
    for (Jet& j : jets) j *= factor;
    return WhitneyField(dim_, degree_, points_, std::move(jets));
}

WhitneyField WhitneyField::operator+(const WhitneyField& other) const {
    if (points_ != other.points_) throw Error("fields", "incompatible_sum", "fields must share the same E");
    std::vector<Jet> jets = jets_;
    for (std::size_t i = 0; i < jets.size(); ++i) jets[i] += other.jets_[i];
    return WhitneyField(dim_, degree_, points_, std::move(jets));
}

double cm_norm(const WhitneyField& f, unsigned jobs) {
    if (f.size() == 0) throw Error("fields", "empty_set", "C^m(E) norm of an empty field");
    const auto& indices = multi_indices(f.dim(), f.degree());
    std::vector<double> factorials(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) factorials[r] = indices[r].factorial();

    std::vector<double> row_max(f.size(), 0.0);
    parallel_for(f.size(), jobs, [&](std::size_t xi) {
        const Jet& px = f.jet(xi);
        double best = 0.0;
        for (std::size_t r = 0; r < indices.size(); ++r)
            best = std::max(best, std::abs(factorials[r] * px.coeffs()[r]));
        for (std::size_t yi = 0; yi < f.size(); ++yi) {
            if (yi == xi) continue;
            const Jet py = recenter_jet(f.jet(yi), px.base());
            double dist2 = 0.0;
            for (std::size_t i = 0; i < f.dim(); ++i) {
                const double d = px.base()[i] - f.points()[yi][i];
                dist2 += d * d;
            }
            const double dist = std::sqrt(dist2);
            for (std::size_t r = 0; r < indices.size(); ++r) {
                const double diff = std::abs(factorials[r] * (px.coeffs()[r] - py.coeffs()[r]));
                best = std::max(best, diff / std::pow(dist, f.degree() - indices[r].order()));
            }
        }
        row_max[xi] = best;
    });
    return *std::max_element(row_max.begin(), row_max.end());
}

namespace {

// d^k/dx^k sin(freq * x) = freq^k sin(freq * x + k pi / 2)
double sine_derivative(int k, double frequency, double x) {
    const double arg = frequency * x;
    double base = 0.0;
    switch (k % 4) {
    case 0: base = std::sin(arg); break;
    case 1: base = std::cos(arg); break;
    case 2: base = -std::sin(arg); break;
    default: base = -std::cos(arg); break;
    }
    return std::pow(frequency, k) * base;
}

// d^k/dx^k exp(-u^2/2) at u, via probabilists' Hermite polynomials.
double gaussian_derivative(int k, double u) {
    double prev = 1.0, curr = u;
    double hermite = k == 0 ? 1.0 : u;
    for (int j = 1; j < k; ++j) {
        const double next = u * curr - j * prev;
        prev = curr;
        curr = next;
        hermite = curr;
    }
    return (k % 2 == 0 ? 1.0 : -1.0) * hermite * std::exp(-0.5 * u * u);
}

double term_derivative(const SmoothTestFunction::Term& term, const MultiIndex& alpha, std::span<const double> x) {
    using Kind = SmoothTestFunction::Kind;
    switch (term.kind) {
    case Kind::constant:
        return alpha.order() == 0 ? 1.0 : 0.0;
    case Kind::monomial: {
        if (term.powers.size() != x.size()) throw Error("fields", "dimension_mismatch", "monomial dimension differs");
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int g = term.powers[i];
            if (alpha[i] > g) return 0.0;
            for (int k = 0; k < alpha[i]; ++k) v *= g - k;
            v *= std::pow(x[i], g - alpha[i]);
        }
        return v;
    }
    case Kind::sine_product: {
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) v *= sine_derivative(alpha[i], term.frequency, x[i]);
        return v;
    }
    case Kind::gaussian: {
        if (term.center.size() != x.size()) throw Error("fields", "dimension_mismatch", "gaussian center dimension");
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            v *= gaussian_derivative(alpha[i], (x[i] - term.center[i]) / term.width) / std::pow(term.width, alpha[i]);
        return v;
    }
    }
    return 0.0;
}

std::vector<double> parse_doubles(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto first = item.find_first_not_of(" \t\r");
        const auto last = item.find_last_not_of(" \t\r");
        if (first == std::string::npos) throw Error("fields", "parse_number", "empty numeric field");
        item = item.substr(first, last - first + 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc{} || ptr != item.data() + item.size())
            throw Error("fields", "parse_number", "not a number: '" + item + "'");
        out.push_back(value);
    }
    return out;
}

} // namespace

SmoothTestFunction SmoothTestFunction::constant(double value) {
    SmoothTestFunction f;
    Term t;
    t.weight = value;
    f.terms_.push_back(std::move(t));
    return f;
}

SmoothTestFunction SmoothTestFunction::monomial(const MultiIndex& gamma, double scale) {
    SmoothTestFunction f;
    Term t;
    t.kind = Kind::monomial;
    t.weight = scale;
    t.powers = gamma.exponents();
    f.terms_.push_back(std::move(t));
    return f;
}

SmoothTestFunction SmoothTestFunction::sine_product(double scale, double frequency) {
    SmoothTestFunction f;
    Term t;
    t.kind = Kind::sine_product;
    t.weight = scale;
    t.frequency = frequency;
    f.terms_.push_back(std::move(t));
    return f;
}

SmoothTestFunction SmoothTestFunction::gaussian(Point center, double width, double scale) {
    if (!(width > 0.0)) throw Error("fields", "gaussian_width", "width must be positive");
    SmoothTestFunction f;
    Term t;
    t.kind = Kind::gaussian;
    t.weight = scale;
    t.width = width;
    t.center = std::move(center);
    f.terms_.push_back(std::move(t));
    return f;
}

SmoothTestFunction SmoothTestFunction::parse(const std::string& spec, std::size_t dim) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (name == "constant") return constant(args.empty() ? 1.0 : parse_doubles(args, ',').at(0));
    if (name == "sines") {
        const auto v = args.empty() ? std::vector<double>{} : parse_doubles(args, ':');
        return sine_product(v.size() > 0 ? v[0] : 1.0, v.size() > 1 ? v[1] : 1.0);
    }
    if (name == "gaussian") {
        const double width = args.empty() ? 0.5 : parse_doubles(args, ',').at(0);
        return gaussian(Point(dim, 0.5), width);
    }
    if (name == "monomial") {
        const auto v = args.empty() ? std::vector<double>{} : parse_doubles(args, ',');
        if (v.size() != dim) throw Error("fields", "function_spec", "monomial needs one exponent per coordinate");
        std::vector<int> powers;
        for (double p : v) {
            if (p < 0 || p != std::floor(p)) throw Error("fields", "function_spec", "monomial exponents are integers");
            powers.push_back(static_cast<int>(p));
        }
        return monomial(MultiIndex(std::move(powers)));
    }
    throw Error("fields", "function_spec", "unknown built-in function '" + name + "'");
}

double SmoothTestFunction::derivative(const MultiIndex& alpha, std::span<const double> x) const {
    if (alpha.dim() != x.size()) throw Error("fields", "dimension_mismatch", "alpha and x dimensions differ");
    double v = 0.0;
    for (const Term& term : terms_) v += term.weight * term_derivative(term, alpha, x);
    return v;
}

double SmoothTestFunction::value(std::span<const double> x) const {
    return derivative(MultiIndex::zero(x.size()), x);
}

double SmoothTestFunction::taylor_coefficient(const MultiIndex& alpha, std::span<const double> x) const {
    const double fact = alpha.factorial();
    double v = 0.0;
    for (const Term& term : terms_) v += term.weight * (term_derivative(term, alpha, x) / fact);
    return v;
}

SmoothTestFunction SmoothTestFunction::operator+(const SmoothTestFunction& other) const {
    SmoothTestFunction f = *this;
    f.terms_.insert(f.terms_.end(), other.terms_.begin(), other.terms_.end());
    return f;
}

SmoothTestFunction operator*(double scale, SmoothTestFunction f) {
    for (auto& term : f.terms_) term.weight *= scale;
    return f;
}

WhitneyField restrict_function(const SmoothTestFunction& F, const std::vector<Point>& E, int degree) {
    if (E.empty()) throw Error("fields", "empty_set", "restriction to an empty set");
    const std::size_t n = E.front().size();
    const auto& indices = multi_indices(n, degree);
    std::vector<Jet> jets;
    jets.reserve(E.size());
    for (const Point& y : E) {
        Jet p(y, degree);
        for (std::size_t r = 0; r < indices.size(); ++r) p.coeffs()[r] = F.taylor_coefficient(indices[r], y);
        jets.push_back(std::move(p));
    }
    return WhitneyField(n, degree, E, std::move(jets));
}

namespace {

WhitneyField normalized(const WhitneyField& f) {
    const double norm = cm_norm(f);
    if (!(norm > 0.0)) throw Error("fields", "zero_norm", "cannot normalize a field of zero norm");
    return f.scaled(1.0 / norm);
}

} // namespace

WhitneyField random_field(std::size_t dim, int degree, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error("fields", "empty_set", "random field needs at least one point");
    Rng rng(seed, 0x72616e64u);
    std::vector<Point> points;
    std::set<Point> seen;
    while (points.size() < count) {
        Point p(dim);
        for (double& c : p) c = rng.uniform();
        if (seen.insert(p).second) points.push_back(std::move(p));
    }
    std::vector<Jet> jets;
    for (const Point& y : points) {
        Jet p(y, degree);
        for (double& c : p.coeffs()) c = rng.uniform(-1.0, 1.0);
        jets.push_back(std::move(p));
    }
    return normalized(WhitneyField(dim, degree, std::move(points), std::move(jets)));
}

Point adversarial_hole(std::size_t dim, std::uint64_t seed) {
    if (dim == 0 || dim > kMaxDimension) throw Error("fields", "dimension_cap", "dimension outside [1, 16]");
    Rng rng(seed, 0x686f6c65u);
    const std::uint64_t vertex = rng.below(std::uint64_t{1} << dim);
    Point hole(dim);
    for (std::size_t i = 0; i < dim; ++i) hole[i] = static_cast<double>((vertex >> i) & 1u);
    return hole;
}

WhitneyField adversarial_field(std::size_t dim, int degree, std::uint64_t seed) {
    const Point hole = adversarial_hole(dim, seed);
    Rng rng(seed, 0x61647672u);
    std::vector<Point> points;
    std::vector<Jet> jets;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << dim); ++v) {
        Point p(dim);
        int parity = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            p[i] = static_cast<double>((v >> i) & 1u);
            parity += static_cast<int>((v >> i) & 1u);
        }
        if (p == hole) continue;
        Jet jet(p, degree);
        jet.coeffs()[0] = parity % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t r = 1; r < jet.coeffs().size(); ++r) jet.coeffs()[r] = rng.uniform(-1.0, 1.0);
        points.push_back(std::move(p));
        jets.push_back(std::move(jet));
    }
    return normalized(WhitneyField(dim, degree, std::move(points), std::move(jets)));
}

WhitneyField read_field_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
        const auto n = doc.at("n").get<std::size_t>();
        const int m = doc.at("m").get<int>();
        std::vector<Point> points;
        std::vector<Jet> jets;
        for (const auto& entry : doc.at("points")) {
            Point y = entry.at("y").get<Point>();
            auto coeffs = entry.at("coeffs").get<std::vector<double>>();
            if (y.size() != n) throw Error("fields", "dimension_mismatch", "point dimension differs from n");
            jets.emplace_back(y, m, std::move(coeffs));
            points.push_back(std::move(y));
        }
        return WhitneyField(n, m, std::move(points), std::move(jets));
    } catch (const nlohmann::json::exception& e) {
        throw Error("fields", "json", e.what());
    }
}

void write_field_json(std::ostream& out, const WhitneyField& f) {
    // Hand-written so that doubles use the shortest round-trip form.
    out << "{\n  \"n\": " << f.dim() << ",\n  \"m\": " << f.degree() << ",\n  \"points\": [";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << (i == 0 ? "\n" : ",\n") << "    { \"y\": [";
        for (std::size_t k = 0; k < f.dim(); ++k) out << (k ? ", " : "") << format_double(f.points()[i][k]);
        out << "], \"coeffs\": [";
        const auto coeffs = f.jet(i).coeffs();
        for (std::size_t k = 0; k < coeffs.size(); ++k) out << (k ? ", " : "") << format_double(coeffs[k]);
        out << "] }";
    }
    out << "\n  ]\n}\n";
}

WhitneyField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("fields", "open", "cannot open field file '" + path + "'");
    return read_field_json(in);
}

void save_field(const std::string& path, const WhitneyField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("fields", "open", "cannot write field file '" + path + "'");
    write_field_json(out, f);
}

std::vector<Point> read_points_csv(std::istream& in) {
    std::vector<Point> points;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        Point p = parse_doubles(line, ',');
        if (!points.empty() && p.size() != points.front().size())
            throw Error("fields", "dimension_mismatch", "rows of the points CSV differ in length");
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<Point> load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("fields", "open", "cannot open points file '" + path + "'");
    return read_points_csv(in);
}

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

} // namespace whitney
