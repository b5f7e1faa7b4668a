#include "whitney/cubes.hpp"

#include "whitney/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

namespace whitney {

double DyadicCube::side() const { return std::ldexp(1.0, level); }

double DyadicCube::diameter() const { return side() * std::sqrt(static_cast<double>(dim())); }

Point DyadicCube::corner() const {
    Point c(dim());
    const double s = side();
    for (std::size_t i = 0; i < dim(); ++i) c[i] = origin[i] + s * static_cast<double>(anchor[i]);
    return c;
}

Point DyadicCube::center() const {
    Point c = corner();
    for (double& v : c) v += 0.5 * side();
    return c;
}

DyadicCube DyadicCube::parent() const {
    DyadicCube p{level + 1, anchor, origin};
    for (auto& a : p.anchor) a = a >= 0 ? a / 2 : -((-a + 1) / 2);
    return p;
}

bool DyadicCube::contains(std::span<const double> x, double expansion) const {
    const double s = side();
    const Point c = corner();
    for (std::size_t i = 0; i < dim(); ++i) {
        if (x[i] < c[i] - expansion * s || x[i] > c[i] + s + expansion * s) return false;
    }
    return true;
}

namespace {

// Squared Euclidean distance from y to the box [lo, lo + side]^n.
double box_distance2(std::span<const double> lo, double side, std::span<const double> y) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        double d = 0.0;
        if (y[i] < lo[i])
            d = lo[i] - y[i];
        else if (y[i] > lo[i] + side)
            d = y[i] - lo[i] - side;
        d2 += d * d;
    }
    return d2;
}

void check_level(int level) {
    if (level < kLevelMin || level > kLevelMax)
        throw Error("cubes", "level_guard",
                    "dyadic level " + std::to_string(level) + " outside [" + std::to_string(kLevelMin) + ", " +
                        std::to_string(kLevelMax) + "]");
}

} // namespace

double DyadicCube::distance_to(std::span<const double> y) const {
    const Point c = corner();
    return std::sqrt(box_distance2(c, side(), y));
}

bool cube_order(const DyadicCube& a, const DyadicCube& b) {
    if (a.level != b.level) return a.level < b.level;
    return a.anchor < b.anchor;
}

DistanceOracle::DistanceOracle(const std::vector<Point>& points) {
    if (points.empty()) throw Error("cubes", "empty_set", "distance oracle needs a nonempty E");
    dim_ = points.front().size();
    size_ = points.size();
    coords_.reserve(dim_ * size_);
    for (const Point& p : points) {
        if (p.size() != dim_) throw Error("cubes", "dimension_mismatch", "points of E differ in dimension");
        coords_.insert(coords_.end(), p.begin(), p.end());
    }
}

Nearest DistanceOracle::nearest(std::span<const double> x) const {
    if (size_ == 0) throw Error("cubes", "empty_set", "nearest point in an empty E");
    if (x.size() != dim_) throw Error("cubes", "dimension_mismatch", "query dimension differs from E");
    Nearest best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < size_; ++k) {
        const double* y = coords_.data() + k * dim_;
        double d2 = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double d = x[i] - y[i];
            d2 += d * d;
        }
        if (d2 < best.distance) best = {d2, k};
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

Nearest DistanceOracle::nearest_to_cube(const DyadicCube& q) const {
    if (size_ == 0) throw Error("cubes", "empty_set", "nearest point in an empty E");
    const Point lo = q.corner();
    const double s = q.side();
    Nearest best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < size_; ++k) {
        const double d2 = box_distance2(lo, s, point(k));
        if (d2 < best.distance) best = {d2, k};
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

bool DistanceOracle::any_closer_than(const DyadicCube& q, double radius) const {
    const Point lo = q.corner();
    const double s = q.side();
    const double r2 = radius * radius;
    for (std::size_t k = 0; k < size_; ++k)
        if (box_distance2(lo, s, point(k)) < r2) return true;
    return false;
}

Nearest delta(const DistanceOracle& oracle, std::span<const double> x) { return oracle.nearest(x); }

bool is_admissible(const DistanceOracle& oracle, const DyadicCube& q) {
    return !oracle.any_closer_than(q, q.diameter());
}

bool is_whitney(const DistanceOracle& oracle, const DyadicCube& q) {
    return is_admissible(oracle, q) && !is_admissible(oracle, q.parent());
}

DyadicCube cell_containing(std::span<const double> x, std::span<const double> origin, int level) {
    check_level(level);
    DyadicCube q{level, std::vector<std::int64_t>(x.size()), Point(origin.begin(), origin.end())};
    const double s = q.side();
    for (std::size_t i = 0; i < x.size(); ++i) q.anchor[i] = static_cast<std::int64_t>(std::floor((x[i] - origin[i]) / s));
    return q;
}

DyadicCube whitney_cube_at(const DistanceOracle& oracle, std::span<const double> x, std::span<const double> origin) {
    if (origin.size() != x.size()) throw Error("cubes", "dimension_mismatch", "origin dimension differs from x");
    const Nearest nearest = oracle.nearest(x);
    if (nearest.distance == 0.0) throw Error("cubes", "point_in_E", "x lies in E; no Whitney cube contains it");
    const double root_n = std::sqrt(static_cast<double>(x.size()));
    // At level top the diameter exceeds delta(x) >= dist(Q, E), so the maximal
    // admissible level is strictly below it.
    const int top = static_cast<int>(std::floor(std::log2(nearest.distance / root_n))) + 1;
    for (int level = std::min(top, kLevelMax + 1) - 1; level >= kLevelMin; --level) {
        DyadicCube q = cell_containing(x, origin, level);
        if (is_admissible(oracle, q)) {
            if (level == kLevelMax && is_admissible(oracle, q.parent()))
                throw Error("cubes", "level_guard", "Whitney cube above the maximal level");
            return q;
        }
    }
    throw Error("cubes", "level_guard", "delta(x) below the minimal dyadic level");
}

std::vector<CoveringCube> cubes_covering_support(const DistanceOracle& oracle, std::span<const double> x,
                                                 std::span<const double> origin, double t, bool include_rejected) {
    const std::size_t n = x.size();
    const DyadicCube home = whitney_cube_at(oracle, x, origin);
    const double delta_x = oracle.nearest(x).distance;
    const double root_n = std::sqrt(static_cast<double>(n));

    std::vector<CoveringCube> out;
    for (int level = home.level - 2; level <= home.level + 2; ++level) {
        check_level(level);
        const double s = std::ldexp(1.0, level);
        std::vector<std::vector<std::int64_t>> choices(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (x[i] - origin[i]) / s;
            const auto a_lo = static_cast<std::int64_t>(std::ceil(u - 1.0 - t));
            const auto a_hi = static_cast<std::int64_t>(std::floor(u + t));
            for (std::int64_t a = a_lo; a <= a_hi; ++a) choices[i].push_back(a);
        }
        DyadicCube q{level, std::vector<std::int64_t>(n), Point(origin.begin(), origin.end())};
        std::vector<std::size_t> pick(n, 0);
        while (true) {
            for (std::size_t i = 0; i < n; ++i) q.anchor[i] = choices[i][pick[i]];
            const bool whitney = q.contains(x, t) && is_whitney(oracle, q);
            if (whitney || include_rejected) {
                const Nearest anchor = oracle.nearest_to_cube(q);
                out.push_back({q, whitney, anchor.distance, anchor.index});
                if (whitney) {
                    const double ratio = delta_x / (s * root_n);
                    if (!(ratio >= 0.5 && ratio <= 5.5))
                        throw Error("cubes", "delta_bracket",
                                    "delta(x)/(s sqrt n) = " + std::to_string(ratio) + " outside [1/2, 11/2]");
                }
            }
            std::size_t i = 0;
            while (i < n && ++pick[i] == choices[i].size()) pick[i++] = 0;
            if (i == n) break;
        }
    }
    std::sort(out.begin(), out.end(), [](const CoveringCube& a, const CoveringCube& b) { return cube_order(a.cube, b.cube); });
    return out;
}

Point anchor_point(const DistanceOracle& oracle, const DyadicCube& q) {
    const auto p = oracle.point(oracle.nearest_to_cube(q).index);
    return Point(p.begin(), p.end());
}

DecompositionResult enumerate_whitney_cubes(const DistanceOracle& oracle, std::span<const double> lo,
                                            std::span<const double> hi, std::span<const double> origin,
                                            int min_level) {
    const std::size_t n = lo.size();
    if (n == 0 || n > 3) throw Error("cubes", "enumeration_dimension", "enumeration supports n <= 3 only");
    if (hi.size() != n || origin.size() != n || oracle.dim() != n)
        throw Error("cubes", "dimension_mismatch", "box, origin and E dimensions differ");
    double width = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(hi[i] > lo[i])) throw Error("cubes", "empty_box", "box must have hi > lo in every coordinate");
        width = std::max(width, hi[i] - lo[i]);
    }
    check_level(min_level);

    auto overlaps = [&](const DyadicCube& q) {
        const Point c = q.corner();
        for (std::size_t i = 0; i < n; ++i)
            if (c[i] + q.side() <= lo[i] || c[i] >= hi[i]) return false;
        return true;
    };

    std::map<std::pair<int, std::vector<std::int64_t>>, CoveringCube> found;
    DecompositionResult result;
    std::function<void(const DyadicCube&)> visit = [&](const DyadicCube& q) {
        if (is_admissible(oracle, q)) {
            DyadicCube top = q;
            while (top.level < kLevelMax && is_admissible(oracle, top.parent())) top = top.parent();
            const Nearest anchor = oracle.nearest_to_cube(top);
            found.emplace(std::make_pair(top.level, top.anchor), CoveringCube{top, true, anchor.distance, anchor.index});
            return;
        }
        if (q.level <= min_level) {
            ++result.truncated;
            return;
        }
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            DyadicCube child{q.level - 1, q.anchor, q.origin};
            for (std::size_t i = 0; i < n; ++i) child.anchor[i] = 2 * q.anchor[i] + ((mask >> i) & 1u);
            if (overlaps(child)) visit(child);
        }
    };

    const int root_level = std::clamp(static_cast<int>(std::ceil(std::log2(width))), min_level, kLevelMax);
    const double s = std::ldexp(1.0, root_level);
    std::vector<std::int64_t> a_lo(n), a_hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        a_lo[i] = static_cast<std::int64_t>(std::floor((lo[i] - origin[i]) / s));
        a_hi[i] = static_cast<std::int64_t>(std::ceil((hi[i] - origin[i]) / s)) - 1;
    }
    std::vector<std::int64_t> a = a_lo;
    while (true) {
        DyadicCube root{root_level, a, Point(origin.begin(), origin.end())};
        if (overlaps(root)) visit(root);
        std::size_t i = 0;
        while (i < n && ++a[i] > a_hi[i]) a[i] = a_lo[i], ++i;
        if (i == n) break;
    }
    for (auto& [key, cube] : found) result.cubes.push_back(std::move(cube));
    return result;
}

} // namespace whitney
