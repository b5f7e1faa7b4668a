#pragma once

#include "whitney/jets.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace whitney {

inline constexpr int kLevelMin = -40;
inline constexpr int kLevelMax = 40;

/// Closed cube origin + side * (anchor + [0,1]^n) with side = 2^level.
/// Geometry is kept as integers and materialized to floats only on demand.
struct DyadicCube {
    int level = 0;
    std::vector<std::int64_t> anchor;
    Point origin;

    std::size_t dim() const { return anchor.size(); }
    double side() const;
    double diameter() const;
    Point corner() const;
    Point center() const;
    DyadicCube parent() const;

    /// Closed containment; `expansion` = t grows the cube to Q* of side s(1+2t).
    bool contains(std::span<const double> x, double expansion = 0.0) const;
    double distance_to(std::span<const double> y) const;

    /// Same level and anchor (origins may differ).
    bool same_lattice_cell(const DyadicCube& other) const { return level == other.level && anchor == other.anchor; }

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Orders by (level, anchor); used for deterministic accumulation.
bool cube_order(const DyadicCube& a, const DyadicCube& b);

struct Nearest {
    double distance = 0.0;
    std::size_t index = 0;
};

/// Exact nearest-point queries against a finite set E, by linear scan over a
/// contiguous coordinate array. Ties resolve to the smallest index.
class DistanceOracle {
public:
    DistanceOracle() = default;
    explicit DistanceOracle(const std::vector<Point>& points);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return size_; }
    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }

    Nearest nearest(std::span<const double> x) const;
    /// Point of E closest to the closed box, with its Euclidean distance.
    Nearest nearest_to_cube(const DyadicCube& q) const;
    /// True when some point of E lies strictly closer than `radius` to the box.
    bool any_closer_than(const DyadicCube& q, double radius) const;

private:
    std::size_t dim_ = 0;
    std::size_t size_ = 0;
    std::vector<double> coords_;
};

/// (dist(x, E), nearest point index).
Nearest delta(const DistanceOracle& oracle, std::span<const double> x);

/// diam(Q) <= dist(Q, E).
bool is_admissible(const DistanceOracle& oracle, const DyadicCube& q);
/// Admissible with an inadmissible parent: a maximal admissible cube.
bool is_whitney(const DistanceOracle& oracle, const DyadicCube& q);

/// The dyadic cube at `level` whose half-open cell contains x.
DyadicCube cell_containing(std::span<const double> x, std::span<const double> origin, int level);

/// The maximal dyadic cube containing x with diam <= dist to E, by level descent.
DyadicCube whitney_cube_at(const DistanceOracle& oracle, std::span<const double> x, std::span<const double> origin);

struct CoveringCube {
    DyadicCube cube;
    bool is_whitney = false;
    double dist_to_E = 0.0;
    std::size_t anchor_index = 0;
};

/// Every Whitney cube Q with x in Q* (closed). Candidates are taken from the
/// levels within a factor 4 of the Whitney cube containing x and, per axis,
/// from the <= 2 cells whose t-expanded slab contains x_i. With
/// `include_rejected`, candidates failing the selection rule are returned too
/// (flagged). Sorted by (level, anchor). Throws when the
/// delta(x) / (s sqrt n) in [1/2, 11/2] bracket fails for a returned cube.
std::vector<CoveringCube> cubes_covering_support(const DistanceOracle& oracle, std::span<const double> x,
                                                 std::span<const double> origin, double t,
                                                 bool include_rejected = false);

/// A point of E at minimal distance to Q (ties by E order).
Point anchor_point(const DistanceOracle& oracle, const DyadicCube& q);

struct DecompositionResult {
    std::vector<CoveringCube> cubes;
    std::size_t truncated = 0;  ///< cells left unresolved at min_level
};

/// All Whitney cubes whose interior meets the open box (lo, hi). Cells that
/// reach `min_level` without resolving are counted, not emitted. n <= 3.
DecompositionResult enumerate_whitney_cubes(const DistanceOracle& oracle, std::span<const double> lo,
                                            std::span<const double> hi, std::span<const double> origin,
                                            int min_level = -8);

} // namespace whitney
