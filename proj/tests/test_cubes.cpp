#include "whitney/cubes.hpp"
#include "whitney/error.hpp"
#include "whitney/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace whitney;

namespace {

std::vector<Point> random_points(Rng& rng, std::size_t n, std::size_t count) {
    std::vector<Point> pts(count, Point(n));
    for (auto& p : pts)
        for (double& v : p) v = rng.uniform();
    return pts;
}

double brute_point_distance(const std::vector<Point>& E, const Point& x) {
    double best = INFINITY;
    for (const auto& y : E) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
        best = std::min(best, std::sqrt(d2));
    }
    return best;
}

// Box [lo, lo + side]^n against E, from the definition.
double brute_box_distance(const std::vector<Point>& E, const Point& lo, double side) {
    double best = INFINITY;
    for (const auto& y : E) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double c = std::clamp(y[i], lo[i], lo[i] + side);
            d2 += (y[i] - c) * (y[i] - c);
        }
        best = std::min(best, std::sqrt(d2));
    }
    return best;
}

bool brute_whitney(const std::vector<Point>& E, const DyadicCube& q) {
    const double root_n = std::sqrt(static_cast<double>(q.dim()));
    const DyadicCube p = q.parent();
    return q.side() * root_n <= brute_box_distance(E, q.corner(), q.side()) &&
           p.side() * root_n > brute_box_distance(E, p.corner(), p.side());
}

Point random_probe(Rng& rng, std::size_t n) {
    Point x(n);
    for (double& v : x) v = rng.uniform(-0.25, 1.25);
    return x;
}

} // namespace

TEST(DistanceTest, Examples) {
    const DistanceOracle o({Point{0.0}});
    const auto on = delta(o, Point{0.0});
    EXPECT_EQ(on.distance, 0.0);
    EXPECT_EQ(on.index, 0u);
    const auto off = delta(o, Point{1.5});
    EXPECT_EQ(off.distance, 1.5);
    EXPECT_EQ(off.index, 0u);
    EXPECT_THROW(DistanceOracle(std::vector<Point>{}), Error);
}

TEST(DistanceTest, TiesResolveToFirstIndex) {
    const DistanceOracle o({Point{1.0, 0.0}, Point{-1.0, 0.0}});
    EXPECT_EQ(delta(o, Point{0.0, 0.5}).index, 0u);
}

TEST(DistanceTest, MatchesBruteForce) {
    Rng rng(1);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto E = random_points(rng, n, 30);
        const DistanceOracle o(E);
        for (int k = 0; k < 100; ++k) {
            const Point x = random_probe(rng, n);
            const auto got = delta(o, x);
            EXPECT_NEAR(got.distance, brute_point_distance(E, x), 1e-14 * got.distance);
            EXPECT_NEAR(got.distance, brute_point_distance({E[got.index]}, x), 1e-14 * got.distance);
        }
    }
}

TEST(CubeTest, Geometry) {
    const DyadicCube q{-1, {3, -2}, Point{0.25, 0.0}};
    EXPECT_EQ(q.side(), 0.5);
    EXPECT_EQ(q.corner(), (Point{1.75, -1.0}));
    EXPECT_EQ(q.center(), (Point{2.0, -0.75}));
    EXPECT_DOUBLE_EQ(q.diameter(), 0.5 * std::sqrt(2.0));
    const DyadicCube p = q.parent();
    EXPECT_EQ(p.level, 0);
    EXPECT_EQ(p.anchor, (std::vector<std::int64_t>{1, -1}));
    EXPECT_TRUE(q.contains(Point{2.25, -0.5}));
    EXPECT_FALSE(q.contains(Point{2.3, -0.5}));
    EXPECT_TRUE(q.contains(Point{2.3, -0.5}, 0.125));
}

TEST(CubeTest, ParentContainsChild) {
    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        DyadicCube q{static_cast<int>(rng.below(8)) - 4, {static_cast<std::int64_t>(rng.below(41)) - 20,
                                                           static_cast<std::int64_t>(rng.below(41)) - 20},
                     Point{0.0, 0.0}};
        const DyadicCube p = q.parent();
        EXPECT_TRUE(p.contains(q.corner()));
        EXPECT_TRUE(p.contains(q.center()));
    }
}

TEST(WhitneyCubeTest, UnitIntervalExample) {
    const DistanceOracle o({Point{0.0}});
    const DyadicCube q = whitney_cube_at(o, Point{1.5}, Point{0.0});
    EXPECT_EQ(q.level, 0);
    EXPECT_EQ(q.anchor, (std::vector<std::int64_t>{1}));
    EXPECT_TRUE(is_whitney(o, q));
    EXPECT_FALSE(is_admissible(o, q.parent()));
}

TEST(WhitneyCubeTest, LevelDescentNearSet) {
    // [1/16, 1/8] has diameter 1/16 equal to its distance to 0, and its parent
    // [0, 1/8] touches 0, so the selection rule stops at side 1/16.
    const DistanceOracle o({Point{0.0}});
    const DyadicCube q = whitney_cube_at(o, Point{0.1}, Point{0.0});
    EXPECT_EQ(q.level, -4);
    EXPECT_TRUE(q.contains(Point{0.1}));
    EXPECT_LE(q.diameter(), o.nearest_to_cube(q).distance);
    // Brute force over levels: the largest admissible cell containing 0.1.
    int best = kLevelMin;
    for (int level = -10; level <= 3; ++level)
        if (is_admissible(o, cell_containing(Point{0.1}, Point{0.0}, level))) best = level;
    EXPECT_EQ(q.level, best);
}

TEST(WhitneyCubeTest, Errors) {
    const DistanceOracle o({Point{0.0, 0.0}});
    EXPECT_THROW(whitney_cube_at(o, Point{0.0, 0.0}, Point{0.0, 0.0}), Error);
    EXPECT_THROW(whitney_cube_at(o, Point{1e-14, 0.0}, Point{0.0, 0.0}), Error);
}

TEST(WhitneyCubeTest, MatchesBruteForceRule) {
    Rng rng(3);
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto E = random_points(rng, n, 8);
        const DistanceOracle o(E);
        for (int k = 0; k < 100; ++k) {
            const Point x = random_probe(rng, n);
            Point b(n);
            for (double& v : b) v = rng.uniform();
            const DyadicCube q = whitney_cube_at(o, x, b);
            EXPECT_TRUE(q.contains(x));
            EXPECT_TRUE(brute_whitney(E, q));
        }
    }
}

TEST(WhitneyCubeTest, SelectionSoundness) {
    Rng rng(4);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto E = random_points(rng, n, 10);
        const DistanceOracle o(E);
        for (int k = 0; k < 100; ++k) {
            const DyadicCube q = whitney_cube_at(o, random_probe(rng, n), Point(n, 0.0));
            const double dist = o.nearest_to_cube(q).distance;
            EXPECT_LE(q.diameter(), dist);
            EXPECT_LE(dist, 4.0 * q.diameter());
        }
    }
}

TEST(WhitneyCubeTest, SelectedCubesDoNotOverlap) {
    Rng rng(5);
    const auto E = random_points(rng, 2, 6);
    const DistanceOracle o(E);
    for (int k = 0; k < 500; ++k) {
        const Point x = random_probe(rng, 2), y = random_probe(rng, 2);
        const DyadicCube a = whitney_cube_at(o, x, Point{0.0, 0.0});
        const DyadicCube b = whitney_cube_at(o, y, Point{0.0, 0.0});
        if (a == b) continue;
        // Disjoint interiors: some axis separates the open boxes.
        const Point ca = a.corner(), cb = b.corner();
        bool separated = false;
        for (std::size_t i = 0; i < 2; ++i)
            if (ca[i] + a.side() <= cb[i] || cb[i] + b.side() <= ca[i]) separated = true;
        EXPECT_TRUE(separated);
    }
}

TEST(WhitneyCubeTest, PeriodicInOrigin) {
    Rng rng(6);
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto E = random_points(rng, n, 6);
        const DistanceOracle o(E);
        for (int k = 0; k < 50; ++k) {
            const Point x = random_probe(rng, n);
            Point b(n);
            for (double& v : b) v = rng.uniform();
            const DyadicCube q = whitney_cube_at(o, x, b);
            for (std::size_t i = 0; i < n; ++i) {
                Point shifted = b;
                shifted[i] += 16.0 * q.side();
                const DyadicCube r = whitney_cube_at(o, x, shifted);
                EXPECT_EQ(r.level, q.level);
                for (std::size_t j = 0; j < n; ++j) {
                    EXPECT_EQ(r.anchor[j], q.anchor[j] - (j == i ? 16 : 0));
                    EXPECT_NEAR(r.corner()[j], q.corner()[j], 1e-15);
                }
            }
        }
    }
}

TEST(WhitneyCubeTest, OriginEquivariance) {
    Rng rng(7);
    for (int k = 0; k < 100; ++k) {
        // Dyadic rationals keep the translated problem exact.
        auto dyadic = [&] { return std::ldexp(static_cast<double>(rng.below(1024)), -10); };
        const std::vector<Point> E{Point{dyadic(), dyadic()}, Point{dyadic(), dyadic()}};
        if (E[0] == E[1]) continue;
        const DistanceOracle o(E);
        const Point x{dyadic() + std::ldexp(1.0, -12), dyadic() + std::ldexp(1.0, -12)};
        const Point b{dyadic(), dyadic()};
        const Point v{std::ldexp(static_cast<double>(rng.below(64)), -3), -std::ldexp(static_cast<double>(rng.below(64)), -4)};
        std::vector<Point> Ev = E;
        for (auto& p : Ev)
            for (std::size_t i = 0; i < 2; ++i) p[i] += v[i];
        const DistanceOracle ov(Ev);
        const Point xv{x[0] + v[0], x[1] + v[1]}, bv{b[0] + v[0], b[1] + v[1]};
        const DyadicCube q = whitney_cube_at(o, x, b);
        const DyadicCube r = whitney_cube_at(ov, xv, bv);
        EXPECT_EQ(r.level, q.level);
        EXPECT_EQ(r.anchor, q.anchor);
        EXPECT_EQ(r.corner(), (Point{q.corner()[0] + v[0], q.corner()[1] + v[1]}));
    }
}

TEST(CoveringTest, CenterOfOwnCube) {
    const DistanceOracle o({Point{0.0}});
    const auto cover = cubes_covering_support(o, Point{1.5}, Point{0.0}, 0.125);
    ASSERT_EQ(cover.size(), 1u);
    EXPECT_EQ(cover[0].cube.level, 0);
    EXPECT_EQ(cover[0].cube.anchor[0], 1);
}

TEST(CoveringTest, NearBoundaryMatchesEnumeration) {
    const double t = 0.125;
    const std::vector<Point> E{Point{0.0}};
    const DistanceOracle o(E);
    const Point x{1.0 + t / 2};
    std::vector<std::pair<int, std::int64_t>> expected;
    for (int level = -2; level <= 2; ++level) {
        const double s = std::ldexp(1.0, level);
        for (std::int64_t a = 0; a * s < 4.0; ++a) {
            const DyadicCube q{level, {a}, Point{0.0}};
            if (brute_whitney(E, q) && q.contains(x, t)) expected.emplace_back(level, a);
        }
    }
    const auto cover = cubes_covering_support(o, x, Point{0.0}, t);
    std::vector<std::pair<int, std::int64_t>> got;
    for (const auto& c : cover) got.emplace_back(c.cube.level, c.cube.anchor[0]);
    EXPECT_EQ(got, expected);
    EXPECT_EQ(got, (std::vector<std::pair<int, std::int64_t>>{{-1, 1}, {0, 1}}));
}

TEST(CoveringTest, CompleteAgainstWideSearch) {
    Rng rng(8);
    const double t = 0.2;
    for (std::size_t n = 1; n <= 2; ++n) {
        const auto E = random_points(rng, n, 5);
        const DistanceOracle o(E);
        for (int k = 0; k < 40; ++k) {
            const Point x = random_probe(rng, n);
            if (o.nearest(x).distance < 1e-3) continue;
            const auto cover = cubes_covering_support(o, x, Point(n, 0.0), t);
            const int home = whitney_cube_at(o, x, Point(n, 0.0)).level;
            std::size_t count = 0;
            for (int level = home - 5; level <= home + 5; ++level) {
                const double s = std::ldexp(1.0, level);
                std::vector<std::int64_t> lo(n), hi(n);
                for (std::size_t i = 0; i < n; ++i) {
                    lo[i] = static_cast<std::int64_t>(std::floor(x[i] / s)) - 2;
                    hi[i] = lo[i] + 4;
                }
                std::vector<std::int64_t> a = lo;
                while (true) {
                    const DyadicCube q{level, a, Point(n, 0.0)};
                    if (q.contains(x, t) && brute_whitney(E, q)) ++count;
                    std::size_t i = 0;
                    while (i < n && ++a[i] > hi[i]) a[i] = lo[i], ++i;
                    if (i == n) break;
                }
            }
            EXPECT_EQ(cover.size(), count);
        }
    }
}

TEST(CoveringTest, SideRatiosAndBrackets) {
    Rng rng(9);
    const double t = 0.125;
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto E = random_points(rng, n, 8);
        const DistanceOracle o(E);
        for (int k = 0; k < 100; ++k) {
            const Point x = random_probe(rng, n);
            const auto cover = cubes_covering_support(o, x, Point(n, 0.0), t);
            ASSERT_FALSE(cover.empty());
            const double dx = o.nearest(x).distance;
            for (const auto& a : cover) {
                EXPECT_TRUE(a.is_whitney);
                EXPECT_TRUE(a.cube.contains(x, t));
                const double ratio = dx / (a.cube.side() * std::sqrt(static_cast<double>(n)));
                EXPECT_GE(ratio, 0.5);
                EXPECT_LE(ratio, 5.5);
                for (const auto& b : cover) {
                    EXPECT_GE(a.cube.side(), 0.25 * b.cube.side());
                    EXPECT_LE(a.cube.side(), 4.0 * b.cube.side());
                }
            }
            EXPECT_TRUE(std::is_sorted(cover.begin(), cover.end(), [](const auto& a, const auto& b) {
                return cube_order(a.cube, b.cube);
            }));
        }
    }
}

TEST(CoveringTest, RejectedCandidatesFlagged) {
    const DistanceOracle o({Point{0.0}});
    const auto all = cubes_covering_support(o, Point{1.0 + 1.0 / 16}, Point{0.0}, 0.125, true);
    const auto kept = cubes_covering_support(o, Point{1.0 + 1.0 / 16}, Point{0.0}, 0.125);
    EXPECT_GT(all.size(), kept.size());
    EXPECT_EQ(static_cast<std::size_t>(std::count_if(all.begin(), all.end(), [](const auto& c) { return c.is_whitney; })),
              kept.size());
}

TEST(AnchorTest, Examples) {
    const DistanceOracle single({Point{0.0}});
    EXPECT_EQ(anchor_point(single, DyadicCube{0, {1}, Point{0.0}}), (Point{0.0}));
    const DistanceOracle pair({Point{0.0, 0.0}, Point{10.0, 0.0}});
    EXPECT_EQ(anchor_point(pair, DyadicCube{0, {1, 1}, Point{0.0, 0.0}}), (Point{0.0, 0.0}));
}

TEST(AnchorTest, MatchesBruteForce) {
    Rng rng(10);
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto E = random_points(rng, n, 20);
        const DistanceOracle o(E);
        for (int k = 0; k < 100; ++k) {
            const DyadicCube q = whitney_cube_at(o, random_probe(rng, n), Point(n, 0.0));
            const Point p = anchor_point(o, q);
            const double best = brute_box_distance(E, q.corner(), q.side());
            EXPECT_NEAR(brute_box_distance({p}, q.corner(), q.side()), best, 1e-14);
            EXPECT_NE(std::find(E.begin(), E.end(), p), E.end());
        }
    }
}

TEST(EnumerationTest, OneDimensionalBox) {
    const DistanceOracle o({Point{0.0}});
    const auto result = enumerate_whitney_cubes(o, Point{0.0}, Point{4.0}, Point{0.0}, -6);
    std::vector<std::pair<int, std::int64_t>> got;
    for (const auto& c : result.cubes) got.emplace_back(c.cube.level, c.cube.anchor[0]);
    // Dyadic shells [2^j, 2^{j+1}] down to the truncation level, then [2, 4].
    std::vector<std::pair<int, std::int64_t>> expected;
    for (int j = -6; j <= 1; ++j) expected.emplace_back(j, 1);
    EXPECT_EQ(got, expected);
    EXPECT_EQ(result.truncated, 1u);
}

TEST(EnumerationTest, CubesAreWhitneyAndDisjoint) {
    Rng rng(11);
    const auto E = random_points(rng, 2, 4);
    const DistanceOracle o(E);
    const auto result = enumerate_whitney_cubes(o, Point{0.0, 0.0}, Point{1.0, 1.0}, Point{0.0, 0.0}, -5);
    ASSERT_FALSE(result.cubes.empty());
    for (std::size_t i = 0; i < result.cubes.size(); ++i) {
        const auto& a = result.cubes[i].cube;
        EXPECT_TRUE(brute_whitney(E, a));
        for (std::size_t j = i + 1; j < result.cubes.size(); ++j) {
            const auto& b = result.cubes[j].cube;
            const Point ca = a.corner(), cb = b.corner();
            bool separated = false;
            for (std::size_t k = 0; k < 2; ++k)
                if (ca[k] + a.side() <= cb[k] || cb[k] + b.side() <= ca[k]) separated = true;
            EXPECT_TRUE(separated);
        }
    }
    EXPECT_THROW(enumerate_whitney_cubes(DistanceOracle({Point(4, 0.0)}), Point(4, 0.0), Point(4, 1.0), Point(4, 0.0)),
                 Error);
}
