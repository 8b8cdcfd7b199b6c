#include "flipmesh/geom.hpp"
#include "flipmesh/intersect.hpp"
#include "flipmesh/rng.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace flipmesh;
using std::numbers::pi;

TEST(AngleAt, Examples)
{
    EXPECT_NEAR(angle_at({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), pi / 2, 1e-15);
    EXPECT_NEAR(angle_at({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), 0.0, 1e-15);
    EXPECT_NEAR(angle_at({0, 0, 0}, {1, 0, 0}, {1, 1, 0}), pi / 4, 1e-15);
    EXPECT_THROW(angle_at({0, 0, 0}, {0, 0, 0}, {1, 0, 0}), DegenerateInput);
}

TEST(AngleAt, AgreesWithLawOfCosines)
{
    const CounterRng rng(3);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Point3 p[3];
        for (int k = 0; k < 3; ++k)
            p[k] = {rng.uniform(9 * i + 3 * k, -1, 1), rng.uniform(9 * i + 3 * k + 1, -1, 1),
                    rng.uniform(9 * i + 3 * k + 2, -1, 1)};
        // acos is ill-conditioned near 0 and pi; stay away from there
        const double ref = oracle::angle_law_of_cosines(p[0], p[1], p[2]);
        if (ref < 1e-3 || ref > pi - 1e-3)
            continue;
        EXPECT_NEAR(angle_at(p[0], p[1], p[2]), ref, 1e-9);
    }
}

TEST(ClassifyEdge, UnitSquareIsNonStrict)
{
    const EdgeQuad q{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const DelaunayStatus s = classify_edge(q);
    EXPECT_EQ(s.kind, DelaunayKind::NonStrict);
    EXPECT_NEAR(s.measured_sum, pi, 1e-15);
}

TEST(ClassifyEdge, RegularTetrahedronIsStrict)
{
    const EdgeQuad q{{1, 1, 1}, {1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}};
    const DelaunayStatus s = classify_edge(q);
    EXPECT_EQ(s.kind, DelaunayKind::Strict);
    EXPECT_NEAR(s.measured_sum, 2 * pi / 3, 1e-14);
}

TEST(ClassifyEdge, ThinKiteIsViolated)
{
    // diagonal AC with B, D the opposite vertices; seen as EdgeQuad (B, A, D, C)
    const Point3 A{0, 0, 0}, C{1, 0, 0}, B{0.5, -0.1, 0}, D{0.5, 0.1, 0};
    const DelaunayStatus s = classify_edge({B, A, D, C});
    const double ref = oracle::angle_law_of_cosines(B, A, C) + oracle::angle_law_of_cosines(D, A, C);
    EXPECT_EQ(s.kind, DelaunayKind::Violated);
    EXPECT_NEAR(s.measured_sum, ref, 1e-12);
    EXPECT_NEAR(s.measured_sum, 2 * pi - 4 * std::atan(0.2), 1e-12);
}

TEST(ClassifyAngleSum, Bands)
{
    EXPECT_EQ(classify_angle_sum(pi + 2e-9), DelaunayKind::Violated);
    EXPECT_EQ(classify_angle_sum(pi + 5e-10), DelaunayKind::NonStrict);
    EXPECT_EQ(classify_angle_sum(pi - 5e-10), DelaunayKind::NonStrict);
    EXPECT_EQ(classify_angle_sum(pi - 2e-9), DelaunayKind::Strict);
}

TEST(TriangleArea, Examples)
{
    EXPECT_DOUBLE_EQ(triangle_area({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), 0.5);
    EXPECT_DOUBLE_EQ(triangle_area({0, 0, 0}, {2, 0, 0}, {0, 0, 3}), 3.0);
    EXPECT_NEAR(triangle_area({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}), 0.4330127, 1e-7);
}

TEST(TriangleArea, AgreesWithHeron)
{
    const CounterRng rng(5);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Point3 a{rng.uniform(9 * i), rng.uniform(9 * i + 1), rng.uniform(9 * i + 2)};
        const Point3 b{rng.uniform(9 * i + 3), rng.uniform(9 * i + 4), rng.uniform(9 * i + 5)};
        const Point3 c{rng.uniform(9 * i + 6), rng.uniform(9 * i + 7), rng.uniform(9 * i + 8)};
        EXPECT_NEAR(triangle_area(a, b, c), oracle::heron_area(a, b, c), 1e-12);
    }
}

TEST(IdealVolume, Examples)
{
    const double l3 = oracle::lobachevsky(pi / 3), l4 = oracle::lobachevsky(pi / 4);
    const Triangle3 equilateral{{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}};
    EXPECT_NEAR(ideal_volume(equilateral), 3 * l3, 1e-12);
    EXPECT_NEAR(ideal_volume(equilateral), 1.0149416, 1e-6);

    const Triangle3 right{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    EXPECT_NEAR(ideal_volume(right), 2 * l4, 1e-12);
    EXPECT_NEAR(ideal_volume(right), 0.9159656, 1e-6);

    const Triangle3 sliver{{0, 0, 0}, {1, 0, 0}, {0.5, 1e-6, 0}};
    EXPECT_NEAR(ideal_volume(sliver), 0.0, 1e-4);
    EXPECT_THROW(ideal_volume({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}), DegenerateInput);
}

TEST(AreaPairInequality, CyclicSquareIsTight)
{
    const AreaComparison c = area_pair_inequality({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
    EXPECT_DOUBLE_EQ(c.lhs, 1.0);
    EXPECT_DOUBLE_EQ(c.rhs, 1.0);
    EXPECT_TRUE(c.holds);
}

TEST(AreaPairInequality, ViolatedQuadStrictlyDecreases)
{
    // diagonal AC violated: as EdgeQuad the diagonal is (A, C) with opposite B, D
    const Point3 A{0, 0, 0}, B{0.5, -0.1, 0}, C{1, 0, 0}, D{0.5, 0.1, 0.2};
    const AreaComparison c = area_pair_inequality({B, A, D, C});
    const double after = oracle::heron_area(B, A, D) + oracle::heron_area(B, D, C);
    const double before = oracle::heron_area(A, B, C) + oracle::heron_area(A, C, D);
    EXPECT_NEAR(c.lhs, after, 1e-14);
    EXPECT_NEAR(c.rhs, before, 1e-14);
    EXPECT_LT(c.lhs, c.rhs);
    EXPECT_TRUE(c.holds);
}

TEST(AreaPairInequality, RejectsStrictDiagonal)
{
    EXPECT_THROW(area_pair_inequality({{1, 1, 1}, {1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}}), PreconditionViolated);
}

TEST(Circumcircle, Examples)
{
    const Circle3 unit = circumcircle({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}});
    EXPECT_NEAR(distance(unit.center, {0, 0, 0}), 0.0, 1e-15);
    EXPECT_NEAR(unit.radius, 1.0, 1e-15);

    const Circle3 right = circumcircle({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}});
    EXPECT_NEAR(distance(right.center, {1, 1, 0}), 0.0, 1e-15);
    EXPECT_NEAR(right.radius, std::sqrt(2.0), 1e-15);

    const Circle3 eq = circumcircle({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}});
    EXPECT_NEAR(eq.radius, 1 / std::sqrt(3.0), 1e-15);
}

TEST(InCircumdisk, Examples)
{
    const Triangle3 t{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}};
    EXPECT_EQ(in_circumdisk(t, {0, 0, 0}), CircleSide::Inside);
    EXPECT_EQ(in_circumdisk(t, {0, -1, 0}), CircleSide::OnCircle);
    EXPECT_EQ(in_circumdisk(t, {3, 0, 0}), CircleSide::Outside);
    EXPECT_THROW(in_circumdisk(t, {0, 0, 1}), NotCoplanar);
}

TEST(InCircumdisk, AgreesWithCircumcenterDistance)
{
    const CounterRng rng(11);
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const Point2 a{rng.uniform(8 * i), rng.uniform(8 * i + 1)}, b{rng.uniform(8 * i + 2), rng.uniform(8 * i + 3)},
            c{rng.uniform(8 * i + 4), rng.uniform(8 * i + 5)}, p{rng.uniform(8 * i + 6), rng.uniform(8 * i + 7)};
        if (std::abs(orient2d(a, b, c)) < 1e-3)
            continue;
        const Point2 o = oracle::circumcenter(a, b, c);
        const double gap = distance(o, p) - distance(o, a);
        if (std::abs(gap) < 1e-6)
            continue;
        const CircleSide s = in_circumdisk({lift(a), lift(b), lift(c)}, lift(p));
        EXPECT_EQ(s, gap < 0 ? CircleSide::Inside : CircleSide::Outside) << i;
    }
}

TEST(PlaneAngle, Examples)
{
    const Plane3 xy{{0, 0, 1}, 0}, xz{{0, 1, 0}, 0};
    EXPECT_NEAR(plane_angle(xy, xy), 0.0, 1e-15);
    EXPECT_NEAR(plane_angle(xy, xz), pi / 2, 1e-15);
    const Plane3 tilted{{0, std::sin(pi / 8), std::cos(pi / 8)}, 0};
    EXPECT_NEAR(plane_angle(xy, tilted), pi / 8, 1e-15);
    const Plane3 flipped{{0, 0, -1}, 0};
    EXPECT_NEAR(plane_angle(xy, flipped), 0.0, 1e-15);
}

TEST(FitPlane, Examples)
{
    const std::vector<Point3> square{{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const Plane3 p = fit_plane(square);
    EXPECT_NEAR(normal_angle(p.unit_normal, {0, 0, 1}), 0.0, 1e-15);
    for (const Point3& q : square)
        EXPECT_NEAR(p.signed_distance(q), 0.0, 1e-15);

    const double h = 0.05;
    const std::vector<Point3> perturbed{{0, 0, h}, {1, 1, h}, {1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
    EXPECT_NEAR(normal_angle(fit_plane(perturbed).unit_normal, {0, 0, 1}), 0.0, 1e-12);

    const CounterRng rng(17);
    std::vector<Point3> noisy;
    for (std::uint64_t i = 0; i < 100; ++i)
        noisy.push_back({rng.uniform(3 * i), rng.uniform(3 * i + 1), rng.uniform(3 * i + 2, -1e-3, 1e-3)});
    EXPECT_LT(normal_angle(fit_plane(noisy).unit_normal, {0, 0, 1}), 1e-2);

    const std::vector<Point3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    EXPECT_THROW(fit_plane(line), DegenerateInput);
}

TEST(TrianglesIntersect, Examples)
{
    const Triangle3 t1{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    const Triangle3 t2{{0, 0, 0}, {1, 0, 0}, {0.3, 0, 1}};
    EXPECT_FALSE(triangles_intersect(t1, t2, SharedSimplex::edge(0, 1)));
    EXPECT_TRUE(triangles_intersect(t1, t1, SharedSimplex::none()));

    const Triangle3 piercing{{0.2, 0.2, -1}, {0.2, 0.2, 1}, {0.25, 0.3, 1}};
    EXPECT_TRUE(triangles_intersect(t1, piercing, SharedSimplex::none()));
    const Triangle3 far{{5, 5, 5}, {6, 5, 5}, {5, 6, 5}};
    EXPECT_FALSE(triangles_intersect(t1, far, SharedSimplex::none()));
}

TEST(TrianglesIntersect, DoubledSliverFaces)
{
    // the two faces left over a flattened tetrahedron: ABC and a half of it
    const Point3 A{0.5, 0.1, 0.05}, B{0, 0, 0}, C{0.5, -0.1, 0.05}, M{0.5, 0, 0.05};
    EXPECT_TRUE(triangles_intersect({A, B, C}, {A, B, M}, SharedSimplex::edge(0, 1)));
}
