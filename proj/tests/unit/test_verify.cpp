#include "flipmesh/flipper.hpp"
#include "flipmesh/genex.hpp"
#include "flipmesh/mesh_io.hpp"
#include "flipmesh/verify.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

using namespace flipmesh;
using std::numbers::pi;

namespace {

SurfaceMesh flat_grid(int n, double jitter = 0.0, std::uint64_t seed = 0)
{
    SurfaceSpec s;
    s.function = MongeFunction::Zero;
    s.grid = n;
    s.jitter = jitter;
    s.seed = seed;
    return generate(s, false).mesh;
}

ParametricSurface unit_square()
{
    return {[](double u, double v) { return Point3{u, v, 0}; }, 0, 1, 0, 1, 1.0};
}

} // namespace

TEST(IsDelaunay, Examples)
{
    const DelaunayCheck tet = is_delaunay(load_off(FLIPMESH_TEST_DATA "/tetrahedron.off"));
    EXPECT_TRUE(tet.ok);
    EXPECT_TRUE(tet.strict);

    const std::vector<Point3> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const std::vector<std::array<VertexId, 3>> two{{0, 1, 2}, {0, 2, 3}};
    const DelaunayCheck square = is_delaunay(SurfaceMesh::from_triangles(sq, two));
    EXPECT_TRUE(square.ok);
    EXPECT_FALSE(square.strict);
    EXPECT_EQ(square.non_strict_edges, 1u);

    const DelaunayCheck kite = is_delaunay(load_off(FLIPMESH_TEST_DATA "/kite.off"));
    EXPECT_FALSE(kite.ok);
    EXPECT_EQ(kite.violations.size(), 1u);
}

TEST(IsEmbedded, Examples)
{
    SurfaceSpec s;
    s.kind = SurfaceKind::Sphere;
    s.level = 3;
    EXPECT_TRUE(is_embedded(generate(s, false).mesh).ok);

    SurfaceMesh sliver = load_off(FLIPMESH_TEST_DATA "/sliver.off");
    EXPECT_TRUE(is_embedded(sliver).ok);
    flip(sliver, sliver.edge_of(*sliver.find_half_edge(0, 1)));
    const EmbeddingCheck doubled = is_embedded(sliver);
    EXPECT_FALSE(doubled.ok);
    EXPECT_FALSE(doubled.offending_pairs.empty());
}

TEST(IsEmbedded, TreeAgreesWithBruteForce)
{
    int broken = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SurfaceSpec s;
        s.grid = 6 + static_cast<int>(seed % 5); // up to 2 * 9 * 9 = 162 faces
        s.jitter = 0.3;
        s.amplitude = 0.3;
        s.seed = seed;
        SurfaceMesh m = generate(s, false).mesh;
        // drag a few vertices far enough to fold the sheet through itself
        std::vector<Point3> v(m.positions().begin(), m.positions().end());
        const CounterRng rng(seed, 9);
        for (std::uint64_t k = 0; k < seed % 4; ++k) {
            auto& p = v[static_cast<std::size_t>(rng.bits(4 * k) % v.size())];
            p += Vec3{rng.uniform(4 * k + 1, -1, 1), rng.uniform(4 * k + 2, -1, 1), rng.uniform(4 * k + 3, -1, 1)};
        }
        m = SurfaceMesh::from_triangles(v, m.triangles());
        const EmbeddingCheck brute = is_embedded(m, {}, PairSearch::BruteForce);
        const EmbeddingCheck tree = is_embedded(m, {}, PairSearch::BoxTree);
        EXPECT_EQ(brute.ok, tree.ok) << seed;
        auto a = brute.offending_pairs, b = tree.offending_pairs;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b) << seed;
        broken += brute.ok ? 0 : 1;
    }
    EXPECT_GT(broken, 10);
    EXPECT_LT(broken, 100);
}

TEST(ProjectionInjective, Examples)
{
    const Plane3 xy{{0, 0, 1}, 0};
    EXPECT_TRUE(projection_injective(flat_grid(6, 0.3, 2), xy));

    SurfaceMesh sliver = load_off(FLIPMESH_TEST_DATA "/sliver.off");
    const Plane3 base = plane_through({0, 0, 0}, {1, 0, 0}, {0.5, 0.1, 0.05});
    flip(sliver, sliver.edge_of(*sliver.find_half_edge(0, 1)));
    EXPECT_FALSE(projection_injective(sliver, base));
}

TEST(Density, SquareCorners)
{
    PointCloud c;
    c.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    c.surface = unit_square();
    const auto ref = oracle::grid_farthest_point(c.points, 0, 1, 0, 1, 200);
    EXPECT_NEAR(ref.distance, std::sqrt(0.5), 1e-12);

    const DensityResult dense = density_check(c, 0.75);
    EXPECT_TRUE(dense.dense);
    EXPECT_NEAR(dense.worst_distance, ref.distance, 1e-3);
    EXPECT_LT(distance(dense.worst_center, ref.where), 0.02);

    const DensityResult sparse = density_check(c, 0.5);
    EXPECT_FALSE(sparse.dense);
    EXPECT_LT(distance(sparse.worst_center, {0.5, 0.5, 0}), 0.02);
}

TEST(Density, AgreesWithGridOracle)
{
    const CounterRng rng(31);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        PointCloud c;
        for (std::uint64_t i = 0; i < 30; ++i)
            c.points.push_back({rng.uniform(100 * trial + 2 * i), rng.uniform(100 * trial + 2 * i + 1), 0});
        c.surface = unit_square();
        const auto ref = oracle::grid_farthest_point(c.points, 0, 1, 0, 1, 400);
        const DensityResult r = density_check(c, 1.0);
        // grid searches on both sides: agree up to the coarser pitch
        EXPECT_NEAR(r.worst_distance, ref.distance, 5e-3) << trial;
        EXPECT_EQ(density_check(c, ref.distance * 1.01).dense, true);
        EXPECT_EQ(density_check(c, ref.distance * 0.99).dense, false);
    }
}

TEST(Density, ProxySampleIsDense)
{
    auto mesh = std::make_shared<const SurfaceMesh>(flat_grid(8));
    PointCloud c;
    c.points.assign(mesh->positions().begin(), mesh->positions().end());
    c.reference_mesh = mesh;
    const double pitch = 2.0 / 7.0;
    EXPECT_TRUE(density_check(c, pitch).dense);
    EXPECT_FALSE(density_check(c, 0.3 * pitch).dense);

    PointCloud bare;
    bare.points = c.points;
    EXPECT_THROW(density_check(bare, 1.0), NoProxy);
}

TEST(Flatness, CoplanarCloud)
{
    PointCloud c;
    const SurfaceMesh m = flat_grid(10, 0.3, 5);
    c.points.assign(m.positions().begin(), m.positions().end());
    c.r = 0.5;
    for (double theta : {1e-6, 0.1, 1.0}) {
        const FlatnessResult f = flatness_check(c, theta);
        EXPECT_TRUE(f.flat);
        EXPECT_NEAR(f.worst_angle, 0.0, 1e-9);
    }
}

TEST(Flatness, SphereClusters)
{
    // well separated clusters of 4 points spanning a small square on the unit sphere;
    // r = R / 100 keeps each ball inside one cluster
    const double R = 1.0, r = R / 100, side = 0.006;
    SurfaceSpec s;
    s.kind = SurfaceKind::Sphere;
    s.level = 2;
    const SurfaceMesh ico = generate(s, false).mesh;
    PointCloud c;
    c.r = r;
    for (const Point3& p : ico.positions()) {
        const Vec3 n = normalized(p);
        const Vec3 t1 = normalized(std::abs(n.z) < 0.9 ? cross(n, {0, 0, 1}) : cross(n, {1, 0, 0}));
        const Vec3 t2 = cross(n, t1);
        for (auto [a, b] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})
            c.points.push_back(R * normalized(n + 0.5 * side * (a * t1 + b * t2)));
    }
    const FlatnessResult f = flatness_check(c, pi / 16);
    EXPECT_TRUE(f.flat);
    EXPECT_GT(f.worst_angle, 0.0);
    EXPECT_LT(f.worst_angle, 2 * r / R);
}

TEST(Flatness, DisplacedPoint)
{
    const SurfaceMesh m = flat_grid(10);
    const double pitch = 2.0 / 9.0, r = 2.5 * pitch;
    PointCloud c;
    c.points.assign(m.positions().begin(), m.positions().end());
    c.r = r;
    const std::size_t victim = 44;
    c.points[victim].z += 0.5 * r;
    const FlatnessResult f = flatness_check(c, pi / 16);
    EXPECT_FALSE(f.flat);
    EXPECT_GT(f.worst_angle, pi / 16);
    EXPECT_TRUE(std::find(f.worst_triple.begin(), f.worst_triple.end(), victim) != f.worst_triple.end());
}

TEST(Pi8, Examples)
{
    const SurfaceMesh m = flat_grid(6, 0.2, 1);
    std::vector<Point3> pts(m.positions().begin(), m.positions().end());
    EXPECT_TRUE(pi8_check(pts).ok);

    // a tilted plane: every triple plane coincides with it
    for (Point3& p : pts)
        p.z = 0.3 * p.x + 0.1 * p.y;
    const Pi8Result tilted = pi8_check(pts);
    EXPECT_TRUE(tilted.ok);
    EXPECT_NEAR(tilted.worst_angle, 0.0, 1e-9);
    EXPECT_NEAR(normal_angle(tilted.plane.unit_normal, normalized(Vec3{-0.3, -0.1, 1})), 0.0, 1e-9);

    pts[7].z = 1.0;
    EXPECT_FALSE(pi8_check(pts).ok);
}
