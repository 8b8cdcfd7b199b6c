#pragma once

// Seeded random configurations shared by the property tests and the acceptance run.

#include "flipmesh/flipmesh.hpp"

#include <numbers>
#include <vector>

namespace fixture {

using namespace flipmesh;

/// A random convex polygon (4 to 7 corners on a jittered ellipse) plus interior points,
/// at most `max_points` in total. Returns the points and the polygon as counter-clockwise indices.
struct ConvexSet
{
    std::vector<Point2> points;
    std::vector<int> polygon;
};

inline ConvexSet convex_set(std::uint64_t seed, int max_points = 12)
{
    const CounterRng rng(seed, 41);
    std::uint64_t k = 0;
    ConvexSet out;
    const int corners = 4 + static_cast<int>(rng.bits(k++) % 4);
    const int total = corners + static_cast<int>(rng.bits(k++) % static_cast<std::uint64_t>(max_points - corners + 1));
    const double ax = rng.uniform(k++, 0.5, 2.0), ay = rng.uniform(k++, 0.5, 2.0);
    // corners at sorted random angles, at least a little apart so the polygon is strictly convex
    std::vector<double> angles;
    while (static_cast<int>(angles.size()) < corners) {
        const double t = rng.uniform(k++, 0.0, 2 * std::numbers::pi);
        bool apart = true;
        for (double s : angles)
            apart = apart && std::abs(std::remainder(t - s, 2 * std::numbers::pi)) > 0.3;
        if (apart)
            angles.push_back(t);
    }
    std::sort(angles.begin(), angles.end());
    for (double t : angles) {
        out.polygon.push_back(static_cast<int>(out.points.size()));
        out.points.push_back({ax * std::cos(t), ay * std::sin(t)});
    }
    // interior points as random convex combinations of the corners, pulled towards the centroid
    Point2 centroid{0, 0};
    for (const Point2& c : out.points)
        centroid = centroid + c / corners;
    while (static_cast<int>(out.points.size()) < total) {
        std::vector<double> w(static_cast<std::size_t>(corners));
        double sum = 0.0;
        for (double& x : w) {
            x = -std::log(1.0 - rng.uniform(k++));
            sum += x;
        }
        Point2 p{0, 0};
        for (int i = 0; i < corners; ++i)
            p = p + (w[static_cast<std::size_t>(i)] / sum) * out.points[static_cast<std::size_t>(i)];
        out.points.push_back(centroid + 0.9 * (p - centroid));
    }
    return out;
}

inline Point3 random_point(const CounterRng& rng, std::uint64_t& k)
{
    const double x = rng.uniform(k++, -1, 1), y = rng.uniform(k++, -1, 1), z = rng.uniform(k++, -1, 1);
    return {x, y, z};
}

/// Rejection-sampled quad whose diagonal BD has opposite angle sum >= pi (random points in a cube).
inline EdgeQuad quad_with_sum_at_least_pi(const CounterRng& rng, std::uint64_t& k)
{
    for (;;) {
        const EdgeQuad q{random_point(rng, k), random_point(rng, k), random_point(rng, k), random_point(rng, k)};
        const double sum = detail::interior_angle(q.a, q.b, q.d) + detail::interior_angle(q.c, q.b, q.d);
        if (sum < std::numbers::pi)
            continue;
        if (is_degenerate({q.a, q.b, q.d}) || is_degenerate({q.c, q.b, q.d}))
            continue;
        return q;
    }
}

inline EdgeQuad violated_quad(const CounterRng& rng, std::uint64_t& k, const Tolerances& tol = {})
{
    for (;;) {
        const EdgeQuad q = quad_with_sum_at_least_pi(rng, k);
        if (classify_edge(q, tol).kind == DelaunayKind::Violated)
            return q;
    }
}

/// Quad whose diagonal angles sum to exactly pi (up to rounding): A and C see BD under
/// supplementary angles, in two different half-planes through BD.
inline EdgeQuad skew_nonstrict_quad(const CounterRng& rng, std::uint64_t& k)
{
    const Point3 b = random_point(rng, k), d = random_point(rng, k);
    const Vec3 axis = normalized(d - b);
    const Vec3 seed_dir = random_point(rng, k);
    const Vec3 e1 = normalized(seed_dir - dot(seed_dir, axis) * axis);
    const Vec3 e2 = cross(axis, e1);
    const Point3 mid = 0.5 * (b + d);
    const double half = 0.5 * distance(b, d);

    // point seeing BD under angle gamma, on the arc in the half-plane at rotation psi
    auto on_arc = [&](double gamma, double psi, double s) {
        const double cy = half / std::tan(gamma), radius = half / std::sin(gamma);
        // arc parameter: angle from the circle center, restricted to the side away from BD
        const double lo = -std::asin(std::min(1.0, cy / radius));
        const double phi = lo + s * (std::numbers::pi - 2 * lo);
        const double x = radius * std::cos(phi), y = cy + radius * std::sin(phi);
        const Vec3 out = std::cos(psi) * e1 + std::sin(psi) * e2;
        return mid + x * axis + y * out;
    };
    const double alpha = rng.uniform(k++, 0.3, std::numbers::pi - 0.3);
    const double psi_a = rng.uniform(k++, 0.0, 2 * std::numbers::pi);
    const double psi_c = psi_a + rng.uniform(k++, 0.6 * std::numbers::pi, 1.4 * std::numbers::pi);
    const Point3 a = on_arc(alpha, psi_a, rng.uniform(k++, 0.1, 0.9));
    const Point3 c = on_arc(std::numbers::pi - alpha, psi_c, rng.uniform(k++, 0.1, 0.9));
    return {a, b, c, d};
}

/// Jittered grid patch in the frame of a random plane L, with heights scaled so every triple plane
/// stays within 0.9 * pi/8 of L. Returns the mesh and L.
struct Pi8Patch
{
    SurfaceMesh mesh;
    Plane3 plane;
};

inline Pi8Patch pi8_patch(std::uint64_t seed, int n = 8)
{
    const CounterRng rng(seed, 77);
    std::uint64_t k = 0;
    std::vector<Point2> uv;
    std::vector<double> noise;
    const double pitch = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            uv.push_back({i * pitch + 0.3 * pitch * rng.uniform(k++, -1, 1), j * pitch + 0.3 * pitch * rng.uniform(k++, -1, 1)});
            noise.push_back(rng.uniform(k++, -1, 1));
        }
    // triple plane tilt is atan of the gradient of the interpolating plane through its points
    double g = 0.0;
    for (std::size_t p = 0; p < uv.size(); ++p)
        for (std::size_t q = p + 1; q < uv.size(); ++q)
            for (std::size_t r = q + 1; r < uv.size(); ++r) {
                const double det = cross(uv[q] - uv[p], uv[r] - uv[p]);
                const double l = std::max({distance(uv[p], uv[q]), distance(uv[q], uv[r]), distance(uv[r], uv[p])});
                if (std::abs(det) <= 1e-12 * l * l)
                    continue;
                const double gx = ((noise[q] - noise[p]) * (uv[r].y - uv[p].y) - (noise[r] - noise[p]) * (uv[q].y - uv[p].y)) / det;
                const double gy = ((noise[r] - noise[p]) * (uv[q].x - uv[p].x) - (noise[q] - noise[p]) * (uv[r].x - uv[p].x)) / det;
                g = std::max(g, std::hypot(gx, gy));
            }
    const double amplitude = 0.9 * std::tan(std::numbers::pi / 8) / g;

    const Vec3 n_dir = normalized(random_point(rng, k));
    const Point3 origin = random_point(rng, k);
    const PlaneFrame frame = make_frame(n_dir, origin);
    std::vector<Point3> verts;
    for (std::size_t p = 0; p < uv.size(); ++p)
        verts.push_back(frame.to_3d(uv[p]) + amplitude * noise[p] * frame.normal);

    std::vector<std::array<VertexId, 3>> faces;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            const VertexId a = j * n + i, b = a + 1, c = a + n + 1, d = a + n;
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    return {SurfaceMesh::from_triangles(verts, faces), {n_dir, -dot(n_dir, origin)}};
}

} // namespace fixture
