#pragma once

#include "flipmesh/error.hpp"
#include "flipmesh/flipper.hpp"
#include "flipmesh/geom.hpp"
#include "flipmesh/mesh.hpp"
#include "flipmesh/planar.hpp"
#include "flipmesh/rng.hpp"
#include "flipmesh/verify.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flipmesh {

// ---------------------------------------------------------------------------
// Surface generators
// ---------------------------------------------------------------------------

enum class SurfaceKind
{
    Monge,
    Sphere,
    Torus
};

enum class MongeFunction
{
    Zero,       ///< z = 0
    SinCos,     ///< z = amplitude * sin(frequency x) * cos(frequency y)
    Paraboloid  ///< z = amplitude * (x^2 + y^2)
};

struct SurfaceSpec
{
    SurfaceKind kind = SurfaceKind::Monge;

    // Monge patch over [-extent, extent]^2, grid x grid vertices
    MongeFunction function = MongeFunction::SinCos;
    double amplitude = 0.1;
    double frequency = 2.0;
    int grid = 10;
    double extent = 1.0;

    // sphere: icosphere subdivision
    double radius = 1.0;
    int level = 3;

    // torus: grid x grid_minor parametric samples
    double minor_radius = 0.3;
    int grid_minor = 12;

    /// Monge: in-plane jitter; sphere and torus: radial (normal) jitter. Relative to edge length.
    double jitter = 0.0;
    /// Sphere and torus: tangential jitter, relative to edge length.
    double tangential_jitter = 0.0;
    std::uint64_t seed = 0;
};

constexpr std::string_view to_string(SurfaceKind k) noexcept
{
    switch (k) {
    case SurfaceKind::Monge: return "monge";
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Torus: return "torus";
    }
    return "?";
}

constexpr std::string_view to_string(MongeFunction f) noexcept
{
    switch (f) {
    case MongeFunction::Zero: return "zero";
    case MongeFunction::SinCos: return "sincos";
    case MongeFunction::Paraboloid: return "paraboloid";
    }
    return "?";
}

/// Sampling quality measured on a generated cloud.
struct Measurement
{
    double delta = 0.0; ///< worst distance from a proxy sample to the cloud
    double theta = 0.0; ///< worst triple angle in the r-balls
    double r = 0.0;
};

struct Generated
{
    PointCloud cloud;
    SurfaceMesh mesh;
    std::optional<Measurement> measured;
};

namespace detail {

inline double monge_height(const SurfaceSpec& s, double x, double y)
{
    switch (s.function) {
    case MongeFunction::Zero: return 0.0;
    case MongeFunction::SinCos: return s.amplitude * std::sin(s.frequency * x) * std::cos(s.frequency * y);
    case MongeFunction::Paraboloid: return s.amplitude * (x * x + y * y);
    }
    return 0.0;
}

// Triangulated regular 20-face icosahedron refined `level` times, projected to the unit sphere.
inline void icosphere(int level, std::vector<Point3>& verts, std::vector<std::array<VertexId, 3>>& faces)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Point3& v : verts)
        v = normalized(v);
    faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<VertexId, VertexId>, VertexId> midpoint;
        auto mid = [&](VertexId a, VertexId b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end())
                return it->second;
            verts.push_back(normalized(0.5 * (verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)])));
            const auto id = static_cast<VertexId>(verts.size() - 1);
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<VertexId, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const VertexId ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
}

// Tangent basis at a unit direction.
inline std::pair<Vec3, Vec3> tangent_basis(const Vec3& n)
{
    const PlaneFrame f = make_frame(n);
    return {f.e1, f.e2};
}

inline void check_orientation(const std::vector<Point3>& verts, const std::vector<std::array<VertexId, 3>>& faces,
                              const std::function<Vec3(const Triangle3&)>& expected_normal, const Tolerances& tol)
{
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Triangle3 t{verts[static_cast<std::size_t>(faces[f][0])], verts[static_cast<std::size_t>(faces[f][1])],
                          verts[static_cast<std::size_t>(faces[f][2])]};
        if (is_degenerate(t, tol) || dot(cross(t.b - t.a, t.c - t.a), expected_normal(t)) <= 0.0)
            throw JitterBrokeMesh("face " + std::to_string(f) + " folded or collapsed; retry with a smaller jitter");
    }
}

} // namespace detail

/// Parametric proxy of the generated surface, for density checks.
inline ParametricSurface surface_proxy(const SurfaceSpec& s)
{
    ParametricSurface p;
    switch (s.kind) {
    case SurfaceKind::Monge:
        p.map = [s](double u, double v) { return Point3{u, v, detail::monge_height(s, u, v)}; };
        p.u0 = p.v0 = -s.extent;
        p.u1 = p.v1 = s.extent;
        break;
    case SurfaceKind::Sphere:
        p.map = [R = s.radius](double u, double v) {
            return Point3{R * std::sin(v) * std::cos(u), R * std::sin(v) * std::sin(u), R * std::cos(v)};
        };
        p.u0 = 0.0;
        p.u1 = 2.0 * std::numbers::pi;
        p.v0 = 0.0;
        p.v1 = std::numbers::pi;
        break;
    case SurfaceKind::Torus:
        p.map = [R = s.radius, rm = s.minor_radius](double u, double v) {
            return Point3{(R + rm * std::cos(v)) * std::cos(u), (R + rm * std::cos(v)) * std::sin(u), rm * std::sin(v)};
        };
        p.u0 = p.v0 = 0.0;
        p.u1 = p.v1 = 2.0 * std::numbers::pi;
        break;
    }
    return p;
}

/// Measures (delta, theta, r) of a cloud: r is twice the mean edge length, delta the proxy's
/// worst distance to the cloud, theta the worst triple angle at that r.
inline Measurement measure_cloud(PointCloud& cloud, const SurfaceMesh& mesh)
{
    const EdgeLengthStats lengths = edge_lengths(mesh, 1);
    Measurement m;
    m.r = 2.0 * lengths.mean;
    cloud.r = m.r;
    m.delta = density_check(cloud, lengths.max).worst_distance;
    m.theta = flatness_check(cloud, std::numbers::pi / 2.0).worst_angle;
    return m;
}

/// Deterministic test surface with its initial triangulation. Throws JitterBrokeMesh when the
/// jitter folds or collapses a face.
inline Generated generate(const SurfaceSpec& s, bool measure = true, const Tolerances& tol = {})
{
    std::vector<Point3> verts;
    std::vector<std::array<VertexId, 3>> faces;
    const CounterRng jitter_rng(s.seed, 0);
    std::function<Vec3(const Triangle3&)> expected_normal;

    switch (s.kind) {
    case SurfaceKind::Monge: {
        if (s.grid < 2)
            throw PreconditionViolated("generate: grid must be at least 2");
        const int n = s.grid;
        const double h = 2.0 * s.extent / (n - 1);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double x = -s.extent + i * h;
                double y = -s.extent + j * h;
                const auto id = static_cast<std::uint64_t>(j * n + i);
                // boundary vertices stay on the patch boundary
                if (i > 0 && i < n - 1)
                    x += s.jitter * h * jitter_rng.uniform(2 * id, -1.0, 1.0);
                if (j > 0 && j < n - 1)
                    y += s.jitter * h * jitter_rng.uniform(2 * id + 1, -1.0, 1.0);
                verts.push_back({x, y, detail::monge_height(s, x, y)});
            }
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                const VertexId a = j * n + i, b = a + 1, c = a + n + 1, d = a + n;
                faces.push_back({a, b, c});
                faces.push_back({a, c, d});
            }
        expected_normal = [](const Triangle3&) { return Vec3{0.0, 0.0, 1.0}; };
        break;
    }
    case SurfaceKind::Sphere: {
        detail::icosphere(s.level, verts, faces);
        const double h = 1.1 / (1 << s.level); // ~ edge length on the unit icosphere
        for (std::size_t v = 0; v < verts.size(); ++v) {
            const Vec3 n = verts[v];
            const auto [t1, t2] = detail::tangent_basis(n);
            const Vec3 moved = n + s.tangential_jitter * h *
                                       (jitter_rng.uniform(3 * v, -1.0, 1.0) * t1 +
                                        jitter_rng.uniform(3 * v + 1, -1.0, 1.0) * t2);
            const double rad = s.radius * (1.0 + s.jitter * h * jitter_rng.uniform(3 * v + 2, -1.0, 1.0));
            verts[v] = rad * normalized(moved);
        }
        expected_normal = [](const Triangle3& t) { return t.a + t.b + t.c; };
        break;
    }
    case SurfaceKind::Torus: {
        const int nu = s.grid, nv = s.grid_minor;
        if (nu < 3 || nv < 3)
            throw PreconditionViolated("generate: torus grids must be at least 3");
        const double h = 2.0 * std::numbers::pi * s.minor_radius / nv;
        for (int j = 0; j < nv; ++j)
            for (int i = 0; i < nu; ++i) {
                const double u = 2.0 * std::numbers::pi * i / nu;
                const double v = 2.0 * std::numbers::pi * j / nv;
                const Point3 center{s.radius * std::cos(u), s.radius * std::sin(u), 0.0};
                const Vec3 n{std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v)};
                const auto [t1, t2] = detail::tangent_basis(n);
                const auto id = static_cast<std::uint64_t>(j * nu + i);
                const double rm = s.minor_radius + s.jitter * h * jitter_rng.uniform(3 * id + 2, -1.0, 1.0);
                verts.push_back(center + rm * n +
                                s.tangential_jitter * h *
                                    (jitter_rng.uniform(3 * id, -1.0, 1.0) * t1 +
                                     jitter_rng.uniform(3 * id + 1, -1.0, 1.0) * t2));
            }
        for (int j = 0; j < nv; ++j)
            for (int i = 0; i < nu; ++i) {
                const VertexId a = j * nu + i, b = j * nu + (i + 1) % nu, c = ((j + 1) % nv) * nu + (i + 1) % nu,
                               d = ((j + 1) % nv) * nu + i;
                faces.push_back({a, b, c});
                faces.push_back({a, c, d});
            }
        expected_normal = [R = s.radius](const Triangle3& t) {
            const Point3 g = (t.a + t.b + t.c) / 3.0;
            const Point3 axis_point = R * normalized(Vec3{g.x, g.y, 0.0});
            return g - axis_point;
        };
        break;
    }
    }

    detail::check_orientation(verts, faces, expected_normal, tol);
    Generated out;
    out.mesh = SurfaceMesh::from_triangles(verts, faces);
    if (const auto problems = validate(out.mesh, tol); !problems.empty())
        throw JitterBrokeMesh("generated mesh fails validation: " + problems.front().detail);
    out.cloud.points = std::move(verts);
    out.cloud.surface = surface_proxy(s);
    if (measure)
        out.measured = measure_cloud(out.cloud, out.mesh);
    return out;
}

/// FNV-1a over the bit patterns of all coordinates and face indices.
inline std::uint64_t mesh_hash(const SurfaceMesh& m)
{
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t word) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    for (const Point3& p : m.positions()) {
        mix(std::bit_cast<std::uint64_t>(p.x));
        mix(std::bit_cast<std::uint64_t>(p.y));
        mix(std::bit_cast<std::uint64_t>(p.z));
    }
    for (const auto& f : m.triangles())
        for (VertexId v : f)
            mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
    return h;
}

// ---------------------------------------------------------------------------
// Incircle and the thin-triangle construction
// ---------------------------------------------------------------------------

struct Incircle
{
    Point2 center;
    double radius = 0.0;
    /// Tangency points on BC, CA and AB, in that order.
    std::array<Point2, 3> tangency;
};

/// Incircle of triangle ABC. The tangent length from a vertex is s minus the opposite side.
inline Incircle incircle_tangency(const Point2& A, const Point2& B, const Point2& C, const Tolerances& tol = {})
{
    const double a = distance(B, C), b = distance(C, A), c = distance(A, B);
    const double longest = std::max({a, b, c});
    if (longest == 0.0 || std::abs(orient2d(A, B, C)) <= 2.0 * tol.deg * longest * longest)
        throw DegenerateInput("incircle_tangency: degenerate triangle");
    const double s = 0.5 * (a + b + c);
    Incircle out;
    out.center = (a * A + b * B + c * C) / (a + b + c);
    out.radius = 0.5 * std::abs(orient2d(A, B, C)) / s;
    out.tangency = {B + ((s - b) / a) * (C - B), C + ((s - c) / b) * (A - C), A + ((s - a) / c) * (B - A)};
    return out;
}

/// 3D form: tangency points on BC, CA, AB of a triangle in space.
inline std::array<Point3, 3> incircle_tangency(const Triangle3& t, const Tolerances& tol = {})
{
    if (is_degenerate(t, tol))
        throw DegenerateInput("incircle_tangency: degenerate triangle");
    const double a = distance(t.b, t.c), b = distance(t.c, t.a), c = distance(t.a, t.b);
    const double s = 0.5 * (a + b + c);
    return {t.b + ((s - b) / a) * (t.c - t.b), t.c + ((s - c) / b) * (t.a - t.c), t.a + ((s - a) / c) * (t.b - t.a)};
}

struct ThinExampleSpec
{
    SurfaceMesh base;     ///< planar base triangulation
    int n = 10;           ///< segments per edge
    double epsilon = 0.1; ///< offset of the first and last subdivision point from the edge ends
    double thin_threshold = 5.0 * std::numbers::pi / 180.0;
};

struct ThinExampleReport
{
    std::size_t faces = 0;
    std::size_t thin_faces = 0;
    double thin_fraction = 0.0;
    double min_angle = 0.0;
    bool delaunay = false;
    bool strict = false;
    std::size_t non_strict_edges = 0;
    bool embedded = false;
    std::size_t flips = 0;
    /// Largest over base triangles of the Hausdorff distance from the tangency triangle
    /// to its nearest output face.
    double tangency_hausdorff = 0.0;
};

struct ThinExample
{
    SurfaceMesh mesh;
    double thin_fraction = 0.0;
    ThinExampleReport report;
};

inline SurfaceMesh equilateral_base(double side = 1.0)
{
    std::vector<Point3> v{{0.0, 0.0, 0.0}, {side, 0.0, 0.0}, {0.5 * side, 0.5 * std::sqrt(3.0) * side, 0.0}};
    const std::array<std::array<VertexId, 3>, 1> f{{{0, 1, 2}}};
    return SurfaceMesh::from_triangles(std::move(v), f);
}

namespace detail {

inline double triangle_hausdorff(const Triangle3& p, const Triangle3& q)
{
    double h = 0.0;
    for (const Point3* v : {&p.a, &p.b, &p.c})
        h = std::max(h, point_triangle_distance(*v, q));
    for (const Point3* v : {&q.a, &q.b, &q.c})
        h = std::max(h, point_triangle_distance(*v, p));
    return h;
}

} // namespace detail

/// Subdivides every base edge between the points at distance epsilon from its ends into n equal
/// segments, Delaunay-triangulates each base triangle with the points on its edges by
/// diagonal switches, and assembles the pieces. Throws SpecInvariantViolated unless 3 epsilon
/// is below the distance between every tangency point and every base vertex.
inline ThinExample thin_example(const ThinExampleSpec& spec, const Tolerances& tol = {})
{
    const SurfaceMesh& base = spec.base;
    if (spec.n < 1)
        throw SpecInvariantViolated("thin_example: n must be at least 1");
    if (!(spec.epsilon > 0.0))
        throw SpecInvariantViolated("thin_example: epsilon must be positive");
    const auto nf = static_cast<FaceId>(base.num_faces());

    double gap = std::numeric_limits<double>::infinity();
    std::vector<std::array<Point3, 3>> tangency(static_cast<std::size_t>(nf));
    for (FaceId f = 0; f < nf; ++f) {
        tangency[static_cast<std::size_t>(f)] = incircle_tangency(base.face_triangle(f), tol);
        for (const Point3& w : tangency[static_cast<std::size_t>(f)])
            for (const Point3& v : base.positions())
                gap = std::min(gap, distance(w, v));
    }
    if (!(3.0 * spec.epsilon < gap))
        throw SpecInvariantViolated("thin_example: 3*epsilon = " + std::to_string(3.0 * spec.epsilon) +
                                    " is not below the tangency/vertex distance " + std::to_string(gap));

    // global vertices: base vertices, then the subdivision points of each edge
    std::vector<Point3> verts(base.positions().begin(), base.positions().end());
    std::map<std::pair<VertexId, VertexId>, std::vector<VertexId>> edge_points; // ordered from min to max id
    for (EdgeRef e : base.edges()) {
        auto [u, v] = base.edge_vertices(e);
        if (u > v)
            std::swap(u, v);
        const Point3 pu = base.position(u), pv = base.position(v);
        const Vec3 dir = normalized(pv - pu);
        const Point3 x = pu + spec.epsilon * dir;
        const Point3 y = pv - spec.epsilon * dir;
        std::vector<VertexId> ids;
        for (int k = 0; k <= spec.n; ++k) {
            verts.push_back(x + (static_cast<double>(k) / spec.n) * (y - x));
            ids.push_back(static_cast<VertexId>(verts.size() - 1));
        }
        edge_points.emplace(std::pair{u, v}, std::move(ids));
    }

    std::vector<std::array<VertexId, 3>> faces;
    std::size_t flips = 0;
    for (FaceId f = 0; f < nf; ++f) {
        const auto corners = base.face_vertices(f);
        const Triangle3 tri = base.face_triangle(f);
        const PlaneFrame frame = make_frame(normalized(cross(tri.b - tri.a, tri.c - tri.a)), tri.a);
        std::vector<VertexId> local_to_global(corners.begin(), corners.end());
        for (int k = 0; k < 3; ++k) {
            const auto key = std::minmax(corners[static_cast<std::size_t>(k)], corners[static_cast<std::size_t>((k + 1) % 3)]);
            for (VertexId id : edge_points.at(key))
                local_to_global.push_back(id);
        }
        std::vector<Point2> local;
        local.reserve(local_to_global.size());
        for (VertexId g : local_to_global)
            local.push_back(frame.to_2d(verts[static_cast<std::size_t>(g)]));
        RunReport run;
        const PlanarTriangulation t = planar_delaunay_flip(local, [&] {
            FlipConfig c;
            c.tol = tol;
            return c;
        }(), &run);
        flips += run.flips.size();
        for (const Tri& lt : t.triangles)
            faces.push_back({local_to_global[static_cast<std::size_t>(lt[0])],
                             local_to_global[static_cast<std::size_t>(lt[1])],
                             local_to_global[static_cast<std::size_t>(lt[2])]});
    }

    ThinExample out;
    out.mesh = SurfaceMesh::from_triangles(std::move(verts), faces);
    ThinExampleReport& r = out.report;
    r.faces = out.mesh.num_faces();
    r.flips = flips;
    r.min_angle = std::numbers::pi;
    for (FaceId f = 0; f < static_cast<FaceId>(out.mesh.num_faces()); ++f) {
        const double a = min_angle(out.mesh.face_triangle(f));
        r.min_angle = std::min(r.min_angle, a);
        if (a < spec.thin_threshold)
            ++r.thin_faces;
    }
    r.thin_fraction = r.faces ? static_cast<double>(r.thin_faces) / static_cast<double>(r.faces) : 0.0;
    out.thin_fraction = r.thin_fraction;

    const DelaunayCheck del = is_delaunay(out.mesh, tol);
    r.delaunay = del.ok;
    r.strict = del.strict;
    r.non_strict_edges = del.non_strict_edges;
    r.embedded = is_embedded(out.mesh, tol).ok;
    for (FaceId f = 0; f < nf; ++f) {
        const auto& w = tangency[static_cast<std::size_t>(f)];
        const Triangle3 target{w[0], w[1], w[2]};
        double best = std::numeric_limits<double>::infinity();
        for (FaceId g = 0; g < static_cast<FaceId>(out.mesh.num_faces()); ++g)
            best = std::min(best, detail::triangle_hausdorff(target, out.mesh.face_triangle(g)));
        r.tangency_hausdorff = std::max(r.tangency_hausdorff, best);
    }
    return out;
}

} // namespace flipmesh
