#pragma once

#include "flipmesh/flipper.hpp"
#include "flipmesh/geom.hpp"
#include "flipmesh/intersect.hpp"
#include "flipmesh/mesh.hpp"
#include "flipmesh/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flipmesh {

// ---------------------------------------------------------------------------
// Delaunay status and embeddedness
// ---------------------------------------------------------------------------

struct DelaunayCheck
{
    bool ok = true;
    std::vector<EdgeRef> violations;
    bool strict = true;
    std::size_t non_strict_edges = 0;
};

inline DelaunayCheck is_delaunay(const SurfaceMesh& m, const Tolerances& tol = {})
{
    DelaunayCheck out;
    for (EdgeRef e : m.edges()) {
        if (m.is_boundary_edge(e))
            continue;
        switch (classify_mesh_edge(m, e, tol)) {
        case DelaunayKind::Violated:
            out.violations.push_back(e);
            out.ok = false;
            out.strict = false;
            break;
        case DelaunayKind::NonStrict:
            ++out.non_strict_edges;
            out.strict = false;
            break;
        case DelaunayKind::Strict: break;
        }
    }
    return out;
}

struct EmbeddingCheck
{
    bool ok = true;
    std::vector<std::pair<FaceId, FaceId>> offending_pairs;
};

enum class PairSearch
{
    Automatic,
    BruteForce,
    BoxTree
};

namespace detail {

// Declared shared simplex of two faces from their common vertex ids; nullopt means the faces
// repeat all three vertices, which is an overlap by itself.
inline std::optional<SharedSimplex> shared_simplex(const std::array<VertexId, 3>& f, const std::array<VertexId, 3>& g)
{
    std::array<int, 3> common{};
    int count = 0;
    for (int i = 0; i < 3; ++i)
        if (std::find(g.begin(), g.end(), f[static_cast<std::size_t>(i)]) != g.end())
            common[static_cast<std::size_t>(count++)] = i;
    switch (count) {
    case 0: return SharedSimplex::none();
    case 1: return SharedSimplex::vertex(common[0]);
    case 2: return SharedSimplex::edge(common[0], common[1]);
    default: return std::nullopt;
    }
}

inline Box3 triangle_box(const Triangle3& t)
{
    Box3 b;
    b.expand(t.a);
    b.expand(t.b);
    b.expand(t.c);
    return b;
}

} // namespace detail

/// True iff no two faces meet beyond their shared simplices. Pairs are found by brute force
/// below 200 faces and through a box tree above, unless `search` forces one.
inline EmbeddingCheck is_embedded(const SurfaceMesh& m, const Tolerances& tol = {},
                                  PairSearch search = PairSearch::Automatic)
{
    EmbeddingCheck out;
    const auto nf = static_cast<FaceId>(m.num_faces());
    std::vector<std::array<VertexId, 3>> faces = m.triangles();
    std::vector<Triangle3> tris(static_cast<std::size_t>(nf));
    for (FaceId f = 0; f < nf; ++f)
        tris[static_cast<std::size_t>(f)] = m.face_triangle(f);

    auto test = [&](FaceId f, FaceId g) {
        const auto shared = detail::shared_simplex(faces[static_cast<std::size_t>(f)], faces[static_cast<std::size_t>(g)]);
        if (!shared || triangles_intersect(tris[static_cast<std::size_t>(f)], tris[static_cast<std::size_t>(g)], *shared, tol))
            out.offending_pairs.emplace_back(f, g);
    };

    if (search == PairSearch::BruteForce || (search == PairSearch::Automatic && nf < 200)) {
        for (FaceId f = 0; f < nf; ++f)
            for (FaceId g = f + 1; g < nf; ++g)
                test(f, g);
    } else {
        const double pad = tol.plane * bbox_diagonal(m.positions());
        std::vector<Box3> boxes(static_cast<std::size_t>(nf));
        for (FaceId f = 0; f < nf; ++f) {
            boxes[static_cast<std::size_t>(f)] = detail::triangle_box(tris[static_cast<std::size_t>(f)]);
            boxes[static_cast<std::size_t>(f)].inflate(pad);
        }
        const AabbTree tree(boxes);
        std::vector<FaceId> hits;
        for (FaceId f = 0; f < nf; ++f) {
            hits.clear();
            tree.for_each_overlap(boxes[static_cast<std::size_t>(f)], [&](std::uint32_t g) {
                if (static_cast<FaceId>(g) > f)
                    hits.push_back(static_cast<FaceId>(g));
            });
            std::sort(hits.begin(), hits.end());
            for (FaceId g : hits)
                test(f, g);
        }
    }
    out.ok = out.offending_pairs.empty();
    return out;
}

/// True iff the orthogonal projection of the mesh onto `plane` is one-to-one: all projected
/// faces keep one orientation and faces not sharing an edge have disjoint projected interiors.
inline bool projection_injective(const SurfaceMesh& m, const Plane3& plane, const Tolerances& tol = {})
{
    const auto nf = static_cast<FaceId>(m.num_faces());
    if (nf == 0)
        return true;
    const PlaneFrame frame = make_frame(plane);
    std::vector<std::array<Point2, 3>> proj(static_cast<std::size_t>(nf));
    const double diag = bbox_diagonal(m.positions());
    const double area_floor = tol.deg * diag * diag;
    int sign = 0;
    for (FaceId f = 0; f < nf; ++f) {
        const Triangle3 t = m.face_triangle(f);
        auto& p = proj[static_cast<std::size_t>(f)];
        p = {frame.to_2d(t.a), frame.to_2d(t.b), frame.to_2d(t.c)};
        const double o = orient2d(p[0], p[1], p[2]);
        if (std::abs(o) <= area_floor)
            return false;
        const int s = o > 0.0 ? 1 : -1;
        if (sign == 0)
            sign = s;
        else if (s != sign)
            return false;
    }

    const auto faces = m.triangles();
    auto shares_edge = [&](FaceId f, FaceId g) {
        int common = 0;
        for (VertexId v : faces[static_cast<std::size_t>(f)])
            if (std::find(faces[static_cast<std::size_t>(g)].begin(), faces[static_cast<std::size_t>(g)].end(), v) !=
                faces[static_cast<std::size_t>(g)].end())
                ++common;
        return common >= 2;
    };

    const double eps = tol.plane * diag;
    std::vector<Box3> boxes(static_cast<std::size_t>(nf));
    for (FaceId f = 0; f < nf; ++f)
        for (const Point2& q : proj[static_cast<std::size_t>(f)])
            boxes[static_cast<std::size_t>(f)].expand(Point3{q.x, q.y, 0.0});
    const AabbTree tree(boxes);
    bool ok = true;
    for (FaceId f = 0; f < nf && ok; ++f)
        tree.for_each_overlap(boxes[static_cast<std::size_t>(f)], [&](std::uint32_t gu) {
            const auto g = static_cast<FaceId>(gu);
            if (!ok || g <= f || shares_edge(f, g))
                return;
            if (interiors_overlap_2d(proj[static_cast<std::size_t>(f)], proj[static_cast<std::size_t>(g)], eps))
                ok = false;
        });
    return ok;
}

// ---------------------------------------------------------------------------
// Point-cloud conditions
// ---------------------------------------------------------------------------

/// Parametric surface proxy: (u, v) in [u0, u1] x [v0, v1] -> R^3.
struct ParametricSurface
{
    std::function<Point3(double, double)> map;
    double u0 = 0.0;
    double u1 = 1.0;
    double v0 = 0.0;
    double v1 = 1.0;
    /// Upper bound on geodesic / Euclidean distance over the relevant scale (1 for planes).
    double distortion = 1.0;
};

struct PointCloud
{
    std::vector<Point3> points;
    std::optional<ParametricSurface> surface;
    std::shared_ptr<const SurfaceMesh> reference_mesh;
    double r = 0.0; ///< flatness radius
};

struct DensityResult
{
    bool dense = true;
    Point3 worst_center;      ///< proxy point farthest from the cloud
    double worst_distance = 0.0;
    std::size_t samples = 0;
};

struct FlatnessResult
{
    bool flat = true;
    bool non_strict = false; ///< worst angle within tau_angle of theta
    std::size_t worst_point = 0;
    std::array<std::size_t, 3> worst_triple{0, 0, 0};
    double worst_angle = 0.0;
    Plane3 worst_plane;
    bool sampled = false; ///< some ball had too many triples; worst_angle is then a lower bound
};

struct Pi8Result
{
    bool ok = true;
    double worst_angle = 0.0;
    std::array<std::size_t, 3> worst_triple{0, 0, 0};
    Plane3 plane;
    bool sampled = false;
};

struct ConditionReport
{
    std::optional<DensityResult> density;
    std::optional<FlatnessResult> flatness;
    std::optional<Pi8Result> pi8;
};

namespace detail {

/// Uniform hash grid for nearest-point queries.
class PointGrid
{
public:
    PointGrid(std::span<const Point3> points, double cell)
        : points_(points)
        , cell_(cell > 0.0 ? cell : 1.0)
    {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = coords(points[i]);
            for (std::size_t k = 0; k < 3; ++k) {
                lo_[k] = std::min(lo_[k], c[k]);
                hi_[k] = std::max(hi_[k], c[k]);
            }
            cells_[key(c)].push_back(i);
        }
    }

    /// Nearest stored point to q, as (index, distance). Searches outward ring by ring.
    std::pair<std::size_t, double> nearest(const Point3& q) const
    {
        const auto c = coords(q);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        long long last_ring = 0;
        for (std::size_t k = 0; k < 3; ++k)
            last_ring = std::max({last_ring, std::abs(c[k] - lo_[k]), std::abs(c[k] - hi_[k])});
        for (int ring = 0;; ++ring) {
            for (int dx = -ring; dx <= ring; ++dx)
                for (int dy = -ring; dy <= ring; ++dy)
                    for (int dz = -ring; dz <= ring; ++dz) {
                        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring)
                            continue;
                        const auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                        if (it == cells_.end())
                            continue;
                        for (std::size_t i : it->second) {
                            const double d = distance(points_[i], q);
                            if (d < best || (d == best && i < best_i)) {
                                best = d;
                                best_i = i;
                            }
                        }
                    }
            // every unvisited cell is at least ring * cell away
            if (best <= ring * cell_ || ring >= last_ring)
                return {best_i, best};
        }
    }

    std::vector<std::size_t> within(const Point3& q, double radius) const
    {
        std::vector<std::size_t> out;
        const auto c = coords(q);
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        for (int dx = -reach; dx <= reach; ++dx)
            for (int dy = -reach; dy <= reach; ++dy)
                for (int dz = -reach; dz <= reach; ++dz) {
                    const auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == cells_.end())
                        continue;
                    for (std::size_t i : it->second)
                        if (distance(points_[i], q) <= radius)
                            out.push_back(i);
                }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::array<long long, 3> coords(const Point3& p) const
    {
        return {static_cast<long long>(std::floor(p.x / cell_)), static_cast<long long>(std::floor(p.y / cell_)),
                static_cast<long long>(std::floor(p.z / cell_))};
    }
    static std::uint64_t key(const std::array<long long, 3>& c)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (long long v : c) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ULL;
        }
        return h;
    }

    std::span<const Point3> points_;
    double cell_;
    std::array<long long, 3> lo_{std::numeric_limits<long long>::max(), std::numeric_limits<long long>::max(),
                                 std::numeric_limits<long long>::max()};
    std::array<long long, 3> hi_{std::numeric_limits<long long>::min(), std::numeric_limits<long long>::min(),
                                 std::numeric_limits<long long>::min()};
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

inline void consider_density_sample(DensityResult& r, const Point3& s, double d)
{
    ++r.samples;
    if (d > r.worst_distance) {
        r.worst_distance = d;
        r.worst_center = s;
    }
}

// Best-first branch and bound for the largest value of a Lipschitz function over a set of
// cells. `eval` scores a cell at its representative point; `bound` is the cell's Lipschitz
// slack (value anywhere in the cell <= score + bound); `split` refines it. Stops once no cell
// can beat the best score by more than `gap`, or after `budget` evaluations.
template <class Cell, class Eval, class Bound, class Split>
void maximize_lipschitz(DensityResult& r, std::vector<Cell> cells, Eval eval, Bound bound, Split split, double gap,
                        std::size_t budget)
{
    struct Item
    {
        double upper;
        std::size_t id;
        Cell cell;
    };
    auto cmp = [](const Item& l, const Item& x) { return l.upper < x.upper || (l.upper == x.upper && l.id > x.id); };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
    std::size_t next_id = 0;
    auto push = [&](const Cell& c) {
        const auto [p, d] = eval(c);
        consider_density_sample(r, p, d);
        heap.push({d + bound(c), next_id++, c});
    };
    for (const Cell& c : cells)
        push(c);
    while (!heap.empty() && r.samples < budget) {
        const Item top = heap.top();
        heap.pop();
        if (top.upper <= r.worst_distance + gap)
            break;
        for (const Cell& child : split(top.cell))
            push(child);
    }
}

inline constexpr std::size_t kDensityBudget = 4'000'000;

inline DensityResult density_on_surface(const std::vector<Point3>& cloud, const ParametricSurface& surf, double delta)
{
    // estimate the Lipschitz constants of the map from finite differences
    const int probe = 16;
    double lu = 0.0, lv = 0.0;
    const double du = (surf.u1 - surf.u0) / probe, dv = (surf.v1 - surf.v0) / probe;
    for (int i = 0; i <= probe; ++i)
        for (int j = 0; j <= probe; ++j) {
            const double u = surf.u0 + i * du, v = surf.v0 + j * dv;
            const Point3 p = surf.map(u, v);
            if (i < probe)
                lu = std::max(lu, distance(surf.map(u + du, v), p) / du);
            if (j < probe)
                lv = std::max(lv, distance(surf.map(u, v + dv), p) / dv);
        }
    // 1.5x safety on the finite-difference estimate
    lu *= 1.5;
    lv *= 1.5;

    struct Rect
    {
        double u0, u1, v0, v1;
    };
    const PointGrid grid(cloud, delta);
    const double pitch = delta / 4.0;
    const auto nu = std::max<int>(1, static_cast<int>(std::ceil(lu * (surf.u1 - surf.u0) / pitch)));
    const auto nv = std::max<int>(1, static_cast<int>(std::ceil(lv * (surf.v1 - surf.v0) / pitch)));
    std::vector<Rect> cells;
    cells.reserve(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv));
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            cells.push_back({surf.u0 + (surf.u1 - surf.u0) * i / nu, surf.u0 + (surf.u1 - surf.u0) * (i + 1) / nu,
                             surf.v0 + (surf.v1 - surf.v0) * j / nv, surf.v0 + (surf.v1 - surf.v0) * (j + 1) / nv});

    DensityResult r;
    maximize_lipschitz(
        r, std::move(cells),
        [&](const Rect& c) {
            const Point3 s = surf.map(0.5 * (c.u0 + c.u1), 0.5 * (c.v0 + c.v1));
            return std::pair{s, surf.distortion * grid.nearest(s).second};
        },
        [&](const Rect& c) { return surf.distortion * 0.5 * std::hypot(lu * (c.u1 - c.u0), lv * (c.v1 - c.v0)); },
        [](const Rect& c) {
            const double um = 0.5 * (c.u0 + c.u1), vm = 0.5 * (c.v0 + c.v1);
            return std::array<Rect, 4>{Rect{c.u0, um, c.v0, vm}, Rect{um, c.u1, c.v0, vm}, Rect{c.u0, um, vm, c.v1},
                                       Rect{um, c.u1, vm, c.v1}};
        },
        1e-6 * delta, kDensityBudget);
    r.dense = r.worst_distance <= delta;
    return r;
}

// Graph distance over the reference mesh, seeded from the cloud points; a point inside a face
// adds its straight-line distance to the best corner.
inline DensityResult density_on_mesh(const std::vector<Point3>& cloud, const SurfaceMesh& ref, double delta)
{
    const auto nv = ref.num_vertices();
    std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const PointGrid ref_grid(ref.positions(), delta);
    for (const Point3& c : cloud) {
        const auto [v, d] = ref_grid.nearest(c);
        if (d < dist[v]) {
            dist[v] = d;
            heap.push({d, static_cast<VertexId>(v)});
        }
    }
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(v)])
            continue;
        const HalfEdgeId start = ref.vertex_half_edge(v);
        if (start == kInvalidIndex)
            continue;
        HalfEdgeId h = start;
        do {
            const VertexId w = ref.dest(h);
            const double nd = d + distance(ref.position(v), ref.position(w));
            if (nd < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = nd;
                heap.push({nd, w});
            }
            h = ref.next(ref.twin(h));
        } while (h != start);
    }

    struct Piece
    {
        FaceId face;
        Triangle3 t;
    };
    std::vector<Piece> pieces;
    pieces.reserve(ref.num_faces());
    for (FaceId f = 0; f < static_cast<FaceId>(ref.num_faces()); ++f)
        pieces.push_back({f, ref.face_triangle(f)});

    DensityResult r;
    maximize_lipschitz(
        r, std::move(pieces),
        [&](const Piece& p) {
            const Point3 s = (p.t.a + p.t.b + p.t.c) / 3.0;
            double best = std::numeric_limits<double>::infinity();
            for (VertexId corner : ref.face_vertices(p.face))
                best = std::min(best, dist[static_cast<std::size_t>(corner)] + distance(s, ref.position(corner)));
            return std::pair{s, best};
        },
        [](const Piece& p) {
            const Point3 s = (p.t.a + p.t.b + p.t.c) / 3.0;
            return std::max({distance(s, p.t.a), distance(s, p.t.b), distance(s, p.t.c)});
        },
        [](const Piece& p) {
            const Point3 ab = 0.5 * (p.t.a + p.t.b), bc = 0.5 * (p.t.b + p.t.c), ca = 0.5 * (p.t.c + p.t.a);
            return std::array<Piece, 4>{Piece{p.face, {p.t.a, ab, ca}}, Piece{p.face, {ab, p.t.b, bc}},
                                        Piece{p.face, {ca, bc, p.t.c}}, Piece{p.face, {ab, bc, ca}}};
        },
        1e-6 * delta, kDensityBudget);
    r.dense = r.worst_distance <= delta;
    return r;
}

struct TripleSet
{
    std::vector<std::array<std::size_t, 3>> ids;
    std::vector<Vec3> normals;
    bool sampled = false;
};

// Unit normals of the non-degenerate triples among `members` (indices into pts); all triples
// when there are at most `cap`, otherwise `cap` seeded draws.
inline TripleSet collect_triples(std::span<const Point3> pts, const std::vector<std::size_t>& members, std::size_t cap,
                                 std::uint64_t seed, std::uint64_t stream, const Tolerances& tol)
{
    TripleSet out;
    const std::size_t k = members.size();
    auto add = [&](std::size_t i, std::size_t j, std::size_t l) {
        const Triangle3 t{pts[members[i]], pts[members[j]], pts[members[l]]};
        if (is_degenerate(t, tol))
            return;
        out.ids.push_back({members[i], members[j], members[l]});
        out.normals.push_back(normalized(cross(t.b - t.a, t.c - t.a)));
    };
    const double total = static_cast<double>(k) * (k - 1) * (k - 2) / 6.0;
    if (k < 3)
        return out;
    if (total <= static_cast<double>(cap)) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                for (std::size_t l = j + 1; l < k; ++l)
                    add(i, j, l);
        return out;
    }
    out.sampled = true;
    const CounterRng rng(seed, stream);
    for (std::size_t s = 0; s < cap; ++s) {
        std::size_t i = rng.bits(3 * s) % k;
        std::size_t j = rng.bits(3 * s + 1) % (k - 1);
        std::size_t l = rng.bits(3 * s + 2) % (k - 2);
        // map to three distinct indices
        if (j >= i)
            ++j;
        const std::size_t lo = std::min(i, j), hi = std::max(i, j);
        if (l >= lo)
            ++l;
        if (l >= hi)
            ++l;
        add(i, j, l);
    }
    return out;
}

inline std::pair<double, std::size_t> worst_triple_angle(const TripleSet& t, const Vec3& n)
{
    double worst = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < t.normals.size(); ++i) {
        const double a = normal_angle(t.normals[i], n);
        if (a > worst) {
            worst = a;
            arg = i;
        }
    }
    return {worst, arg};
}

// Coordinate descent on the spherical angles of the normal, minimising the worst triple angle.
inline Vec3 refine_normal(const TripleSet& t, Vec3 n, int iterations = 32)
{
    if (t.normals.empty())
        return n;
    auto to_normal = [](double polar, double azimuth) {
        return Vec3{std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
    };
    // work in a frame where n is the pole so the parametrisation is regular around it
    const PlaneFrame frame = make_frame(normalized(n));
    auto world = [&](const Vec3& local) { return local.x * frame.e1 + local.y * frame.e2 + local.z * frame.normal; };
    double polar = 0.0, azimuth = 0.0;
    double best = worst_triple_angle(t, frame.normal).first;
    double step = std::max(best, 1e-3);
    for (int it = 0; it < iterations; ++it) {
        bool improved = false;
        for (int coord = 0; coord < 2; ++coord)
            for (double sgn : {1.0, -1.0}) {
                double p = polar, a = azimuth;
                (coord == 0 ? p : a) += sgn * step;
                const double val = worst_triple_angle(t, world(to_normal(p, a))).first;
                if (val < best) {
                    best = val;
                    polar = p;
                    azimuth = a;
                    improved = true;
                }
            }
        if (!improved)
            step *= 0.5;
    }
    return normalized(world(to_normal(polar, azimuth)));
}

} // namespace detail

/// Every proxy sample must have a cloud point within delta. Distances are graph-geodesic on the
/// reference mesh when present, otherwise Euclidean scaled by the surface's distortion bound.
/// Throws NoProxy without a proxy surface.
inline DensityResult density_check(const PointCloud& c, double delta)
{
    if (!(delta > 0.0))
        throw PreconditionViolated("density_check: delta must be positive");
    if (c.points.empty())
        throw PreconditionViolated("density_check: empty cloud");
    if (c.reference_mesh)
        return detail::density_on_mesh(c.points, *c.reference_mesh, delta);
    if (c.surface)
        return detail::density_on_surface(c.points, *c.surface, delta);
    throw NoProxy("density_check: the cloud carries no reference surface");
}

struct FlatnessOptions
{
    std::size_t max_triples = 100000;
    std::uint64_t seed = 0;
    int refine_iterations = 32;
    Tolerances tol;
};

/// Around every cloud point p, fits L to the r-ball, refines it, and measures the largest angle
/// between L and a plane through 3 ball points. Flat iff that angle is < theta everywhere.
/// One-sided: a better L may exist where this reports "not flat".
inline FlatnessResult flatness_check(const PointCloud& c, double theta, const FlatnessOptions& opt = {})
{
    if (!(c.r > 0.0))
        throw PreconditionViolated("flatness_check: radius r must be positive");
    FlatnessResult out;
    const detail::PointGrid grid(c.points, c.r);
    for (std::size_t p = 0; p < c.points.size(); ++p) {
        const std::vector<std::size_t> ball = grid.within(c.points[p], c.r);
        if (ball.size() < 3)
            continue;
        std::vector<Point3> ball_pts;
        ball_pts.reserve(ball.size());
        for (std::size_t i : ball)
            ball_pts.push_back(c.points[i]);
        Plane3 L;
        try {
            L = fit_plane(ball_pts, opt.tol);
        } catch (const DegenerateInput&) {
            continue; // collinear ball: every triple is degenerate
        }
        const detail::TripleSet triples = detail::collect_triples(c.points, ball, opt.max_triples, opt.seed, p, opt.tol);
        if (triples.normals.empty())
            continue;
        out.sampled = out.sampled || triples.sampled;
        const Vec3 n = detail::canonical_normal(detail::refine_normal(triples, L.unit_normal, opt.refine_iterations));
        const auto [angle, arg] = detail::worst_triple_angle(triples, n);
        if (angle > out.worst_angle) {
            out.worst_angle = angle;
            out.worst_point = p;
            out.worst_triple = triples.ids[arg];
            out.worst_plane = {n, -dot(n, c.points[p])};
        }
    }
    out.flat = out.worst_angle < theta;
    out.non_strict = std::abs(out.worst_angle - theta) <= opt.tol.angle;
    return out;
}

/// Patch-global version: one plane for the whole set, every triple within pi/8 of it
/// (or of `bound`, when given).
inline Pi8Result pi8_check(std::span<const Point3> points, const FlatnessOptions& opt = {},
                           double bound = std::numbers::pi / 8.0)
{
    Pi8Result out;
    if (points.size() < 3)
        return out;
    const Plane3 fitted = fit_plane(points, opt.tol);
    std::vector<std::size_t> all(points.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    const detail::TripleSet triples = detail::collect_triples(points, all, opt.max_triples, opt.seed, 0, opt.tol);
    out.sampled = triples.sampled;
    const Vec3 n = detail::canonical_normal(detail::refine_normal(triples, fitted.unit_normal, opt.refine_iterations));
    const auto [angle, arg] = detail::worst_triple_angle(triples, n);
    out.worst_angle = angle;
    if (!triples.ids.empty())
        out.worst_triple = triples.ids[arg];
    Point3 centroid;
    for (const Point3& p : points)
        centroid += p;
    centroid = centroid / static_cast<double>(points.size());
    out.plane = {n, -dot(n, centroid)};
    out.ok = angle < bound;
    return out;
}

} // namespace flipmesh
