#pragma once

#include "flipmesh/error.hpp"
#include "flipmesh/flipper.hpp"
#include "flipmesh/geom.hpp"
#include "flipmesh/intersect.hpp"
#include "flipmesh/mesh.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace flipmesh {

using Tri = std::array<int, 3>;

/// Triangulation of planar points; triangles are counter-clockwise index triples.
struct PlanarTriangulation
{
    std::vector<Point2> points;
    std::vector<Tri> triangles;
    /// Sets of >= 4 points sharing an empty circle; any triangulation of each is Delaunay.
    std::vector<std::vector<int>> cocircular_groups;
};

namespace detail {

inline double bbox_diagonal_2d(std::span<const Point2> pts)
{
    std::vector<Point3> lifted;
    lifted.reserve(pts.size());
    for (const Point2& p : pts)
        lifted.push_back(lift(p));
    return bbox_diagonal(lifted);
}

// Incircle side with the same band as in_circumdisk: tau_angle * diag^4 of the four points.
inline CircleSide circle_side_2d(Point2 a, Point2 b, Point2 c, const Point2& p, const Tolerances& tol)
{
    if (orient2d(a, b, c) < 0.0)
        std::swap(b, c);
    const double diag = bbox_diagonal({lift(a), lift(b), lift(c), lift(p)});
    const double det = incircle_determinant(a, b, c, p);
    const double band = tol.angle * diag * diag * diag * diag;
    if (det > band)
        return CircleSide::Inside;
    if (det < -band)
        return CircleSide::Outside;
    return CircleSide::OnCircle;
}

inline bool collinear_2d(const Point2& a, const Point2& b, const Point2& c, const Tolerances& tol)
{
    const double l = std::max({distance(a, b), distance(b, c), distance(c, a)});
    return l == 0.0 || std::abs(orient2d(a, b, c)) <= 2.0 * tol.deg * l * l;
}

inline Tri ccw(std::span<const Point2> pts, Tri t)
{
    if (orient2d(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                 pts[static_cast<std::size_t>(t[2])]) < 0.0)
        std::swap(t[1], t[2]);
    return t;
}

inline Tri sorted(Tri t)
{
    std::sort(t.begin(), t.end());
    return t;
}

inline std::array<Point2, 3> corners(std::span<const Point2> pts, const Tri& t)
{
    return {pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
            pts[static_cast<std::size_t>(t[2])]};
}

} // namespace detail

/// Convex hull, counter-clockwise, strictly convex corners only (collinear points dropped).
inline std::vector<int> convex_hull(std::span<const Point2> pts, const Tolerances& tol = {})
{
    std::vector<int> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int l, int r) {
        const Point2& a = pts[static_cast<std::size_t>(l)];
        const Point2& b = pts[static_cast<std::size_t>(r)];
        return a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && l < r)));
    });
    if (idx.size() < 3)
        return idx;
    const double diag = detail::bbox_diagonal_2d(pts);
    const double floor = tol.deg * diag * diag;
    std::vector<int> hull(2 * idx.size());
    std::size_t k = 0;
    auto turn = [&](int o, int a, int b) {
        return orient2d(pts[static_cast<std::size_t>(o)], pts[static_cast<std::size_t>(a)],
                        pts[static_cast<std::size_t>(b)]);
    };
    for (int i : idx) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], i) <= floor)
            --k;
        hull[k++] = i;
    }
    for (std::size_t i = idx.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], idx[i]) <= floor)
            --k;
        hull[k++] = idx[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// Number of input points on the hull boundary, collinear ones included.
inline std::size_t boundary_point_count(std::span<const Point2> pts, const Tolerances& tol = {})
{
    const std::vector<int> hull = convex_hull(pts, tol);
    const double diag = detail::bbox_diagonal_2d(pts);
    std::size_t count = 0;
    for (std::size_t p = 0; p < pts.size(); ++p)
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Point2& a = pts[static_cast<std::size_t>(hull[i])];
            const Point2& b = pts[static_cast<std::size_t>(hull[(i + 1) % hull.size()])];
            const double len = distance(a, b);
            const Point2& x = pts[p];
            const double along = dot(x - a, b - a) / (len * len);
            if (std::abs(orient2d(a, b, x)) / len <= tol.plane * diag && along >= -tol.plane && along <= 1.0 + tol.plane) {
                ++count;
                break;
            }
        }
    return count;
}

/// Brute-force Delaunay triangulation of the convex hull of at most 16 points: every
/// triangle with an empty circumdisk is kept; each cocircular group is triangulated by its
/// lexicographically smallest triangle list and reported. `boundary`, when given, must be a
/// convex polygon over the points enclosing all of them.
inline PlanarTriangulation planar_delaunay_bruteforce(std::span<const Point2> pts, std::span<const int> boundary = {},
                                                      const Tolerances& tol = {})
{
    constexpr std::size_t kMaxPoints = 16;
    if (pts.size() > kMaxPoints)
        throw TooManyPoints("planar_delaunay_bruteforce: at most 16 points");
    if (pts.size() < 3)
        throw DegenerateConfiguration("planar_delaunay_bruteforce: fewer than 3 points");
    const double diag = detail::bbox_diagonal_2d(pts);
    if (!boundary.empty()) {
        const std::size_t k = boundary.size();
        double sign = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double o = orient2d(pts[static_cast<std::size_t>(boundary[i])],
                                      pts[static_cast<std::size_t>(boundary[(i + 1) % k])],
                                      pts[static_cast<std::size_t>(boundary[(i + 2) % k])]);
            if (std::abs(o) <= tol.deg * diag * diag || (sign != 0.0 && (o > 0.0) != (sign > 0.0)))
                throw PreconditionViolated("planar_delaunay_bruteforce: boundary polygon is not strictly convex");
            sign = o;
        }
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (std::size_t i = 0; i < k; ++i) {
                const double o = orient2d(pts[static_cast<std::size_t>(boundary[i])],
                                          pts[static_cast<std::size_t>(boundary[(i + 1) % k])], pts[p]);
                if ((sign > 0.0 ? o : -o) < -tol.plane * diag * diag)
                    throw PreconditionViolated("planar_delaunay_bruteforce: point outside the boundary polygon");
            }
    }

    const int n = static_cast<int>(pts.size());
    PlanarTriangulation out;
    out.points.assign(pts.begin(), pts.end());
    std::set<std::vector<int>> groups;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const Point2 &a = pts[static_cast<std::size_t>(i)], &b = pts[static_cast<std::size_t>(j)],
                             &c = pts[static_cast<std::size_t>(k)];
                if (detail::collinear_2d(a, b, c, tol))
                    continue;
                std::vector<int> on_circle{i, j, k};
                bool empty = true;
                for (int p = 0; p < n && empty; ++p) {
                    if (p == i || p == j || p == k)
                        continue;
                    switch (detail::circle_side_2d(a, b, c, pts[static_cast<std::size_t>(p)], tol)) {
                    case CircleSide::Inside: empty = false; break;
                    case CircleSide::OnCircle: on_circle.push_back(p); break;
                    case CircleSide::Outside: break;
                    }
                }
                if (!empty)
                    continue;
                if (on_circle.size() == 3) {
                    out.triangles.push_back(detail::ccw(pts, {i, j, k}));
                } else {
                    std::sort(on_circle.begin(), on_circle.end());
                    groups.insert(on_circle);
                }
            }

    for (const std::vector<int>& g : groups) {
        // smallest compatible triangle first; any non-overlapping set extends to a triangulation
        std::vector<Tri> chosen;
        const std::size_t need = g.size() - 2;
        for (std::size_t a = 0; a < g.size() && chosen.size() < need; ++a)
            for (std::size_t b = a + 1; b < g.size() && chosen.size() < need; ++b)
                for (std::size_t c = b + 1; c < g.size() && chosen.size() < need; ++c) {
                    const Tri t{g[a], g[b], g[c]};
                    const auto tc = detail::corners(pts, t);
                    if (detail::collinear_2d(tc[0], tc[1], tc[2], tol))
                        continue;
                    const bool fits = std::none_of(chosen.begin(), chosen.end(), [&](const Tri& o) {
                        return interiors_overlap_2d(tc, detail::corners(pts, o), tol.plane * diag);
                    });
                    if (fits)
                        chosen.push_back(t);
                }
        for (const Tri& t : chosen)
            out.triangles.push_back(detail::ccw(pts, t));
        out.cocircular_groups.push_back(g);
    }

    const std::size_t h = boundary_point_count(pts, tol);
    const std::size_t expected = 2 * pts.size() - h - 2;
    if (out.triangles.size() != expected)
        throw DegenerateConfiguration("planar_delaunay_bruteforce: assembled " + std::to_string(out.triangles.size()) +
                                      " triangles, expected " + std::to_string(expected));
    std::sort(out.triangles.begin(), out.triangles.end(),
              [](const Tri& l, const Tri& r) { return detail::sorted(l) < detail::sorted(r); });
    return out;
}

/// Some triangulation of the convex hull using every point: a fan over the hull, then each
/// remaining point splits the triangle (or edge) it falls on.
inline PlanarTriangulation planar_initial_triangulation(std::span<const Point2> pts, const Tolerances& tol = {})
{
    PlanarTriangulation out;
    out.points.assign(pts.begin(), pts.end());
    const std::vector<int> hull = convex_hull(pts, tol);
    if (hull.size() < 3)
        throw DegenerateConfiguration("planar_initial_triangulation: points are collinear");
    for (std::size_t i = 1; i + 1 < hull.size(); ++i)
        out.triangles.push_back({hull[0], hull[i], hull[i + 1]});

    const double diag = detail::bbox_diagonal_2d(pts);
    const double eps = tol.plane * diag;
    std::vector<char> placed(pts.size(), 0);
    for (int v : hull)
        placed[static_cast<std::size_t>(v)] = 1;

    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        if (placed[pi])
            continue;
        const int p = static_cast<int>(pi);
        const Point2& x = pts[pi];
        bool done = false;
        for (std::size_t t = 0; t < out.triangles.size() && !done; ++t) {
            const Tri tri = out.triangles[t];
            std::array<double, 3> d{};
            for (int e = 0; e < 3; ++e) {
                const Point2& a = pts[static_cast<std::size_t>(tri[static_cast<std::size_t>(e)])];
                const Point2& b = pts[static_cast<std::size_t>(tri[static_cast<std::size_t>((e + 1) % 3)])];
                d[static_cast<std::size_t>(e)] = orient2d(a, b, x) / distance(a, b);
            }
            if (*std::min_element(d.begin(), d.end()) < -eps)
                continue;
            int on_edge = -1;
            for (int e = 0; e < 3; ++e)
                if (d[static_cast<std::size_t>(e)] <= eps)
                    on_edge = e;
            if (on_edge < 0) {
                out.triangles[t] = {tri[0], tri[1], p};
                out.triangles.push_back({tri[1], tri[2], p});
                out.triangles.push_back({tri[2], tri[0], p});
            } else {
                const int u = tri[static_cast<std::size_t>(on_edge)];
                const int v = tri[static_cast<std::size_t>((on_edge + 1) % 3)];
                // split every triangle holding edge {u, v}
                for (std::size_t s = 0, count = out.triangles.size(); s < count; ++s) {
                    const Tri q = out.triangles[s];
                    for (int e = 0; e < 3; ++e) {
                        const int a = q[static_cast<std::size_t>(e)];
                        const int b = q[static_cast<std::size_t>((e + 1) % 3)];
                        const int c = q[static_cast<std::size_t>((e + 2) % 3)];
                        if ((a == u && b == v) || (a == v && b == u)) {
                            out.triangles[s] = {a, p, c};
                            out.triangles.push_back({p, b, c});
                            break;
                        }
                    }
                }
            }
            done = true;
        }
        if (!done)
            throw DegenerateConfiguration("planar_initial_triangulation: point outside the hull");
        placed[pi] = 1;
    }
    return out;
}

inline SurfaceMesh to_mesh(const PlanarTriangulation& t)
{
    std::vector<Point3> verts;
    verts.reserve(t.points.size());
    for (const Point2& p : t.points)
        verts.push_back(lift(p));
    std::vector<std::array<VertexId, 3>> faces(t.triangles.begin(), t.triangles.end());
    return SurfaceMesh::from_triangles(std::move(verts), faces);
}

/// Planar triangulation read back from a mesh lying in the z = 0 plane.
inline PlanarTriangulation from_mesh(const SurfaceMesh& m)
{
    PlanarTriangulation t;
    for (const Point3& p : m.positions())
        t.points.push_back({p.x, p.y});
    for (const auto& f : m.triangles())
        t.triangles.push_back({f[0], f[1], f[2]});
    return t;
}

/// The flip-algorithm route: initial triangulation, then diagonal switches until Delaunay.
inline PlanarTriangulation planar_delaunay_flip(std::span<const Point2> pts, const FlipConfig& cfg = {},
                                                RunReport* report = nullptr)
{
    SurfaceMesh m = to_mesh(planar_initial_triangulation(pts, cfg.tol));
    RunReport r = delaunayify(m, cfg);
    if (report)
        *report = std::move(r);
    return from_mesh(m);
}

struct CircumdiskCheck
{
    bool ok = true;
    std::vector<std::pair<std::size_t, int>> offending; ///< (triangle index, vertex index)
};

inline CircumdiskCheck empty_circumdisk_check(const PlanarTriangulation& t, const Tolerances& tol = {})
{
    CircumdiskCheck out;
    for (std::size_t i = 0; i < t.triangles.size(); ++i) {
        const auto c = detail::corners(t.points, t.triangles[i]);
        for (std::size_t p = 0; p < t.points.size(); ++p) {
            const int v = static_cast<int>(p);
            if (std::find(t.triangles[i].begin(), t.triangles[i].end(), v) != t.triangles[i].end())
                continue;
            if (detail::circle_side_2d(c[0], c[1], c[2], t.points[p], tol) == CircleSide::Inside)
                out.offending.emplace_back(i, v);
        }
    }
    out.ok = out.offending.empty();
    return out;
}

/// Same check for a mesh whose vertices are coplanar within tau_plane; throws NotCoplanar otherwise.
inline CircumdiskCheck empty_circumdisk_check(const SurfaceMesh& m, const Tolerances& tol = {})
{
    const Plane3 plane = fit_plane(m.positions(), tol);
    const double diag = bbox_diagonal(m.positions());
    for (const Point3& p : m.positions())
        if (std::abs(plane.signed_distance(p)) > tol.plane * diag)
            throw NotCoplanar("empty_circumdisk_check: mesh is not planar");
    const PlaneFrame frame = make_frame(plane);
    PlanarTriangulation t;
    for (const Point3& p : m.positions())
        t.points.push_back(frame.to_2d(p));
    for (const auto& f : m.triangles())
        t.triangles.push_back({f[0], f[1], f[2]});
    return empty_circumdisk_check(t, tol);
}

/// One connected region where two triangulations disagree.
struct DiffRegion
{
    std::vector<int> vertices;
    std::vector<Tri> only_in_first;
    std::vector<Tri> only_in_second;
    bool concyclic = false;
};

struct TriangulationDiff
{
    std::vector<DiffRegion> regions;
    bool hard_mismatch = false; ///< some region is not concyclic

    bool empty() const noexcept { return regions.empty(); }
};

/// Groups the face-set symmetric difference into connected regions and checks that each is a
/// concyclic polygon. The second triangulation's points are matched to the first by coordinates.
inline TriangulationDiff compare_triangulations(const PlanarTriangulation& t1, const PlanarTriangulation& t2,
                                                const Tolerances& tol = {})
{
    if (t1.points.size() != t2.points.size())
        throw VertexSetMismatch("compare_triangulations: different point counts");
    std::map<std::pair<double, double>, int> index;
    for (std::size_t i = 0; i < t1.points.size(); ++i)
        index[{t1.points[i].x, t1.points[i].y}] = static_cast<int>(i);
    std::vector<int> remap(t2.points.size());
    for (std::size_t i = 0; i < t2.points.size(); ++i) {
        const auto it = index.find({t2.points[i].x, t2.points[i].y});
        if (it == index.end())
            throw VertexSetMismatch("compare_triangulations: point sets differ");
        remap[i] = it->second;
    }

    std::set<Tri> f1, f2;
    for (const Tri& t : t1.triangles)
        f1.insert(detail::sorted(t));
    for (const Tri& t : t2.triangles)
        f2.insert(detail::sorted({remap[static_cast<std::size_t>(t[0])], remap[static_cast<std::size_t>(t[1])],
                                  remap[static_cast<std::size_t>(t[2])]}));
    std::vector<Tri> only1, only2;
    std::set_difference(f1.begin(), f1.end(), f2.begin(), f2.end(), std::back_inserter(only1));
    std::set_difference(f2.begin(), f2.end(), f1.begin(), f1.end(), std::back_inserter(only2));

    // Union-find over the differing faces. Two faces of the same side join across an edge the
    // other side lacks (a diagonal inside the region); a face from each side joins when both
    // lie on the same side of a common directed edge (they overlap next to it).
    const std::size_t total = only1.size() + only2.size();
    std::vector<std::size_t> parent(total);
    for (std::size_t i = 0; i < total; ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    auto face = [&](std::size_t i) { return i < only1.size() ? only1[i] : only2[i - only1.size()]; };
    auto oriented = [&](std::size_t i) { return detail::ccw(t1.points, face(i)); };
    std::set<std::pair<int, int>> edges1, edges2;
    auto undirected = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };
    for (const Tri& t : f1)
        for (int k = 0; k < 3; ++k)
            edges1.insert(undirected(t[k], t[(k + 1) % 3]));
    for (const Tri& t : f2)
        for (int k = 0; k < 3; ++k)
            edges2.insert(undirected(t[k], t[(k + 1) % 3]));
    std::map<std::pair<int, int>, std::vector<std::size_t>> by_directed;
    for (std::size_t i = 0; i < total; ++i) {
        const Tri t = oriented(i);
        for (int k = 0; k < 3; ++k)
            by_directed[{t[k], t[(k + 1) % 3]}].push_back(i);
    }
    for (const auto& [e, faces] : by_directed) {
        // same directed edge: one face from each side
        for (std::size_t x = 1; x < faces.size(); ++x)
            parent[find(faces[x])] = find(faces[0]);
        // reversed directed edge: same side only, across an edge missing on the other side
        const auto rev = by_directed.find({e.second, e.first});
        if (rev == by_directed.end())
            continue;
        const auto key = undirected(e.first, e.second);
        for (std::size_t i : faces)
            for (std::size_t j : rev->second) {
                const bool first_i = i < only1.size(), first_j = j < only1.size();
                if (first_i == first_j && (first_i ? !edges2.count(key) : !edges1.count(key)))
                    parent[find(i)] = find(j);
            }
    }

    std::map<std::size_t, DiffRegion> regions;
    for (std::size_t i = 0; i < total; ++i) {
        DiffRegion& r = regions[find(i)];
        (i < only1.size() ? r.only_in_first : r.only_in_second).push_back(face(i));
        for (int v : face(i))
            r.vertices.push_back(v);
    }
    TriangulationDiff diff;
    for (auto& [root, r] : regions) {
        std::sort(r.vertices.begin(), r.vertices.end());
        r.vertices.erase(std::unique(r.vertices.begin(), r.vertices.end()), r.vertices.end());
        const Tri ref = r.only_in_first.empty() ? r.only_in_second.front() : r.only_in_first.front();
        const auto c = detail::corners(t1.points, ref);
        r.concyclic = std::all_of(r.vertices.begin(), r.vertices.end(), [&](int v) {
            return std::find(ref.begin(), ref.end(), v) != ref.end() ||
                   detail::circle_side_2d(c[0], c[1], c[2], t1.points[static_cast<std::size_t>(v)], tol) ==
                       CircleSide::OnCircle;
        });
        diff.hard_mismatch = diff.hard_mismatch || !r.concyclic;
        diff.regions.push_back(std::move(r));
    }
    return diff;
}

} // namespace flipmesh
