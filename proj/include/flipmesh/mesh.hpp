#pragma once

#include "flipmesh/error.hpp"
#include "flipmesh/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flipmesh {

using VertexId = std::int32_t;
using HalfEdgeId = std::int32_t;
using FaceId = std::int32_t;

inline constexpr std::int32_t kInvalidIndex = -1;
/// Face id carried by half-edges on the mesh boundary.
inline constexpr FaceId kBoundaryFace = -1;

struct HalfEdge
{
    VertexId origin = kInvalidIndex;
    HalfEdgeId twin = kInvalidIndex;
    HalfEdgeId next = kInvalidIndex;
    FaceId face = kBoundaryFace;
};

/// An undirected edge, named by the smaller half-edge index of its twin pair.
struct EdgeRef
{
    HalfEdgeId index = kInvalidIndex;

    friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

using VertexPair = std::array<VertexId, 2>;

/// Half-edge triangle mesh with optional boundary.
///
/// Every face owns three half-edges forming a `next` cycle. Boundary half-edges carry
/// `kBoundaryFace` and are chained into boundary loops, so `twin` is total and the
/// one-ring of any vertex can be walked with `next(twin(h))`.
class SurfaceMesh
{
public:
    SurfaceMesh() = default;

    /// Builds connectivity from an indexed triangle list. Throws NonManifoldInput on
    /// repeated corners, edges with more than two faces, inconsistent orientation and
    /// non-manifold vertices; out-of-range indices throw PreconditionViolated.
    static SurfaceMesh from_triangles(std::vector<Point3> vertices, std::span<const std::array<VertexId, 3>> faces)
    {
        SurfaceMesh m;
        m.vertices_ = std::move(vertices);
        const auto nv = static_cast<VertexId>(m.vertices_.size());
        m.half_edges_.reserve(faces.size() * 3 + 16);
        m.face_half_edge_.reserve(faces.size());

        std::unordered_map<std::uint64_t, HalfEdgeId> directed;
        directed.reserve(faces.size() * 3);
        auto key = [](VertexId u, VertexId v) {
            return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
        };

        for (std::size_t f = 0; f < faces.size(); ++f) {
            const auto& tri = faces[f];
            for (VertexId v : tri)
                if (v < 0 || v >= nv)
                    throw PreconditionViolated("face " + std::to_string(f) + " references vertex " +
                                               std::to_string(v) + " out of range");
            if (tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0])
                throw NonManifoldInput("face " + std::to_string(f) + " repeats a vertex");
            const auto base = static_cast<HalfEdgeId>(m.half_edges_.size());
            for (int i = 0; i < 3; ++i) {
                const VertexId u = tri[static_cast<std::size_t>(i)];
                const VertexId v = tri[static_cast<std::size_t>((i + 1) % 3)];
                if (!directed.emplace(key(u, v), base + i).second)
                    throw NonManifoldInput("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                           ") used twice with the same orientation (non-manifold or "
                                           "inconsistently oriented)");
                m.half_edges_.push_back({u, kInvalidIndex, base + (i + 1) % 3, static_cast<FaceId>(f)});
            }
            m.face_half_edge_.push_back(base);
        }

        const auto interior_count = static_cast<HalfEdgeId>(m.half_edges_.size());
        std::vector<HalfEdgeId> boundary_out(m.vertices_.size(), kInvalidIndex);
        for (HalfEdgeId h = 0; h < interior_count; ++h) {
            const VertexId u = m.half_edges_[h].origin;
            const VertexId v = m.half_edges_[m.half_edges_[h].next].origin;
            if (auto it = directed.find(key(v, u)); it != directed.end()) {
                m.half_edges_[h].twin = it->second;
                continue;
            }
            const auto b = static_cast<HalfEdgeId>(m.half_edges_.size());
            m.half_edges_.push_back({v, h, kInvalidIndex, kBoundaryFace});
            m.half_edges_[h].twin = b;
            if (boundary_out[v] != kInvalidIndex)
                throw NonManifoldInput("vertex " + std::to_string(v) + " lies on two boundary loops");
            boundary_out[v] = b;
        }
        for (auto b = interior_count; b < static_cast<HalfEdgeId>(m.half_edges_.size()); ++b) {
            const VertexId end = m.half_edges_[m.half_edges_[b].twin].origin;
            m.half_edges_[b].next = boundary_out[end];
        }

        m.vertex_out_.assign(m.vertices_.size(), kInvalidIndex);
        std::vector<int> out_count(m.vertices_.size(), 0);
        for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(m.half_edges_.size()); ++h) {
            const VertexId v = m.half_edges_[h].origin;
            ++out_count[v];
            if (m.vertex_out_[v] == kInvalidIndex)
                m.vertex_out_[v] = h;
        }
        for (VertexId v = 0; v < nv; ++v) {
            if (boundary_out[v] != kInvalidIndex)
                m.vertex_out_[v] = boundary_out[v];
            if (m.vertex_out_[v] == kInvalidIndex)
                continue;
            int seen = 0;
            HalfEdgeId h = m.vertex_out_[v];
            do {
                ++seen;
                h = m.half_edges_[m.half_edges_[h].twin].next;
            } while (h != m.vertex_out_[v] && seen <= out_count[v]);
            if (seen != out_count[v])
                throw NonManifoldInput("vertex " + std::to_string(v) + " has a non-disk neighbourhood");
        }
        return m;
    }

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_faces() const noexcept { return face_half_edge_.size(); }
    std::size_t num_half_edges() const noexcept { return half_edges_.size(); }
    std::size_t num_edges() const noexcept { return half_edges_.size() / 2; }

    const Point3& position(VertexId v) const { return vertices_[static_cast<std::size_t>(v)]; }
    std::span<const Point3> positions() const noexcept { return vertices_; }

    const HalfEdge& half_edge(HalfEdgeId h) const { return half_edges_[static_cast<std::size_t>(h)]; }
    VertexId origin(HalfEdgeId h) const { return half_edge(h).origin; }
    HalfEdgeId twin(HalfEdgeId h) const { return half_edge(h).twin; }
    HalfEdgeId next(HalfEdgeId h) const { return half_edge(h).next; }
    FaceId face(HalfEdgeId h) const { return half_edge(h).face; }
    VertexId dest(HalfEdgeId h) const { return origin(twin(h)); }
    bool is_boundary_half_edge(HalfEdgeId h) const { return face(h) == kBoundaryFace; }

    HalfEdgeId face_half_edge(FaceId f) const { return face_half_edge_[static_cast<std::size_t>(f)]; }
    HalfEdgeId vertex_half_edge(VertexId v) const { return vertex_out_[static_cast<std::size_t>(v)]; }

    std::array<VertexId, 3> face_vertices(FaceId f) const
    {
        const HalfEdgeId h = face_half_edge(f);
        return {origin(h), origin(next(h)), origin(next(next(h)))};
    }

    Triangle3 face_triangle(FaceId f) const
    {
        const auto v = face_vertices(f);
        return {position(v[0]), position(v[1]), position(v[2])};
    }

    std::vector<std::array<VertexId, 3>> triangles() const
    {
        std::vector<std::array<VertexId, 3>> out(num_faces());
        for (FaceId f = 0; f < static_cast<FaceId>(num_faces()); ++f)
            out[static_cast<std::size_t>(f)] = face_vertices(f);
        return out;
    }

    EdgeRef edge_of(HalfEdgeId h) const { return {std::min(h, twin(h))}; }

    /// Canonical edges in increasing index order.
    std::vector<EdgeRef> edges() const
    {
        std::vector<EdgeRef> out;
        out.reserve(num_edges());
        for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(half_edges_.size()); ++h)
            if (h < twin(h))
                out.push_back({h});
        return out;
    }

    VertexPair edge_vertices(EdgeRef e) const { return {origin(e.index), dest(e.index)}; }

    bool is_boundary_edge(EdgeRef e) const
    {
        return is_boundary_half_edge(e.index) || is_boundary_half_edge(twin(e.index));
    }

    bool is_boundary_vertex(VertexId v) const
    {
        const HalfEdgeId h = vertex_half_edge(v);
        return h != kInvalidIndex && is_boundary_half_edge(h);
    }

    /// Half-edge u -> v, if the two vertices are joined by an edge.
    std::optional<HalfEdgeId> find_half_edge(VertexId u, VertexId v) const
    {
        const HalfEdgeId start = vertex_half_edge(u);
        if (start == kInvalidIndex)
            return std::nullopt;
        HalfEdgeId h = start;
        std::size_t guard = 0;
        do {
            if (dest(h) == v)
                return h;
            h = next(twin(h));
        } while (h != start && ++guard <= half_edges_.size());
        return std::nullopt;
    }

    /// The two triangles adjacent to an interior edge, labelled as an EdgeQuad whose
    /// diagonal BD is the edge.
    EdgeQuad quad(EdgeRef e) const
    {
        const auto v = quad_vertices(e);
        return {position(v[0]), position(v[1]), position(v[2]), position(v[3])};
    }

    /// Vertex ids (a, b, c, d) of the quad around interior edge e = (b, d).
    std::array<VertexId, 4> quad_vertices(EdgeRef e) const
    {
        const HalfEdgeId h = e.index;
        const HalfEdgeId t = twin(h);
        return {dest(next(h)), origin(h), dest(next(t)), dest(h)};
    }

    int euler_characteristic() const noexcept
    {
        return static_cast<int>(num_vertices()) - static_cast<int>(num_edges()) + static_cast<int>(num_faces());
    }

    /// Mutable access to the raw records, for fault-injection in tests. Nothing is revalidated.
    std::vector<HalfEdge>& raw_half_edges() noexcept { return half_edges_; }

private:
    friend struct MeshSurgery;

    std::vector<Point3> vertices_;
    std::vector<HalfEdge> half_edges_;
    std::vector<HalfEdgeId> face_half_edge_;
    std::vector<HalfEdgeId> vertex_out_;
};

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

struct Violation
{
    enum class Kind
    {
        BrokenTwin,
        BrokenNext,
        BadOrigin,
        OrientationMismatch,
        FaceCycle,
        FaceLink,
        NonManifoldEdge,
        IsolatedVertex,
        TooFewFaces,
        NonFinitePosition,
        ZeroLengthEdge
    };

    Kind kind;
    std::int64_t index; ///< offending half-edge, face or vertex, depending on kind
    std::string detail;
};

constexpr std::string_view to_string(Violation::Kind k) noexcept
{
    using K = Violation::Kind;
    switch (k) {
    case K::BrokenTwin: return "BrokenTwin";
    case K::BrokenNext: return "BrokenNext";
    case K::BadOrigin: return "BadOrigin";
    case K::OrientationMismatch: return "OrientationMismatch";
    case K::FaceCycle: return "FaceCycle";
    case K::FaceLink: return "FaceLink";
    case K::NonManifoldEdge: return "NonManifoldEdge";
    case K::IsolatedVertex: return "IsolatedVertex";
    case K::TooFewFaces: return "TooFewFaces";
    case K::NonFinitePosition: return "NonFinitePosition";
    case K::ZeroLengthEdge: return "ZeroLengthEdge";
    }
    return "?";
}

/// Checks every structural invariant; an empty result means the mesh is valid.
inline std::vector<Violation> validate(const SurfaceMesh& m, const Tolerances& tol = {})
{
    using K = Violation::Kind;
    std::vector<Violation> out;
    const auto nh = static_cast<HalfEdgeId>(m.num_half_edges());
    const auto nv = static_cast<VertexId>(m.num_vertices());
    const auto nf = static_cast<FaceId>(m.num_faces());
    auto in_range = [](std::int32_t i, std::int32_t n) { return i >= 0 && i < n; };

    std::vector<char> twin_ok(static_cast<std::size_t>(nh), 0);
    for (HalfEdgeId h = 0; h < nh; ++h) {
        const HalfEdge& he = m.half_edge(h);
        if (!in_range(he.origin, nv)) {
            out.push_back({K::BadOrigin, h, "origin out of range"});
            continue;
        }
        if (!in_range(he.twin, nh) || he.twin == h || m.half_edge(he.twin).twin != h) {
            out.push_back({K::BrokenTwin, h, "twin is not an involution"});
            continue;
        }
        twin_ok[static_cast<std::size_t>(h)] = 1;
        if (!in_range(he.next, nh)) {
            out.push_back({K::BrokenNext, h, "next out of range"});
            continue;
        }
        if (in_range(m.half_edge(he.twin).origin, nv) && m.half_edge(he.twin).origin != m.half_edge(he.next).origin)
            out.push_back({K::OrientationMismatch, h, "twin does not run opposite to this half-edge"});
    }

    for (FaceId f = 0; f < nf; ++f) {
        const HalfEdgeId h0 = m.face_half_edge(f);
        if (!in_range(h0, nh) || m.half_edge(h0).face != f) {
            out.push_back({K::FaceLink, f, "face half-edge does not point back to the face"});
            continue;
        }
        HalfEdgeId h = h0;
        int length = 0;
        bool broken = false;
        do {
            if (!in_range(h, nh) || m.half_edge(h).face != f) {
                broken = true;
                break;
            }
            h = m.half_edge(h).next;
            ++length;
        } while (h != h0 && length <= 3);
        if (broken || length != 3)
            out.push_back({K::FaceCycle, f, "next-cycle does not have length 3"});
    }

    std::map<VertexPair, int> directed;
    for (HalfEdgeId h = 0; h < nh; ++h) {
        if (!twin_ok[static_cast<std::size_t>(h)] || m.half_edge(h).face == kBoundaryFace)
            continue;
        const VertexId u = m.half_edge(h).origin;
        const VertexId v = m.half_edge(m.half_edge(h).twin).origin;
        if (in_range(v, nv) && ++directed[{u, v}] == 2)
            out.push_back({K::NonManifoldEdge, h, "directed edge appears in more than one face"});
    }

    std::vector<int> incident(static_cast<std::size_t>(nv), 0);
    std::vector<char> on_boundary(static_cast<std::size_t>(nv), 0);
    for (HalfEdgeId h = 0; h < nh; ++h) {
        const HalfEdge& he = m.half_edge(h);
        if (!in_range(he.origin, nv))
            continue;
        if (he.face == kBoundaryFace)
            on_boundary[static_cast<std::size_t>(he.origin)] = 1;
        else
            ++incident[static_cast<std::size_t>(he.origin)];
    }
    for (VertexId v = 0; v < nv; ++v) {
        if (incident[static_cast<std::size_t>(v)] == 0)
            out.push_back({K::IsolatedVertex, v, "vertex has no incident face"});
        else if (!on_boundary[static_cast<std::size_t>(v)] && incident[static_cast<std::size_t>(v)] < 2)
            out.push_back({K::TooFewFaces, v, "interior vertex with fewer than 2 faces"});
        if (!is_finite(m.position(v)))
            out.push_back({K::NonFinitePosition, v, "non-finite coordinate"});
    }

    const double min_length = tol.deg * bbox_diagonal(m.positions());
    for (HalfEdgeId h = 0; h < nh; ++h) {
        if (!twin_ok[static_cast<std::size_t>(h)] || h > m.half_edge(h).twin)
            continue;
        const VertexId u = m.half_edge(h).origin;
        const VertexId v = m.half_edge(m.half_edge(h).twin).origin;
        if (in_range(u, nv) && in_range(v, nv) && distance(m.position(u), m.position(v)) <= min_length)
            out.push_back({K::ZeroLengthEdge, h, "edge shorter than the degeneracy tolerance"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Diagonal switch
// ---------------------------------------------------------------------------

/// Outcome of one diagonal switch. Deltas are new minus old.
struct FlipRecord
{
    VertexPair before{kInvalidIndex, kInvalidIndex}; ///< removed diagonal (b, d)
    VertexPair after{kInvalidIndex, kInvalidIndex};  ///< inserted diagonal (a, c)
    double area_delta = 0.0;
    double volume_delta = 0.0;
    double scale = 0.0; ///< squared bbox diagonal of the quad; area tolerances are relative to it
    std::size_t step = 0;
    EdgeRef edge;
};

/// Lexicographic descent of (area, -volume) for one switch, at relative tolerance tau.
inline bool satisfies_descent(const FlipRecord& r, double tau) noexcept
{
    const double area_tol = tau * r.scale;
    return r.area_delta < -area_tol || (std::abs(r.area_delta) <= area_tol && r.volume_delta > tau);
}

/// True iff e is interior and switching it would not create a loop or a duplicate edge.
inline bool flippable(const SurfaceMesh& m, EdgeRef e)
{
    if (e.index < 0 || e.index >= static_cast<HalfEdgeId>(m.num_half_edges()) || m.is_boundary_edge(e))
        return false;
    const auto q = m.quad_vertices(e);
    if (q[0] == q[2])
        return false;
    return !m.find_half_edge(q[0], q[2]).has_value();
}

struct MeshSurgery
{
    static FlipRecord flip(SurfaceMesh& m, EdgeRef e, std::size_t step)
    {
        if (!flippable(m, e))
            throw NotFlippable("edge " + std::to_string(e.index) + " is not flippable");

        const HalfEdgeId h = e.index;
        const HalfEdgeId h1 = m.next(h);
        const HalfEdgeId h2 = m.next(h1);
        const HalfEdgeId t = m.twin(h);
        const HalfEdgeId t1 = m.next(t);
        const HalfEdgeId t2 = m.next(t1);
        const FaceId f0 = m.face(h);
        const FaceId f1 = m.face(t);
        const VertexId b = m.origin(h);
        const VertexId d = m.origin(t);
        const VertexId a = m.origin(h2);
        const VertexId c = m.origin(t2);

        const Point3& pa = m.position(a);
        const Point3& pb = m.position(b);
        const Point3& pc = m.position(c);
        const Point3& pd = m.position(d);
        const Triangle3 abd{pa, pb, pd}, bcd{pb, pc, pd}, abc{pa, pb, pc}, acd{pa, pc, pd};

        FlipRecord rec;
        rec.before = {b, d};
        rec.after = {a, c};
        rec.area_delta = (triangle_area(abc) + triangle_area(acd)) - (triangle_area(abd) + triangle_area(bcd));
        rec.volume_delta = (detail::ideal_volume_unchecked(abc) + detail::ideal_volume_unchecked(acd)) -
                           (detail::ideal_volume_unchecked(abd) + detail::ideal_volume_unchecked(bcd));
        const double diag = bbox_diagonal({pa, pb, pc, pd});
        rec.scale = diag * diag;
        rec.step = step;
        rec.edge = e;

        auto& he = m.half_edges_;
        // f0 becomes (c, a, b): h = c->a, h2 = a->b, t1 = b->c
        he[h] = {c, t, h2, f0};
        he[h2].next = t1;
        he[t1].next = h;
        he[t1].face = f0;
        // f1 becomes (a, c, d): t = a->c, t2 = c->d, h1 = d->a
        he[t] = {a, h, t2, f1};
        he[t2].next = h1;
        he[h1].next = t;
        he[h1].face = f1;

        m.face_half_edge_[static_cast<std::size_t>(f0)] = h;
        m.face_half_edge_[static_cast<std::size_t>(f1)] = t;
        // keep boundary vertices anchored on their boundary half-edge
        auto reanchor = [&](VertexId v, HalfEdgeId candidate) {
            HalfEdgeId& out = m.vertex_out_[static_cast<std::size_t>(v)];
            if (out == h || out == t)
                out = candidate;
        };
        reanchor(b, t1);
        reanchor(d, h1);
        return rec;
    }
};

/// Replaces triangles ABD, BCD around diagonal BD by ABC, ACD. Vertex positions are untouched;
/// half-edge indices of the edge are reused, so `e` names the new diagonal afterwards.
inline FlipRecord flip(SurfaceMesh& m, EdgeRef e, std::size_t step = 0)
{
    return MeshSurgery::flip(m, e, step);
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

/// Neumaier-compensated running sum.
class CompensatedSum
{
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// (total area, total ideal volume); ordered lexicographically by (area, -volume).
struct Potential
{
    double area = 0.0;
    double volume = 0.0;

    /// Strict lexicographic order on (area, -volume).
    friend bool operator<(const Potential& l, const Potential& r) noexcept
    {
        return l.area < r.area || (l.area == r.area && l.volume > r.volume);
    }
};

inline Potential potential(const SurfaceMesh& m)
{
    CompensatedSum area;
    CompensatedSum volume;
    for (FaceId f = 0; f < static_cast<FaceId>(m.num_faces()); ++f) {
        const Triangle3 t = m.face_triangle(f);
        area.add(triangle_area(t));
        volume.add(detail::ideal_volume_unchecked(t));
    }
    return {area.value(), volume.value()};
}

struct EdgeLengthStats
{
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::vector<std::size_t> histogram; ///< equal-width bins over [min, max]
};

inline EdgeLengthStats edge_lengths(const SurfaceMesh& m, std::size_t bins = 16)
{
    EdgeLengthStats s;
    const auto edges = m.edges();
    if (edges.empty())
        return s;
    std::vector<double> lengths;
    lengths.reserve(edges.size());
    CompensatedSum total;
    for (EdgeRef e : edges) {
        const auto v = m.edge_vertices(e);
        lengths.push_back(distance(m.position(v[0]), m.position(v[1])));
        total.add(lengths.back());
    }
    const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = total.value() / static_cast<double>(lengths.size());
    s.histogram.assign(std::max<std::size_t>(bins, 1), 0);
    const double width = (s.max - s.min) / static_cast<double>(s.histogram.size());
    for (double l : lengths) {
        std::size_t bin = width > 0.0 ? static_cast<std::size_t>((l - s.min) / width) : 0;
        ++s.histogram[std::min(bin, s.histogram.size() - 1)];
    }
    return s;
}

} // namespace flipmesh
