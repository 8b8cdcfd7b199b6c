#pragma once

#include "flipmesh/geom.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace flipmesh {

/// Simplex two triangles are declared to share. Corner indices refer to the first triangle.
struct SharedSimplex
{
    enum class Kind
    {
        None,
        Vertex,
        Edge
    };

    Kind kind = Kind::None;
    std::array<int, 2> corners{-1, -1};

    static SharedSimplex none() noexcept { return {}; }
    static SharedSimplex vertex(int corner) noexcept { return {Kind::Vertex, {corner, -1}}; }
    static SharedSimplex edge(int c0, int c1) noexcept { return {Kind::Edge, {c0, c1}}; }
};

namespace detail {

inline const Point3& corner(const Triangle3& t, int i) noexcept
{
    return i == 0 ? t.a : (i == 1 ? t.b : t.c);
}

inline double point_segment_distance(const Point3& x, const Point3& p, const Point3& q) noexcept
{
    const Vec3 d = q - p;
    const double len2 = squared_norm(d);
    double s = len2 > 0.0 ? dot(x - p, d) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return distance(x, p + s * d);
}

struct ParamInterval
{
    double lo = 0.0;
    double hi = 0.0;
};

// Parameter range of p + s (q - p), s in [0, 1], lying in the closed triangle `t`
// inflated by `eps` (a length). Empty when they do not meet.
inline std::optional<ParamInterval> clip_segment_to_triangle(const Point3& p, const Point3& q, const Triangle3& t,
                                                             double eps)
{
    const Vec3 nraw = cross(t.b - t.a, t.c - t.a);
    const double nlen = norm(nraw);
    if (nlen == 0.0)
        return std::nullopt;
    const Vec3 n = nraw / nlen;
    const double dp = dot(n, p - t.a);
    const double dq = dot(n, q - t.a);

    const PlaneFrame frame = make_frame(n, t.a);
    const std::array<Point2, 3> tri{frame.to_2d(t.a), frame.to_2d(t.b), frame.to_2d(t.c)};

    // Signed distance of x to the inner side of each triangle edge; >= -eps means inside.
    auto edge_distance = [&](int i, const Point2& x) {
        const Point2& u = tri[static_cast<std::size_t>(i)];
        const Point2& v = tri[static_cast<std::size_t>((i + 1) % 3)];
        const Point2 e = v - u;
        return cross(e, x - u) / norm(e);
    };

    if (std::abs(dp) <= eps && std::abs(dq) <= eps) {
        const Point2 p2 = frame.to_2d(p);
        const Point2 q2 = frame.to_2d(q);
        double lo = 0.0;
        double hi = 1.0;
        for (int i = 0; i < 3; ++i) {
            const double f0 = edge_distance(i, p2) + eps;
            const double f1 = edge_distance(i, q2) + eps;
            if (f0 < 0.0 && f1 < 0.0)
                return std::nullopt;
            if (f0 < 0.0)
                lo = std::max(lo, f0 / (f0 - f1));
            else if (f1 < 0.0)
                hi = std::min(hi, f0 / (f0 - f1));
        }
        if (lo > hi)
            return std::nullopt;
        return ParamInterval{lo, hi};
    }
    if ((dp > eps && dq > eps) || (dp < -eps && dq < -eps))
        return std::nullopt;
    const double s = std::clamp(dp / (dp - dq), 0.0, 1.0);
    const Point2 x = frame.to_2d(p + s * (q - p));
    for (int i = 0; i < 3; ++i)
        if (edge_distance(i, x) < -eps)
            return std::nullopt;
    return ParamInterval{s, s};
}

} // namespace detail

/// True iff the closed triangles meet in a set larger than their declared shared simplex.
/// Coplanar pairs are resolved in the common plane. Works by clipping every edge of each
/// triangle against the other: any intersection point of two triangles lies on an edge of
/// one of them.
inline bool triangles_intersect(const Triangle3& t1, const Triangle3& t2, const SharedSimplex& shared,
                                const Tolerances& tol = {})
{
    const double diag = bbox_diagonal({t1.a, t1.b, t1.c, t2.a, t2.b, t2.c});
    const double eps = tol.deg * diag;
    const double beyond = tol.plane * diag;

    auto distance_to_shared = [&](const Point3& x) {
        switch (shared.kind) {
        case SharedSimplex::Kind::None: return std::numeric_limits<double>::infinity();
        case SharedSimplex::Kind::Vertex: return distance(x, detail::corner(t1, shared.corners[0]));
        case SharedSimplex::Kind::Edge:
            return detail::point_segment_distance(x, detail::corner(t1, shared.corners[0]),
                                                  detail::corner(t1, shared.corners[1]));
        }
        return std::numeric_limits<double>::infinity();
    };

    auto edges_hit = [&](const Triangle3& from, const Triangle3& against) {
        for (int i = 0; i < 3; ++i) {
            const Point3& p = detail::corner(from, i);
            const Point3& q = detail::corner(from, (i + 1) % 3);
            const auto range = detail::clip_segment_to_triangle(p, q, against, eps);
            if (!range)
                continue;
            if (distance_to_shared(p + range->lo * (q - p)) > beyond ||
                distance_to_shared(p + range->hi * (q - p)) > beyond)
                return true;
        }
        return false;
    };

    return edges_hit(t1, t2) || edges_hit(t2, t1);
}

/// Separating-axis test: true iff the open interiors of two planar triangles overlap by
/// more than `eps` along every edge normal.
inline bool interiors_overlap_2d(const std::array<Point2, 3>& t1, const std::array<Point2, 3>& t2, double eps)
{
    auto separated_along = [&](const Point2& axis) {
        const double len = norm(axis);
        if (len == 0.0)
            return false;
        double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1;
        double lo2 = lo1, hi2 = -lo1;
        for (const Point2& p : t1) {
            lo1 = std::min(lo1, dot(axis, p));
            hi1 = std::max(hi1, dot(axis, p));
        }
        for (const Point2& p : t2) {
            lo2 = std::min(lo2, dot(axis, p));
            hi2 = std::max(hi2, dot(axis, p));
        }
        return hi1 <= lo2 + eps * len || hi2 <= lo1 + eps * len;
    };
    for (const auto* tri : {&t1, &t2}) {
        for (int i = 0; i < 3; ++i) {
            const Point2 e = (*tri)[static_cast<std::size_t>((i + 1) % 3)] - (*tri)[static_cast<std::size_t>(i)];
            if (separated_along({-e.y, e.x}))
                return false;
        }
    }
    return true;
}

/// Axis-aligned box.
struct Box3
{
    Point3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
    Point3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};

    void expand(const Point3& p) noexcept
    {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    void expand(const Box3& b) noexcept
    {
        expand(b.lo);
        expand(b.hi);
    }
    void inflate(double r) noexcept
    {
        lo -= Point3{r, r, r};
        hi += Point3{r, r, r};
    }
    bool overlaps(const Box3& o) const noexcept
    {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y && lo.z <= o.hi.z &&
               o.lo.z <= hi.z;
    }
    Point3 center() const noexcept { return 0.5 * (lo + hi); }
};

/// Static bounding-volume hierarchy over boxes (median split on the longest axis).
class AabbTree
{
public:
    explicit AabbTree(std::vector<Box3> boxes)
        : boxes_(std::move(boxes))
        , order_(boxes_.size())
    {
        std::iota(order_.begin(), order_.end(), 0u);
        if (!boxes_.empty())
            build(0, order_.size());
    }

    /// Calls f(index) for every stored box overlapping `query`.
    template <class F>
    void for_each_overlap(const Box3& query, F&& f) const
    {
        if (nodes_.empty())
            return;
        std::vector<std::uint32_t> stack{0};
        while (!stack.empty()) {
            const Node& node = nodes_[stack.back()];
            stack.pop_back();
            if (!node.box.overlaps(query))
                continue;
            if (node.left == kLeaf) {
                for (std::size_t i = node.begin; i < node.end; ++i)
                    if (boxes_[order_[i]].overlaps(query))
                        f(order_[i]);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }

private:
    static constexpr std::uint32_t kLeaf = std::numeric_limits<std::uint32_t>::max();
    static constexpr std::size_t kLeafSize = 4;

    struct Node
    {
        Box3 box;
        std::size_t begin = 0;
        std::size_t end = 0;
        std::uint32_t left = kLeaf;
        std::uint32_t right = kLeaf;
    };

    std::uint32_t build(std::size_t begin, std::size_t end)
    {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({});
        Box3 box;
        for (std::size_t i = begin; i < end; ++i)
            box.expand(boxes_[order_[i]]);
        nodes_[id].box = box;
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        if (end - begin <= kLeafSize)
            return id;

        const Vec3 ext = box.hi - box.lo;
        int axis = 0;
        if (ext.y > ext.x && ext.y >= ext.z)
            axis = 1;
        else if (ext.z > ext.x && ext.z > ext.y)
            axis = 2;
        auto key = [&](std::uint32_t i) {
            const Point3 c = boxes_[i].center();
            return axis == 0 ? c.x : (axis == 1 ? c.y : c.z);
        };
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::uint32_t l, std::uint32_t r) { return key(l) < key(r); });
        const std::uint32_t left = build(begin, mid);
        const std::uint32_t right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    std::vector<Box3> boxes_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

} // namespace flipmesh
