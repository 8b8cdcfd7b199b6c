#pragma once

#include "flipmesh/error.hpp"
#include "flipmesh/lobachevsky.hpp"
#include "flipmesh/point.hpp"
#include "flipmesh/tolerances.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>

namespace flipmesh {

struct Triangle3
{
    Point3 a;
    Point3 b;
    Point3 c;
};

/// Oriented plane { x : dot(unit_normal, x) + offset = 0 }; `offset` is the signed
/// distance of the origin.
struct Plane3
{
    Vec3 unit_normal{0.0, 0.0, 1.0};
    double offset = 0.0;

    double signed_distance(const Point3& p) const noexcept { return dot(unit_normal, p) + offset; }
};

/// Two triangles ABD and BCD sharing the diagonal BD. A and C are the opposite vertices.
struct EdgeQuad
{
    Point3 a;
    Point3 b;
    Point3 c;
    Point3 d;

    /// The same four points seen across the other diagonal AC (triangles ABC and ACD).
    EdgeQuad flipped() const noexcept { return {b, c, d, a}; }
};

enum class DelaunayKind
{
    Strict,
    NonStrict,
    Violated
};

constexpr std::string_view to_string(DelaunayKind k) noexcept
{
    switch (k) {
    case DelaunayKind::Strict: return "Strict";
    case DelaunayKind::NonStrict: return "NonStrict";
    case DelaunayKind::Violated: return "Violated";
    }
    return "?";
}

struct DelaunayStatus
{
    DelaunayKind kind = DelaunayKind::Strict;
    double measured_sum = 0.0; ///< sum of the two opposite angles, radians
};

/// Orthonormal frame of a plane; maps points to in-plane coordinates.
struct PlaneFrame
{
    Point3 origin;
    Vec3 e1{1.0, 0.0, 0.0};
    Vec3 e2{0.0, 1.0, 0.0};
    Vec3 normal{0.0, 0.0, 1.0};

    Point2 to_2d(const Point3& p) const noexcept
    {
        const Vec3 d = p - origin;
        return {dot(d, e1), dot(d, e2)};
    }
    Point3 to_3d(const Point2& q) const noexcept { return origin + q.x * e1 + q.y * e2; }
};

/// Right-handed frame with the given normal; e1 is built from the coordinate axis
/// least aligned with the normal.
inline PlaneFrame make_frame(const Vec3& unit_normal, const Point3& origin = {})
{
    const Vec3 n = unit_normal;
    const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
    Vec3 helper{1.0, 0.0, 0.0};
    if (ay <= ax && ay <= az)
        helper = {0.0, 1.0, 0.0};
    else if (az <= ax && az <= ay)
        helper = {0.0, 0.0, 1.0};
    const Vec3 e1 = normalized(cross(helper, n));
    const Vec3 e2 = cross(n, e1);
    return {origin, e1, e2, n};
}

inline PlaneFrame make_frame(const Plane3& plane)
{
    return make_frame(plane.unit_normal, -plane.offset * plane.unit_normal);
}

/// Unsigned angle at `apex` between the rays towards p and q, in [0, pi].
inline double angle_at(const Point3& apex, const Point3& p, const Point3& q, const Tolerances& tol = {})
{
    const Vec3 u = p - apex;
    const Vec3 v = q - apex;
    const double lu = norm(u);
    const double lv = norm(v);
    const double longest = std::max(lu, lv);
    if (lu <= tol.deg * longest || lv <= tol.deg * longest)
        throw DegenerateInput("angle_at: leg shorter than degeneracy tolerance");
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

namespace detail {

// Interior angle at p0 of (p0, p1, p2); 0 for a collapsed leg instead of throwing.
inline double interior_angle(const Point3& p0, const Point3& p1, const Point3& p2) noexcept
{
    const Vec3 u = p1 - p0;
    const Vec3 v = p2 - p0;
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

} // namespace detail

inline DelaunayKind classify_angle_sum(double sum, const Tolerances& tol = {}) noexcept
{
    using std::numbers::pi;
    if (sum > pi + tol.angle)
        return DelaunayKind::Violated;
    if (sum < pi - tol.angle)
        return DelaunayKind::Strict;
    return DelaunayKind::NonStrict;
}

/// Delaunay status of the diagonal BD: compares angle BAD + angle BCD against pi.
inline DelaunayStatus classify_edge(const EdgeQuad& q, const Tolerances& tol = {})
{
    const double sum = angle_at(q.a, q.b, q.d, tol) + angle_at(q.c, q.b, q.d, tol);
    return {classify_angle_sum(sum, tol), sum};
}

inline double triangle_area(const Triangle3& t) noexcept
{
    return 0.5 * norm(cross(t.b - t.a, t.c - t.a));
}

inline double triangle_area(const Point3& a, const Point3& b, const Point3& c) noexcept
{
    return triangle_area(Triangle3{a, b, c});
}

inline double longest_edge(const Triangle3& t) noexcept
{
    return std::max({distance(t.a, t.b), distance(t.b, t.c), distance(t.c, t.a)});
}

inline bool is_degenerate(const Triangle3& t, const Tolerances& tol = {}) noexcept
{
    const double l = longest_edge(t);
    return l == 0.0 || triangle_area(t) <= tol.deg * l * l;
}

inline std::array<double, 3> interior_angles(const Triangle3& t) noexcept
{
    return {detail::interior_angle(t.a, t.b, t.c),
            detail::interior_angle(t.b, t.c, t.a),
            detail::interior_angle(t.c, t.a, t.b)};
}

inline double min_angle(const Triangle3& t) noexcept
{
    const auto angles = interior_angles(t);
    return std::min({angles[0], angles[1], angles[2]});
}

namespace detail {

// Sum of L over the interior angles without the degeneracy gate (slivers give ~0).
inline double ideal_volume_unchecked(const Triangle3& t) noexcept
{
    const auto angles = interior_angles(t);
    return lobachevsky(angles[0]) + lobachevsky(angles[1]) + lobachevsky(angles[2]);
}

} // namespace detail

/// Volume of the ideal hyperbolic tetrahedron spanned by the triangle and the point at
/// infinity of the upper half-space, i.e. L(alpha) + L(beta) + L(gamma) over the interior
/// angles. Maximal (3 L(pi/3)) for the equilateral triangle.
inline double ideal_volume(const Triangle3& t, const Tolerances& tol = {})
{
    if (is_degenerate(t, tol))
        throw DegenerateInput("ideal_volume: degenerate triangle");
    return detail::ideal_volume_unchecked(t);
}

/// Scale-free coplanarity measure of four points: |det(b-a, c-a, d-a)| / diag^3.
inline double coplanarity_residual(const Point3& a, const Point3& b, const Point3& c, const Point3& d) noexcept
{
    const double diag = bbox_diagonal({a, b, c, d});
    if (diag == 0.0)
        return 0.0;
    const double det = dot(cross(b - a, c - a), d - a);
    return std::abs(det) / (diag * diag * diag);
}

inline double coplanarity_residual(const EdgeQuad& q) noexcept
{
    return coplanarity_residual(q.a, q.b, q.c, q.d);
}

struct AreaComparison
{
    double lhs = 0.0;   ///< |ABC| + |ACD|, the areas after switching to diagonal AC
    double rhs = 0.0;   ///< |ABD| + |BCD|, the current areas
    double scale = 0.0; ///< squared bbox diagonal of the quad
    bool holds = false; ///< lhs <= rhs + tau_area * scale
};

/// Compares the two decompositions of a quad whose diagonal BD is not strictly Delaunay.
/// Throws PreconditionViolated when BD is Strict.
inline AreaComparison area_pair_inequality(const EdgeQuad& q, const Tolerances& tol = {})
{
    const DelaunayStatus status = classify_edge(q, tol);
    if (status.kind == DelaunayKind::Strict)
        throw PreconditionViolated("area_pair_inequality: opposite angle sum below pi");
    AreaComparison out;
    out.lhs = triangle_area(q.a, q.b, q.c) + triangle_area(q.a, q.d, q.c);
    out.rhs = triangle_area(q.a, q.b, q.d) + triangle_area(q.b, q.c, q.d);
    const double diag = bbox_diagonal({q.a, q.b, q.c, q.d});
    out.scale = diag * diag;
    out.holds = out.lhs <= out.rhs + tol.area * out.scale;
    return out;
}

struct Circle3
{
    Point3 center;
    double radius = 0.0;
    Vec3 unit_normal;
};

/// Circumscribed circle of a triangle in R^3, lying in the triangle's plane.
inline Circle3 circumcircle(const Triangle3& t, const Tolerances& tol = {})
{
    if (is_degenerate(t, tol))
        throw DegenerateInput("circumcircle: degenerate triangle");
    const Vec3 u = t.b - t.a;
    const Vec3 v = t.c - t.a;
    const Vec3 w = cross(u, v);
    const double w2 = squared_norm(w);
    const Vec3 offset = (squared_norm(u) * cross(v, w) + squared_norm(v) * cross(w, u)) / (2.0 * w2);
    return {t.a + offset, norm(offset), w / std::sqrt(w2)};
}

enum class CircleSide
{
    Inside,
    OnCircle,
    Outside
};

constexpr std::string_view to_string(CircleSide s) noexcept
{
    switch (s) {
    case CircleSide::Inside: return "Inside";
    case CircleSide::OnCircle: return "OnCircle";
    case CircleSide::Outside: return "Outside";
    }
    return "?";
}

/// Standard incircle determinant; positive when d is inside the circle through the
/// counter-clockwise triangle (a, b, c).
inline double incircle_determinant(const Point2& a, const Point2& b, const Point2& c, const Point2& d) noexcept
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
}

/// Position of p relative to the circumscribed disk of t. p must lie in t's plane.
/// The OnCircle band is tau_angle * diag^4 on the incircle determinant.
inline CircleSide in_circumdisk(const Triangle3& t, const Point3& p, const Tolerances& tol = {})
{
    if (is_degenerate(t, tol))
        throw DegenerateInput("in_circumdisk: degenerate triangle");
    const double diag = bbox_diagonal({t.a, t.b, t.c, p});
    const Vec3 n = normalized(cross(t.b - t.a, t.c - t.a));
    if (std::abs(dot(n, p - t.a)) > tol.plane * diag)
        throw NotCoplanar("in_circumdisk: point off the triangle plane");
    const PlaneFrame frame = make_frame(n, t.a);
    const double det = incircle_determinant(frame.to_2d(t.a), frame.to_2d(t.b), frame.to_2d(t.c), frame.to_2d(p));
    const double band = tol.angle * diag * diag * diag * diag;
    if (det > band)
        return CircleSide::Inside;
    if (det < -band)
        return CircleSide::Outside;
    return CircleSide::OnCircle;
}

/// Angle between two planes, in [0, pi/2].
inline double plane_angle(const Plane3& p1, const Plane3& p2) noexcept
{
    return std::atan2(norm(cross(p1.unit_normal, p2.unit_normal)), std::abs(dot(p1.unit_normal, p2.unit_normal)));
}

/// Angle between a unit normal and a plane's normal line, in [0, pi/2].
inline double normal_angle(const Vec3& n1, const Vec3& n2) noexcept
{
    return std::atan2(norm(cross(n1, n2)), std::abs(dot(n1, n2)));
}

namespace detail {

// Flip the normal so its first clearly non-zero coordinate is positive.
inline Vec3 canonical_normal(Vec3 n) noexcept
{
    const double eps = 1e-12;
    const double lead = std::abs(n.x) > eps ? n.x : (std::abs(n.y) > eps ? n.y : n.z);
    return lead < 0.0 ? -n : n;
}

} // namespace detail

/// Plane spanned by three points (normal orientation canonicalized).
inline Plane3 plane_through(const Point3& a, const Point3& b, const Point3& c, const Tolerances& tol = {})
{
    if (is_degenerate(Triangle3{a, b, c}, tol))
        throw DegenerateInput("plane_through: collinear points");
    const Vec3 n = detail::canonical_normal(normalized(cross(b - a, c - a)));
    return {n, -dot(n, a)};
}

/// Least-squares plane: smallest principal direction of the centered covariance.
inline Plane3 fit_plane(std::span<const Point3> points, const Tolerances& tol = {})
{
    if (points.size() < 3)
        throw DegenerateInput("fit_plane: fewer than 3 points");
    Point3 centroid;
    for (const Point3& p : points)
        centroid += p;
    centroid = centroid / static_cast<double>(points.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Point3& p : points) {
        const Eigen::Vector3d d(p.x - centroid.x, p.y - centroid.y, p.z - centroid.z);
        cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Eigen::Vector3d evals = solver.eigenvalues(); // ascending
    const double diag = bbox_diagonal(points);
    const double collinear_bound = (tol.deg * diag) * (tol.deg * diag) * static_cast<double>(points.size());
    if (diag == 0.0 || evals(1) <= collinear_bound)
        throw DegenerateInput("fit_plane: points are collinear");
    const Eigen::Vector3d v = solver.eigenvectors().col(0);
    const Vec3 n = detail::canonical_normal(normalized(Vec3{v(0), v(1), v(2)}));
    return {n, -dot(n, centroid)};
}

} // namespace flipmesh
