#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>

namespace flipmesh {

/// A point (or free vector) of R^3.
struct Point3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Point3& operator+=(const Point3& o) noexcept
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Point3& operator-=(const Point3& o) noexcept
    {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Point3& operator*=(double s) noexcept
    {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Point3 operator+(Point3 a, const Point3& b) noexcept { return a += b; }
    friend constexpr Point3 operator-(Point3 a, const Point3& b) noexcept { return a -= b; }
    friend constexpr Point3 operator*(Point3 a, double s) noexcept { return a *= s; }
    friend constexpr Point3 operator*(double s, Point3 a) noexcept { return a *= s; }
    friend constexpr Point3 operator/(Point3 a, double s) noexcept { return a *= (1.0 / s); }
    friend constexpr Point3 operator-(const Point3& a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

using Vec3 = Point3;

constexpr double dot(const Vec3& a, const Vec3& b) noexcept
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) noexcept
{
    return std::hypot(a.x, a.y, a.z);
}

constexpr double squared_norm(const Vec3& a) noexcept
{
    return dot(a, a);
}

inline double distance(const Point3& a, const Point3& b) noexcept
{
    return norm(a - b);
}

inline Vec3 normalized(const Vec3& a) noexcept
{
    return a / norm(a);
}

inline bool is_finite(const Point3& p) noexcept
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Diagonal of the axis-aligned bounding box of `pts`; 0 for an empty set.
inline double bbox_diagonal(std::span<const Point3> pts) noexcept
{
    if (pts.empty())
        return 0.0;
    Point3 lo = pts.front();
    Point3 hi = pts.front();
    for (const Point3& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return distance(lo, hi);
}

inline double bbox_diagonal(std::initializer_list<Point3> pts) noexcept
{
    return bbox_diagonal(std::span<const Point3>(pts.begin(), pts.size()));
}

/// A point of R^2, used by the planar pipeline.
struct Point2
{
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(const Point2& a, const Point2& b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(const Point2& a, const Point2& b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(const Point2& a, double s) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr Point2 operator*(double s, const Point2& a) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr Point2 operator/(const Point2& a, double s) noexcept { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr double dot(const Point2& a, const Point2& b) noexcept
{
    return a.x * b.x + a.y * b.y;
}

constexpr double cross(const Point2& a, const Point2& b) noexcept
{
    return a.x * b.y - a.y * b.x;
}

inline double norm(const Point2& a) noexcept
{
    return std::hypot(a.x, a.y);
}

inline double distance(const Point2& a, const Point2& b) noexcept
{
    return norm(a - b);
}

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
constexpr double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept
{
    return cross(b - a, c - a);
}

constexpr Point3 lift(const Point2& p, double z = 0.0) noexcept
{
    return {p.x, p.y, z};
}

} // namespace flipmesh
