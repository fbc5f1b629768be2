#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace chordmc {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    if (n <= 0.0 || !std::isfinite(n))
        throw std::invalid_argument("cannot normalize zero or non-finite vector");
    return v / n;
}

// Directed line p(t) = anchor + t*dir, |dir| = 1, t in R.
struct Line {
    Vec3 anchor;
    Vec3 dir;

    Line() = default;
    Line(const Vec3& a, const Vec3& d) : anchor(a), dir(d) {}

    Vec3 at(double t) const { return anchor + dir * t; }
    Line reversed() const { return {anchor, -dir}; }
};

struct BoundingSphere {
    Vec3 center;
    double radius = 0.0;
};

// Smallest sphere enclosing two spheres.
inline BoundingSphere enclosing_sphere(const BoundingSphere& a, const BoundingSphere& b) {
    Vec3 d = b.center - a.center;
    double dist = norm(d);
    if (dist + b.radius <= a.radius) return a;
    if (dist + a.radius <= b.radius) return b;
    double r = 0.5 * (dist + a.radius + b.radius);
    Vec3 c = a.center + d * ((r - a.radius) / dist);
    return {c, r};
}

// Column-major-free 3x3 rotation matrix, row vectors r0..r2.
struct Rotation {
    std::array<Vec3, 3> rows{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

    Vec3 apply(const Vec3& v) const {
        return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)};
    }
    // Inverse of an orthonormal rotation = transpose.
    Vec3 apply_inverse(const Vec3& v) const {
        return {rows[0].x * v.x + rows[1].x * v.y + rows[2].x * v.z,
                rows[0].y * v.x + rows[1].y * v.y + rows[2].y * v.z,
                rows[0].z * v.x + rows[1].z * v.y + rows[2].z * v.z};
    }

    static Rotation axis_angle(const Vec3& axis, double angle_rad) {
        Vec3 u = normalized(axis);
        double c = std::cos(angle_rad), s = std::sin(angle_rad), t = 1.0 - c;
        Rotation r;
        r.rows[0] = {c + u.x * u.x * t, u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s};
        r.rows[1] = {u.y * u.x * t + u.z * s, c + u.y * u.y * t, u.y * u.z * t - u.x * s};
        r.rows[2] = {u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s, c + u.z * u.z * t};
        return r;
    }
};

}  // namespace chordmc
