#pragma once

#include <array>
#include <cmath>

namespace ncfsi {

/// Plain 2D vector used for coordinates, velocities and displacements.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    /// z-component of the 3D cross product (a.x*b.y - a.y*b.x).
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
    constexpr double norm2() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {v.x * s, v.y * s}; }

/// Row-major 2x2 matrix, mostly for gradients and stress tensors.
struct Mat2 {
    // a b
    // c d
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    constexpr Mat2() = default;
    constexpr Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    /// Outer product col ⊗ row (u v^T).
    static constexpr Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }

    constexpr Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    constexpr Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    constexpr Mat2& operator+=(const Mat2& o) { a += o.a; b += o.b; c += o.c; d += o.d; return *this; }

    constexpr Mat2 matmul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    constexpr Mat2 transpose() const { return {a, c, b, d}; }
    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }
    constexpr Mat2 inverse() const {
        const double idet = 1.0 / det();
        return {d * idet, -b * idet, -c * idet, a * idet};
    }
    constexpr Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    /// Frobenius inner product A:B.
    constexpr double ddot(const Mat2& o) const { return a * o.a + b * o.b + c * o.c + d * o.d; }
    double max_abs() const {
        return std::max(std::max(std::fabs(a), std::fabs(b)), std::max(std::fabs(c), std::fabs(d)));
    }
};

constexpr Mat2 operator*(double s, const Mat2& m) { return m * s; }

/// Symmetric part doubled: A + A^T.
constexpr Mat2 sym2(const Mat2& m) { return m + m.transpose(); }

} // namespace ncfsi
