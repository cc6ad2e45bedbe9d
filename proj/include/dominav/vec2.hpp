// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace dominav {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b is to the left of a.
constexpr double det(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

constexpr double norm_sq(const Vec2& v) { return dot(v, v); }

inline double norm(const Vec2& v) { return std::sqrt(norm_sq(v)); }

inline Vec2 normalized(const Vec2& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

// Counter-clockwise perpendicular.
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Squared distance from point p to segment [a, b].
inline double dist_sq_point_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    const double r = dot(p - a, b - a) / norm_sq(b - a);
    if (r < 0.0) return norm_sq(p - a);
    if (r > 1.0) return norm_sq(p - b);
    return norm_sq(p - (a + r * (b - a)));
}

// Signed distance of p from the line through a and b (positive on the left).
inline double left_of(const Vec2& a, const Vec2& b, const Vec2& p) {
    return det(a - p, b - a);
}

}  // namespace dominav
