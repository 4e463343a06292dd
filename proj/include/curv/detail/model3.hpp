#pragma once

// Linear 3-space models of M_kappa: the unit sphere for kappa > 0 and the
// hyperboloid <X,X> = -1 (Minkowski signature +,+,-) for kappa < 0. Chart
// coordinates scale by sqrt(|kappa|) so both models are unit-size. Isometries
// act linearly here, which keeps reflections and Killing fields exact.

#include <array>
#include <cmath>

#include "curv/geometry.hpp"

namespace curv::detail {

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

/// Model bilinear form: Euclidean for kappa > 0, Minkowski (+,+,-) for kappa < 0.
inline double form(Curvature k, const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + (k.positive() ? 1.0 : -1.0) * a.z * b.z;
}

/// J-conjugate used to build Minkowski-orthogonal vectors; identity on the sphere.
inline Vec3 jconj(Curvature k, const Vec3& v) {
    return k.positive() ? v : Vec3{v.x, v.y, -v.z};
}

/// Klein chart point -> model point (kappa != 0).
inline Vec3 to_model(Curvature k, const Vec2& klein) {
    const double s = std::sqrt(std::abs(k.kappa));
    const double r2 = k.kappa * klein.squaredNorm();
    const double n = std::sqrt(1.0 + r2); // kappa<0: sqrt(1-|k|r^2)
    return {s * klein.x / n, s * klein.y / n, 1.0 / n};
}

/// Model point -> Klein chart point.
inline Vec2 from_model(Curvature k, const Vec3& p) {
    const double s = std::sqrt(std::abs(k.kappa));
    return {p.x / (s * p.z), p.y / (s * p.z)};
}

/// Pushforward of a Klein-chart tangent vector to the model.
inline Vec3 to_model_vector(Curvature k, const Vec2& klein, const Vec2& v) {
    const double s = std::sqrt(std::abs(k.kappa));
    const double n = std::sqrt(1.0 + k.kappa * klein.squaredNorm());
    const double dn = k.kappa * klein.dot(v) / n; // d(n) along v
    const Vec3 p{s * klein.x, s * klein.y, 1.0};
    const Vec3 dp{s * v.x, s * v.y, 0.0};
    return dp / n - p * (dn / (n * n));
}

/// Pushforward of a model tangent vector at P back to the Klein chart.
inline Vec2 from_model_vector(Curvature k, const Vec3& p, const Vec3& v) {
    const double s = std::sqrt(std::abs(k.kappa));
    return {(v.x * p.z - p.x * v.z) / (s * p.z * p.z), (v.y * p.z - p.y * v.z) / (s * p.z * p.z)};
}

/// Unit normal (w.r.t. the model form) of the geodesic plane through A and B.
inline Vec3 geodesic_normal(Curvature k, const Vec3& a, const Vec3& b) {
    Vec3 n = jconj(k, a.cross(b));
    const double nn = form(k, n, n);
    return n / std::sqrt(nn);
}

/// Reflection across the geodesic plane with unit normal n.
inline Vec3 reflect(Curvature k, const Vec3& n, const Vec3& p) {
    return p - n * (2.0 * form(k, p, n));
}

} // namespace curv::detail
