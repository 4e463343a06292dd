#pragma once

#include <array>
#include <cmath>

#include "curv/errors.hpp"

namespace curv {

enum class Chart { Klein, PoincareDisk, HalfPlane };

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squaredNorm() const { return x * x + y * y; }
    Vec2 normalized() const;
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Gaussian curvature of the space form. The Poincare chart exists only for
/// kappa in (-4/3, 4/3), so values outside that interval are rejected.
struct Curvature {
    explicit Curvature(double k);
    double kappa;

    /// Radius parameter of the Poincare chart: ell = kappa / (4 - 3|kappa|).
    double ell() const { return kappa / (4.0 - 3.0 * std::abs(kappa)); }
    bool negative() const { return kappa < 0.0; }
    bool positive() const { return kappa > 0.0; }
    bool flat() const { return kappa == 0.0; }
};

struct ChartPoint {
    Chart chart = Chart::Klein;
    double x = 0.0;
    double y = 0.0;

    ChartPoint() = default;
    ChartPoint(Chart c, double x_, double y_) : chart(c), x(x_), y(y_) {}
    ChartPoint(Chart c, const Vec2& v) : chart(c), x(v.x), y(v.y) {}
    Vec2 xy() const { return {x, y}; }
};

/// Symmetric positive-definite 2x2 metric at a chart point.
struct MetricTensor {
    double g11 = 1.0, g12 = 0.0, g22 = 1.0;
    double det() const { return g11 * g22 - g12 * g12; }
    double inner(const Vec2& u, const Vec2& v) const {
        return g11 * u.x * v.x + g12 * (u.x * v.y + u.y * v.x) + g22 * u.y * v.y;
    }
    double norm(const Vec2& u) const { return std::sqrt(inner(u, u)); }
};

enum class EdgeBC { Neumann, Dirichlet };
enum class TriangleClass { Acute, Right, Obtuse };

struct TriangleMetrics {
    double alpha, beta, gamma; // interior angles at vertices 0, 1, 2
    double a, b, c;            // side lengths opposite vertices 0, 1, 2
};

/// Geodesic triangle in a single chart of M_kappa. Edge i is opposite vertex i.
struct GeodesicTriangle {
    Curvature kappa;
    std::array<ChartPoint, 3> vertices;
    std::array<EdgeBC, 3> edge_bc;

    GeodesicTriangle(Curvature k, std::array<ChartPoint, 3> v,
                     std::array<EdgeBC, 3> bc = {EdgeBC::Neumann, EdgeBC::Neumann, EdgeBC::Neumann});
};

// --- chart domain / metric ------------------------------------------------

/// Throws DomainError if p does not lie in the chart's valid domain for kappa.
void validate_point(Curvature kappa, const ChartPoint& p);
bool point_in_domain(Curvature kappa, const ChartPoint& p);

/// Conformal factor rho of the Poincare chart: g = rho * (Euclidean metric).
double conformal_factor(Curvature kappa, const ChartPoint& p);

/// Klein-chart metric tensor in Cartesian chart components.
MetricTensor klein_metric(Curvature kappa, const ChartPoint& p);

/// Metric tensor in the point's own chart.
MetricTensor metric_tensor(Curvature kappa, const ChartPoint& p);

// --- conversions ----------------------------------------------------------

ChartPoint chart_convert(const ChartPoint& p, Chart target, Curvature kappa);

/// Pushforward of a tangent vector at p under the chart conversion map.
Vec2 chart_convert_vector(const ChartPoint& p, const Vec2& v, Chart target, Curvature kappa);

// --- geodesic quantities ---------------------------------------------------

double geodesic_distance(Curvature kappa, const ChartPoint& p, const ChartPoint& q);

/// Point on the geodesic through p and q: the Klein-chart affine interpolation
/// (exact geodesic point; the parameter is not arc length).
ChartPoint geodesic_lerp(Curvature kappa, const ChartPoint& p, const ChartPoint& q, double t);

/// Point at metric arc length s along the geodesic from p toward q.
ChartPoint geodesic_point_at_arclength(Curvature kappa, const ChartPoint& p, const ChartPoint& q,
                                       double s);

/// Euclidean projection, in the Klein chart, of p onto the line through a and b;
/// result lies exactly on the geodesic and is returned in p's chart.
ChartPoint project_to_geodesic(Curvature kappa, const ChartPoint& a, const ChartPoint& b,
                               const ChartPoint& p);

/// Unit (metric) tangent of the geodesic a->b at a point p on it, in p's chart.
Vec2 geodesic_tangent(Curvature kappa, const ChartPoint& a, const ChartPoint& b,
                      const ChartPoint& p);

TriangleMetrics triangle_angles_and_sides(const GeodesicTriangle& t);

double triangle_area(const GeodesicTriangle& t);

ChartPoint reflect_across_geodesic(Curvature kappa, const ChartPoint& a, const ChartPoint& b,
                                   const ChartPoint& p);

TriangleClass classify_triangle(const GeodesicTriangle& t);

inline constexpr double kRightAngleTol = 1e-9;

// --- construction helpers ---------------------------------------------------

/// Triangle from two side lengths and the included angle, built in the Klein
/// chart with vertex 0 at the origin and side c along the positive x-axis.
/// Spherical triangles are recentred on their vertex centroid so the closure
/// stays inside the open hemisphere.
GeodesicTriangle make_triangle_sas(Curvature kappa, double side_c, double side_b, double alpha,
                                   std::array<EdgeBC, 3> bc = {EdgeBC::Neumann, EdgeBC::Neumann,
                                                               EdgeBC::Neumann});

/// Triangle from its three interior angles (determines the triangle up to
/// isometry for kappa != 0). alpha at vertex 0, beta at 1, gamma at 2.
GeodesicTriangle make_triangle_from_angles(Curvature kappa, double alpha, double beta, double gamma,
                                           std::array<EdgeBC, 3> bc = {EdgeBC::Neumann,
                                                                       EdgeBC::Neumann,
                                                                       EdgeBC::Neumann});

// --- isometries -------------------------------------------------------------

/// Orientation-preserving isometry of M_kappa acting on chart points.
/// Built as `to_origin(kappa, p, q)`: maps p to the chart origin and the
/// direction (at p) toward q to the positive x-axis. For kappa = -1 the
/// half-plane chart is handled through the Poincare disk.
class ChartIsometry {
public:
    static ChartIsometry to_origin(Curvature kappa, const ChartPoint& p, const ChartPoint& q);

    ChartPoint apply(const ChartPoint& p) const;
    Vec2 apply_vector(const ChartPoint& p, const Vec2& v) const;
    ChartIsometry inverse() const;

private:
    ChartIsometry() = default;
    double kappa_ = 0.0;
    // kappa != 0: 3x3 model matrix (row major); kappa == 0: rotation + shift.
    std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
    double c_ = 1.0, s_ = 0.0; // flat rotation
    Vec2 t_{};                 // flat translation (applied after rotation)
};

} // namespace curv
