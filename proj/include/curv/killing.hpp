#pragma once

#include <array>
#include <functional>

#include "curv/geometry.hpp"

namespace curv {

/// Killing field of M_kappa: loxodromic (translation along a geodesic axis)
/// or elliptic (rotation about a center). Canonical scaling is unit speed on
/// the axis / unit angular velocity about the center; use normalized_at for
/// unit metric norm at a reference point. At kappa = 0 the loxodromic field
/// degenerates to the unit translation along the axis direction.
class KillingField {
public:
    enum class Kind { Loxodromic, Elliptic };

    static KillingField loxodromic(Curvature kappa, const ChartPoint& axis_a,
                                   const ChartPoint& axis_b, int orientation = +1);
    static KillingField elliptic(Curvature kappa, const ChartPoint& center, int orientation = +1);

    /// Field value at p, in p's chart components.
    Vec2 evaluate(const ChartPoint& p) const;

    /// Copy rescaled to unit metric norm at p. Throws ZeroVector if X(p) = 0.
    KillingField normalized_at(const ChartPoint& p) const;

    Kind kind() const { return kind_; }
    Curvature kappa() const { return kappa_; }
    int orientation() const { return orientation_; }

private:
    KillingField(Curvature k) : kappa_(k) {}
    Curvature kappa_;
    Kind kind_ = Kind::Loxodromic;
    int orientation_ = +1;
    double scale_ = 1.0;
    // kappa != 0: generator matrix acting on model points (row major).
    std::array<double, 9> gen_{};
    // kappa == 0: unit axis direction (loxodromic) or center (elliptic), Klein coords.
    Vec2 flat_dir_{};
    Vec2 flat_center_{};
};

/// Metric angle in [0, pi] between X and the geodesic a->b at a point p that
/// lies on the geodesic (within 1e-9); throws PointNotOnGeodesic otherwise.
double angle_with_geodesic(const KillingField& X, const ChartPoint& a, const ChartPoint& b,
                           const ChartPoint& p);

/// Finite-difference Frobenius norm of the Lie derivative (L_X g) at p,
/// computed in p's chart with central differences of step h. O(h^2) for a
/// true Killing field.
double killing_residual(const KillingField& X, const ChartPoint& p, double h);

/// Same residual for an arbitrary chart vector field (negative controls).
double killing_residual(Curvature kappa, const std::function<Vec2(const ChartPoint&)>& X,
                        const ChartPoint& p, double h);

} // namespace curv
