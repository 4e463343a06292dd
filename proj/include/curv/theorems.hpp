#pragma once

#include <string>
#include <vector>

#include "curv/analysis.hpp"
#include "curv/killing.hpp"

namespace curv {

enum class ClaimStatus { Pass, Fail, Inconclusive };

struct ClaimResult {
    std::string id;
    ClaimStatus status = ClaimStatus::Inconclusive;
    double margin = 0.0; // claim-specific margin, from the finest level
    double h = 0.0;      // finest mesh size the claim was decided at
    double tol = 0.0;
    Vec2 where{};        // witness location, when the claim has one
    std::string detail;
};

/// One triangle run through a verification suite. `asserted` is false when
/// the theorem's hypotheses do not hold for the triangle: the claims are
/// still computed and reported, but failures carry no weight (probe mode).
struct VerificationCase {
    GeodesicTriangle triangle;
    bool asserted = false;
    std::vector<ClaimResult> claims;

    const ClaimResult* claim(const std::string& id) const;
    bool all_passed() const;
    bool any_failed() const;
    bool any_inconclusive() const;
};

/// Second Neumann eigenfunction structure on a single triangle: no critical
/// points, extrema at the acute vertices, a certifying loxodromic field with
/// the longest-edge axis tried first, a simple nodal arc between two distinct
/// edge closures, and a simple (gapped) eigenvalue. Asserted for kappa < 0
/// and a right or obtuse angle; every claim is decided at two mesh levels.
VerificationCase verify_hotspots_neumann(const GeodesicTriangle& t, int divisions = 8);

/// Mixed problems with exactly one or exactly two Dirichlet edges. Single-D:
/// no critical points, global max at the opposite (Neumann) vertex, Killing
/// certification with the axis through that vertex perpendicular to the
/// Dirichlet edge tried first. Double-D: exactly one critical point, on the
/// Neumann edge, Killing axis through the Dirichlet vertex perpendicular to
/// the Neumann edge.
VerificationCase verify_mixed(const GeodesicTriangle& t, int divisions = 8);

/// Finiteness of the critical set: no CONTINUUM cluster for kappa != 0,
/// except the spherical isosceles triangle with two right angles, where the
/// CONTINUUM must sit on the base edge and u2 must be constant along
/// sampled equidistant curves.
VerificationCase verify_finiteness(const GeodesicTriangle& t, int divisions = 8);

/// One row of the spherical mixed-inequality probe: for a triangle and one
/// choice of Neumann edge (Dirichlet on the other two), the Richardson-
/// extrapolated margin lambda1 - mu2 with its two-level error bar.
struct SphereProbeRow {
    int triangle_index = 0;
    int edge = 0;
    double mu2 = 0.0;
    double lambda1 = 0.0;
    double margin = 0.0;
    double error_bar = 0.0;
    bool conclusive = false;
};

/// Conjecture probe, never an assertion: margins for every (triangle, edge)
/// pair in the family. Rows whose error bar crosses zero are inconclusive.
std::vector<SphereProbeRow> probe_sphere_mixed_inequality(
    const std::vector<GeodesicTriangle>& family, int divisions = 8);

// Deterministic low-discrepancy triangle families over angle simplices.
// The seed offsets the Halton index so reports can pin down the sample.
std::vector<GeodesicTriangle> nonacute_hyperbolic_family(int n = 20, int seed = 1);
std::vector<GeodesicTriangle> mixed_hyperbolic_family(int n = 10, int seed = 1);
std::vector<GeodesicTriangle> spherical_family(int n = 6, int seed = 1);

} // namespace curv
