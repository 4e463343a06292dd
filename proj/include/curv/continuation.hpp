#pragma once

#include <string>
#include <vector>

#include "curv/analysis.hpp"

namespace curv {

struct BranchStep {
    double t = 0.0;
    double kappa = 0.0;
    std::vector<double> values;   // eigenvalues in branch-label order
    std::vector<double> overlaps; // per branch, mass inner product with previous step
    int crit_count = 0;           // critical points of the tracked branch
    std::vector<Vec2> crit_locations;
    double h = 0.0; // chart mesh size at this step, for location matching
};

struct CrossingEvent {
    double t = 0.0;
    int branch_a = 0;
    int branch_b = 0;
    std::string what; // "order_swap" or "overlap_dip"
};

struct BranchData {
    std::array<ChartPoint, 3> klein_vertices;
    std::array<EdgeBC, 3> edge_bc;
    double kappa_start = 0.0;
    double kappa_end = 0.0;
    int k = 0;
    int tracked = 0; // branch whose critical points are followed
    std::vector<BranchStep> steps;
    std::vector<CrossingEvent> events;
};

/// Curvature sweep over a fixed Klein-chart triangle: the node set is fixed
/// in Klein coordinates and re-mapped to the Poincare chart of each kappa(t),
/// so only the chart positions and the mass weight change along the path.
/// Branches are matched by eigenvector overlap; a step whose worst matched
/// overlap drops below 0.9 is bisected down to a minimum step of 1e-4 in t.
/// Throws StepFailure with the offending t when bisection bottoms out or the
/// triangle leaves the chart domain; if `partial` is given it holds every
/// step accepted before the failure.
BranchData sweep(const std::array<ChartPoint, 3>& klein_vertices,
                 const std::array<EdgeBC, 3>& edge_bc, double kappa_start, double kappa_end,
                 int steps, int k, int divisions = 8, BranchData* partial = nullptr);

struct PersistenceRow {
    double t = 0.0;
    int count = 0;
    std::vector<Vec2> locations;
    std::vector<int> matched_previous; // index into previous row, -1 if new
    bool event = false;                // count changed from the previous step
};

/// Per-step critical-point persistence for the tracked branch: locations are
/// matched to the previous step by nearest neighbor within 5h.
std::vector<PersistenceRow> track_critical_points(const BranchData& b);

} // namespace curv
