#pragma once

#include <array>
#include <vector>

#include "curv/geometry.hpp"

namespace curv {

/// Straight-edge triangulation of a geodesic triangle, nodes in PoincareDisk
/// chart coordinates. Built internally in the Klein chart (where all three
/// edges are Euclidean segments), so boundary nodes lie exactly on the
/// geodesic edges after mapping.
struct TriangleMesh {
    Curvature kappa;
    std::vector<Vec2> nodes; // PoincareDisk chart coords
    std::vector<std::array<int, 3>> elements;
    // (node i, node j, parent edge tag); edge tag k = triangle edge opposite vertex k
    std::vector<std::array<int, 3>> boundary_edges;
    std::array<int, 3> vertex_nodes{};
    double h = 0.0;
    std::array<double, 3> grading{1.0, 1.0, 1.0};
    std::array<ChartPoint, 3> corners; // triangle vertices, PoincareDisk chart
    std::array<EdgeBC, 3> edge_bc{};
};

/// Per-vertex grading exponents: `g` at vertices with angle > pi/2 and at
/// vertices whose two adjacent edges carry different boundary conditions,
/// 1 elsewhere.
std::array<double, 3> grading_exponents(const GeodesicTriangle& t, double g);

/// Graded mesh of t with target chart size h. `grading` >= 1 is applied per
/// vertex according to grading_exponents.
TriangleMesh generate_mesh(const GeodesicTriangle& t, double h, double grading = 1.0);

/// Uniform quadrisection; boundary midpoints are placed on the exact geodesic
/// edges (Klein-chart midpoint of the parent nodes).
TriangleMesh refine(const TriangleMesh& m);

/// Every interior edge shared by exactly two elements, boundary edges by one
/// (and listed in boundary_edges); all elements positively oriented.
bool mesh_is_conforming(const TriangleMesh& m);

/// Minimum over elements of inradius / diameter (chart coordinates).
double min_element_quality(const TriangleMesh& m);

/// Total metric area by midpoint quadrature of the conformal area form.
double mesh_metric_area(const TriangleMesh& m);

} // namespace curv
