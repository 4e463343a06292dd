#include "curv/mesh.hpp"

#include <cmath>

#include "doctest.h"

using namespace curv;

namespace {

double max_element_diameter(const TriangleMesh& m) {
    double d = 0.0;
    for (const auto& e : m.elements)
        for (int i = 0; i < 3; ++i)
            d = std::max(d, (m.nodes[e[i]] - m.nodes[e[(i + 1) % 3]]).norm());
    return d;
}

// max distance of boundary nodes to their parent geodesic (Klein-chart line)
double boundary_geodesic_gap(const TriangleMesh& m) {
    double gap = 0.0;
    for (const auto& be : m.boundary_edges) {
        const int tag = be[2];
        const ChartPoint a = chart_convert(m.corners[(tag + 1) % 3], Chart::Klein, m.kappa);
        const ChartPoint b = chart_convert(m.corners[(tag + 2) % 3], Chart::Klein, m.kappa);
        const Vec2 dir = (b.xy() - a.xy()).normalized();
        for (int idx : {be[0], be[1]}) {
            const Vec2 p = chart_convert({Chart::PoincareDisk, m.nodes[idx]}, Chart::Klein, m.kappa).xy();
            gap = std::max(gap, std::abs(dir.cross(p - a.xy())));
        }
    }
    return gap;
}

} // namespace

TEST_CASE("flat uniform mesh") {
    const GeodesicTriangle t(Curvature(0.0),
                             {ChartPoint{Chart::Klein, 0, 0}, ChartPoint{Chart::Klein, 1, 0},
                              ChartPoint{Chart::Klein, 0, 1}});
    const TriangleMesh m = generate_mesh(t, 0.1, 1.0);
    CHECK(mesh_is_conforming(m));
    CHECK(max_element_diameter(m) <= 0.1 * 1.02);
    CHECK(min_element_quality(m) >= 0.15);
    CHECK(mesh_metric_area(m) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(boundary_geodesic_gap(m) < 1e-12);
    // vertex nodes land on the corners
    for (int v = 0; v < 3; ++v)
        CHECK((m.nodes[m.vertex_nodes[v]] - m.corners[v].xy()).norm() < 1e-12);
}

TEST_CASE("element count scales like 1/h^2") {
    const GeodesicTriangle t = make_triangle_from_angles(Curvature(-1.0), 0.4 * M_PI, 0.3 * M_PI, 0.2 * M_PI);
    const auto c1 = generate_mesh(t, 0.08).elements.size();
    const auto c2 = generate_mesh(t, 0.04).elements.size();
    const double ratio = (double)c2 / (double)c1;
    CHECK(ratio > 4.0 * 0.85);
    CHECK(ratio < 4.0 * 1.15);
}

TEST_CASE("metric area converges at second order") {
    for (double kv : {-1.0, 0.9}) {
        const Curvature k(kv);
        const GeodesicTriangle t = make_triangle_from_angles(
            k, 0.45 * M_PI, 0.3 * M_PI, kv < 0 ? 0.15 * M_PI : 0.45 * M_PI);
        const double exact = triangle_area(t);
        const double e1 = std::abs(mesh_metric_area(generate_mesh(t, 0.1)) - exact);
        const double e2 = std::abs(mesh_metric_area(generate_mesh(t, 0.05)) - exact);
        CHECK(e1 / e2 >= 3.0);
    }
}

TEST_CASE("refinement") {
    const GeodesicTriangle t = make_triangle_from_angles(Curvature(-1.0), 0.5 * M_PI, 0.25 * M_PI, 0.2 * M_PI);
    const TriangleMetrics tmr = triangle_angles_and_sides(t);
    const TriangleMesh m0 = generate_mesh(t, std::min({tmr.a, tmr.b, tmr.c}) / 5.0, 2.0);
    const TriangleMesh m1 = refine(m0);
    const TriangleMesh m2 = refine(m1);
    CHECK(m1.elements.size() == 4 * m0.elements.size());
    CHECK(m2.elements.size() == 16 * m0.elements.size());
    CHECK(mesh_is_conforming(m1));
    CHECK(mesh_is_conforming(m2));
    CHECK(boundary_geodesic_gap(m1) < 1e-12);
    CHECK(boundary_geodesic_gap(m2) < 1e-12);

    const double exact = triangle_area(t);
    const double e0 = std::abs(mesh_metric_area(m0) - exact);
    const double e1 = std::abs(mesh_metric_area(m1) - exact);
    const double e2 = std::abs(mesh_metric_area(m2) - exact);
    CHECK(e0 / e1 >= 3.0);
    CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("quality across triangle shapes and gradings") {
    // a corner element's smallest angle cannot exceed the corner angle itself,
    // so the attainable quality is capped near sin(theta_min)/2; the flat 0.15
    // floor applies only when the corners allow it
    struct Case {
        double kappa, a, b, c, grading;
    };
    const Case cases[] = {
        {-1.0, 0.5 * M_PI, 0.25 * M_PI, 0.15 * M_PI, 2.0},
        {-1.0, 0.75 * M_PI, 0.1 * M_PI, 0.1 * M_PI, 2.0},
        {-1.0, 0.9 * M_PI, 0.04 * M_PI, 0.04 * M_PI, 2.0},
        {-0.3, 0.6 * M_PI, 0.2 * M_PI, 0.1 * M_PI, 2.0},
        {0.8, 0.5 * M_PI, 0.5 * M_PI, 0.25 * M_PI, 2.0},
        {0.8, 0.98 * M_PI, 0.3 * M_PI, 0.3 * M_PI, 2.0},
    };
    for (const Case& c : cases) {
        CAPTURE(c.kappa);
        CAPTURE(c.a);
        const GeodesicTriangle t = make_triangle_from_angles(
            Curvature(c.kappa), c.a, c.b, c.c,
            {EdgeBC::Dirichlet, EdgeBC::Neumann, EdgeBC::Neumann});
        const TriangleMetrics tm = triangle_angles_and_sides(t);
        const double h = std::min({tm.a, tm.b, tm.c}) / 8.0;
        const double theta_min = std::min({tm.alpha, tm.beta, tm.gamma});
        const double bound = std::min(0.15, 0.25 * std::sin(theta_min));

        const TriangleMesh mu = generate_mesh(t, h, 1.0);
        CHECK(mesh_is_conforming(mu));
        CHECK(min_element_quality(mu) >= bound);
        CHECK(boundary_geodesic_gap(mu) < 1e-12);

        // grading compresses elements toward the marked vertices; allow the
        // quality floor to shrink by at most the grading exponent
        const TriangleMesh mg = generate_mesh(t, h, c.grading);
        CHECK(mesh_is_conforming(mg));
        CHECK(min_element_quality(mg) >= bound / c.grading);
        CHECK(boundary_geodesic_gap(mg) < 1e-12);
    }
}

TEST_CASE("grading exponents and local size scaling") {
    // mixed BC: vertices adjacent to both a Dirichlet and a Neumann edge get graded
    const GeodesicTriangle t = make_triangle_from_angles(
        Curvature(-1.0), 0.6 * M_PI, 0.25 * M_PI, 0.1 * M_PI,
        {EdgeBC::Dirichlet, EdgeBC::Neumann, EdgeBC::Neumann});
    const auto g = grading_exponents(t, 2.0);
    CHECK(g[0] == 2.0); // obtuse
    CHECK(g[1] == 2.0); // edge 0 (D) and edge 2 (N) meet at vertex 1
    CHECK(g[2] == 2.0); // edge 0 (D) and edge 1 (N) meet at vertex 2

    const GeodesicTriangle tn = make_triangle_from_angles(Curvature(-1.0), 0.6 * M_PI, 0.25 * M_PI, 0.1 * M_PI);
    const auto gn = grading_exponents(tn, 2.0);
    CHECK(gn[0] == 2.0);
    CHECK(gn[1] == 1.0);
    CHECK(gn[2] == 1.0);

    // smallest element near the graded vertex shrinks under grading
    const TriangleMesh m1 = generate_mesh(tn, 0.05, 1.0);
    const TriangleMesh m2 = generate_mesh(tn, 0.05, 2.0);
    auto near_vertex_size = [](const TriangleMesh& m, int v) {
        const Vec2 p = m.nodes[m.vertex_nodes[v]];
        double best = 1e9;
        for (const auto& e : m.elements)
            for (int i = 0; i < 3; ++i)
                if (e[i] == m.vertex_nodes[v])
                    for (int j = 0; j < 3; ++j)
                        if (j != i) best = std::min(best, (m.nodes[e[j]] - p).norm());
        return best;
    };
    CHECK(near_vertex_size(m2, 0) < 0.5 * near_vertex_size(m1, 0));
}

TEST_CASE("determinism") {
    const GeodesicTriangle t = make_triangle_from_angles(Curvature(-0.8), 0.55 * M_PI, 0.2 * M_PI, 0.15 * M_PI);
    const TriangleMesh a = generate_mesh(t, 0.07, 2.0);
    const TriangleMesh b = generate_mesh(t, 0.07, 2.0);
    REQUIRE(a.nodes.size() == b.nodes.size());
    REQUIRE(a.elements == b.elements);
    for (size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].x == b.nodes[i].x);
        CHECK(a.nodes[i].y == b.nodes[i].y);
    }
}

TEST_CASE("mesh precondition errors") {
    const GeodesicTriangle t = make_triangle_from_angles(Curvature(-1.0), 0.4 * M_PI, 0.3 * M_PI, 0.2 * M_PI);
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    CHECK_THROWS_AS(generate_mesh(t, std::min({tm.a, tm.b, tm.c}), 1.0), DomainError);
    CHECK_THROWS_AS(generate_mesh(t, 0.05, 0.5), DomainError);
    CHECK_THROWS_AS(generate_mesh(t, -0.1, 1.0), DomainError);
}
