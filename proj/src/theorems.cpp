#include "curv/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "curv/fem.hpp"

namespace curv {

namespace {

double halton(int i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

TriangleMesh level_mesh(const GeodesicTriangle& t, int divisions, double grading) {
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const double h = std::min({tm.a, tm.b, tm.c}) / divisions;
    return generate_mesh(t, h, grading);
}

ClaimResult combine_levels(const ClaimResult& coarse, const ClaimResult& fine) {
    ClaimResult r = fine;
    if (coarse.status != fine.status) {
        r.status = ClaimStatus::Inconclusive;
        r.detail = "mesh levels disagree: [" + coarse.detail + "] vs [" + fine.detail + "]";
    }
    return r;
}

std::vector<ClaimResult> combine_all(const std::vector<ClaimResult>& coarse,
                                     const std::vector<ClaimResult>& fine) {
    std::vector<ClaimResult> out;
    for (size_t i = 0; i < fine.size(); ++i) out.push_back(combine_levels(coarse[i], fine[i]));
    return out;
}

std::vector<ClaimResult> inconclusive_all(const std::vector<std::string>& ids,
                                          const std::string& why) {
    std::vector<ClaimResult> out;
    for (const auto& id : ids) {
        ClaimResult c;
        c.id = id;
        c.status = ClaimStatus::Inconclusive;
        c.detail = why;
        out.push_back(c);
    }
    return out;
}

ClaimResult make_claim(const std::string& id, bool pass, double margin, const TriangleMesh& m,
                       double tol, const std::string& detail) {
    ClaimResult c;
    c.id = id;
    c.status = pass ? ClaimStatus::Pass : ClaimStatus::Fail;
    c.margin = margin;
    c.h = m.h;
    c.tol = tol;
    c.detail = detail;
    return c;
}

struct CertOutcome {
    bool ok = false;
    int sign = 0;
    double margin = -1.0; // normalized min of sign*Xu over interior nodes
    std::string which;
};

CertOutcome try_certify(const EigenPair& u, const TriangleMesh& m,
                        const std::vector<std::pair<KillingField, std::string>>& candidates) {
    CertOutcome best;
    for (const auto& [X, name] : candidates) {
        const DerivativeField d = killing_derivative(u, X, m);
        double amax = 0.0;
        for (double v : d.values) amax = std::max(amax, std::abs(v));
        if (amax == 0.0) continue;
        const MonotoneResult r = certify_monotone(d);
        const double margin =
            r.sign >= 0 ? d.min_interior / amax : -d.max_interior / amax;
        if (r.certified) return {true, r.sign, margin, name};
        if (margin > best.margin) best = {false, r.sign, margin, name};
    }
    return best;
}

std::vector<std::pair<KillingField, std::string>> edge_axis_candidates(
    const GeodesicTriangle& t) {
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const std::array<double, 3> len{tm.a, tm.b, tm.c};
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return len[a] > len[b]; });
    std::vector<std::pair<KillingField, std::string>> out;
    for (int e : order)
        for (int orient : {+1, -1})
            out.emplace_back(KillingField::loxodromic(t.kappa, t.vertices[(e + 1) % 3],
                                                      t.vertices[(e + 2) % 3], orient),
                             "edge" + std::to_string(e) + (orient > 0 ? "+" : "-"));
    return out;
}

std::set<int> endpoint_edge_closure(const NodalEndpoint& e) {
    if (e.vertex >= 0) return {(e.vertex + 1) % 3, (e.vertex + 2) % 3};
    if (e.edge >= 0) return {e.edge};
    return {};
}

bool endpoints_on_distinct_edges(const NodalSet& ns) {
    if (ns.endpoints.size() != 2) return false;
    for (int a : endpoint_edge_closure(ns.endpoints[0]))
        for (int b : endpoint_edge_closure(ns.endpoints[1]))
            if (a != b) return true;
    return false;
}

// point at metric distance d from the base geodesic a->b, above the base
// point at arc length s, on the side of the Klein-chart hint point
ChartPoint equidistant_point(Curvature k, const ChartPoint& a, const ChartPoint& b, double s,
                             double d, const Vec2& hint_klein) {
    const ChartPoint ak = chart_convert(a, Chart::Klein, k);
    const ChartPoint bk = chart_convert(b, Chart::Klein, k);
    const ChartPoint p = chart_convert(geodesic_point_at_arclength(k, ak, bk, s), Chart::Klein, k);
    const Vec2 tau = geodesic_tangent(k, ak, bk, p);
    const MetricTensor G = klein_metric(k, p);
    Vec2 n = Vec2{G.g11 * tau.x + G.g12 * tau.y, G.g12 * tau.x + G.g22 * tau.y}.perp();
    if (n.dot(hint_klein - p.xy()) < 0.0) n = -1.0 * n;
    const ChartPoint q{Chart::Klein, p.xy() + n.normalized() * 1e-4};
    return geodesic_point_at_arclength(k, p, q, d);
}

} // namespace

const ClaimResult* VerificationCase::claim(const std::string& id) const {
    for (const auto& c : claims)
        if (c.id == id) return &c;
    return nullptr;
}

bool VerificationCase::all_passed() const {
    for (const auto& c : claims)
        if (c.status != ClaimStatus::Pass) return false;
    return true;
}

bool VerificationCase::any_failed() const {
    for (const auto& c : claims)
        if (c.status == ClaimStatus::Fail) return true;
    return false;
}

bool VerificationCase::any_inconclusive() const {
    for (const auto& c : claims)
        if (c.status == ClaimStatus::Inconclusive) return true;
    return false;
}

VerificationCase verify_hotspots_neumann(const GeodesicTriangle& t, int divisions) {
    VerificationCase vc{t, false, {}};
    const TriangleClass cls = classify_triangle(t);
    vc.asserted = t.kappa.negative() && cls != TriangleClass::Acute;

    const std::vector<std::string> ids{"no_critical_points", "extrema_at_acute_vertices",
                                       "killing_certified", "nodal_simple_arc", "eigen_gap"};

    auto level = [&](int div) -> std::vector<ClaimResult> {
        const TriangleMesh m = level_mesh(t, div, 1.0);
        const Spectrum sp = solve_smallest(assemble(m), 3);
        const EigenPair& u2 = sp.pairs[1];
        std::vector<ClaimResult> out;

        const CriticalReport rep = detect_critical_points(u2, m);
        out.push_back(make_claim(
            ids[0], rep.interior_points.empty() && rep.edge_points.empty(),
            -(double)(rep.interior_points.size() + rep.edge_points.size()), m, rep.tol,
            std::to_string(rep.interior_points.size()) + " interior, " +
                std::to_string(rep.edge_points.size()) + " edge"));

        const TriangleMetrics tm = triangle_angles_and_sides(t);
        const std::array<double, 3> ang{tm.alpha, tm.beta, tm.gamma};
        int imax = 0, imin = 0;
        for (int i = 1; i < (int)m.nodes.size(); ++i) {
            if (u2.vector[i] > u2.vector[imax]) imax = i;
            if (u2.vector[i] < u2.vector[imin]) imin = i;
        }
        auto at_acute_vertex = [&](int node) {
            for (int v = 0; v < 3; ++v)
                if (m.vertex_nodes[v] == node && ang[v] < M_PI / 2.0 - kRightAngleTol) return true;
            return false;
        };
        const bool extrema_ok =
            at_acute_vertex(imax) && at_acute_vertex(imin) && imax != imin;
        out.push_back(make_claim(ids[1], extrema_ok, 0.0, m, 0.0,
                                 "argmax node " + std::to_string(imax) + ", argmin node " +
                                     std::to_string(imin)));

        const CertOutcome cert = try_certify(u2, m, edge_axis_candidates(t));
        out.push_back(make_claim(ids[2], cert.ok, cert.margin, m, 1e-6, cert.which));

        const NodalSet ns = extract_nodal_set(u2, m);
        const bool arc_ok =
            ns.topology == NodalTopology::SimpleArc && endpoints_on_distinct_edges(ns);
        out.push_back(make_claim(ids[3], arc_ok, 0.0, m, 0.0,
                                 arc_ok ? "simple arc, distinct edge closures"
                                        : "topology/endpoint check failed"));

        const double gap = eigen_gap(sp);
        out.push_back(make_claim(ids[4], gap > 0.01, gap - 0.01, m, 0.01,
                                 "relative gap " + std::to_string(gap)));
        return out;
    };

    std::string err;
    std::vector<ClaimResult> coarse, fine;
    try {
        coarse = level(divisions);
        fine = level((3 * divisions) / 2);
    } catch (const std::exception& e) {
        err = e.what();
    }
    vc.claims = err.empty() ? combine_all(coarse, fine)
                            : inconclusive_all(ids, "solver failure: " + err);
    return vc;
}

VerificationCase verify_mixed(const GeodesicTriangle& t, int divisions) {
    std::vector<int> dirichlet, neumann;
    for (int e = 0; e < 3; ++e)
        (t.edge_bc[e] == EdgeBC::Dirichlet ? dirichlet : neumann).push_back(e);
    if (dirichlet.empty() || dirichlet.size() == 3)
        throw DomainError("verify_mixed needs exactly one or two Dirichlet edges");

    VerificationCase vc{t, false, {}};
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const std::array<double, 3> ang{tm.alpha, tm.beta, tm.gamma};
    const bool single = dirichlet.size() == 1;
    const double atol = kRightAngleTol;

    std::vector<std::string> ids;
    if (single) {
        // hypothesis: the vertex opposite the Dirichlet edge is non-obtuse
        vc.asserted = ang[dirichlet[0]] <= M_PI / 2.0 + atol;
        ids = {"no_critical_points", "neumann_vertex_max", "killing_certified"};
    } else {
        // hypothesis: both mixed vertices (endpoints of the Neumann edge)
        const int en = neumann[0];
        vc.asserted = ang[(en + 1) % 3] <= M_PI / 2.0 + atol &&
                      ang[(en + 2) % 3] <= M_PI / 2.0 + atol;
        ids = {"one_critical_point", "critical_on_neumann_edge", "killing_certified"};
    }

    auto level = [&](int div) -> std::vector<ClaimResult> {
        const TriangleMesh m = level_mesh(t, div, 1.0);
        const Spectrum sp = solve_smallest(assemble(m), 1);
        const EigenPair& u1 = sp.pairs[0];
        std::vector<ClaimResult> out;
        const CriticalReport rep = detect_critical_points(u1, m);

        if (single) {
            out.push_back(make_claim(
                ids[0], rep.interior_points.empty() && rep.edge_points.empty(),
                -(double)(rep.interior_points.size() + rep.edge_points.size()), m, rep.tol,
                std::to_string(rep.interior_points.size()) + " interior, " +
                    std::to_string(rep.edge_points.size()) + " edge"));

            const int vn = dirichlet[0]; // vertex opposite the Dirichlet edge
            int imax = 0;
            double umin = u1.vector[0];
            for (int i = 1; i < (int)m.nodes.size(); ++i) {
                if (u1.vector[i] > u1.vector[imax]) imax = i;
                umin = std::min(umin, u1.vector[i]);
            }
            const bool max_ok =
                imax == m.vertex_nodes[vn] && umin > -1e-6 * u1.vector[imax];
            out.push_back(make_claim(ids[1], max_ok, umin / u1.vector[imax], m, 1e-6,
                                     "argmax node " + std::to_string(imax)));

            // axis through the Neumann vertex, perpendicular to the D edge
            const ChartPoint foot =
                project_to_geodesic(t.kappa, t.vertices[(vn + 1) % 3], t.vertices[(vn + 2) % 3],
                                    t.vertices[vn]);
            std::vector<std::pair<KillingField, std::string>> cands;
            for (int orient : {+1, -1})
                cands.emplace_back(KillingField::loxodromic(t.kappa, foot, t.vertices[vn], orient),
                                   std::string("perp_axis") + (orient > 0 ? "+" : "-"));
            for (auto& c : edge_axis_candidates(t)) cands.push_back(std::move(c));
            const CertOutcome cert = try_certify(u1, m, cands);
            out.push_back(make_claim(ids[2], cert.ok, cert.margin, m, 1e-6, cert.which));
        } else {
            const int en = neumann[0];
            const int total = (int)(rep.interior_points.size() + rep.edge_points.size());
            out.push_back(make_claim(ids[0], total == 1, (double)(1 - std::abs(total - 1)), m,
                                     rep.tol,
                                     std::to_string(rep.interior_points.size()) + " interior, " +
                                         std::to_string(rep.edge_points.size()) + " edge"));
            const bool on_edge = rep.interior_points.empty() && rep.edge_points.size() == 1 &&
                                 rep.edge_points[0].edge == en;
            ClaimResult cr = make_claim(ids[1], on_edge, 0.0, m, 0.0, "");
            if (!rep.edge_points.empty()) {
                cr.where = rep.edge_points[0].location;
                cr.detail = "edge " + std::to_string(rep.edge_points[0].edge);
            }
            out.push_back(cr);

            // axis through the Dirichlet vertex, perpendicular to the N edge
            const int vd = en; // vertex shared by the two Dirichlet edges
            const ChartPoint foot =
                project_to_geodesic(t.kappa, t.vertices[(en + 1) % 3], t.vertices[(en + 2) % 3],
                                    t.vertices[vd]);
            std::vector<std::pair<KillingField, std::string>> cands;
            for (int orient : {+1, -1})
                cands.emplace_back(KillingField::loxodromic(t.kappa, t.vertices[vd], foot, orient),
                                   std::string("dvertex_axis") + (orient > 0 ? "+" : "-"));
            for (auto& c : edge_axis_candidates(t)) cands.push_back(std::move(c));
            const CertOutcome cert = try_certify(u1, m, cands);
            out.push_back(make_claim(ids[2], cert.ok, cert.margin, m, 1e-6, cert.which));
        }
        return out;
    };

    std::string err;
    std::vector<ClaimResult> coarse, fine;
    try {
        coarse = level(divisions);
        fine = level((3 * divisions) / 2);
    } catch (const std::exception& e) {
        err = e.what();
    }
    vc.claims = err.empty() ? combine_all(coarse, fine)
                            : inconclusive_all(ids, "solver failure: " + err);
    return vc;
}

VerificationCase verify_finiteness(const GeodesicTriangle& t, int divisions) {
    VerificationCase vc{t, false, {}};
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const std::array<double, 3> ang{tm.alpha, tm.beta, tm.gamma};

    int n_right = 0, apex = -1;
    for (int v = 0; v < 3; ++v) {
        if (std::abs(ang[v] - M_PI / 2.0) < 1e-6)
            ++n_right;
        else
            apex = v;
    }
    const bool exception = t.kappa.positive() && n_right == 2 && apex >= 0;
    vc.asserted = !t.kappa.flat();

    const std::vector<std::string> ids =
        exception ? std::vector<std::string>{"continuum_on_base", "latitude_constancy"}
                  : std::vector<std::string>{"no_continuum"};

    auto level = [&](int div) -> std::vector<ClaimResult> {
        const TriangleMesh m = level_mesh(t, div, 1.0);
        const Spectrum sp = solve_smallest(assemble(m), 2);
        const EigenPair& u2 = sp.pairs[1];
        CriticalReport rep = detect_critical_points(u2, m);
        std::vector<ClaimResult> out;

        if (exception) {
            // an arc of critical points only reads as ~0 gradient up to the
            // O(h) boundary recovery noise, so the flag tolerance must scale
            // with h for the CONTINUUM cluster to surface under refinement
            double minside = 1e300;
            for (int v = 0; v < 3; ++v)
                minside = std::min(minside, (m.corners[v].xy() -
                                             m.corners[(v + 1) % 3].xy()).norm());
            rep = detect_critical_points(u2, m, 3.0 * rep.grad_max * m.h / minside);
        }

        if (!exception) {
            int continua = 0, isolated = 0;
            for (const auto& c : rep.interior_points) (c.continuum ? continua : isolated)++;
            out.push_back(make_claim(ids[0], continua == 0, -(double)continua, m, rep.tol,
                                     std::to_string(isolated) + " isolated, " +
                                         std::to_string(continua) + " continuum"));
            return out;
        }

        // exception family: base edge is opposite the apex vertex
        const ChartPoint ba = t.vertices[(apex + 1) % 3];
        const ChartPoint bb = t.vertices[(apex + 2) % 3];
        bool on_base = false;
        for (const auto& c : rep.interior_points) {
            if (!c.continuum) continue;
            const ChartPoint loc{Chart::PoincareDisk, c.location};
            const ChartPoint proj = project_to_geodesic(t.kappa, ba, bb, loc);
            if ((proj.xy() - c.location).norm() < 5.0 * m.h) on_base = true;
        }
        out.push_back(make_claim(ids[0], on_base, 0.0, m, 5.0 * m.h,
                                 std::to_string(rep.interior_points.size()) + " clusters"));

        // u2 constant along equidistant curves from the base
        const MeshLocator loc(m);
        double umax = 0.0;
        for (int i = 0; i < (int)u2.vector.size(); ++i)
            umax = std::max(umax, std::abs(u2.vector[i]));
        const ChartPoint foot = project_to_geodesic(t.kappa, ba, bb, t.vertices[apex]);
        const double height = geodesic_distance(t.kappa, foot, t.vertices[apex]);
        const double base_len = geodesic_distance(t.kappa, ba, bb);
        const Vec2 hint = chart_convert(t.vertices[apex], Chart::Klein, t.kappa).xy();
        double worst = 0.0;
        bool sampled = true;
        for (double f : {0.2, 0.4, 0.6}) {
            double lo = 1e300, hi = -1e300;
            int found = 0, tried = 0;
            for (int i = 0; i <= 40; ++i) {
                const double s = base_len * (0.05 + 0.9 * i / 40.0);
                ++tried;
                ChartPoint q;
                try {
                    q = equidistant_point(t.kappa, ba, bb, s, f * height, hint);
                } catch (const DomainError&) {
                    continue;
                }
                const Vec2 p = chart_convert(q, Chart::PoincareDisk, t.kappa).xy();
                if (loc.locate(p) < 0) continue;
                const double v = loc.evaluate(u2.vector, p);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                ++found;
            }
            if (found < (4 * tried) / 5) sampled = false;
            if (found > 0) worst = std::max(worst, hi - lo);
        }
        const bool flat_ok = sampled && worst < 1e-3 * umax;
        out.push_back(make_claim(ids[1], flat_ok, 1e-3 * umax - worst, m, 1e-3 * umax,
                                 "max variation " + std::to_string(worst)));
        return out;
    };

    // the latitude-constancy bound (1e-3 of the sup norm) sits below the P1
    // interpolation error until h ~ min_side/72, so the exception runs finer
    const int dd = exception ? std::max(divisions, 72) : divisions;
    std::string err;
    std::vector<ClaimResult> coarse, fine;
    try {
        coarse = level(dd);
        fine = level((3 * dd) / 2);
    } catch (const std::exception& e) {
        err = e.what();
    }
    vc.claims = err.empty() ? combine_all(coarse, fine)
                            : inconclusive_all(ids, "solver failure: " + err);
    return vc;
}

std::vector<SphereProbeRow> probe_sphere_mixed_inequality(
    const std::vector<GeodesicTriangle>& family, int divisions) {
    std::vector<SphereProbeRow> rows;
    const int d1 = divisions, d2 = (3 * divisions) / 2;
    const double rr = double(d2) / double(d1); // h ratio between levels
    const double denom = rr * rr - 1.0;        // Richardson factor, order 2

    for (int ti = 0; ti < (int)family.size(); ++ti) {
        const GeodesicTriangle base = family[ti];
        std::array<double, 2> mu2{};
        std::array<TriangleMesh, 2> meshes{level_mesh(base, d1, 2.0), level_mesh(base, d2, 2.0)};
        for (int l = 0; l < 2; ++l)
            mu2[l] = solve_smallest(assemble(meshes[l]), 2).pairs[1].value;

        for (int e = 0; e < 3; ++e) {
            std::array<EdgeBC, 3> bc{EdgeBC::Dirichlet, EdgeBC::Dirichlet, EdgeBC::Dirichlet};
            bc[e] = EdgeBC::Neumann;
            const GeodesicTriangle tmix(base.kappa, base.vertices, bc);
            std::array<double, 2> margin{};
            double l1_fine = 0.0;
            for (int l = 0; l < 2; ++l) {
                TriangleMesh m = meshes[l];
                m.edge_bc = bc;
                const double l1 = solve_smallest(assemble(m), 1).pairs[0].value;
                margin[l] = l1 - mu2[l];
                if (l == 1) l1_fine = l1;
            }
            SphereProbeRow row;
            row.triangle_index = ti;
            row.edge = e;
            row.mu2 = mu2[1];
            row.lambda1 = l1_fine;
            row.error_bar = std::abs(margin[1] - margin[0]) / denom;
            row.margin = margin[1] + (margin[1] - margin[0]) / denom;
            row.conclusive = row.margin - row.error_bar > 0.0 || row.margin + row.error_bar < 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<GeodesicTriangle> nonacute_hyperbolic_family(int n, int seed) {
    std::vector<GeodesicTriangle> out;
    const Curvature k(-1.0);
    for (int i = 1 + 1000 * seed; (int)out.size() < n; ++i) {
        const double a = M_PI / 2.0 + 0.30 * M_PI * halton(i, 2);
        const double rest = (0.45 + 0.35 * halton(i, 3)) * (M_PI - a);
        const double b = rest * (0.3 + 0.4 * halton(i, 5));
        const double c = rest - b;
        if (b < 0.10 * M_PI || c < 0.10 * M_PI) continue;
        out.push_back(make_triangle_from_angles(k, a, b, c));
    }
    return out;
}

std::vector<GeodesicTriangle> mixed_hyperbolic_family(int n, int seed) {
    std::vector<GeodesicTriangle> out;
    const Curvature k(-1.0);
    for (int i = 1 + 1000 * seed; (int)out.size() < n; ++i) {
        // Dirichlet on edge 0; opposite vertex angle kept non-obtuse
        const double a = 0.15 * M_PI + 0.30 * M_PI * halton(i, 2);
        const double rest = (0.50 + 0.30 * halton(i, 3)) * (M_PI - a);
        const double b = rest * (0.3 + 0.4 * halton(i, 5));
        const double c = rest - b;
        if (b < 0.10 * M_PI || c < 0.10 * M_PI) continue;
        out.push_back(make_triangle_from_angles(k, a, b, c,
                                                {EdgeBC::Dirichlet, EdgeBC::Neumann,
                                                 EdgeBC::Neumann}));
    }
    return out;
}

std::vector<GeodesicTriangle> spherical_family(int n, int seed) {
    std::vector<GeodesicTriangle> out;
    const Curvature k(1.0);
    for (int i = 1 + 1000 * seed; (int)out.size() < n; ++i) {
        const double a = 0.35 * M_PI + 0.25 * M_PI * halton(i, 2);
        const double b = 0.35 * M_PI + 0.25 * M_PI * halton(i, 3);
        const double c = 0.35 * M_PI + 0.25 * M_PI * halton(i, 5);
        if (a + b + c <= M_PI + 0.05 * M_PI) continue;
        try {
            out.push_back(make_triangle_from_angles(k, a, b, c));
        } catch (const std::exception&) {
            // too large for the open hemisphere: skip the sample
        }
    }
    return out;
}

} // namespace curv
