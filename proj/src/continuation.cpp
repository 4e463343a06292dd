#include "curv/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "curv/fem.hpp"

namespace curv {

namespace {

struct StepState {
    double t = 0.0;
    TriangleMesh mesh;
    Spectrum spectrum;
    std::vector<Eigen::VectorXd> vectors; // branch-label order
    std::vector<double> values;
};

TriangleMesh remap_mesh(const TriangleMesh& base, const std::vector<Vec2>& klein_nodes,
                        const std::array<ChartPoint, 3>& klein_vertices, Curvature k) {
    TriangleMesh m = base;
    m.kappa = k;
    double dmax_old = 0.0, dmax_new = 0.0;
    for (size_t i = 0; i < klein_nodes.size(); ++i)
        m.nodes[i] =
            chart_convert({Chart::Klein, klein_nodes[i]}, Chart::PoincareDisk, k).xy();
    for (const auto& e : base.elements)
        for (int i = 0; i < 3; ++i) {
            dmax_old = std::max(dmax_old, (base.nodes[e[i]] - base.nodes[e[(i + 1) % 3]]).norm());
            dmax_new = std::max(dmax_new, (m.nodes[e[i]] - m.nodes[e[(i + 1) % 3]]).norm());
        }
    for (int v = 0; v < 3; ++v)
        m.corners[v] = chart_convert(klein_vertices[v], Chart::PoincareDisk, k);
    m.h = base.h * (dmax_old > 0.0 ? dmax_new / dmax_old : 1.0);
    return m;
}

} // namespace

BranchData sweep(const std::array<ChartPoint, 3>& klein_vertices,
                 const std::array<EdgeBC, 3>& edge_bc, double kappa_start, double kappa_end,
                 int steps, int k, int divisions, BranchData* partial) {
    if (steps < 1) throw DomainError("sweep needs at least one step");
    if (k < 1) throw DomainError("sweep needs at least one branch");
    for (const auto& v : klein_vertices)
        if (v.chart != Chart::Klein) throw DomainError("sweep vertices must be Klein-chart points");

    BranchData out;
    out.klein_vertices = klein_vertices;
    out.edge_bc = edge_bc;
    out.kappa_start = kappa_start;
    out.kappa_end = kappa_end;
    out.k = k;
    const bool neumann =
        edge_bc[0] == EdgeBC::Neumann && edge_bc[1] == EdgeBC::Neumann && edge_bc[2] == EdgeBC::Neumann;
    out.tracked = neumann ? 1 : 0;
    if (k <= out.tracked) throw DomainError("sweep needs k > tracked branch index");
    if (partial) *partial = out;

    // build the reference mesh at the midpoint curvature so the node set (and
    // hence every remapped step) is independent of sweep direction
    const GeodesicTriangle t0(Curvature(0.5 * (kappa_start + kappa_end)), klein_vertices, edge_bc);
    const TriangleMetrics tm = triangle_angles_and_sides(t0);
    const TriangleMesh base = generate_mesh(t0, std::min({tm.a, tm.b, tm.c}) / divisions, 1.0);
    std::vector<Vec2> klein_nodes(base.nodes.size());
    for (size_t i = 0; i < base.nodes.size(); ++i)
        klein_nodes[i] =
            chart_convert({Chart::PoincareDisk, base.nodes[i]}, Chart::Klein, base.kappa).xy();

    auto kappa_of = [&](double t) { return kappa_start + t * (kappa_end - kappa_start); };

    auto compute = [&](double t) -> StepState {
        try {
            TriangleMesh m = remap_mesh(base, klein_nodes, klein_vertices, Curvature(kappa_of(t)));
            Spectrum sp = solve_smallest(assemble(m), k);
            return StepState{t, std::move(m), std::move(sp), {}, {}};
        } catch (const StepFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw StepFailure(t, std::string("sweep step failed: ") + e.what());
        }
    };

    // branch matching against the previous accepted step: greedy assignment
    // maximizing the mass inner product, labels keep the previous order
    auto match = [&](const StepState& prev, StepState& cur) -> std::vector<double> {
        const Eigen::SparseMatrix<double>& M = assemble(cur.mesh).mass;
        std::vector<int> taken(k, 0);
        std::vector<double> overlaps(k, 0.0);
        cur.vectors.resize(k);
        cur.values.resize(k);
        for (int i = 0; i < k; ++i) {
            const Eigen::VectorXd mp = M * prev.vectors[i];
            const double nrm = std::sqrt(prev.vectors[i].dot(mp));
            int best = -1;
            double bo = -1.0;
            for (int j = 0; j < k; ++j) {
                if (taken[j]) continue;
                const double o = std::abs(cur.spectrum.pairs[j].vector.dot(mp)) / nrm;
                if (o > bo) {
                    bo = o;
                    best = j;
                }
            }
            taken[best] = 1;
            overlaps[i] = bo;
            cur.vectors[i] = cur.spectrum.pairs[best].vector;
            cur.values[i] = cur.spectrum.pairs[best].value;
        }
        return overlaps;
    };

    auto record = [&](const StepState& s, const std::vector<double>& overlaps,
                      const StepState* prev) {
        BranchStep bs;
        bs.t = s.t;
        bs.kappa = kappa_of(s.t);
        bs.values = s.values;
        bs.overlaps = overlaps;
        const CriticalReport rep =
            detect_critical_points(EigenPair{s.values[out.tracked], s.vectors[out.tracked], 0.0,
                                             out.tracked},
                                   s.mesh);
        bs.crit_count = (int)(rep.interior_points.size() + rep.edge_points.size());
        for (const auto& c : rep.interior_points) bs.crit_locations.push_back(c.location);
        for (const auto& c : rep.edge_points) bs.crit_locations.push_back(c.location);
        bs.h = s.mesh.h;
        if (prev) {
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    const bool was = prev->values[i] > prev->values[j];
                    const bool is = s.values[i] > s.values[j];
                    if (was != is) out.events.push_back({s.t, i, j, "order_swap"});
                }
            for (int i = 0; i < k; ++i)
                if (overlaps[i] < 0.95) out.events.push_back({s.t, i, i, "overlap_dip"});
        }
        out.steps.push_back(std::move(bs));
        if (partial) *partial = out;
    };

    StepState cur = compute(0.0);
    cur.vectors.resize(k);
    cur.values.resize(k);
    for (int i = 0; i < k; ++i) {
        cur.vectors[i] = cur.spectrum.pairs[i].vector;
        cur.values[i] = cur.spectrum.pairs[i].value;
    }
    record(cur, std::vector<double>(k, 1.0), nullptr);

    for (int g = 1; g <= steps; ++g) {
        double target = (double)g / steps;
        while (cur.t < target) {
            double tn = target;
            for (;;) {
                StepState next = compute(tn);
                const std::vector<double> overlaps = match(cur, next);
                if (*std::min_element(overlaps.begin(), overlaps.end()) >= 0.9) {
                    record(next, overlaps, &cur);
                    cur = std::move(next);
                    break;
                }
                const double mid = 0.5 * (cur.t + tn);
                if (mid - cur.t < 1e-4)
                    throw StepFailure(tn, "branch matching failed at minimum step size");
                tn = mid;
            }
        }
    }
    return out;
}

std::vector<PersistenceRow> track_critical_points(const BranchData& b) {
    std::vector<PersistenceRow> rows;
    for (size_t s = 0; s < b.steps.size(); ++s) {
        const BranchStep& st = b.steps[s];
        PersistenceRow row;
        row.t = st.t;
        row.count = st.crit_count;
        row.locations = st.crit_locations;
        row.matched_previous.assign(st.crit_locations.size(), -1);
        if (s > 0) {
            const auto& prev = rows.back().locations;
            for (size_t i = 0; i < st.crit_locations.size(); ++i) {
                double best = 5.0 * st.h;
                for (size_t j = 0; j < prev.size(); ++j) {
                    const double d = (st.crit_locations[i] - prev[j]).norm();
                    if (d < best) {
                        best = d;
                        row.matched_previous[i] = (int)j;
                    }
                }
            }
            row.event = st.crit_count != rows.back().count;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace curv
