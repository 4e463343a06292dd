#include "curv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "curv/detail/model3.hpp"

namespace curv {

namespace {

Vec2 klein_of(Curvature k, const ChartPoint& p) { return chart_convert(p, Chart::Klein, k).xy(); }

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) { return (b - a).cross(c - a); }

} // namespace

std::array<double, 3> grading_exponents(const GeodesicTriangle& t, double g) {
    const TriangleMetrics m = triangle_angles_and_sides(t);
    const double ang[3] = {m.alpha, m.beta, m.gamma};
    std::array<double, 3> out{1.0, 1.0, 1.0};
    for (int v = 0; v < 3; ++v) {
        const bool obtuse = ang[v] > M_PI / 2 + kRightAngleTol;
        const bool mixed = t.edge_bc[(v + 1) % 3] != t.edge_bc[(v + 2) % 3];
        if (obtuse || mixed) out[v] = g;
    }
    return out;
}

TriangleMesh generate_mesh(const GeodesicTriangle& t, double h, double grading) {
    const Curvature k = t.kappa;
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const double min_side = std::min({tm.a, tm.b, tm.c});
    if (!(h > 0.0 && h <= min_side / 4.0))
        throw DomainError("mesh size h must lie in (0, min side / 4]");
    if (grading < 1.0) throw DomainError("grading exponent must be >= 1");

    Vec2 kl[3];
    for (int i = 0; i < 3; ++i) kl[i] = klein_of(k, t.vertices[i]);

    // apex = vertex with the largest metric angle; its foot lies inside the
    // opposite edge, so base-to-apex rows shrink cleanly
    const double angs[3] = {tm.alpha, tm.beta, tm.gamma};
    const int apex = (int)(std::max_element(angs, angs + 3) - angs);
    int vl = (apex + 1) % 3, vr = (apex + 2) % 3;
    if (signed_area2(kl[vl], kl[vr], kl[apex]) < 0.0) std::swap(vl, vr);
    const ChartPoint A{Chart::Klein, kl[apex]};
    const ChartPoint L{Chart::Klein, kl[vl]};
    const ChartPoint R{Chart::Klein, kl[vr]};

    // metric target size from the Poincare-chart target h via the conformal
    // factor at the centroid (the conformal chart scale varies smoothly)
    const Vec2 cent = (kl[0] + kl[1] + kl[2]) / 3.0;
    const ChartPoint cp = chart_convert({Chart::Klein, cent}, Chart::PoincareDisk, k);
    const double hm = h * std::sqrt(conformal_factor(k, cp)) / std::sqrt(2.0);

    const std::array<double, 3> gexp = grading_exponents(t, grading);
    const double lenL = geodesic_distance(k, L, A), lenR = geodesic_distance(k, R, A);

    // metric height of the apex over the base line, via the model normal
    double height;
    if (k.flat()) {
        height = std::abs((R.xy() - L.xy()).normalized().cross(A.xy() - L.xy()));
    } else {
        const detail::Vec3 n =
            detail::geodesic_normal(k, detail::to_model(k, L.xy()), detail::to_model(k, R.xy()));
        const double f = std::abs(detail::form(k, detail::to_model(k, A.xy()), n));
        const double sc = std::sqrt(std::abs(k.kappa));
        height = (k.negative() ? std::asinh(f) : std::asin(std::min(1.0, f))) / sc;
    }

    // rows from the base (j = 0) to the apex (j = nrows); row endpoints sit at
    // equal metric fractions along the two slant edges, in-row nodes at equal
    // metric arc length, so the mesh is quasi-uniform in the metric (and thus
    // shape-uniform in the conformal Poincare chart)
    auto build = [&](int nrows) -> TriangleMesh {
    TriangleMesh m{k, {}, {}, {}, {}, h, {1, 1, 1}, {}, t.edge_bc};
    for (int i = 0; i < 3; ++i) m.corners[i] = chart_convert(t.vertices[i], Chart::PoincareDisk, k);
    m.grading = gexp;

    std::vector<std::vector<int>> rows(nrows + 1);
    std::vector<Vec2> knodes;
    for (int j = 0; j < nrows; ++j) {
        const double tj = (double)j / nrows;
        const ChartPoint lj = j == 0 ? L : geodesic_point_at_arclength(k, L, A, lenL * tj);
        const ChartPoint rj = j == 0 ? R : geodesic_point_at_arclength(k, R, A, lenR * tj);
        const double lenj = geodesic_distance(k, lj, rj);
        const int mj = std::max(1, (int)std::lround(lenj / hm));
        rows[j].resize(mj + 1);
        rows[j][0] = (int)knodes.size();
        knodes.push_back(lj.xy());
        for (int i = 1; i < mj; ++i) {
            rows[j][i] = (int)knodes.size();
            knodes.push_back(geodesic_point_at_arclength(k, lj, rj, lenj * i / mj).xy());
        }
        rows[j][mj] = (int)knodes.size();
        knodes.push_back(rj.xy());
    }
    rows[nrows] = {(int)knodes.size()};
    knodes.push_back(A.xy());

    // strip triangulation between consecutive rows: shortest-diagonal greedy
    for (int j = 0; j < nrows; ++j) {
        const auto& P = rows[j];
        const auto& Q = rows[j + 1];
        size_t i = 0, q = 0;
        while (i + 1 < P.size() || q + 1 < Q.size()) {
            const bool can_p = i + 1 < P.size();
            const bool can_q = q + 1 < Q.size();
            bool take_p;
            if (!can_q)
                take_p = true;
            else if (!can_p)
                take_p = false;
            else
                take_p = geodesic_distance(k, {Chart::Klein, knodes[P[i + 1]]},
                                           {Chart::Klein, knodes[Q[q]]}) <=
                         geodesic_distance(k, {Chart::Klein, knodes[P[i]]},
                                           {Chart::Klein, knodes[Q[q + 1]]});
            if (take_p) {
                m.elements.push_back({P[i], P[i + 1], Q[q]});
                ++i;
            } else {
                m.elements.push_back({P[i], Q[q + 1], Q[q]});
                ++q;
            }
        }
    }

    // boundary polylines: base row, then the left/right ends of every row
    auto push_chain = [&](const std::vector<int>& chain, int tag) {
        for (size_t i = 0; i + 1 < chain.size(); ++i)
            m.boundary_edges.push_back({chain[i], chain[i + 1], tag});
    };
    push_chain(rows[0], apex);
    std::vector<int> left, right;
    for (int j = 0; j <= nrows; ++j) {
        left.push_back(rows[j].front());
        right.push_back(rows[j].back());
    }
    push_chain(left, vr);  // edge (vl, apex) is opposite vr
    push_chain(right, vl); // edge (vr, apex) is opposite vl

    m.vertex_nodes[vl] = rows[0].front();
    m.vertex_nodes[vr] = rows[0].back();
    m.vertex_nodes[apex] = rows[nrows].front();

    m.nodes.reserve(knodes.size());
    for (const Vec2& p : knodes)
        m.nodes.push_back(chart_convert({Chart::Klein, p}, Chart::PoincareDisk, k).xy());

    // deterministic quality improvement in the conformal chart: edge flips of
    // interior diagonals interleaved with quality-guarded Laplacian smoothing
    // (boundary nodes stay exactly on the geodesic edges)
    {
        std::vector<bool> on_boundary(m.nodes.size(), false);
        for (const auto& be : m.boundary_edges) {
            on_boundary[be[0]] = true;
            on_boundary[be[1]] = true;
        }
        auto tri_quality = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
            const double area2 = signed_area2(a, b, c);
            if (area2 <= 0.0) return -1.0;
            const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
            return area2 / ((la + lb + lc) * std::max({la, lb, lc}));
        };
        auto q_of = [&](const std::array<int, 3>& e) {
            return tri_quality(m.nodes[e[0]], m.nodes[e[1]], m.nodes[e[2]]);
        };

        auto flip_pass = [&]() {
            std::map<std::pair<int, int>, std::vector<int>> edge_elems;
            for (int e = 0; e < (int)m.elements.size(); ++e)
                for (int i = 0; i < 3; ++i) {
                    const int a = m.elements[e][i], b = m.elements[e][(i + 1) % 3];
                    edge_elems[{std::min(a, b), std::max(a, b)}].push_back(e);
                }
            bool changed = false;
            std::set<std::pair<int, int>> created;
            for (const auto& [edge, elems] : edge_elems) {
                if (elems.size() != 2) continue;
                auto& e1 = m.elements[elems[0]];
                auto& e2 = m.elements[elems[1]];
                const auto has = [](const std::array<int, 3>& e, int n) {
                    return e[0] == n || e[1] == n || e[2] == n;
                };
                if (!has(e1, edge.first) || !has(e1, edge.second) || !has(e2, edge.first) ||
                    !has(e2, edge.second))
                    continue; // an earlier flip this pass already rewired these
                // shared edge (u, v); w1, w2 are the opposite corners
                const auto opp = [&](const std::array<int, 3>& e) {
                    for (int i = 0; i < 3; ++i)
                        if (e[i] != edge.first && e[i] != edge.second) return e[i];
                    return -1;
                };
                const int w1 = opp(e1), w2 = opp(e2);
                if (w1 < 0 || w2 < 0 || w1 == w2) continue;
                // the new diagonal must not already be an edge of the mesh
                const std::pair<int, int> diag{std::min(w1, w2), std::max(w1, w2)};
                if (edge_elems.count(diag) || created.count(diag)) continue;
                const int u = edge.first, v = edge.second;
                const std::array<int, 3> f1{u, w2, w1}, f1r{u, w1, w2};
                const std::array<int, 3> f2{v, w1, w2}, f2r{v, w2, w1};
                const std::array<int, 3> n1 = q_of(f1) > 0 ? f1 : f1r;
                const std::array<int, 3> n2 = q_of(f2) > 0 ? f2 : f2r;
                const double q_cur = std::min(q_of(e1), q_of(e2));
                const double q_new = std::min(q_of(n1), q_of(n2));
                if (q_new > q_cur + 1e-12) {
                    e1 = n1;
                    e2 = n2;
                    created.insert(diag);
                    changed = true;
                }
            }
            return changed;
        };

        // chain neighbours of each non-vertex boundary node (same tag, so the
        // node can slide along its geodesic edge without leaving it)
        std::vector<std::array<int, 2>> chain_nbr(m.nodes.size(), {-1, -1});
        for (const auto& be : m.boundary_edges) {
            for (int s = 0; s < 2; ++s) {
                const int v = be[s], w = be[1 - s];
                if (chain_nbr[v][0] == -1)
                    chain_nbr[v][0] = w;
                else if (chain_nbr[v][1] == -1)
                    chain_nbr[v][1] = w;
            }
        }
        for (int c = 0; c < 3; ++c) chain_nbr[m.vertex_nodes[c]] = {-1, -1};

        auto try_move = [&](int v, const Vec2& target, const std::vector<int>& inc) {
            const Vec2 old = m.nodes[v];
            double q_old = 1e30;
            for (int e : inc) q_old = std::min(q_old, q_of(m.elements[e]));
            for (double f : {1.0, 0.5, 0.25}) {
                m.nodes[v] = old + (target - old) * f;
                double q_new = 1e30;
                for (int e : inc) q_new = std::min(q_new, q_of(m.elements[e]));
                if (q_new > q_old + 1e-15) return;
            }
            m.nodes[v] = old;
        };

        auto smooth_pass = [&]() {
            std::vector<std::vector<int>> incident(m.nodes.size());
            for (int e = 0; e < (int)m.elements.size(); ++e)
                for (int i = 0; i < 3; ++i) incident[m.elements[e][i]].push_back(e);
            for (int v = 0; v < (int)m.nodes.size(); ++v) {
                if (incident[v].empty()) continue;
                if (on_boundary[v]) {
                    // slide along the boundary geodesic: the Klein midpoint of
                    // the chain neighbours lies exactly on the edge
                    if (chain_nbr[v][0] < 0 || chain_nbr[v][1] < 0) continue;
                    const Vec2 ka = klein_of(k, {Chart::PoincareDisk, m.nodes[chain_nbr[v][0]]});
                    const Vec2 kb = klein_of(k, {Chart::PoincareDisk, m.nodes[chain_nbr[v][1]]});
                    const Vec2 kv = klein_of(k, {Chart::PoincareDisk, m.nodes[v]});
                    const Vec2 old = m.nodes[v];
                    double q_old = 1e30;
                    for (int e : incident[v]) q_old = std::min(q_old, q_of(m.elements[e]));
                    const Vec2 kmid = (ka + kb) / 2.0;
                    bool moved = false;
                    for (double f : {1.0, 0.5, 0.25}) {
                        const Vec2 kc = kv + (kmid - kv) * f;
                        m.nodes[v] = chart_convert({Chart::Klein, kc}, Chart::PoincareDisk, k).xy();
                        double q_new = 1e30;
                        for (int e : incident[v]) q_new = std::min(q_new, q_of(m.elements[e]));
                        if (q_new > q_old + 1e-15) {
                            moved = true;
                            break;
                        }
                    }
                    if (!moved) m.nodes[v] = old;
                    continue;
                }
                Vec2 sum{0, 0};
                int cnt = 0;
                std::vector<int> seen;
                for (int e : incident[v])
                    for (int i = 0; i < 3; ++i) {
                        const int w = m.elements[e][i];
                        if (w == v || std::find(seen.begin(), seen.end(), w) != seen.end())
                            continue;
                        seen.push_back(w);
                        sum = sum + m.nodes[w];
                        ++cnt;
                    }
                try_move(v, sum / cnt, incident[v]);
            }
        };

        for (int round = 0; round < 8; ++round) {
            for (int i = 0; i < 5; ++i) smooth_pass();
            for (int i = 0; i < 10 && flip_pass(); ++i) {
            }
        }
        for (int i = 0; i < 5; ++i) smooth_pass();

        // per-vertex metric grading warp w(r) = R_v (r / R_v)^g along geodesics
        // toward the vertex; R_v capped so nodes on the opposite edge and near
        // the other vertices never move
        bool warped = false;
        for (int c = 0; c < 3; ++c) {
            const double g = gexp[c];
            if (g <= 1.0) continue;
            const ChartPoint v = m.corners[c];
            const ChartPoint o1 = m.corners[(c + 1) % 3], o2 = m.corners[(c + 2) % 3];
            double dline;
            if (k.flat()) {
                dline = std::abs((o2.xy() - o1.xy()).normalized().cross(v.xy() - o1.xy()));
            } else {
                const Vec2 k1 = klein_of(k, o1), k2 = klein_of(k, o2), kv = klein_of(k, v);
                const detail::Vec3 n =
                    detail::geodesic_normal(k, detail::to_model(k, k1), detail::to_model(k, k2));
                const double f = std::abs(detail::form(k, detail::to_model(k, kv), n));
                const double sc = std::sqrt(std::abs(k.kappa));
                dline = (k.negative() ? std::asinh(f) : std::asin(std::min(1.0, f))) / sc;
            }
            const double Rv = std::min({0.95 * dline, 0.45 * geodesic_distance(k, v, o1),
                                        0.45 * geodesic_distance(k, v, o2)});
            for (Vec2& p : m.nodes) {
                const ChartPoint cpN{Chart::PoincareDisk, p};
                const double r = geodesic_distance(k, v, cpN);
                if (r <= 1e-14 || r >= Rv) continue;
                p = geodesic_point_at_arclength(k, v, cpN, Rv * std::pow(r / Rv, g)).xy();
                warped = true;
            }
        }
        // flips keep the graded node positions but repair element shapes
        if (warped)
            for (int i = 0; i < 10 && flip_pass(); ++i) {
            }
    }

    for (const auto& e : m.elements)
        if (signed_area2(m.nodes[e[0]], m.nodes[e[1]], m.nodes[e[2]]) <= 0.0)
            throw MeshFailure("generated element is not positively oriented");
    if (!mesh_is_conforming(m)) throw MeshFailure("generated mesh is not conforming");
    return m;
    };

    // two natural row counts: one spaced by apex height (good for wide
    // triangles), one by slant length (keeps corner elements hm-sized for
    // slivers); build both and keep the better mesh
    const int n_height = std::max(1, (int)std::lround(height / hm));
    const int n_slant = std::max(1, (int)std::lround(std::max(lenL, lenR) / hm));
    TriangleMesh best{k, {}, {}, {}, {}, h, {1, 1, 1}, {}, t.edge_bc};
    double best_q = -1.0;
    std::exception_ptr err;
    for (const int nr : {n_height, n_slant}) {
        if (best_q >= 0.0 && nr == n_height && n_slant == n_height) break;
        try {
            TriangleMesh cand = build(nr);
            const double q = min_element_quality(cand);
            if (q > best_q) {
                best = std::move(cand);
                best_q = q;
            }
        } catch (...) {
            err = std::current_exception();
        }
        if (n_slant == n_height) break;
    }
    if (best_q < 0.0) std::rethrow_exception(err);
    return best;
}

TriangleMesh refine(const TriangleMesh& m) {
    const Curvature k = m.kappa;
    TriangleMesh out = m;
    out.nodes = m.nodes;
    out.elements.clear();
    out.boundary_edges.clear();
    out.h = m.h / 2.0;

    std::map<std::pair<int, int>, int> boundary_tag;
    for (const auto& be : m.boundary_edges)
        boundary_tag[{std::min(be[0], be[1]), std::max(be[0], be[1])}] = be[2];

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = (int)out.nodes.size();
        const auto bt = boundary_tag.find(key);
        if (bt != boundary_tag.end()) {
            // Klein midpoint stays exactly on the geodesic edge
            const Vec2 ka = klein_of(k, {Chart::PoincareDisk, m.nodes[a]});
            const Vec2 kb = klein_of(k, {Chart::PoincareDisk, m.nodes[b]});
            out.nodes.push_back(
                chart_convert({Chart::Klein, (ka + kb) / 2.0}, Chart::PoincareDisk, k).xy());
            out.boundary_edges.push_back({a, idx, bt->second});
            out.boundary_edges.push_back({idx, b, bt->second});
        } else {
            out.nodes.push_back((m.nodes[a] + m.nodes[b]) / 2.0);
        }
        midpoint[key] = idx;
        return idx;
    };

    for (const auto& e : m.elements) {
        const int ab = mid(e[0], e[1]), bc = mid(e[1], e[2]), ca = mid(e[2], e[0]);
        out.elements.push_back({e[0], ab, ca});
        out.elements.push_back({ab, e[1], bc});
        out.elements.push_back({ca, bc, e[2]});
        out.elements.push_back({ab, bc, ca});
    }
    if (!mesh_is_conforming(out)) throw MeshFailure("refined mesh is not conforming");
    return out;
}

bool mesh_is_conforming(const TriangleMesh& m) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& e : m.elements) {
        if (signed_area2(m.nodes[e[0]], m.nodes[e[1]], m.nodes[e[2]]) <= 0.0) return false;
        for (int i = 0; i < 3; ++i) {
            const int a = e[i], b = e[(i + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::map<std::pair<int, int>, int> btag;
    for (const auto& be : m.boundary_edges) ++btag[{std::min(be[0], be[1]), std::max(be[0], be[1])}];
    for (const auto& [edge, c] : count) {
        if (c > 2) return false;
        const bool listed = btag.count(edge) > 0;
        if (c == 1 && !listed) return false;
        if (c == 2 && listed) return false;
    }
    for (const auto& [edge, c] : btag)
        if (c != 1 || count.find(edge) == count.end()) return false;
    return true;
}

double min_element_quality(const TriangleMesh& m) {
    double q = 1.0;
    for (const auto& e : m.elements) {
        const Vec2 &a = m.nodes[e[0]], &b = m.nodes[e[1]], &c = m.nodes[e[2]];
        const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
        const double area = 0.5 * std::abs(signed_area2(a, b, c));
        const double inradius = 2.0 * area / (la + lb + lc);
        q = std::min(q, inradius / std::max({la, lb, lc}));
    }
    return q;
}

double mesh_metric_area(const TriangleMesh& m) {
    double area = 0.0;
    for (const auto& e : m.elements) {
        const Vec2 &a = m.nodes[e[0]], &b = m.nodes[e[1]], &c = m.nodes[e[2]];
        const double ea = 0.5 * signed_area2(a, b, c);
        const Vec2 mids[3] = {(a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0};
        double rho = 0.0;
        for (const Vec2& p : mids) rho += conformal_factor(m.kappa, {Chart::PoincareDisk, p});
        area += ea * rho / 3.0;
    }
    return area;
}

} // namespace curv
