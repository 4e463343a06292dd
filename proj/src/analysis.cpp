#include "curv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Dense>

#include "curv/errors.hpp"

namespace curv {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

Vec2 element_gradient(const TriangleMesh& m, const std::array<int, 3>& e,
                      const Eigen::VectorXd& u, double& area) {
    const Vec2 p0 = m.nodes[e[0]], p1 = m.nodes[e[1]], p2 = m.nodes[e[2]];
    const double area2 = cross2(p1 - p0, p2 - p0);
    area = area2 / 2.0;
    const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    Vec2 g{0, 0};
    for (int i = 0; i < 3; ++i) {
        g.x += u[e[i]] * b[i] / area2;
        g.y += u[e[i]] * c[i] / area2;
    }
    return g;
}

// boundary nodes of triangle edge `tag` ordered from vertex (tag+1)%3 to
// vertex (tag+2)%3
std::vector<int> boundary_chain(const TriangleMesh& m, int tag) {
    std::map<int, std::vector<int>> adj;
    for (const auto& be : m.boundary_edges)
        if (be[2] == tag) {
            adj[be[0]].push_back(be[1]);
            adj[be[1]].push_back(be[0]);
        }
    std::vector<int> chain;
    int cur = m.vertex_nodes[(tag + 1) % 3];
    int prev = -1;
    chain.push_back(cur);
    while (cur != m.vertex_nodes[(tag + 2) % 3]) {
        const auto it = adj.find(cur);
        if (it == adj.end()) break;
        int nxt = -1;
        for (int w : it->second)
            if (w != prev) nxt = w;
        if (nxt < 0) break;
        prev = cur;
        cur = nxt;
        chain.push_back(cur);
    }
    return chain;
}

std::vector<char> boundary_flags(const TriangleMesh& m) {
    std::vector<char> on(m.nodes.size(), 0);
    for (const auto& be : m.boundary_edges) on[be[0]] = on[be[1]] = 1;
    return on;
}

} // namespace

MeshLocator::MeshLocator(const TriangleMesh& m) : m_(m) {}

int MeshLocator::locate(const Vec2& p) const {
    const double tol = 1e-9;
    for (int e = 0; e < (int)m_.elements.size(); ++e) {
        const auto& el = m_.elements[e];
        const Vec2 a = m_.nodes[el[0]], b = m_.nodes[el[1]], c = m_.nodes[el[2]];
        const double area2 = cross2(b - a, c - a);
        const double l0 = cross2(b - p, c - p) / area2;
        const double l1 = cross2(c - p, a - p) / area2;
        const double l2 = cross2(a - p, b - p) / area2;
        if (l0 >= -tol && l1 >= -tol && l2 >= -tol) return e;
    }
    return -1;
}

double MeshLocator::evaluate(const Eigen::VectorXd& u, const Vec2& p) const {
    const int e = locate(p);
    if (e < 0) throw DomainError("evaluation point outside the mesh");
    const auto& el = m_.elements[e];
    const Vec2 a = m_.nodes[el[0]], b = m_.nodes[el[1]], c = m_.nodes[el[2]];
    const double area2 = cross2(b - a, c - a);
    const double l0 = cross2(b - p, c - p) / area2;
    const double l1 = cross2(c - p, a - p) / area2;
    const double l2 = cross2(a - p, b - p) / area2;
    return l0 * u[el[0]] + l1 * u[el[1]] + l2 * u[el[2]];
}

std::vector<Vec2> recover_gradient(const EigenPair& eig, const TriangleMesh& m) {
    const int n = (int)m.nodes.size();
    if ((int)eig.vector.size() != n) throw ShapeMismatch("eigenvector does not match mesh");

    // patch recovery: area-weighted element-gradient averaging as a robust
    // baseline, then a quadratic least-squares fit of the nodal values over
    // each node's two-ring patch where the fit is well posed -- the quadratic
    // fit keeps second-order accuracy even on one-sided patches
    std::vector<Vec2> g(n, Vec2{0, 0});
    std::vector<double> wsum(n, 0.0);
    std::vector<std::set<int>> ring(n);
    for (const auto& e : m.elements) {
        double area;
        const Vec2 ge = element_gradient(m, e, eig.vector, area);
        for (int i = 0; i < 3; ++i) {
            g[e[i]] = g[e[i]] + ge * area;
            wsum[e[i]] += area;
            ring[e[i]].insert(e[(i + 1) % 3]);
            ring[e[i]].insert(e[(i + 2) % 3]);
        }
    }
    for (int i = 0; i < n; ++i)
        if (wsum[i] > 0.0) g[i] = g[i] / wsum[i];

    for (int i = 0; i < n; ++i) {
        std::set<int> patch = ring[i];
        for (int j : ring[i]) patch.insert(ring[j].begin(), ring[j].end());
        patch.insert(i);
        const int np = (int)patch.size();
        if (np < 8) continue;
        double scale = 0.0;
        for (int j : patch) scale = std::max(scale, (m.nodes[j] - m.nodes[i]).norm());
        Eigen::MatrixXd A(np, 6);
        Eigen::VectorXd b(np);
        int r = 0;
        for (int j : patch) {
            const Vec2 d = (m.nodes[j] - m.nodes[i]) / scale;
            A(r, 0) = 1.0;
            A(r, 1) = d.x;
            A(r, 2) = d.y;
            A(r, 3) = d.x * d.x;
            A(r, 4) = d.x * d.y;
            A(r, 5) = d.y * d.y;
            b(r++) = eig.vector[j];
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        if (qr.rank() < 6) continue;
        const Eigen::VectorXd c = qr.solve(b);
        g[i] = Vec2{c(1), c(2)} / scale;
    }

    // even extension across Neumann edges: averaging the patch with its
    // mirror keeps only the tangential component at boundary nodes
    std::set<int> verts(m.vertex_nodes.begin(), m.vertex_nodes.end());
    for (int tag = 0; tag < 3; ++tag) {
        if (m.edge_bc[tag] != EdgeBC::Neumann) continue;
        const std::vector<int> chain = boundary_chain(m, tag);
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            const int v = chain[i];
            if (verts.count(v)) continue;
            const Vec2 t = (m.nodes[chain[i + 1]] - m.nodes[chain[i - 1]]).normalized();
            g[v] = t * t.dot(g[v]);
        }
    }
    return g;
}

NodalSet extract_nodal_set(const EigenPair& eig, const TriangleMesh& m) {
    const Eigen::VectorXd& u = eig.vector;
    if ((int)u.size() != (int)m.nodes.size()) throw ShapeMismatch("eigenvector does not match mesh");

    using Key = std::pair<int, int>;
    std::map<Key, Vec2> points;
    std::vector<std::pair<Key, Key>> segments;
    auto crossing = [&](int a, int b) -> Key {
        const Key key{std::min(a, b), std::max(a, b)};
        if (!points.count(key)) {
            const double t = u[a] / (u[a] - u[b]);
            points[key] = m.nodes[a] + (m.nodes[b] - m.nodes[a]) * t;
        }
        return key;
    };
    for (const auto& e : m.elements) {
        std::vector<Key> cr;
        for (int i = 0; i < 3; ++i) {
            const int a = e[i], b = e[(i + 1) % 3];
            if ((u[a] > 0 && u[b] < 0) || (u[a] < 0 && u[b] > 0)) cr.push_back(crossing(a, b));
        }
        if (cr.size() == 2) segments.emplace_back(cr[0], cr[1]);
    }

    NodalSet out;
    if (segments.empty()) {
        out.topology = NodalTopology::Empty;
        return out;
    }

    std::map<Key, std::vector<int>> touching;
    for (int s = 0; s < (int)segments.size(); ++s) {
        touching[segments[s].first].push_back(s);
        touching[segments[s].second].push_back(s);
    }

    // walk maximal chains through degree-<=2 points
    std::vector<char> used(segments.size(), 0);
    int n_open = 0, n_loop = 0;
    bool has_branch = false;
    for (const auto& [key, segs] : touching)
        if (segs.size() > 2) has_branch = true;

    auto walk = [&](int s0, Key start) {
        std::vector<Vec2> line;
        std::vector<Key> keys;
        Key cur = start;
        int s = s0;
        line.push_back(points[cur]);
        keys.push_back(cur);
        while (true) {
            used[s] = 1;
            cur = (segments[s].first == cur) ? segments[s].second : segments[s].first;
            line.push_back(points[cur]);
            keys.push_back(cur);
            const auto& segs = touching[cur];
            if (segs.size() != 2) break;
            const int nxt = (segs[0] == s) ? segs[1] : segs[0];
            if (used[nxt]) break;
            s = nxt;
        }
        out.polylines.push_back(std::move(line));
        return keys;
    };

    std::vector<std::pair<Key, Key>> chain_ends; // first/last crossing of open chains
    for (const auto& [key, segs] : touching) {
        if (segs.size() != 1) continue;
        if (used[segs[0]]) continue;
        const auto keys = walk(segs[0], key);
        chain_ends.emplace_back(keys.front(), keys.back());
        ++n_open;
    }
    for (int s = 0; s < (int)segments.size(); ++s) {
        if (used[s]) continue;
        walk(s, segments[s].first);
        ++n_loop;
    }

    if (has_branch || n_open + n_loop > 1) {
        out.topology = NodalTopology::Graph;
        for (const auto& [key, segs] : touching)
            if (segs.size() != 2) out.degree_sequence.push_back((int)segs.size());
        std::sort(out.degree_sequence.begin(), out.degree_sequence.end());
        return out;
    }
    if (n_loop == 1) {
        out.topology = NodalTopology::Loop;
        return out;
    }

    out.topology = NodalTopology::SimpleArc;
    std::map<Key, int> bedge_tag;
    for (const auto& be : m.boundary_edges)
        bedge_tag[{std::min(be[0], be[1]), std::max(be[0], be[1])}] = be[2];
    auto snap = [&](const Key& key) {
        NodalEndpoint ep;
        ep.point = points[key];
        const auto it = bedge_tag.find(key);
        if (it != bedge_tag.end()) ep.edge = it->second;
        for (int v = 0; v < 3; ++v)
            if ((ep.point - m.corners[v].xy()).norm() <= m.h / 2.0) {
                ep.vertex = v;
                if (ep.edge < 0) ep.edge = -1;
            }
        return ep;
    };
    out.endpoints.push_back(snap(chain_ends[0].first));
    out.endpoints.push_back(snap(chain_ends[0].second));
    return out;
}

CriticalReport detect_critical_points(const EigenPair& eig, const TriangleMesh& m, double tol) {
    const std::vector<Vec2> g = recover_gradient(eig, m);
    const int n = (int)m.nodes.size();
    CriticalReport rep;
    for (const Vec2& v : g) rep.grad_max = std::max(rep.grad_max, v.norm());
    rep.tol = tol > 0.0 ? tol : 1e-3 * rep.grad_max;

    const std::vector<char> on_bd = boundary_flags(m);
    std::array<double, 3> r_excl;
    for (int v = 0; v < 3; ++v) r_excl[v] = 3.0 * std::pow(m.h, 1.0 / m.grading[v]);
    auto near_vertex = [&](const Vec2& p) {
        for (int v = 0; v < 3; ++v)
            if ((p - m.corners[v].xy()).norm() < r_excl[v]) return true;
        return false;
    };

    // flag nodes with small recovered gradient and cluster by mesh edges;
    // boundary nodes participate so that a critical arc hugging a Neumann
    // edge still shows up as one long cluster (CONTINUUM), but isolated
    // candidates are only ever refined from interior nodes
    std::vector<char> flagged(n, 0);
    for (int i = 0; i < n; ++i)
        if (g[i].norm() < rep.tol) flagged[i] = 1;

    std::vector<std::vector<int>> nbr(n);
    for (const auto& e : m.elements)
        for (int i = 0; i < 3; ++i) {
            nbr[e[i]].push_back(e[(i + 1) % 3]);
            nbr[e[i]].push_back(e[(i + 2) % 3]);
        }

    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < n; ++i) {
        if (!flagged[i] || comp[i] >= 0) continue;
        std::vector<int> stack{i}, cluster;
        comp[i] = (int)clusters.size();
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            cluster.push_back(v);
            for (int w : nbr[v])
                if (flagged[w] && comp[w] < 0) {
                    comp[w] = comp[i];
                    stack.push_back(w);
                }
        }
        clusters.push_back(std::move(cluster));
    }

    std::vector<char> in_continuum(n, 0);
    for (const auto& full_cluster : clusters) {
        double diam = 0.0;
        Vec2 ccent{0, 0};
        for (size_t a = 0; a < full_cluster.size(); ++a) {
            ccent = ccent + m.nodes[full_cluster[a]];
            for (size_t b = a + 1; b < full_cluster.size(); ++b)
                diam = std::max(diam,
                                (m.nodes[full_cluster[a]] - m.nodes[full_cluster[b]]).norm());
        }
        ccent = ccent / (double)full_cluster.size();
        if (diam > 10.0 * m.h) {
            InteriorCritical c;
            c.cluster_diameter = diam;
            c.continuum = true;
            c.location = ccent;
            c.kind = CritKind::Degenerate;
            c.grad_mag = rep.tol;
            for (int v : full_cluster) {
                in_continuum[v] = 1;
                c.grad_mag = std::min(c.grad_mag, g[v].norm());
            }
            rep.interior_points.push_back(c);
            continue;
        }

        std::vector<int> cluster;
        for (int v : full_cluster)
            if (!on_bd[v]) cluster.push_back(v);
        if (cluster.empty()) continue; // boundary-only chatter: edge detector's job

        Vec2 centroid{0, 0};
        double gmin = 1e300;
        int best = cluster[0];
        for (int v : cluster) {
            centroid = centroid + m.nodes[v];
            if (g[v].norm() < gmin) {
                gmin = g[v].norm();
                best = v;
            }
        }
        centroid = centroid / (double)cluster.size();

        InteriorCritical c;
        c.grad_mag = gmin;
        c.cluster_diameter = diam;

        // quadratic fit over the cluster and its one-ring
        std::set<int> patch(cluster.begin(), cluster.end());
        for (int v : cluster)
            for (int w : nbr[v]) patch.insert(w);
        Eigen::MatrixXd A(patch.size(), 6);
        Eigen::VectorXd rhs(patch.size());
        int r = 0;
        for (int v : patch) {
            const Vec2 p = m.nodes[v] - centroid;
            A.row(r) << p.x * p.x, p.x * p.y, p.y * p.y, p.x, p.y, 1.0;
            rhs[r++] = eig.vector[v];
        }
        c.location = m.nodes[best];
        c.kind = CritKind::Degenerate;
        if ((int)patch.size() >= 6) {
            const Eigen::VectorXd q = A.colPivHouseholderQr().solve(rhs);
            Eigen::Matrix2d H;
            H << 2.0 * q[0], q[1], q[1], 2.0 * q[2];
            const Eigen::Vector2d sol = H.fullPivLu().solve(Eigen::Vector2d(-q[3], -q[4]));
            const Vec2 cand = centroid + Vec2{sol[0], sol[1]};
            if ((cand - centroid).norm() <= diam + 2.0 * m.h) c.location = cand;
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> hs(H);
            const double l1 = hs.eigenvalues()[0], l2 = hs.eigenvalues()[1];
            const double tau = 1e-6 * (std::abs(l1) + std::abs(l2));
            if (l1 > tau && l2 > tau)
                c.kind = CritKind::Min;
            else if (l1 < -tau && l2 < -tau)
                c.kind = CritKind::Max;
            else if (l1 < -tau && l2 > tau)
                c.kind = CritKind::Saddle;
        }
        if (near_vertex(c.location)) continue;
        rep.interior_points.push_back(c);
    }

    // edge criticals: sign change of the tangential derivative on Neumann edges
    for (int tag = 0; tag < 3; ++tag) {
        if (m.edge_bc[tag] != EdgeBC::Neumann) continue;
        const std::vector<int> chain = boundary_chain(m, tag);
        if (chain.size() < 3) continue;
        // tangential derivative from the nodal values along the chain: the
        // chain values are O(h^2) accurate, unlike the recovered boundary
        // gradient, so weak sign changes survive coarse meshes
        std::vector<double> arc(chain.size(), 0.0);
        for (size_t i = 1; i < chain.size(); ++i)
            arc[i] = arc[i - 1] + (m.nodes[chain[i]] - m.nodes[chain[i - 1]]).norm();
        std::vector<double> d(chain.size());
        for (size_t i = 0; i < chain.size(); ++i) {
            const size_t a = i == 0 ? 0 : i - 1;
            const size_t b = i + 1 < chain.size() ? i + 1 : i;
            d[i] = (eig.vector[chain[b]] - eig.vector[chain[a]]) / (arc[b] - arc[a]);
        }
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            if (in_continuum[chain[i]] || in_continuum[chain[i + 1]]) continue;
            if (!(d[i] * d[i + 1] < 0.0)) continue;
            // vertex exclusion by chain index: the chart cell size varies with
            // the conformal factor, so a metric radius overshoots in the
            // compressed parts of the chart; two cells clear of each vertex
            if (i < 2 || i + 4 > chain.size()) continue;
            const double s = d[i] / (d[i] - d[i + 1]);
            const Vec2 loc = m.nodes[chain[i]] + (m.nodes[chain[i + 1]] - m.nodes[chain[i]]) * s;
            EdgeCritical ec;
            ec.location = loc;
            ec.edge = tag;
            ec.sign_change = d[i] < 0.0 ? +1 : -1;
            rep.edge_points.push_back(ec);
        }
    }
    return rep;
}

DerivativeField killing_derivative(const EigenPair& eig, const KillingField& X,
                                   const TriangleMesh& m) {
    const std::vector<Vec2> g = recover_gradient(eig, m);
    const std::vector<char> on_bd = boundary_flags(m);
    DerivativeField d;
    d.values.resize(m.nodes.size());
    d.min_interior = 1e300;
    d.max_interior = -1e300;
    for (size_t i = 0; i < m.nodes.size(); ++i) {
        const Vec2 xv = X.evaluate({Chart::PoincareDisk, m.nodes[i]});
        d.values[i] = g[i].dot(xv); // du(X): chart components pair directly
        if (!on_bd[i]) {
            ++d.n_interior;
            if (d.values[i] > 0) ++d.n_pos_interior;
            if (d.values[i] < 0) ++d.n_neg_interior;
            if (d.values[i] < d.min_interior) {
                d.min_interior = d.values[i];
                d.argmin_interior = (int)i;
            }
            d.max_interior = std::max(d.max_interior, d.values[i]);
        }
    }
    if (d.argmin_interior < 0) {
        d.min_interior = d.max_interior = 0.0;
    }
    return d;
}

MonotoneResult certify_monotone(const DerivativeField& d, double margin) {
    MonotoneResult res;
    res.witness = d.argmin_interior;
    double amax = 0.0;
    for (double v : d.values) amax = std::max(amax, std::abs(v));
    if (d.n_interior == 0 || amax == 0.0) return res;
    const int needed = (int)std::ceil(0.99 * d.n_interior);
    if (d.min_interior > -margin * amax && d.n_pos_interior >= needed) {
        res.certified = true;
        res.sign = +1;
        res.witness = -1;
        return res;
    }
    if (d.max_interior < margin * amax && d.n_neg_interior >= needed) {
        res.certified = true;
        res.sign = -1;
        res.witness = -1;
        return res;
    }
    return res;
}

VertexExpansion vertex_coefficients(const EigenPair& eig, const TriangleMesh& m, int vertex) {
    if (vertex < 0 || vertex > 2) throw DomainError("vertex index must be 0, 1, or 2");
    const Curvature k = m.kappa;
    const GeodesicTriangle t(k, m.corners, m.edge_bc);
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const double angs[3] = {tm.alpha, tm.beta, tm.gamma};

    VertexExpansion out;
    out.vertex = vertex;
    out.beta = angs[vertex];
    out.nu = M_PI / out.beta;
    out.r1 = 6.0 * m.h;
    out.r2 = 12.0 * m.h;

    const int ea = (vertex + 1) % 3, eb = (vertex + 2) % 3; // adjacent edges
    const EdgeBC bca = m.edge_bc[ea], bcb = m.edge_bc[eb];
    if (bca == EdgeBC::Neumann && bcb == EdgeBC::Neumann)
        out.kind = VertexBCKind::Neumann;
    else if (bca == EdgeBC::Dirichlet && bcb == EdgeBC::Dirichlet)
        out.kind = VertexBCKind::Dirichlet;
    else
        out.kind = VertexBCKind::Mixed;

    // frame: vertex at the origin, the theta = 0 edge along +x; for mixed
    // vertices theta = 0 must be the Dirichlet edge (sin((n+1/2)nu theta) basis)
    int e0 = ea; // edge from `vertex` to vertex (vertex+2)%3
    if (out.kind == VertexBCKind::Mixed && m.edge_bc[ea] != EdgeBC::Dirichlet) e0 = eb;
    const int w = (e0 == ea) ? (vertex + 2) % 3 : (vertex + 1) % 3;
    const int w2 = (e0 == ea) ? (vertex + 1) % 3 : (vertex + 2) % 3;
    const ChartIsometry iso = ChartIsometry::to_origin(k, m.corners[vertex], m.corners[w]);
    const ChartIsometry back = iso.inverse();
    const Vec2 other = iso.apply(m.corners[w2]).xy();
    const double flip = other.y >= 0.0 ? 1.0 : -1.0;

    const MeshLocator loc(m);
    const int nq = 96;
    const double dth = out.beta / nq;

    auto channel = [&](double r, double freq, bool cosine) {
        double acc = 0.0;
        for (int j = 0; j < nq; ++j) {
            const double th = (j + 0.5) * dth;
            const Vec2 pl{r * std::cos(th), flip * r * std::sin(th)};
            ChartPoint pg{Chart::PoincareDisk, pl};
            Vec2 p;
            try {
                p = back.apply(pg).xy();
            } catch (const DomainError&) {
                throw RadiiOutsideTriangle("sampling arc leaves the chart");
            }
            const int el = loc.locate(p);
            if (el < 0) throw RadiiOutsideTriangle("sampling radius leaves the triangle");
            const double uval = loc.evaluate(eig.vector, p);
            acc += uval * (cosine ? std::cos(freq * th) : std::sin(freq * th)) * dth;
        }
        const double norm = freq == 0.0 ? out.beta : out.beta / 2.0;
        return acc / norm;
    };

    const double r1 = out.r1, r2 = out.r2;
    if (out.kind == VertexBCKind::Neumann) {
        const double c01 = channel(r1, 0.0, true), c02 = channel(r2, 0.0, true);
        const double c11 = channel(r1, out.nu, true), c12 = channel(r2, out.nu, true);
        // n = 0 channel: a0 + O(r^2); n = 1 channel / r^nu: a1 + O(r^2)
        out.a0 = (c01 * r2 * r2 - c02 * r1 * r1) / (r2 * r2 - r1 * r1);
        const double a1a = c11 / std::pow(r1, out.nu), a1b = c12 / std::pow(r2, out.nu);
        out.a1 = (a1a * r2 * r2 - a1b * r1 * r1) / (r2 * r2 - r1 * r1);
        out.uncertainty = std::abs(c01 - c02) + std::abs(a1a - a1b);
        out.residual = std::abs(c02 - out.a0) + std::abs(c12 - out.a1 * std::pow(r2, out.nu));
    } else if (out.kind == VertexBCKind::Mixed) {
        const double c1 = channel(r1, 0.5 * out.nu, false), c2 = channel(r2, 0.5 * out.nu, false);
        const double b1 = c1 / std::pow(r1, 0.5 * out.nu), b2 = c2 / std::pow(r2, 0.5 * out.nu);
        const double g1 = std::pow(r1, out.nu), g2 = std::pow(r2, out.nu);
        out.b0 = (b1 * g2 - b2 * g1) / (g2 - g1);
        out.uncertainty = std::abs(b1 - b2);
        out.residual = std::abs(c2 - out.b0 * std::pow(r2, 0.5 * out.nu));
    } else {
        const double c1 = channel(r1, out.nu, false), c2 = channel(r2, out.nu, false);
        const double d1 = c1 / std::pow(r1, out.nu), d2 = c2 / std::pow(r2, out.nu);
        const double g1 = std::pow(r1, out.nu), g2 = std::pow(r2, out.nu);
        out.c1 = (d1 * g2 - d2 * g1) / (g2 - g1);
        out.uncertainty = std::abs(d1 - d2);
        out.residual = std::abs(c2 - out.c1 * std::pow(r2, out.nu));
    }
    return out;
}

} // namespace curv
