#include "curv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "curv/errors.hpp"

namespace curv::io {

namespace {

const char* status_name(ClaimStatus s) {
    switch (s) {
        case ClaimStatus::Pass: return "pass";
        case ClaimStatus::Fail: return "fail";
        default: return "inconclusive";
    }
}

const char* topology_name(NodalTopology t) {
    switch (t) {
        case NodalTopology::Empty: return "empty";
        case NodalTopology::SimpleArc: return "simple_arc";
        case NodalTopology::Loop: return "loop";
        default: return "graph";
    }
}

const char* kind_name(CritKind k) {
    switch (k) {
        case CritKind::Min: return "min";
        case CritKind::Max: return "max";
        case CritKind::Saddle: return "saddle";
        default: return "degenerate";
    }
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << content;
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config: " + path);
    nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
    if (j.is_discarded()) throw ConfigError("malformed JSON in " + path);
    return j;
}

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
}

GeodesicTriangle triangle_from_json(const nlohmann::json& j) {
    check_keys(j, {"curvature", "chart", "vertices", "bc"}, "triangle");
    if (!j.contains("curvature") || !j["curvature"].is_number())
        throw ConfigError("triangle.curvature must be a number");
    if (!j.contains("chart") || !j["chart"].is_string())
        throw ConfigError("triangle.chart must be a string");
    const std::string chart_name = j["chart"].get<std::string>();
    Chart chart;
    if (chart_name == "klein")
        chart = Chart::Klein;
    else if (chart_name == "poincare")
        chart = Chart::PoincareDisk;
    else if (chart_name == "halfplane")
        chart = Chart::HalfPlane;
    else
        throw ConfigError("triangle.chart must be klein, poincare, or halfplane");
    if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].size() != 3)
        throw ConfigError("triangle.vertices must be an array of three [x, y] pairs");
    std::array<ChartPoint, 3> vertices;
    for (int i = 0; i < 3; ++i) {
        const auto& v = j["vertices"][i];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError("triangle.vertices entries must be [x, y] number pairs");
        vertices[i] = ChartPoint(chart, v[0].get<double>(), v[1].get<double>());
    }
    std::array<EdgeBC, 3> bc{EdgeBC::Neumann, EdgeBC::Neumann, EdgeBC::Neumann};
    if (j.contains("bc")) {
        if (!j["bc"].is_array() || j["bc"].size() != 3)
            throw ConfigError("triangle.bc must be an array of three \"N\"/\"D\" tags");
        for (int i = 0; i < 3; ++i) {
            const std::string tag = j["bc"][i].is_string() ? j["bc"][i].get<std::string>() : "";
            if (tag == "N")
                bc[i] = EdgeBC::Neumann;
            else if (tag == "D")
                bc[i] = EdgeBC::Dirichlet;
            else
                throw ConfigError("triangle.bc tags must be \"N\" or \"D\"");
        }
    }
    try {
        return GeodesicTriangle(Curvature(j["curvature"].get<double>()), vertices, bc);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid triangle: ") + e.what());
    }
}

std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "index,value,residual\n";
    for (const auto& p : s.pairs)
        out << p.index << ',' << fmt17(p.value) << ',' << fmt17(p.residual) << '\n';
    return out.str();
}

std::string branches_csv(const BranchData& b) {
    std::ostringstream out;
    out << "t,kappa,branch,value,overlap,crit_count\n";
    for (const auto& s : b.steps)
        for (size_t i = 0; i < s.values.size(); ++i)
            out << fmt17(s.t) << ',' << fmt17(s.kappa) << ',' << i << ',' << fmt17(s.values[i])
                << ',' << fmt17(s.overlaps[i]) << ',' << s.crit_count << '\n';
    return out.str();
}

nlohmann::json events_json(const BranchData& b) {
    nlohmann::json crossings = nlohmann::json::array();
    for (const auto& e : b.events)
        crossings.push_back(
            {{"t", e.t}, {"branch_a", e.branch_a}, {"branch_b", e.branch_b}, {"what", e.what}});
    nlohmann::json critical = nlohmann::json::array();
    for (const auto& row : track_critical_points(b))
        if (row.event) critical.push_back({{"t", row.t}, {"count", row.count}});
    return {{"crossings", crossings}, {"critical_count_changes", critical}};
}

nlohmann::json claim_json(const ClaimResult& c) {
    return {{"id", c.id},
            {"status", status_name(c.status)},
            {"margin", c.margin},
            {"h", c.h},
            {"tol", c.tol},
            {"where", {c.where.x, c.where.y}},
            {"detail", c.detail}};
}

nlohmann::json case_json(const VerificationCase& vc) {
    const TriangleMetrics tm = triangle_angles_and_sides(vc.triangle);
    nlohmann::json claims = nlohmann::json::array();
    for (const auto& c : vc.claims) claims.push_back(claim_json(c));
    return {{"kappa", vc.triangle.kappa.kappa},
            {"angles", {tm.alpha, tm.beta, tm.gamma}},
            {"asserted", vc.asserted},
            {"claims", claims}};
}

nlohmann::json probe_row_json(const SphereProbeRow& r) {
    return {{"triangle", r.triangle_index}, {"edge", r.edge},       {"mu2", r.mu2},
            {"lambda1", r.lambda1},         {"margin", r.margin},   {"error_bar", r.error_bar},
            {"conclusive", r.conclusive}};
}

std::string nodal_svg(const TriangleMesh& m, const Eigen::VectorXd& u, const NodalSet& nodal,
                      const CriticalReport& crit) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& p : m.nodes) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const double span = std::max(x1 - x0, y1 - y0);
    const double scale = 760.0 / (span > 0 ? span : 1.0);
    auto X = [&](double x) { return 20.0 + (x - x0) * scale; };
    auto Y = [&](double y) { return 780.0 - (y - y0) * scale; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 800 800\">\n";

    // 10-level contour family, per-element marching segments
    const double umin = u.minCoeff(), umax = u.maxCoeff();
    for (int lev = 1; lev <= 10; ++lev) {
        const double c = umin + lev * (umax - umin) / 11.0;
        for (const auto& e : m.elements) {
            Vec2 pts[2];
            int np = 0;
            for (int i = 0; i < 3 && np < 2; ++i) {
                const int a = e[i], b = e[(i + 1) % 3];
                const double ua = u[a] - c, ub = u[b] - c;
                if ((ua > 0) == (ub > 0) || ua == ub) continue;
                const double s = ua / (ua - ub);
                pts[np++] = m.nodes[a] + (m.nodes[b] - m.nodes[a]) * s;
            }
            if (np == 2)
                out << "<line x1=\"" << fmt6(X(pts[0].x)) << "\" y1=\"" << fmt6(Y(pts[0].y))
                    << "\" x2=\"" << fmt6(X(pts[1].x)) << "\" y2=\"" << fmt6(Y(pts[1].y))
                    << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        }
    }

    // triangle boundary, BC color coded
    for (const auto& be : m.boundary_edges) {
        const char* color = m.edge_bc[be[2]] == EdgeBC::Dirichlet ? "#d62728" : "#1f77b4";
        out << "<line x1=\"" << fmt6(X(m.nodes[be[0]].x)) << "\" y1=\"" << fmt6(Y(m.nodes[be[0]].y))
            << "\" x2=\"" << fmt6(X(m.nodes[be[1]].x)) << "\" y2=\"" << fmt6(Y(m.nodes[be[1]].y))
            << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    }

    // nodal polylines: the only <path> elements in the file
    for (const auto& line : nodal.polylines) {
        if (line.empty()) continue;
        out << "<path d=\"M " << fmt6(X(line[0].x)) << ' ' << fmt6(Y(line[0].y));
        for (size_t i = 1; i < line.size(); ++i)
            out << " L " << fmt6(X(line[i].x)) << ' ' << fmt6(Y(line[i].y));
        out << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
    }

    for (const auto& c : crit.interior_points)
        out << "<circle cx=\"" << fmt6(X(c.location.x)) << "\" cy=\"" << fmt6(Y(c.location.y))
            << "\" r=\"5\" fill=\"#2ca02c\"><title>" << kind_name(c.kind)
            << (c.continuum ? " continuum" : "") << "</title></circle>\n";
    for (const auto& c : crit.edge_points)
        out << "<circle cx=\"" << fmt6(X(c.location.x)) << "\" cy=\"" << fmt6(Y(c.location.y))
            << "\" r=\"5\" fill=\"#ff7f0e\"><title>edge</title></circle>\n";

    out << "</svg>\n";
    return out.str();
}

} // namespace curv::io
