#include "curv/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <thread>

#include "curv/errors.hpp"
#include "curv/io.hpp"

namespace fs = std::filesystem;

namespace curv {

namespace {

// CURVSPEC_LOG in {error, warn, info, debug}; default warn
int log_level() {
    static const int lvl = [] {
        const char* e = std::getenv("CURVSPEC_LOG");
        const std::string s = e ? e : "warn";
        if (s == "error") return 0;
        if (s == "info") return 2;
        if (s == "debug") return 3;
        return 1;
    }();
    return lvl;
}

void log_at(int lvl, const char* tag, const std::string& msg) {
    if (lvl <= log_level()) std::cerr << '[' << tag << "] " << msg << '\n';
}
void log_error(const std::string& m) { log_at(0, "error", m); }
void log_info(const std::string& m) { log_at(2, "info", m); }
void log_debug(const std::string& m) { log_at(3, "debug", m); }

// fixed worker pool; f(i) must only touch index-i state
void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& t : workers) t.join();
}

double get_number(const nlohmann::json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(key + " must be a number");
    return j[key].get<double>();
}

int get_int(const nlohmann::json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(key + " must be an integer");
    return j[key].get<int>();
}

bool get_bool(const nlohmann::json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError(key + " must be a boolean");
    return j[key].get<bool>();
}

const nlohmann::json& get_object(const nlohmann::json& j, const std::string& key) {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!j.contains(key)) return empty;
    if (!j[key].is_object()) throw ConfigError(key + " must be a JSON object");
    return j[key];
}

std::string bc_tag(EdgeBC bc) { return bc == EdgeBC::Dirichlet ? "D" : "N"; }

const char* status_csv(ClaimStatus s) {
    switch (s) {
        case ClaimStatus::Pass: return "pass";
        case ClaimStatus::Fail: return "fail";
        default: return "inconclusive";
    }
}

nlohmann::json meta_json(const CliOptions& opt, const std::string& command) {
    return {{"command", command},
            {"config", opt.config_path},
            {"jobs", opt.jobs},
            {"tool", "curvlab"}};
}

void write_outputs(const CliOptions& opt, const std::string& command,
                   const std::vector<std::pair<std::string, std::string>>& files) {
    fs::create_directories(opt.out_dir);
    for (const auto& [name, content] : files) {
        io::write_file((fs::path(opt.out_dir) / name).string(), content);
        log_debug("wrote " + name + " (" + std::to_string(content.size()) + " bytes)");
    }
    io::write_file((fs::path(opt.out_dir) / "meta.json").string(),
                   meta_json(opt, command).dump(2) + "\n");
}

// --- solve ------------------------------------------------------------------

nlohmann::json killing_report(const GeodesicTriangle& t, const EigenPair& eig,
                              const TriangleMesh& mesh) {
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const std::array<double, 3> sides{tm.a, tm.b, tm.c};
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return sides[a] > sides[b]; });
    nlohmann::json tried = nlohmann::json::array();
    for (int e : order) {
        try {
            const KillingField X = KillingField::loxodromic(t.kappa, t.vertices[(e + 1) % 3],
                                                            t.vertices[(e + 2) % 3]);
            const DerivativeField d = killing_derivative(eig, X, mesh);
            const MonotoneResult mr = certify_monotone(d);
            tried.push_back({{"axis_edge", e},
                             {"certified", mr.certified},
                             {"sign", mr.sign},
                             {"min_interior", d.min_interior},
                             {"max_interior", d.max_interior}});
            if (mr.certified)
                return {{"certified", true}, {"axis_edge", e}, {"sign", mr.sign},
                        {"min_interior", d.min_interior}, {"max_interior", d.max_interior},
                        {"tried", tried}};
        } catch (const std::exception& ex) {
            tried.push_back({{"axis_edge", e}, {"error", ex.what()}});
        }
    }
    return {{"certified", false}, {"tried", tried}};
}

int cmd_solve_impl(const CliOptions& opt) {
    const nlohmann::json cfg = io::load_json(opt.config_path);
    io::check_keys(cfg, {"triangle", "mesh", "solver", "analysis"}, "config");
    if (!cfg.contains("triangle")) throw ConfigError("config needs a triangle object");
    const GeodesicTriangle t = io::triangle_from_json(cfg["triangle"]);

    const nlohmann::json& mesh_cfg = get_object(cfg, "mesh");
    io::check_keys(mesh_cfg, {"h", "grading"}, "mesh");
    if (!mesh_cfg.contains("h")) throw ConfigError("mesh.h is required");
    const double h = get_number(mesh_cfg, "h", 0.0);
    const double grading = get_number(mesh_cfg, "grading", 1.0);
    if (h <= 0.0) throw ConfigError("mesh.h must be positive");
    if (grading < 1.0) throw ConfigError("mesh.grading must be >= 1");

    const nlohmann::json& solver_cfg = get_object(cfg, "solver");
    io::check_keys(solver_cfg, {"k", "tol", "max_iter", "shift"}, "solver");
    const int k = get_int(solver_cfg, "k", 6);
    const double tol = get_number(solver_cfg, "tol", 1e-9);
    if (k < 2) throw ConfigError("solver.k must be at least 2");
    if (tol <= 0.0) throw ConfigError("solver.tol must be positive");
    get_number(solver_cfg, "shift", 0.0);
    get_int(solver_cfg, "max_iter", 0);

    const nlohmann::json& an_cfg = get_object(cfg, "analysis");
    io::check_keys(an_cfg, {"crit_tol_rel", "nodal"}, "analysis");
    const double crit_tol_rel = get_number(an_cfg, "crit_tol_rel", -1.0);
    const bool want_nodal = get_bool(an_cfg, "nodal", true);

    log_info("solve: kappa=" + std::to_string(t.kappa.kappa) + " h=" + std::to_string(h));
    const TriangleMesh mesh = generate_mesh(t, h, grading);
    const DiscreteProblem prob = assemble(mesh);
    Spectrum spec;
    try {
        spec = solve_smallest(prob, k, tol);
    } catch (const NoConvergence& e) {
        log_error(std::string("solver did not converge: ") + e.what());
        return 2;
    }

    const bool neumann = std::all_of(t.edge_bc.begin(), t.edge_bc.end(),
                                     [](EdgeBC b) { return b == EdgeBC::Neumann; });
    const int idx = neumann ? 1 : 0;
    const EigenPair& eig = spec.pairs[idx];

    double crit_tol = -1.0;
    if (crit_tol_rel > 0.0) {
        double gmax = 0.0;
        for (const Vec2& g : recover_gradient(eig, mesh)) gmax = std::max(gmax, g.norm());
        crit_tol = crit_tol_rel * gmax;
    }
    const CriticalReport crit = detect_critical_points(eig, mesh, crit_tol);
    const NodalSet nodal = want_nodal ? extract_nodal_set(eig, mesh) : NodalSet{};

    nlohmann::json report;
    report["kappa"] = t.kappa.kappa;
    report["bc"] = {bc_tag(t.edge_bc[0]), bc_tag(t.edge_bc[1]), bc_tag(t.edge_bc[2])};
    report["mesh"] = {{"h", mesh.h},
                      {"n_nodes", mesh.nodes.size()},
                      {"n_elements", mesh.elements.size()},
                      {"n_dofs", spec.n_dofs}};
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : spec.pairs)
        pairs.push_back({{"index", p.index}, {"value", p.value}, {"residual", p.residual}});
    report["spectrum"] = pairs;
    report["eigen_gap"] = eigen_gap(spec);
    report["analysis_index"] = idx;

    nlohmann::json interior = nlohmann::json::array();
    for (const auto& c : crit.interior_points)
        interior.push_back({{"x", c.location.x},
                            {"y", c.location.y},
                            {"grad_mag", c.grad_mag},
                            {"continuum", c.continuum}});
    nlohmann::json edge = nlohmann::json::array();
    for (const auto& c : crit.edge_points)
        edge.push_back({{"x", c.location.x},
                        {"y", c.location.y},
                        {"edge", c.edge},
                        {"sign_change", c.sign_change}});
    report["critical_points"] = {{"tol", crit.tol},
                                 {"grad_max", crit.grad_max},
                                 {"interior", interior},
                                 {"edge", edge}};

    if (want_nodal) {
        const char* topo = nodal.topology == NodalTopology::Empty       ? "empty"
                           : nodal.topology == NodalTopology::SimpleArc ? "simple_arc"
                           : nodal.topology == NodalTopology::Loop      ? "loop"
                                                                        : "graph";
        nlohmann::json ends = nlohmann::json::array();
        for (const auto& ep : nodal.endpoints)
            ends.push_back(
                {{"x", ep.point.x}, {"y", ep.point.y}, {"edge", ep.edge}, {"vertex", ep.vertex}});
        report["nodal"] = {{"topology", topo},
                           {"n_polylines", nodal.polylines.size()},
                           {"endpoints", ends}};
    }

    nlohmann::json expansions = nlohmann::json::array();
    for (int v = 0; v < 3; ++v) {
        try {
            const VertexExpansion ve = vertex_coefficients(eig, mesh, v);
            expansions.push_back({{"vertex", v},
                                  {"beta", ve.beta},
                                  {"nu", ve.nu},
                                  {"a0", ve.a0},
                                  {"a1", ve.a1},
                                  {"b0", ve.b0},
                                  {"c1", ve.c1},
                                  {"residual", ve.residual},
                                  {"uncertainty", ve.uncertainty}});
        } catch (const std::exception& e) {
            expansions.push_back({{"vertex", v}, {"error", e.what()}});
        }
    }
    report["vertex_expansions"] = expansions;
    report["killing"] = killing_report(t, eig, mesh);

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("spectrum.csv", io::spectrum_csv(spec));
    files.emplace_back("report.json", report.dump(2) + "\n");
    if (opt.emit_svg) files.emplace_back("nodal.svg", io::nodal_svg(mesh, eig.vector, nodal, crit));
    write_outputs(opt, "solve", files);
    return 0;
}

// --- verify -------------------------------------------------------------

struct SuiteResult {
    std::vector<VerificationCase> cases;   // claim suites
    std::vector<SphereProbeRow> rows;      // probe suites
    bool probe = false;
};

VerificationCase inconclusive_case(const GeodesicTriangle& t, const std::string& why) {
    return VerificationCase{
        t, false, {ClaimResult{"suite_case", ClaimStatus::Inconclusive, 0, 0, 0, {}, why}}};
}

// the edge opposite the largest angle has both endpoint angles below pi/2,
// so it always qualifies as the Neumann edge of a double-Dirichlet case
GeodesicTriangle retag_double_dirichlet(const GeodesicTriangle& t) {
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const std::array<double, 3> ang{tm.alpha, tm.beta, tm.gamma};
    const int n_edge =
        (int)(std::max_element(ang.begin(), ang.end()) - ang.begin());
    std::array<EdgeBC, 3> bc{EdgeBC::Dirichlet, EdgeBC::Dirichlet, EdgeBC::Dirichlet};
    bc[n_edge] = EdgeBC::Neumann;
    return GeodesicTriangle(t.kappa, t.vertices, bc);
}

VerificationCase run_onequarter(const GeodesicTriangle& t, int divisions) {
    const TriangleMetrics tm = triangle_angles_and_sides(t);
    const double min_side = std::min({tm.a, tm.b, tm.c});
    double worst = 1e300, h_fine = 0.0;
    try {
        for (int d : {divisions, divisions + divisions / 2}) {
            const TriangleMesh mesh = generate_mesh(t, min_side / d, 1.0);
            const Spectrum s = solve_smallest(assemble(mesh), 3);
            worst = std::min(worst, s.pairs[1].value);
            h_fine = mesh.h;
        }
    } catch (const std::exception& e) {
        return inconclusive_case(t, e.what());
    }
    ClaimResult c{"one_quarter",
                  worst > 0.26 ? ClaimStatus::Pass : ClaimStatus::Fail,
                  worst - 0.26,
                  h_fine,
                  0.26,
                  {},
                  "min mu2 over both levels"};
    return VerificationCase{t, true, {c}};
}

SuiteResult run_suite(const std::string& name, int seed, int count, int divisions, int jobs) {
    SuiteResult res;
    std::vector<GeodesicTriangle> cases;
    std::function<VerificationCase(const GeodesicTriangle&, int)> runner;
    std::vector<int> case_divisions; // per-case override, 0 = suite default

    if (name == "neumann_nonacute") {
        cases = nonacute_hyperbolic_family(count > 0 ? count : 20, seed);
        runner = [](const GeodesicTriangle& t, int d) { return verify_hotspots_neumann(t, d); };
    } else if (name == "mixed_single") {
        cases = mixed_hyperbolic_family(count > 0 ? count : 10, seed);
        runner = [](const GeodesicTriangle& t, int d) { return verify_mixed(t, d); };
    } else if (name == "mixed_double") {
        for (const auto& t : mixed_hyperbolic_family(count > 0 ? count : 10, seed))
            cases.push_back(retag_double_dirichlet(t));
        // kappa = 0 control: right isosceles with the known edge critical point
        cases.push_back(GeodesicTriangle(
            Curvature(0.0),
            {ChartPoint(Chart::Klein, 0.0, 0.0), ChartPoint(Chart::Klein, 1.0, 0.0),
             ChartPoint(Chart::Klein, 1.0, 1.0)},
            {EdgeBC::Dirichlet, EdgeBC::Neumann, EdgeBC::Dirichlet}));
        runner = [](const GeodesicTriangle& t, int d) { return verify_mixed(t, d); };
    } else if (name == "finiteness") {
        cases.push_back(nonacute_hyperbolic_family(1, seed)[0]);
        cases.push_back(make_triangle_from_angles(Curvature(1.0), 0.4 * M_PI, M_PI / 2, M_PI / 2));
        cases.push_back(
            make_triangle_from_angles(Curvature(1.0), 0.4 * M_PI, 0.45 * M_PI, 0.45 * M_PI));
        case_divisions = {0, 0, std::max(divisions, 16)};
        runner = [](const GeodesicTriangle& t, int d) { return verify_finiteness(t, d); };
    } else if (name == "onequarter") {
        cases = nonacute_hyperbolic_family(count > 0 ? count : 20, seed);
        runner = [](const GeodesicTriangle& t, int d) { return run_onequarter(t, d); };
    } else if (name == "sphere_probe" || name == "mixed_ineq") {
        res.probe = true;
        const std::vector<GeodesicTriangle> family =
            name == "sphere_probe" ? spherical_family(count > 0 ? count : 6, seed)
                                   : nonacute_hyperbolic_family(count > 0 ? count : 20, seed);
        std::vector<std::vector<SphereProbeRow>> parts(family.size());
        parallel_for((int)family.size(), jobs, [&](int i) {
            parts[i] = probe_sphere_mixed_inequality({family[i]}, divisions);
            for (auto& r : parts[i]) r.triangle_index = i;
        });
        for (auto& p : parts) res.rows.insert(res.rows.end(), p.begin(), p.end());
        return res;
    } else {
        throw ConfigError("unknown suite \"" + name + "\"");
    }

    res.cases.resize(cases.size(), VerificationCase{cases[0], false, {}});
    parallel_for((int)cases.size(), jobs, [&](int i) {
        const int d = (!case_divisions.empty() && case_divisions[i] > 0) ? case_divisions[i]
                                                                         : divisions;
        try {
            res.cases[i] = runner(cases[i], d);
        } catch (const std::exception& e) {
            res.cases[i] = inconclusive_case(cases[i], e.what());
        }
        log_info("suite " + name + ": case " + std::to_string(i) + " done");
    });
    return res;
}

int cmd_verify_impl(const CliOptions& opt) {
    const nlohmann::json cfg = io::load_json(opt.config_path);
    io::check_keys(cfg, {"suite"}, "config");
    const nlohmann::json& suite_cfg = get_object(cfg, "suite");
    io::check_keys(suite_cfg, {"name", "seed", "count", "divisions"}, "suite");
    if (!suite_cfg.contains("name") || !suite_cfg["name"].is_string())
        throw ConfigError("suite.name is required");
    const std::string name = suite_cfg["name"].get<std::string>();
    const int seed = get_int(suite_cfg, "seed", 1);
    const int count = get_int(suite_cfg, "count", -1);
    const int divisions = get_int(suite_cfg, "divisions", name == "mixed_double" ? 12 : 8);

    log_info("verify: suite=" + name + " seed=" + std::to_string(seed));
    const SuiteResult res = run_suite(name, seed, count, divisions, opt.jobs);

    nlohmann::json suite_json;
    suite_json["suite"] = name;
    suite_json["seed"] = seed;
    suite_json["divisions"] = divisions;
    std::string summary;
    int exit_code = 0;

    if (res.probe) {
        nlohmann::json rows = nlohmann::json::array();
        summary = "triangle,edge,mu2,lambda1,margin,error_bar,conclusive\n";
        for (const auto& r : res.rows) {
            rows.push_back(io::probe_row_json(r));
            summary += std::to_string(r.triangle_index) + ',' + std::to_string(r.edge) + ',' +
                       io::fmt17(r.mu2) + ',' + io::fmt17(r.lambda1) + ',' + io::fmt17(r.margin) +
                       ',' + io::fmt17(r.error_bar) + ',' + (r.conclusive ? "1" : "0") + '\n';
            // the hyperbolic inequality is a theorem: flag any real violation
            if (name == "mixed_ineq" && r.margin + r.error_bar < 0.0) exit_code = 1;
        }
        suite_json["rows"] = rows;
    } else {
        nlohmann::json case_list = nlohmann::json::array();
        summary = "case,claim,status,margin,h\n";
        bool any_fail = false, any_incon = false;
        for (size_t i = 0; i < res.cases.size(); ++i) {
            const VerificationCase& vc = res.cases[i];
            case_list.push_back(io::case_json(vc));
            for (const auto& c : vc.claims)
                summary += std::to_string(i) + ',' + c.id + ',' + status_csv(c.status) + ',' +
                           io::fmt17(c.margin) + ',' + io::fmt17(c.h) + '\n';
            if (vc.asserted && vc.any_failed()) any_fail = true;
            if (vc.asserted && vc.any_inconclusive()) any_incon = true;
        }
        suite_json["cases"] = case_list;
        exit_code = any_fail ? 1 : (any_incon ? 4 : 0);
    }

    write_outputs(opt, "verify",
                  {{"suite.json", suite_json.dump(2) + "\n"}, {"summary.csv", summary}});
    if (exit_code) log_error("suite " + name + " exit " + std::to_string(exit_code));
    return exit_code;
}

// --- sweep -------------------------------------------------------------

int cmd_sweep_impl(const CliOptions& opt) {
    const nlohmann::json cfg = io::load_json(opt.config_path);
    io::check_keys(cfg, {"triangle", "sweep", "solver", "mesh"}, "config");
    if (!cfg.contains("triangle")) throw ConfigError("config needs a triangle object");
    const GeodesicTriangle t = io::triangle_from_json(cfg["triangle"]);
    for (const auto& v : t.vertices)
        if (v.chart != Chart::Klein) throw ConfigError("sweep triangles must use the klein chart");

    const nlohmann::json& sweep_cfg = get_object(cfg, "sweep");
    io::check_keys(sweep_cfg, {"kappa_start", "kappa_end", "steps"}, "sweep");
    if (!sweep_cfg.contains("kappa_start") || !sweep_cfg.contains("kappa_end") ||
        !sweep_cfg.contains("steps"))
        throw ConfigError("sweep needs kappa_start, kappa_end, and steps");
    const double kappa_start = get_number(sweep_cfg, "kappa_start", 0.0);
    const double kappa_end = get_number(sweep_cfg, "kappa_end", 0.0);
    const int steps = get_int(sweep_cfg, "steps", 0);

    const nlohmann::json& solver_cfg = get_object(cfg, "solver");
    io::check_keys(solver_cfg, {"k"}, "solver");
    const int k = get_int(solver_cfg, "k", 4);
    const nlohmann::json& mesh_cfg = get_object(cfg, "mesh");
    io::check_keys(mesh_cfg, {"divisions"}, "mesh");
    const int divisions = get_int(mesh_cfg, "divisions", 8);

    log_info("sweep: kappa " + std::to_string(kappa_start) + " -> " + std::to_string(kappa_end) +
             " in " + std::to_string(steps) + " steps");
    BranchData partial;
    try {
        const BranchData b =
            sweep(t.vertices, t.edge_bc, kappa_start, kappa_end, steps, k, divisions, &partial);
        write_outputs(opt, "sweep",
                      {{"branches.csv", io::branches_csv(b)},
                       {"events.json", io::events_json(b).dump(2) + "\n"}});
        return 0;
    } catch (const StepFailure& e) {
        log_error("sweep failed at t=" + std::to_string(e.t) + ": " + e.what());
        nlohmann::json ev = io::events_json(partial);
        ev["failure"] = {{"t", e.t}, {"what", e.what()}};
        write_outputs(opt, "sweep",
                      {{"branches.csv", io::branches_csv(partial)},
                       {"events.json", ev.dump(2) + "\n"}});
        return 2;
    }
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        log_error(std::string("config error: ") + e.what());
        return 3;
    } catch (const DomainError& e) {
        log_error(std::string("config error: ") + e.what());
        return 3;
    }
}

} // namespace

int cmd_solve(const CliOptions& opt) { return guarded([&] { return cmd_solve_impl(opt); }); }
int cmd_verify(const CliOptions& opt) { return guarded([&] { return cmd_verify_impl(opt); }); }
int cmd_sweep(const CliOptions& opt) { return guarded([&] { return cmd_sweep_impl(opt); }); }

} // namespace curv
