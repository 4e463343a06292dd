#include <iostream>

#include "CLI11.hpp"

#include "curv/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"constant-curvature geodesic triangle eigenproblem toolkit"};
    app.require_subcommand(1);

    curv::CliOptions opt;
    auto add = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opt.config_path, "JSON configuration file")->required();
        sub->add_option("--out", opt.out_dir, "output directory")->required();
        sub->add_option("--jobs", opt.jobs, "worker pool size")->default_val(1);
        sub->add_flag("--emit-svg", opt.emit_svg, "write nodal.svg alongside the reports");
        return sub;
    };
    CLI::App* solve = add("solve", "solve one triangle eigenproblem and report its structure");
    CLI::App* verify = add("verify", "run a named verification suite at two mesh levels");
    CLI::App* sweep = add("sweep", "track eigenvalue branches along a curvature path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return curv::cmd_solve(opt);
        if (verify->parsed()) return curv::cmd_verify(opt);
        if (sweep->parsed()) return curv::cmd_sweep(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}
