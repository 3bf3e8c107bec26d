#include "hhoplast/io/benchmarks.hpp"
#include "hhoplast/mesh/msh_io.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hhoplast;

int main(int argc, char** argv)
{
    CLI::App app { "HHO solver for finite elastoplasticity on polytopal meshes" };
    app.require_subcommand(1);

    std::string config_path, mesh_path, output_dir;
    double beta0_override = -1.0;
    std::vector<double> sweep_values;

    CLI::App* run = app.add_subcommand("run", "execute one configured benchmark");
    run->add_option("config", config_path, "JSON problem description")->required();
    run->add_option("--beta0", beta0_override, "override the stabilization parameter");
    run->add_option("--output", output_dir, "override the output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "repeat a benchmark over beta0 values");
    sweep->add_option("config", config_path, "JSON problem description")->required();
    sweep->add_option("--beta0", sweep_values, "beta0 values to sweep")->required()
        ->expected(1, -1);
    sweep->add_option("--output", output_dir, "override the output directory");

    CLI::App* validate = app.add_subcommand("validate", "check a mesh file");
    validate->add_option("mesh", mesh_path, "MSH 2.2 mesh file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) {
            const Mesh mesh = import_mesh(mesh_path);
            const MeshReport report = validate_mesh(mesh);
            std::cout << mesh_path << ": " << mesh.cells.size() << " cells, "
                      << mesh.faces.size() << " faces, " << mesh.nodes.size() << " nodes\n";
            if (!report.ok()) {
                std::cout << report.summary();
                return 1;
            }
            std::cout << "mesh is valid\n";
            return 0;
        }

        ProblemConfig cfg = parse_config(config_path);
        if (beta0_override > 0.0)
            cfg.solver.beta0 = beta0_override;
        if (!output_dir.empty())
            cfg.output_dir = output_dir;

        if (run->parsed())
            return run_benchmark(cfg, std::cout);
        return run_sweep(cfg, sweep_values, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
