#include "hhoplast/io/benchmarks.hpp"

#include "hhoplast/io/curves.hpp"
#include "hhoplast/io/vtk.hpp"
#include "hhoplast/mesh/build.hpp"
#include "hhoplast/mesh/merge.hpp"
#include "hhoplast/mesh/msh_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hhoplast {

namespace {

int tag_or_throw(const Mesh& mesh, const std::string& name)
{
    const int id = mesh.tag_id(name);
    if (id < 0)
        throw std::invalid_argument("mesh has no boundary tag '" + name + "'");
    return id;
}

BoundaryCondition fixed(std::array<bool, 3> mask)
{
    BoundaryCondition bc;
    bc.kind = BoundaryCondition::Kind::dirichlet;
    bc.mask = mask;
    bc.value = [](const Vec3&, double) { return Vec3::Zero().eval(); };
    return bc;
}

Mesh build_mesh(const ProblemConfig& cfg)
{
    if (cfg.mesh_from_file) {
        Mesh mesh = import_mesh(cfg.mesh_path);
        const MeshReport report = validate_mesh(mesh);
        if (!report.ok())
            throw std::invalid_argument("invalid mesh '" + cfg.mesh_path + "': "
                                        + report.summary());
        return mesh;
    }
    const auto& d = cfg.divisions;
    if (cfg.benchmark == "cook")
        return build_cook_mesh(d[0] > 0 ? d[0] : 32);
    if (cfg.benchmark == "necking")
        return build_necking_mesh(d[0] > 0 ? d[0] : 10, d[1] > 0 ? d[1] : 40);
    if (cfg.benchmark == "sphere")
        return build_sphere_octant_mesh(d[0] > 0 ? d[0] : 16, d[1] > 0 ? d[1] : 2, 0.8, 1.0);
    // custom structured mesh on the unit box
    CellKind kind = CellKind::quad;
    if (cfg.cell_kind == "triangle")
        kind = CellKind::triangle;
    else if (cfg.cell_kind == "hex")
        kind = CellKind::hex;
    else if (cfg.cell_kind == "tet")
        kind = CellKind::tet;
    return build_structured_mesh(kind, d, Box {});
}

} // namespace

BenchmarkSetup make_benchmark(const ProblemConfig& cfg)
{
    BenchmarkSetup s;
    s.mesh = build_mesh(cfg);
    if (cfg.merge_fraction > 0.0) {
        if (s.mesh.dim != 2)
            throw std::invalid_argument("'mesh.merge_fraction' needs a 2D mesh");
        s.mesh = merge_cells(s.mesh, cfg.merge_fraction, cfg.merge_seed);
    }

    s.degrees = cfg.degrees;
    s.orders = QuadOrders::defaults(cfg.degrees);
    if (cfg.quadrature_order >= 0)
        s.orders.behavior = cfg.quadrature_order;
    s.material = cfg.material;
    s.law = cfg.law;
    s.solver = cfg.solver;
    s.run.steps = cfg.steps;

    const double scale = cfg.load_scale;
    if (cfg.benchmark == "cook") {
        s.loads.boundary[tag_or_throw(s.mesh, "clamped")] = fixed({ true, true, true });
        BoundaryCondition load;
        load.kind = BoundaryCondition::Kind::neumann;
        load.follower = cfg.follower_load;
        // total F_y = 5 kN spread over the 16 mm edge (unit thickness)
        load.value = [scale](const Vec3&, double t) {
            return Vec3(0.0, 312.5 * scale * t, 0.0);
        };
        s.loads.boundary[tag_or_throw(s.mesh, "loaded")] = load;
        s.run.reaction_tag = tag_or_throw(s.mesh, "clamped");
        s.run.control = [scale](double t) { return 5000.0 * scale * t; };
        s.control_name = "load_N";
        s.reaction_axis = Vec3::UnitY();
    } else if (cfg.benchmark == "necking") {
        s.loads.boundary[tag_or_throw(s.mesh, "axis")] = fixed({ true, false, false });
        s.loads.boundary[tag_or_throw(s.mesh, "midplane")] = fixed({ false, true, false });
        BoundaryCondition pull;
        pull.kind = BoundaryCondition::Kind::dirichlet;
        pull.mask = { false, true, false };
        pull.value = [scale](const Vec3&, double t) {
            return Vec3(0.0, 5.0 * scale * t, 0.0);
        };
        s.loads.boundary[tag_or_throw(s.mesh, "end")] = pull;
        s.run.reaction_tag = tag_or_throw(s.mesh, "end");
        s.run.control = [scale](double t) { return 5.0 * scale * t; };
        s.control_name = "end_displacement_mm";
        s.reaction_axis = Vec3::UnitY();
    } else if (cfg.benchmark == "sphere") {
        s.loads.boundary[tag_or_throw(s.mesh, "symx")] = fixed({ true, false, false });
        s.loads.boundary[tag_or_throw(s.mesh, "symy")] = fixed({ false, true, false });
        s.loads.boundary[tag_or_throw(s.mesh, "symz")] = fixed({ false, false, true });
        BoundaryCondition pressure;
        pressure.kind = BoundaryCondition::Kind::neumann;
        pressure.follower = cfg.follower_load;
        // nominal ramp to 3 MPa, past the perfect-plasticity limit load
        pressure.value = [scale](const Vec3& x, double t) {
            return Vec3((3.0 * scale * t / x.norm()) * x);
        };
        s.loads.boundary[tag_or_throw(s.mesh, "inner")] = pressure;
        s.run.reaction_tag = tag_or_throw(s.mesh, "symz");
        s.run.control = [scale](double t) { return 3.0 * scale * t; };
        s.control_name = "pressure_MPa";
        s.reaction_axis = Vec3::UnitZ();
    } else {
        for (const auto& cbc : cfg.custom_bcs) {
            BoundaryCondition bc;
            bc.kind = cbc.dirichlet ? BoundaryCondition::Kind::dirichlet
                                    : BoundaryCondition::Kind::neumann;
            bc.mask = cbc.mask;
            bc.follower = !cbc.dirichlet && cfg.follower_load;
            const Vec3 v = cbc.value;
            bc.value = [v, scale](const Vec3&, double t) { return Vec3(scale * t * v); };
            const int tag = tag_or_throw(s.mesh, cbc.tag);
            s.loads.boundary[tag] = bc;
            if (s.run.reaction_tag < 0 && cbc.dirichlet)
                s.run.reaction_tag = tag;
        }
        if (cfg.body_force.squaredNorm() > 0.0) {
            const Vec3 b = cfg.body_force;
            s.loads.body = [b, scale](const Vec3&, double t) { return Vec3(scale * t * b); };
        }
        s.run.control = [scale](double t) { return scale * t; };
        s.control_name = "load_factor";
        s.reaction_axis = Vec3::UnitY();
    }
    return s;
}

int run_benchmark(const ProblemConfig& cfg, std::ostream& log)
{
    BenchmarkSetup setup = make_benchmark(cfg);
    log << "benchmark " << cfg.benchmark << ": " << setup.mesh.cells.size() << " cells, HHO("
        << setup.degrees.k << ";" << setup.degrees.l << "), beta0 = " << setup.solver.beta0
        << "\n";

    Discretization disc(setup.mesh, setup.degrees, setup.orders, setup.solver.parallel);
    GlobalSolver solver(disc, setup.material, setup.law, setup.loads, setup.solver);
    SystemState state = make_state(disc);

    RunOptions run = setup.run;
    if (cfg.solver.verbose)
        run.on_step = [&log, &setup](int step, const StepRecord& rec) {
            log << "  step " << step << ": t = " << rec.time << ", " << setup.control_name
                << " = " << rec.control << ", iterations = " << rec.newton.iterations << "\n";
        };
    const RunResult result = solver.run_load_program(state, run);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);

    if (cfg.write_curves)
        write_curves((dir / "curves.tsv").string(), result.records, setup.reaction_axis);
    if (cfg.write_fields) {
        const SystemState initial = make_state(disc);
        export_mesh_snapshot((dir / "mesh_initial.vtk").string(), disc, initial);
        export_mesh_snapshot((dir / "mesh_final.vtk").string(), disc, state);
        export_qp_cloud((dir / "qp_final.vtk").string(), disc, state, solver.piola(),
                        solver.defgrad());
    }

    int total_iterations = 0;
    for (const auto& rec : result.records)
        total_iterations += rec.newton.iterations;
    const StepRecord& last = result.records.back();
    std::vector<std::string> extra = {
        "benchmark: " + cfg.benchmark,
        "cells: " + std::to_string(setup.mesh.cells.size()),
        "degrees: HHO(" + std::to_string(setup.degrees.k) + ";" + std::to_string(setup.degrees.l)
            + ")",
        "completed: " + std::string(result.completed ? "true" : "false"),
        "accepted_steps: " + std::to_string(result.records.size() - 1),
        "total_newton_iterations: " + std::to_string(total_iterations),
        "final_time: " + format_g17(last.time),
        "final_" + setup.control_name + ": " + format_g17(last.control),
        "final_reaction: " + format_g17(last.reaction.dot(setup.reaction_axis)),
        "final_theta_min: " + format_g17(last.theta_min),
    };
    if (cfg.benchmark == "cook") {
        const Vec3 tip = evaluate_displacement(disc, state, Vec3(48.0, 60.0, 0.0));
        extra.push_back("tip_uy_mm: " + format_g17(tip.y()));
    }
    if (!result.message.empty())
        extra.push_back("message: " + result.message);
    write_manifest((dir / "manifest.txt").string(), cfg.source_path, config_hash(cfg), extra);

    log << (result.completed ? "completed" : "stopped early") << " after "
        << result.records.size() - 1 << " accepted steps, " << total_iterations
        << " Newton iterations, final " << setup.control_name << " = " << last.control << "\n";
    if (!result.message.empty())
        log << result.message << "\n";
    return result.completed ? 0 : 2;
}

int run_sweep(const ProblemConfig& cfg, const std::vector<double>& beta0_values,
              std::ostream& log)
{
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);

    std::string summary = "beta0\tcompleted\taccepted_steps\ttotal_newton_iterations\t"
                          "final_control\tfinal_reaction\n";
    for (double beta0 : beta0_values) {
        ProblemConfig run_cfg = cfg;
        run_cfg.solver.beta0 = beta0;
        run_cfg.write_fields = false;
        char label[64];
        std::snprintf(label, sizeof label, "%g", beta0);
        run_cfg.output_dir = (dir / (std::string("beta0_") + label)).string();

        log << "--- beta0 = " << label << " ---\n";
        const int status = run_benchmark(run_cfg, log);

        // re-read the headline numbers from the curve file written above
        // to keep this loop independent of solver internals
        std::ifstream curves(fs::path(run_cfg.output_dir) / "curves.tsv");
        std::string line, last_line;
        std::getline(curves, line); // header
        int accepted = -1, total_iterations = 0;
        double control = 0.0, reaction = 0.0;
        while (std::getline(curves, line)) {
            accepted++;
            std::istringstream row(line);
            int step, iters;
            double time, theta;
            row >> step >> time >> control >> reaction >> iters >> theta;
            total_iterations += iters;
        }
        summary += std::string(label) + "\t" + (status == 0 ? "true" : "false") + "\t"
                   + std::to_string(accepted) + "\t" + std::to_string(total_iterations) + "\t"
                   + format_g17(control) + "\t" + format_g17(reaction) + "\n";
    }
    std::ofstream out(dir / "sweep.tsv", std::ios::binary);
    out << summary;
    log << "sweep summary written to " << (dir / "sweep.tsv").string() << "\n";
    return 0;
}

} // namespace hhoplast
