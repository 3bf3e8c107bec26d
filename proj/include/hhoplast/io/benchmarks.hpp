#pragma once

#include "hhoplast/io/config.hpp"

#include <iosfwd>
#include <memory>

namespace hhoplast {

// A configured problem instance: mesh, loads and run controls.
struct BenchmarkSetup {
    Mesh mesh;
    DegreeInfo degrees;
    QuadOrders orders;
    MaterialParams material;
    MaterialLaw law = MaterialLaw::finite_plasticity;
    LoadCase loads;
    SolverOptions solver;
    RunOptions run;
    std::string control_name = "load";
    Vec3 reaction_axis = Vec3::UnitY();
};

BenchmarkSetup make_benchmark(const ProblemConfig& cfg);

// Executes a configured run end to end (solve, curves, fields, manifest).
// Returns the CLI exit status: 0 done, 2 stopped before full load.
int run_benchmark(const ProblemConfig& cfg, std::ostream& log);

// beta0 sweep on one config; writes per-run curves plus a summary table.
int run_sweep(const ProblemConfig& cfg, const std::vector<double>& beta0_values,
              std::ostream& log);

} // namespace hhoplast
