#pragma once

#include "hhoplast/solver/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <limits>

namespace hhoplast {

struct NewtonOptions {
    double rtol = 1e-6;        // convergence criterion |R| <= rtol |Fint|
    double equil_rtol = 1e-11; // keep iterating down to this for clean tractions
    int max_iterations = 25;
    double abs_floor = 1e-14;  // absolute fallback for zero-load steps
};

struct SolverOptions {
    double beta0 = 1.0;
    NewtonOptions newton;
    int max_halvings = 4;
    int max_total_steps = 400;
    bool parallel = true;
    bool verbose = false;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;   // linear solves until the convergence criterion held
    int total_solves = 0; // including equilibration refinements
    std::vector<double> residual_history;
    double fint_norm = 0.0;
    std::string failure;
};

struct StepRecord {
    double time = 0.0;
    double control = 0.0;
    Vec3 reaction = Vec3::Zero();
    double energy = 0.0;
    double theta_min = std::numeric_limits<double>::quiet_NaN();
    NewtonReport newton;
};

struct RunOptions {
    int steps = 15;
    int reaction_tag = -1;
    std::function<double(double)> control; // load factor -> reported control value
    bool track_theta = true;
    bool track_energy = true;
    std::function<void(int, const StepRecord&)> on_step;
};

struct RunResult {
    std::vector<StepRecord> records; // one per accepted step, including t = 0
    bool completed = false;
    std::string message;
};

class GlobalSolver {
  public:
    GlobalSolver(const Discretization& disc, const MaterialParams& mp, MaterialLaw law,
                 const LoadCase& loads, const SolverOptions& opts);

    // Advances the state from state.time to t_new; on success the trial states
    // are committed and per-cell stress caches refreshed.
    NewtonReport solve_step(SystemState& state, double t_new);

    // Equal increments to t = 1 with step halving on failure.
    RunResult run_load_program(SystemState& state, const RunOptions& run);

    const Discretization& discretization() const { return disc_; }
    const MaterialParams& material() const { return mp_; }
    double beta0() const { return opts_.beta0; }

    // Caches at the last accepted step.
    const std::vector<std::vector<Mat3>>& piola() const { return piola_; }
    const std::vector<std::vector<Mat3>>& defgrad() const { return defgrad_; }
    const std::vector<std::vector<Mat9>>& tangent() const { return tangent_; }
    const std::vector<vector_t>& external_loads() const { return f_ext_; }

    Vec3 reaction(const SystemState& state, int tag) const;
    double theta_min(int* argmin_cell = nullptr) const;
    std::vector<double> theta_values() const; // one per quadrature point
    double incremental_energy(const SystemState& trial_u, const SystemState& prev) const;

    // Sets Dirichlet face dofs to the projected data at load factor t and
    // refreshes the external load vectors; exposed for tests.
    void begin_step(SystemState& state, double t);

  private:
    const Discretization& disc_;
    MaterialParams mp_;
    MaterialLaw law_;
    LoadCase loads_;
    SolverOptions opts_;

    // free-dof numbering: per face dof, >= 0 global index or -1 (Dirichlet)
    std::vector<std::vector<int>> dof_map_;
    int n_free_ = 0;

    std::vector<std::vector<Mat3>> strain_old_;
    std::vector<vector_t> f_ext_;
    std::vector<vector_t> cell_u_prev_, face_u_prev_;

    std::vector<std::vector<Mat3>> piola_, defgrad_;
    std::vector<std::vector<Mat9>> tangent_;

    // The sparsity pattern of the condensed system never changes, so the
    // symbolic analysis is shared by all factorizations.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool ldlt_analyzed_ = false;

    void build_dof_map();
    void apply_dirichlet(SystemState& state, double t) const;
    friend class TractionField;
};

// Pointwise evaluation of the cell displacement polynomial at x. Returns the
// value from the cell whose polygon contains x (nearest centroid fallback).
Vec3 evaluate_displacement(const Discretization& disc, const SystemState& state, const Vec3& x);

double eval_discrete_energy(const Discretization& disc, const SystemState& u,
                            const SystemState& prev, const MaterialParams& mp, MaterialLaw law,
                            double beta0, const std::vector<vector_t>& f_ext);

} // namespace hhoplast
