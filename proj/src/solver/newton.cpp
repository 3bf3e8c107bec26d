#include "hhoplast/solver/newton.hpp"
#include "hhoplast/solver/tractions.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>

namespace hhoplast {

GlobalSolver::GlobalSolver(const Discretization& disc, const MaterialParams& mp, MaterialLaw law,
                           const LoadCase& loads, const SolverOptions& opts)
    : disc_(disc), mp_(mp), law_(law), loads_(loads), opts_(opts)
{
    if (law_ == MaterialLaw::finite_plasticity)
        mp_.validate();
    build_dof_map();
    const int n_cells = static_cast<int>(disc_.mesh().cells.size());
    strain_old_.resize(n_cells);
    f_ext_.resize(n_cells);
    piola_.resize(n_cells);
    defgrad_.resize(n_cells);
    tangent_.resize(n_cells);
}

void GlobalSolver::build_dof_map()
{
    const Mesh& mesh = disc_.mesh();
    const int d = mesh.dim;
    const int fbs = disc_.face_block_size();
    dof_map_.assign(mesh.faces.size(), std::vector<int>(fbs, -1));
    n_free_ = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); f++) {
        const Face& face = mesh.faces[f];
        std::array<bool, 3> fixed = { false, false, false };
        if (face.on_boundary() && face.tag >= 0) {
            const auto it = loads_.boundary.find(face.tag);
            if (it != loads_.boundary.end()
                && it->second.kind == BoundaryCondition::Kind::dirichlet)
                fixed = it->second.mask;
        }
        for (int j = 0; j < fbs / d; j++)
            for (int c = 0; c < d; c++)
                dof_map_[f][j * d + c] = fixed[c] ? -1 : n_free_++;
    }
}

void GlobalSolver::apply_dirichlet(SystemState& state, double t) const
{
    const Mesh& mesh = disc_.mesh();
    const int d = mesh.dim;
    for (std::size_t f = 0; f < mesh.faces.size(); f++) {
        const Face& face = mesh.faces[f];
        if (!face.on_boundary() || face.tag < 0)
            continue;
        const auto it = loads_.boundary.find(face.tag);
        if (it == loads_.boundary.end() || it->second.kind != BoundaryCondition::Kind::dirichlet)
            continue;
        const BoundaryCondition& bc = it->second;
        const ScalarBasis basis = ScalarBasis::face(mesh, static_cast<int>(f), disc_.degrees().k);
        const QuadRule rule
            = make_face_quadrature(mesh, static_cast<int>(f), disc_.orders().load);
        const vector_t coeffs = l2_project(
            basis, [&](const Vec3& x) { return bc.value(x, t); }, rule, d);
        for (int j = 0; j < basis.size(); j++)
            for (int c = 0; c < d; c++)
                if (bc.mask[c])
                    state.face_u[f][j * d + c] = coeffs[j * d + c];
    }
}

void GlobalSolver::begin_step(SystemState& state, double t)
{
    const int n_cells = static_cast<int>(disc_.mesh().cells.size());
    cell_u_prev_ = state.cell_u;
    face_u_prev_ = state.face_u;

    const bool parallel = opts_.parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int c = 0; c < n_cells; c++) {
        const vector_t u_loc = gather_local(disc_, c, state);
        if (law_ == MaterialLaw::finite_plasticity)
            strain_old_[c] = cell_log_strains(disc_, c, u_loc);
        f_ext_[c] = cell_load_vector(disc_, c, loads_, t, &u_loc);
    }
    (void)parallel;
    apply_dirichlet(state, t);
}

NewtonReport GlobalSolver::solve_step(SystemState& state, double t_new)
{
    const SystemState backup = state;
    begin_step(state, t_new);

    const Mesh& mesh = disc_.mesh();
    const int n_cells = static_cast<int>(mesh.cells.size());
    const int cbs = disc_.cell_block_size();
    const int fbs = disc_.face_block_size();
    const bool parallel = opts_.parallel;

    SystemState trial = state;
    std::vector<CellSystem> cs(n_cells), cs_try(n_cells);
    std::vector<CondensedCell> cc(n_cells);

    NewtonReport report;
    bool met_main = false;
    int solves = 0;
    const int refine_budget = 12;
    const int max_backtracks = 25;

    std::vector<vector_t> cell_prev(n_cells), cell_incr(n_cells);
    std::vector<vector_t> face_prev;
    vector_t dface;
    const auto apply_increment = [&](double scale) {
        for (std::size_t f = 0; f < mesh.faces.size(); f++)
            for (int a = 0; a < fbs; a++)
                if (dof_map_[f][a] >= 0)
                    trial.face_u[f][a] = face_prev[f][a] + scale * dface[dof_map_[f][a]];
        for (int c = 0; c < n_cells; c++)
            trial.cell_u[c] = cell_prev[c] + scale * cell_incr[c];
    };
    // assembles every cell at the iterate `at`; returns a failed cell or -1
    const auto assemble_all = [&](const SystemState& at, std::vector<CellSystem>& out) {
        std::atomic<int> failed { -1 };
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
        for (int c = 0; c < n_cells; c++) {
            const vector_t u_loc = gather_local(disc_, c, at);
            out[c] = assemble_cell(disc_, c, u_loc, strain_old_[c], state.qp_states[c], mp_,
                                   law_, opts_.beta0, f_ext_[c]);
            if (out[c].failed)
                failed = c;
        }
        (void)parallel;
        return failed.load();
    };
    // assembled residual norm over the free dofs (fixed cell order)
    const auto residual_norm = [&](const std::vector<CellSystem>& sys) {
        vector_t r_faces = vector_t::Zero(n_free_);
        double cell_r2 = 0.0;
        for (int c = 0; c < n_cells; c++) {
            const LocalOperators& ops = disc_.ops(c);
            cell_r2 += sys[c].R.head(cbs).squaredNorm();
            for (std::size_t fi = 0; fi < ops.face_ids.size(); fi++) {
                const int fid = ops.face_ids[fi];
                for (int a = 0; a < fbs; a++)
                    if (dof_map_[fid][a] >= 0)
                        r_faces[dof_map_[fid][a]] += sys[c].R[ops.face_offsets[fi] + a];
            }
        }
        return std::sqrt(cell_r2 + r_faces.squaredNorm());
    };

    {
        const int bad = assemble_all(trial, cs);
        if (bad >= 0) {
            // inadmissible already at the lifted initial guess
            report.failure = cs[bad].error;
            state = backup;
            return report;
        }
    }

    while (true) {
        // |Fint| is measured cell-wise so that interface contributions of a
        // self-equilibrated stress field do not cancel out of the scale used
        // by the relative tolerances
        double fint2 = 0.0;
        for (int c = 0; c < n_cells; c++)
            fint2 += cs[c].Fint.squaredNorm();
        const double rnorm = residual_norm(cs);
        const double fnorm = std::sqrt(fint2);
        report.residual_history.push_back(rnorm);
        report.fint_norm = fnorm;

        const double tol_main = std::max(opts_.newton.rtol * fnorm, opts_.newton.abs_floor);
        const double tol_equil
            = std::max(opts_.newton.equil_rtol * fnorm, opts_.newton.abs_floor);
        if (!met_main && rnorm <= tol_main) {
            met_main = true;
            report.iterations = solves;
        }
        if (met_main) {
            const std::size_t nh = report.residual_history.size();
            const bool stagnating
                = nh >= 2 && rnorm > 0.5 * report.residual_history[nh - 2];
            if (rnorm <= tol_equil || stagnating || solves - report.iterations >= refine_budget)
                break;
        } else if (solves >= opts_.newton.max_iterations) {
            report.failure = "newton did not converge";
            state = backup;
            return report;
        }

        // condensed global system on the free face dofs
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
        for (int c = 0; c < n_cells; c++)
            cc[c] = static_condensation(cs[c].K, cs[c].R, cbs);

        std::vector<Eigen::Triplet<double>> triplets;
        std::size_t nnz = 0;
        for (int c = 0; c < n_cells; c++)
            nnz += static_cast<std::size_t>(cc[c].Khat.size());
        triplets.reserve(nnz);
        vector_t rhs = vector_t::Zero(n_free_);
        for (int c = 0; c < n_cells; c++) {
            const LocalOperators& ops = disc_.ops(c);
            const int nfc = static_cast<int>(ops.face_ids.size());
            std::vector<int> gdof(nfc * fbs);
            for (int fi = 0; fi < nfc; fi++)
                for (int a = 0; a < fbs; a++)
                    gdof[fi * fbs + a] = dof_map_[ops.face_ids[fi]][a];
            for (int p = 0; p < nfc * fbs; p++) {
                if (gdof[p] < 0)
                    continue;
                rhs[gdof[p]] -= cc[c].Rhat[p];
                for (int r = 0; r < nfc * fbs; r++)
                    if (gdof[r] >= 0)
                        triplets.emplace_back(gdof[r], gdof[p], cc[c].Khat(r, p));
            }
        }
        Eigen::SparseMatrix<double> khat(n_free_, n_free_);
        khat.setFromTriplets(triplets.begin(), triplets.end());

        dface.resize(n_free_);
        if (!ldlt_analyzed_) {
            ldlt_.analyzePattern(khat);
            ldlt_analyzed_ = true;
        }
        ldlt_.factorize(khat);
        if (ldlt_.info() == Eigen::Success) {
            dface = ldlt_.solve(rhs);
        } else {
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(khat);
            if (lu.info() != Eigen::Success) {
                report.failure = "singular tangent";
                state = backup;
                return report;
            }
            dface = lu.solve(rhs);
        }
        solves++;
        report.total_solves = solves;

        // recover the cell increments
        face_prev = trial.face_u;
        cell_prev = trial.cell_u;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (int c = 0; c < n_cells; c++) {
            const LocalOperators& ops = disc_.ops(c);
            const int nfc = static_cast<int>(ops.face_ids.size());
            vector_t df = vector_t::Zero(nfc * fbs);
            for (int fi = 0; fi < nfc; fi++)
                for (int a = 0; a < fbs; a++) {
                    const int gdof = dof_map_[ops.face_ids[fi]][a];
                    if (gdof >= 0)
                        df[fi * fbs + a] = dface[gdof];
                }
            cell_incr[c] = recover_cell_increment(cc[c], df);
        }

        // backtracking line search: the residual is the exact gradient of the
        // incremental potential, so a damped Newton step with an Armijo test
        // on that potential converges where the full step starts to cycle.
        // Near the solution the energy decrease drops below the roundoff of
        // the quadrature sum, so a contracting residual is also accepted; on
        // saddle directions (indefinite tangent, gradient . increment >= 0)
        // any admissible iterate passes, which is plain Newton.
        double energy0 = 0.0, energy_mag = 0.0, g_dot_du = 0.0;
        for (int c = 0; c < n_cells; c++) {
            energy0 += cs[c].total_energy;
            energy_mag += std::abs(cs[c].total_energy);
            const LocalOperators& ops = disc_.ops(c);
            const int nfc = static_cast<int>(ops.face_ids.size());
            g_dot_du += cs[c].R.head(cbs).dot(cell_incr[c]);
            for (int fi = 0; fi < nfc; fi++)
                for (int a = 0; a < fbs; a++) {
                    const int gdof = dof_map_[ops.face_ids[fi]][a];
                    if (gdof >= 0)
                        g_dot_du += cs[c].R[ops.face_offsets[fi] + a] * dface[gdof];
                }
        }
        const bool descent = g_dot_du < 0.0;
        const double slack
            = 256.0 * std::numeric_limits<double>::epsilon() * energy_mag + 1e-300;

        // full step first: the assembly doubles as the next iterate's system
        apply_increment(1.0);
        bool accepted = false;
        double used_scale = 1.0;
        if (assemble_all(trial, cs_try) < 0) {
            if (!descent) {
                accepted = true;
            } else if (residual_norm(cs_try) <= (1.0 - 1e-4) * rnorm) {
                accepted = true;
            } else {
                double energy1 = 0.0;
                for (int c = 0; c < n_cells; c++)
                    energy1 += cs_try[c].total_energy;
                accepted = energy1 <= energy0 + 1e-4 * g_dot_du + slack;
            }
        }
        if (!accepted) {
            // damped scales are probed with energy-only evaluations
            double scale = 0.5;
            std::vector<double> probe(n_cells);
            for (int bt = 0; bt < max_backtracks && !accepted; bt++, scale *= 0.5) {
                apply_increment(scale);
                std::atomic<bool> bad { false };
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
                for (int c = 0; c < n_cells; c++) {
                    const CellEnergy ce = cell_incremental_energy(
                        disc_, c, gather_local(disc_, c, trial), strain_old_[c],
                        state.qp_states[c], mp_, law_, opts_.beta0, f_ext_[c]);
                    probe[c] = ce.energy;
                    if (ce.failed)
                        bad = true;
                }
                if (bad)
                    continue;
                if (descent) {
                    double energy1 = 0.0;
                    for (int c = 0; c < n_cells; c++)
                        energy1 += probe[c];
                    if (energy1 > energy0 + 1e-4 * scale * g_dot_du + slack)
                        continue;
                }
                accepted = assemble_all(trial, cs_try) < 0;
                if (accepted)
                    used_scale = scale;
            }
        }
        if (!accepted) {
            if (met_main) {
                apply_increment(0.0); // restore the converged iterate and commit
                break;
            }
            report.failure = "line search failed";
            state = backup;
            return report;
        }
        cs.swap(cs_try);
        if (opts_.verbose)
            std::cout << "    newton " << solves << "  |R| = " << rnorm
                      << (used_scale < 1.0 ? "  (damped " + std::to_string(used_scale) + ")" : "")
                      << "\n";
    }

    // commit
    state.cell_u = trial.cell_u;
    state.face_u = trial.face_u;
    for (int c = 0; c < n_cells; c++) {
        state.qp_states[c] = cs[c].trial;
        piola_[c] = cs[c].piola;
        defgrad_[c] = cs[c].defgrad;
        tangent_[c] = cs[c].tangent;
    }
    state.time = t_new;
    report.converged = true;
    report.total_solves = solves;
    return report;
}

RunResult GlobalSolver::run_load_program(SystemState& state, const RunOptions& run)
{
    RunResult result;
    auto control_of = [&](double t) { return run.control ? run.control(t) : t; };

    StepRecord first;
    first.time = state.time;
    first.control = control_of(state.time);
    if (run.track_theta) {
        // virgin tangent: the elastic modulus everywhere
        const Mat9 c = isotropic_modulus(mp_.mu(), mp_.lambda());
        first.theta_min = disc_.mesh().dim == 2
                              ? smallest_symmetric_eigenvalue(inplane_block(c), 2)
                              : smallest_symmetric_eigenvalue(c, 3);
    }
    result.records.push_back(first);
    if (run.on_step)
        run.on_step(0, first);

    const double dt0 = 1.0 / run.steps;
    int accepted = 0;
    SystemState prev;
    while (state.time < 1.0 - 1e-12) {
        // next grid target above the current time
        const double next_grid
            = std::min(1.0, dt0 * (std::floor(state.time / dt0 + 1e-9) + 1.0));
        double target = next_grid;
        int halvings = 0;
        if (run.track_energy)
            prev = state;
        NewtonReport rep;
        while (true) {
            if (accepted + 1 > opts_.max_total_steps) {
                result.message = "step budget exhausted";
                return result;
            }
            rep = solve_step(state, target);
            if (rep.converged)
                break;
            halvings++;
            if (halvings > opts_.max_halvings) {
                result.message = "step " + std::to_string(accepted + 1)
                                 + " failed after halving: " + rep.failure;
                return result;
            }
            target = 0.5 * (state.time + target);
        }
        accepted++;

        StepRecord rec;
        rec.time = state.time;
        rec.control = control_of(state.time);
        rec.newton = rep;
        if (run.reaction_tag >= 0)
            rec.reaction = reaction(state, run.reaction_tag);
        if (run.track_theta)
            rec.theta_min = theta_min();
        if (run.track_energy)
            rec.energy = incremental_energy(state, prev);
        result.records.push_back(rec);
        if (run.on_step)
            run.on_step(accepted, rec);
        if (opts_.verbose)
            std::cout << "  step t = " << state.time << "  iters = " << rep.iterations << "\n";
    }
    result.completed = true;
    return result;
}

Vec3 GlobalSolver::reaction(const SystemState& state, int tag) const
{
    const Mesh& mesh = disc_.mesh();
    const double beta = 2.0 * mp_.mu() * opts_.beta0;
    Vec3 total = Vec3::Zero();
    for (std::size_t f = 0; f < mesh.faces.size(); f++) {
        const Face& face = mesh.faces[f];
        if (!face.on_boundary() || face.tag != tag)
            continue;
        const int c = face.cell_minus;
        const vector_t u_loc = gather_local(disc_, c, state);
        const auto tf = cell_tractions(disc_, c, u_loc, piola_[c], beta);
        const LocalOperators& ops = disc_.ops(c);
        for (std::size_t fi = 0; fi < ops.face_ids.size(); fi++)
            if (ops.face_ids[fi] == static_cast<int>(f))
                total += traction_resultant(disc_, static_cast<int>(f), tf[fi]);
    }
    return total;
}

double GlobalSolver::theta_min(int* argmin_cell) const
{
    const int dim = disc_.mesh().dim;
    double best = std::numeric_limits<double>::quiet_NaN();
    int best_cell = -1;
    for (std::size_t c = 0; c < tangent_.size(); c++)
        for (const Mat9& a : tangent_[c]) {
            const double theta = dim == 2 ? smallest_symmetric_eigenvalue(inplane_block(a), 2)
                                          : smallest_symmetric_eigenvalue(a, 3);
            if (std::isnan(best) || theta < best) {
                best = theta;
                best_cell = static_cast<int>(c);
            }
        }
    if (argmin_cell)
        *argmin_cell = best_cell;
    return best;
}

std::vector<double> GlobalSolver::theta_values() const
{
    const int dim = disc_.mesh().dim;
    std::vector<double> values;
    for (const auto& cell : tangent_)
        for (const Mat9& a : cell)
            values.push_back(dim == 2 ? smallest_symmetric_eigenvalue(inplane_block(a), 2)
                                      : smallest_symmetric_eigenvalue(a, 3));
    return values;
}

double GlobalSolver::incremental_energy(const SystemState& trial_u, const SystemState& prev) const
{
    return eval_discrete_energy(disc_, trial_u, prev, mp_, law_, opts_.beta0, f_ext_);
}

double eval_discrete_energy(const Discretization& disc, const SystemState& u,
                            const SystemState& prev, const MaterialParams& mp, MaterialLaw law,
                            double beta0, const std::vector<vector_t>& f_ext)
{
    const int n_cells = static_cast<int>(disc.mesh().cells.size());
    const double beta = 2.0 * mp.mu() * beta0;
    double energy = 0.0;
    for (int c = 0; c < n_cells; c++) {
        const LocalOperators& ops = disc.ops(c);
        const vector_t u_loc = gather_local(disc, c, u);
        std::vector<Mat3> strain_old;
        if (law == MaterialLaw::finite_plasticity)
            strain_old = cell_log_strains(disc, c, gather_local(disc, c, prev));
        for (std::size_t q = 0; q < ops.behavior_rule.size(); q++) {
            const double w = ops.behavior_rule.weights[q];
            const vector_t g = ops.grad_at_qp[q] * u_loc;
            Mat3 gm = Mat3::Zero();
            for (int a = 0; a < ops.dim; a++)
                for (int b = 0; b < ops.dim; b++)
                    gm(a, b) = g[a * ops.dim + b];
            if (law == MaterialLaw::linear_elastic) {
                energy += w * elastic_energy(mp, sym(gm));
            } else {
                Mat3 f = Mat3::Identity();
                f.topLeftCorner(ops.dim, ops.dim) += gm.topLeftCorner(ops.dim, ops.dim);
                const LogStrain kin(f);
                const FiniteStepResult fp
                    = finite_plasticity(prev.qp_states[c][q], strain_old[q], kin, mp);
                energy += w
                          * (elastic_energy(mp, fp.log_strain - fp.state.plastic_strain)
                             + plastic_energy(mp, fp.state.eq_plastic_strain));
            }
        }
        energy += 0.5 * beta * u_loc.dot(ops.stab_form * u_loc);
        if (static_cast<int>(f_ext.size()) == n_cells && f_ext[c].size() == u_loc.size())
            energy -= f_ext[c].dot(u_loc);
    }
    return energy;
}

Vec3 evaluate_displacement(const Discretization& disc, const SystemState& state, const Vec3& x)
{
    const Mesh& mesh = disc.mesh();
    int found = -1;
    for (std::size_t c = 0; c < mesh.cells.size() && found < 0; c++) {
        const Cell& cell = mesh.cells[c];
        const double tol = 1e-12 * cell.diameter;
        if (mesh.dim == 2) {
            bool inside = true;
            const int n = static_cast<int>(cell.vertices.size());
            for (int i = 0; i < n && inside; i++) {
                const Vec3& a = mesh.nodes[cell.vertices[i]];
                const Vec3& b = mesh.nodes[cell.vertices[(i + 1) % n]];
                const double cross = (b.x() - a.x()) * (x.y() - a.y())
                                     - (b.y() - a.y()) * (x.x() - a.x());
                inside = cross >= -tol * cell.diameter;
            }
            if (inside)
                found = static_cast<int>(c);
        } else {
            bool inside = true;
            for (int fid : cell.faces) {
                const Face& face = mesh.faces[fid];
                const Vec3 n = mesh.outward_normal(static_cast<int>(c), fid);
                if ((x - face.centroid).dot(n) > tol) {
                    inside = false;
                    break;
                }
            }
            if (inside)
                found = static_cast<int>(c);
        }
    }
    if (found < 0) {
        double best = std::numeric_limits<double>::max();
        for (std::size_t c = 0; c < mesh.cells.size(); c++) {
            const double d2 = (mesh.cells[c].centroid - x).squaredNorm();
            if (d2 < best) {
                best = d2;
                found = static_cast<int>(c);
            }
        }
    }
    const LocalOperators& ops = disc.ops(found);
    return eval_vector(ops.cell_basis, state.cell_u[found], mesh.dim, x);
}

} // namespace hhoplast
