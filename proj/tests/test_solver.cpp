#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hhoplast/mesh/build.hpp"
#include "hhoplast/mesh/merge.hpp"
#include "hhoplast/solver/diagnostics.hpp"
#include "hhoplast/solver/tractions.hpp"

#include <random>

using namespace hhoplast;

namespace {

MaterialParams steel()
{
    MaterialParams mp;
    mp.young = 206900.0;
    mp.poisson = 0.29;
    mp.hardening = 129.2;
    mp.sigma_y0 = 450.0;
    mp.sigma_yinf = 715.0;
    mp.saturation = 16.93;
    return mp;
}

// stays elastic at any strain the tests reach
MaterialParams hard_steel()
{
    MaterialParams mp = steel();
    mp.sigma_y0 = 1e9;
    mp.sigma_yinf = 1e9;
    return mp;
}

LoadCase clamp_and_pull(const Mesh& mesh, double traction)
{
    LoadCase loads;
    BoundaryCondition clamp;
    clamp.kind = BoundaryCondition::Kind::dirichlet;
    clamp.value = [](const Vec3&, double) { return Vec3::Zero().eval(); };
    loads.boundary[mesh.tag_id("clamped") >= 0 ? mesh.tag_id("clamped")
                                               : mesh.tag_id("left")] = clamp;

    BoundaryCondition pull;
    pull.kind = BoundaryCondition::Kind::neumann;
    pull.value = [traction](const Vec3&, double t) { return Vec3(0.0, t * traction, 0.0); };
    loads.boundary[mesh.tag_id("loaded") >= 0 ? mesh.tag_id("loaded")
                                              : mesh.tag_id("right")] = pull;
    return loads;
}

} // namespace

TEST_CASE("cell tangent is the derivative of the cell residual")
{
    const Mesh mesh = build_pentagon_cell();
    const DegreeInfo deg{ 1, 2 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const MaterialParams mp = steel();

    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    const int ndof = disc.ops(0).total_dofs;
    vector_t u_prev = vector_t::Zero(ndof);
    vector_t u_loc(ndof);
    for (int i = 0; i < ndof; i++) {
        u_prev[i] = 0.3 * u(rng);
        u_loc[i] = u(rng);
    }

    const std::vector<Mat3> strain_old = cell_log_strains(disc, 0, u_prev);
    const std::vector<MaterialPointState> committed(disc.ops(0).behavior_rule.size());
    const vector_t none;

    const CellSystem cs = assemble_cell(disc, 0, u_loc, strain_old, committed, mp,
                                        MaterialLaw::finite_plasticity, 1.0, none);
    REQUIRE(!cs.failed);
    CHECK((cs.K - cs.K.transpose()).norm() <= 1e-12 * cs.K.norm());

    const double h = 1e-7;
    const double scale = cs.K.cwiseAbs().maxCoeff();
    for (int i = 0; i < ndof; i++) {
        vector_t up = u_loc, um = u_loc;
        up[i] += h;
        um[i] -= h;
        const CellSystem p = assemble_cell(disc, 0, up, strain_old, committed, mp,
                                           MaterialLaw::finite_plasticity, 1.0, none);
        const CellSystem m = assemble_cell(disc, 0, um, strain_old, committed, mp,
                                           MaterialLaw::finite_plasticity, 1.0, none);
        const vector_t fd = (p.R - m.R) / (2.0 * h);
        CHECK((fd - cs.K.col(i)).norm() <= 2e-5 * scale);
    }
}

TEST_CASE("cell incremental energy differentiates to the cell residual")
{
    const Mesh mesh = build_pentagon_cell();
    const DegreeInfo deg{ 1, 1 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const MaterialParams mp = steel();

    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    const int ndof = disc.ops(0).total_dofs;
    vector_t u_loc(ndof), f_ext(ndof);
    for (int i = 0; i < ndof; i++) {
        u_loc[i] = u(rng);
        f_ext[i] = 50.0 * u(rng);
    }
    const std::vector<Mat3> strain_old
        = cell_log_strains(disc, 0, vector_t::Zero(ndof));
    const std::vector<MaterialPointState> committed(disc.ops(0).behavior_rule.size());

    const CellSystem cs = assemble_cell(disc, 0, u_loc, strain_old, committed, mp,
                                        MaterialLaw::finite_plasticity, 1.0, f_ext);
    REQUIRE(!cs.failed);

    // the assembled energy agrees with the probe-only evaluation
    const CellEnergy ce = cell_incremental_energy(disc, 0, u_loc, strain_old, committed,
                                                  mp, MaterialLaw::finite_plasticity, 1.0,
                                                  f_ext);
    REQUIRE(!ce.failed);
    CHECK(ce.energy == doctest::Approx(cs.total_energy).epsilon(1e-12));

    const double h = 1e-6;
    const double scale = cs.R.cwiseAbs().maxCoeff();
    for (int i = 0; i < ndof; i++) {
        vector_t up = u_loc, um = u_loc;
        up[i] += h;
        um[i] -= h;
        const CellEnergy ep = cell_incremental_energy(disc, 0, up, strain_old, committed,
                                                      mp, MaterialLaw::finite_plasticity,
                                                      1.0, f_ext);
        const CellEnergy em = cell_incremental_energy(disc, 0, um, strain_old, committed,
                                                      mp, MaterialLaw::finite_plasticity,
                                                      1.0, f_ext);
        const double fd = (ep.energy - em.energy) / (2.0 * h);
        CHECK(fd == doctest::Approx(cs.R[i]).epsilon(1e-6).scale(scale));
    }
}

TEST_CASE("static condensation solves the cell block exactly")
{
    const Mesh mesh = build_pentagon_cell();
    const DegreeInfo deg{ 1, 2 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const int cbs = disc.cell_block_size();
    const int ndof = disc.ops(0).total_dofs;

    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> u(-0.005, 0.005);
    vector_t u_loc(ndof);
    for (int i = 0; i < ndof; i++)
        u_loc[i] = u(rng);
    const std::vector<Mat3> strain_old = cell_log_strains(disc, 0, vector_t::Zero(ndof));
    const std::vector<MaterialPointState> committed(disc.ops(0).behavior_rule.size());
    const CellSystem cs = assemble_cell(disc, 0, u_loc, strain_old, committed, steel(),
                                        MaterialLaw::finite_plasticity, 1.0, vector_t());
    REQUIRE(!cs.failed);

    const CondensedCell cc = static_condensation(cs.K, cs.R, cbs);
    vector_t dface(ndof - cbs);
    for (int i = 0; i < dface.size(); i++)
        dface[i] = u(rng);
    const vector_t dcell = recover_cell_increment(cc, dface);

    vector_t du(ndof);
    du.head(cbs) = dcell;
    du.tail(ndof - cbs) = dface;
    const vector_t lin = cs.K * du + cs.R;

    // cell block of the linearized residual vanishes for any face increment
    CHECK(lin.head(cbs).norm() <= 1e-10 * (1.0 + cs.R.norm()));
    // face block equals the Schur system
    const vector_t schur = cc.Khat * dface + cc.Rhat;
    CHECK((lin.tail(ndof - cbs) - schur).norm() <= 1e-10 * (1.0 + schur.norm()));
}

TEST_CASE("an affine Dirichlet field is reproduced exactly")
{
    const Mesh mesh = merge_cells(build_structured_mesh(CellKind::quad, { 4, 4, 1 }, {}), 0.4, 5);
    const DegreeInfo deg{ 1, 1 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);

    Mat3 grad = Mat3::Zero();
    grad(0, 0) = 1.3e-3;
    grad(0, 1) = -0.8e-3;
    grad(1, 0) = 0.5e-3;
    grad(1, 1) = 2.1e-3;
    const auto affine = [grad](const Vec3& x, double t) { return (t * grad * x).eval(); };

    LoadCase loads;
    for (const char* name : { "left", "right", "bottom", "top" }) {
        BoundaryCondition bc;
        bc.kind = BoundaryCondition::Kind::dirichlet;
        bc.value = affine;
        loads.boundary[mesh.tag_id(name)] = bc;
    }

    SolverOptions opts;
    opts.parallel = false;
    GlobalSolver solver(disc, hard_steel(), MaterialLaw::finite_plasticity, loads, opts);
    SystemState state = make_state(disc);
    const NewtonReport report = solver.solve_step(state, 1.0);
    REQUIRE_MESSAGE(report.converged, report.failure);

    std::mt19937_64 rng(64);
    std::uniform_real_distribution<double> p(0.05, 0.95);
    for (int i = 0; i < 30; i++) {
        const Vec3 x(p(rng), p(rng), 0.0);
        const Vec3 uh = evaluate_displacement(disc, state, x);
        CHECK((uh - affine(x, 1.0)).norm() <= 1e-9 * (1.0 + affine(x, 1.0).norm()));
    }

    // constant stress: interior tractions match across every face
    const TractionField tf(solver, state);
    CHECK(tf.interface_mismatch() <= 1e-9);
}

TEST_CASE("Dirichlet faces carry the face projection of the data")
{
    const Mesh mesh = build_cook_mesh(3);
    const DegreeInfo deg{ 2, 2 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);

    const auto wavy = [](const Vec3& x, double t) {
        return Vec3(t * std::sin(0.1 * x.y()), t * x.y() * x.y() / 100.0, 0.0);
    };
    LoadCase loads;
    BoundaryCondition bc;
    bc.kind = BoundaryCondition::Kind::dirichlet;
    bc.value = wavy;
    loads.boundary[mesh.tag_id("clamped")] = bc;

    GlobalSolver solver(disc, steel(), MaterialLaw::finite_plasticity, loads, {});
    SystemState state = make_state(disc);
    solver.begin_step(state, 0.75);

    const int tag = mesh.tag_id("clamped");
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); c++) {
        const LocalOperators& ops = disc.ops(c);
        for (std::size_t fl = 0; fl < ops.face_ids.size(); fl++) {
            const int fid = ops.face_ids[fl];
            if (mesh.faces[fid].tag != tag)
                continue;
            const QuadRule rule = make_face_quadrature(mesh, fid, 2 * deg.k + 2);
            const VectorField data = [&](const Vec3& x) { return wavy(x, 0.75); };
            const vector_t proj = l2_project(ops.face_bases[fl], data, rule, 2);
            CHECK((state.face_u[fid] - proj).norm() <= 1e-12 * (1.0 + proj.norm()));
        }
    }
}

TEST_CASE("a zero load program returns zero states and reactions")
{
    const Mesh mesh = build_structured_mesh(CellKind::quad, { 3, 3, 1 }, {});
    const DegreeInfo deg{ 1, 1 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);

    LoadCase loads;
    for (const char* name : { "left", "right", "bottom", "top" }) {
        BoundaryCondition bc;
        bc.kind = BoundaryCondition::Kind::dirichlet;
        bc.value = [](const Vec3&, double) { return Vec3::Zero().eval(); };
        loads.boundary[mesh.tag_id(name)] = bc;
    }

    SolverOptions opts;
    opts.parallel = false;
    GlobalSolver solver(disc, steel(), MaterialLaw::finite_plasticity, loads, opts);
    SystemState state = make_state(disc);
    RunOptions run;
    run.steps = 3;
    run.reaction_tag = mesh.tag_id("left");
    const RunResult result = solver.run_load_program(state, run);

    REQUIRE_MESSAGE(result.completed, result.message);
    CHECK(result.records.size() == 4); // t = 0 plus three steps
    for (const StepRecord& rec : result.records) {
        CHECK(rec.reaction.norm() <= 1e-12);
        CHECK(std::abs(rec.energy) <= 1e-14);
    }
    for (const vector_t& v : state.cell_u)
        CHECK(v.norm() <= 1e-12);
    for (const vector_t& v : state.face_u)
        CHECK(v.norm() <= 1e-12);
}

TEST_CASE("a linear elastic step converges in one iteration")
{
    const Mesh mesh = build_cook_mesh(4);
    const DegreeInfo deg{ 1, 2 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const LoadCase loads = clamp_and_pull(mesh, 10.0);

    SolverOptions opts;
    opts.parallel = false;
    GlobalSolver solver(disc, steel(), MaterialLaw::linear_elastic, loads, opts);
    SystemState state = make_state(disc);
    const NewtonReport report = solver.solve_step(state, 1.0);
    REQUIRE_MESSAGE(report.converged, report.failure);
    CHECK(report.iterations == 1);
}

TEST_CASE("serial and parallel assembly produce identical states")
{
    const Mesh mesh = build_cook_mesh(4);
    const DegreeInfo deg{ 1, 1 };
    const Discretization serial_disc(mesh, deg, QuadOrders::defaults(deg), false);
    const Discretization parallel_disc(mesh, deg, QuadOrders::defaults(deg), true);
    const LoadCase loads = clamp_and_pull(mesh, 120.0); // plastic by design

    SolverOptions serial_opts, parallel_opts;
    serial_opts.parallel = false;
    parallel_opts.parallel = true;

    GlobalSolver a(serial_disc, steel(), MaterialLaw::finite_plasticity, loads, serial_opts);
    GlobalSolver b(parallel_disc, steel(), MaterialLaw::finite_plasticity, loads,
                   parallel_opts);
    SystemState sa = make_state(serial_disc);
    SystemState sb = make_state(parallel_disc);

    for (double t : { 0.5, 1.0 }) {
        REQUIRE(a.solve_step(sa, t).converged);
        REQUIRE(b.solve_step(sb, t).converged);
    }
    for (std::size_t c = 0; c < sa.cell_u.size(); c++)
        CHECK(sa.cell_u[c] == sb.cell_u[c]); // bitwise: same order of operations
    for (std::size_t f = 0; f < sa.face_u.size(); f++)
        CHECK(sa.face_u[f] == sb.face_u[f]);
    for (std::size_t c = 0; c < sa.qp_states.size(); c++)
        for (std::size_t q = 0; q < sa.qp_states[c].size(); q++)
            CHECK(sa.qp_states[c][q].eq_plastic_strain
                  == sb.qp_states[c][q].eq_plastic_strain);
}

TEST_CASE("converged tractions satisfy the local and global balances")
{
    const Mesh mesh = build_cook_mesh(4);
    const DegreeInfo deg{ 1, 2 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const double traction = 200.0; // well into the plastic range
    const LoadCase loads = clamp_and_pull(mesh, traction);

    SolverOptions opts;
    opts.parallel = false;
    GlobalSolver solver(disc, steel(), MaterialLaw::finite_plasticity, loads, opts);
    SystemState state = make_state(disc);
    RunOptions run;
    run.steps = 4;
    const RunResult result = solver.run_load_program(state, run);
    REQUIRE_MESSAGE(result.completed, result.message);

    // interface and Neumann consistency of the equilibrated tractions
    const TractionField tf(solver, state);
    CHECK(tf.interface_mismatch() <= 1e-9);
    CHECK(tf.neumann_mismatch(loads, 1.0) <= 1e-10);

    // global equilibrium: the boundary tractions of the whole mesh cancel
    Vec3 total = Vec3::Zero();
    double scale = 0.0;
    for (const char* name : { "clamped", "loaded", "free_bottom", "free_top" }) {
        const Vec3 r = solver.reaction(state, mesh.tag_id(name));
        total += r;
        scale = std::max(scale, r.norm());
    }
    CHECK(total.norm() <= 1e-8 * scale);

    // the loaded-edge reaction equals the applied dead load
    const Vec3 applied(0.0, traction * 16.0, 0.0);
    CHECK((solver.reaction(state, mesh.tag_id("loaded")) - applied).norm()
          <= 1e-9 * applied.norm());

    // local balance: the face tractions carry the cell-interior equilibrium,
    // sum_F (T_F, v)_F = (P, grad v)_T - (f, v)_T for every cell polynomial v
    const double beta = 2.0 * solver.material().mu() * solver.beta0();
    const int cbs = disc.cell_block_size();
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); c++) {
        const LocalOperators& ops = disc.ops(c);
        const vector_t u_loc = gather_local(disc, c, state);
        const auto tractions = cell_tractions(disc, c, u_loc, solver.piola()[c], beta);

        vector_t via_faces = vector_t::Zero(cbs);
        for (std::size_t fl = 0; fl < ops.face_ids.size(); fl++) {
            const QuadRule rule = make_face_quadrature(mesh, ops.face_ids[fl],
                                                       ops.deg.k + ops.deg.l + 2);
            for (std::size_t q = 0; q < rule.size(); q++) {
                const Vec3 t = eval_vector(ops.face_bases[fl], tractions[fl], 2,
                                           rule.points[q]);
                const vector_t phi = ops.cell_basis.values(rule.points[q]);
                for (int i = 0; i < ops.cell_basis.size(); i++)
                    for (int comp = 0; comp < 2; comp++)
                        via_faces[i * 2 + comp] += rule.weights[q] * t[comp] * phi[i];
            }
        }

        vector_t via_cell = vector_t::Zero(cbs);
        for (std::size_t q = 0; q < ops.behavior_rule.size(); q++) {
            const double w = ops.behavior_rule.weights[q];
            const Mat3& p = solver.piola()[c][q];
            const matrix_t dphi = ops.cell_basis.gradients(ops.behavior_rule.points[q]);
            for (int i = 0; i < ops.cell_basis.size(); i++)
                for (int comp = 0; comp < 2; comp++)
                    for (int b = 0; b < 2; b++)
                        via_cell[i * 2 + comp] += w * p(comp, b) * dphi(i, b);
        }
        if (solver.external_loads()[c].size() == ops.total_dofs)
            via_cell -= solver.external_loads()[c].head(cbs);
        CHECK((via_faces - via_cell).norm() <= 1e-10 * (1.0 + via_cell.norm()));
    }
}

TEST_CASE("the virgin coercivity indicator equals twice the shear modulus")
{
    const Mesh mesh = build_structured_mesh(CellKind::quad, { 2, 2, 1 }, {});
    const DegreeInfo deg{ 1, 1 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);

    LoadCase loads;
    BoundaryCondition bc;
    bc.kind = BoundaryCondition::Kind::dirichlet;
    bc.value = [](const Vec3&, double) { return Vec3::Zero().eval(); };
    loads.boundary[mesh.tag_id("left")] = bc;

    SolverOptions opts;
    opts.parallel = false;
    GlobalSolver solver(disc, steel(), MaterialLaw::finite_plasticity, loads, opts);
    SystemState state = make_state(disc);
    REQUIRE(solver.solve_step(state, 1.0).converged); // zero load: stays virgin

    const double two_mu = 2.0 * solver.material().mu();
    int argmin = -1;
    CHECK(solver.theta_min(&argmin) == doctest::Approx(two_mu).epsilon(1e-9));
    CHECK(argmin >= 0);
    for (double theta : solver.theta_values())
        CHECK(theta == doctest::Approx(two_mu).epsilon(1e-9));
}

TEST_CASE("theta histogram bins GPa values against the survey edges")
{
    // values arrive in MPa; edges are in GPa
    const std::vector<double> theta
        = { -7000.0, -2000.0, -0.7e3, -0.1e3, 0.2e3, 0.7e3, 3.0e3, 100.0e3, 160.4e3,
            200.0e3 };
    const ThetaHistogram h = theta_histogram(theta);
    REQUIRE(h.counts.size() == h.edges.size() - 1);
    CHECK(h.below == 1);                // -7 GPa
    CHECK(h.above == 1);                // 200 GPa
    CHECK(h.counts[0] == 1);            // [-6, -1): -2
    CHECK(h.counts[1] == 1);            // [-1, -0.5): -0.7
    CHECK(h.counts[2] == 1);            // [-0.5, 0): -0.1
    CHECK(h.counts[3] == 1);            // [0, 0.5): 0.2
    CHECK(h.counts[4] == 1);            // [0.5, 1): 0.7
    CHECK(h.counts[5] == 1);            // [1, 5): 3
    CHECK(h.counts[6] == 1);            // [5, 150): 100
    CHECK(h.counts[7] == 1);            // [150, 170): 160.4
    CHECK(!h.format().empty());
}

TEST_CASE("the discrete energy is zero at rest and linear in the load")
{
    const Mesh mesh = build_structured_mesh(CellKind::quad, { 2, 2, 1 }, {});
    const DegreeInfo deg{ 1, 2 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const MaterialParams mp = steel();

    SystemState rest = make_state(disc);
    CHECK(eval_discrete_energy(disc, rest, rest, mp, MaterialLaw::finite_plasticity, 1.0, {})
          == 0.0);

    // perturbed state: energy difference from the load term is exactly -f.u
    std::mt19937_64 rng(65);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    SystemState moved = rest;
    for (auto& v : moved.cell_u)
        for (int i = 0; i < v.size(); i++)
            v[i] = u(rng);
    for (auto& v : moved.face_u)
        for (int i = 0; i < v.size(); i++)
            v[i] = u(rng);

    std::vector<vector_t> f_ext(mesh.cells.size());
    double dot = 0.0;
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); c++) {
        f_ext[c] = vector_t::Zero(disc.ops(c).total_dofs);
        for (int i = 0; i < f_ext[c].size(); i++)
            f_ext[c][i] = u(rng);
        dot += f_ext[c].dot(gather_local(disc, c, moved));
    }

    const double without = eval_discrete_energy(disc, moved, rest, mp,
                                                MaterialLaw::finite_plasticity, 1.0, {});
    const double with = eval_discrete_energy(disc, moved, rest, mp,
                                             MaterialLaw::finite_plasticity, 1.0, f_ext);
    CHECK(with == doctest::Approx(without - dot).epsilon(1e-12));
}

TEST_CASE("an unstable stabilization weight is reported, not fatal")
{
    const Mesh mesh = build_cook_mesh(4);
    const DegreeInfo deg{ 1, 1 };
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);
    const LoadCase loads = clamp_and_pull(mesh, 400.0); // deep plastic flow

    SolverOptions opts;
    opts.beta0 = 1e-6; // far below the coercivity threshold
    opts.parallel = false;
    opts.max_halvings = 2;
    opts.newton.max_iterations = 10;
    GlobalSolver solver(disc, steel(), MaterialLaw::finite_plasticity, loads, opts);
    SystemState state = make_state(disc);
    RunOptions run;
    run.steps = 3;
    const RunResult result = solver.run_load_program(state, run);
    CHECK(!result.completed);
    CHECK(!result.message.empty());
}
