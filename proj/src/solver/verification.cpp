#include "hhoplast/solver/verification.hpp"

#include <cmath>

namespace hhoplast {

namespace {

Vec3 exact_solution(const Vec3& x)
{
    return Vec3(std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()),
                std::cos(M_PI * x.x()) * std::cos(M_PI * x.y()), 0.0);
}

Mat3 exact_gradient(const Vec3& x)
{
    const double cx = std::cos(M_PI * x.x()), sx = std::sin(M_PI * x.x());
    const double cy = std::cos(M_PI * x.y()), sy = std::sin(M_PI * x.y());
    Mat3 g = Mat3::Zero();
    g(0, 0) = M_PI * cx * sy;
    g(0, 1) = M_PI * sx * cy;
    g(1, 0) = -M_PI * sx * cy;
    g(1, 1) = -M_PI * cx * sy;
    return g;
}

} // namespace

MmsResult run_linear_elasticity_mms(CellKind kind, int n, const DegreeInfo& deg, double nu)
{
    const Mesh mesh = build_structured_mesh(kind, { n, n, 1 }, Box {});
    const Discretization disc(mesh, deg, QuadOrders::defaults(deg), false);

    MaterialParams mp;
    mp.young = 1.0;
    mp.poisson = nu;
    const double mu = mp.mu();

    LoadCase loads;
    BoundaryCondition dirichlet;
    dirichlet.kind = BoundaryCondition::Kind::dirichlet;
    dirichlet.value = [](const Vec3& x, double t) { return Vec3(t * exact_solution(x)); };
    for (const char* tag : { "left", "right", "bottom", "top" })
        loads.boundary[mesh.tag_id(tag)] = dirichlet;
    loads.body = [mu](const Vec3& x, double t) {
        return Vec3(t * 2.0 * mu * M_PI * M_PI * exact_solution(x));
    };

    SolverOptions opts;
    opts.parallel = false;
    GlobalSolver solver(disc, mp, MaterialLaw::linear_elastic, loads, opts);
    SystemState state = make_state(disc);
    const NewtonReport rep = solver.solve_step(state, 1.0);

    MmsResult result;
    result.cells = static_cast<int>(mesh.cells.size());
    result.newton_iterations = rep.converged ? rep.iterations : -1;
    for (const Cell& cell : mesh.cells)
        result.h = std::max(result.h, cell.diameter);

    const double lambda = mp.lambda();
    double err2 = 0.0;
    for (std::size_t c = 0; c < mesh.cells.size(); c++) {
        const LocalOperators& ops = disc.ops(static_cast<int>(c));
        const vector_t u_loc = gather_local(disc, static_cast<int>(c), state);
        const vector_t gc = ops.gradient * u_loc;
        const QuadRule rule
            = make_cell_quadrature(mesh, static_cast<int>(c), 2 * deg.k + 8);
        for (std::size_t q = 0; q < rule.size(); q++) {
            const Mat3 e = ops.gradient_value(gc, rule.points[q]) - exact_gradient(rule.points[q]);
            const Mat3 es = sym(e);
            err2 += rule.weights[q]
                    * (2.0 * mu * es.squaredNorm() + lambda * e.trace() * e.trace());
        }
    }
    result.energy_error = std::sqrt(err2);
    return result;
}

double convergence_rate(const std::vector<MmsResult>& results)
{
    const int n = static_cast<int>(results.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const MmsResult& r : results) {
        const double x = std::log(r.h);
        const double y = std::log(r.energy_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hhoplast
