#pragma once

#include "hhoplast/mesh/build.hpp"
#include "hhoplast/solver/newton.hpp"

namespace hhoplast {

// Plane-strain linear elasticity with the divergence-free manufactured
// solution u = (sin(pi x) sin(pi y), cos(pi x) cos(pi y)) on the unit square,
// Dirichlet data taken from the exact trace.  Returns the energy-norm error
// sqrt( sum_T int 2 mu |sym(G u_h - grad u)|^2 + lambda tr(G u_h - grad u)^2 ).
struct MmsResult {
    double energy_error = 0.0;
    double h = 0.0;
    int cells = 0;
    int newton_iterations = 0;
};

MmsResult run_linear_elasticity_mms(CellKind kind, int n, const DegreeInfo& deg, double nu);

// Least-squares slope of log(error) against log(1/n).
double convergence_rate(const std::vector<MmsResult>& results);

} // namespace hhoplast
