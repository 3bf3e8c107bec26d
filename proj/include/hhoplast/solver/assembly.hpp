#pragma once

#include "hhoplast/material/plasticity.hpp"
#include "hhoplast/solver/discretization.hpp"

namespace hhoplast {

struct CellSystem {
    matrix_t K;     // tangent G^t A G + beta Z (symmetric)
    vector_t R;     // internal - external force
    vector_t Fint;  // internal force only
    std::vector<MaterialPointState> trial;
    std::vector<Mat3> piola;       // full 3x3 first Piola-Kirchhoff stress per point
    std::vector<Mat3> defgrad;     // F (3x3, plane strain embedded) per point
    std::vector<Mat9> tangent;     // nominal modulus per point
    std::vector<double> energy;    // Helmholtz energy density per point
    double total_energy = 0.0;     // incremental potential: int psi + stab - f.u
    bool failed = false;
    std::string error;
};

// Tangent and residual of one cell at the local dof vector u_loc, integrating
// the behaviour from the committed states of the previous step.  strain_old
// holds E(F(u^{n-1})) per quadrature point; f_ext the external load vector in
// the local layout (may be empty).
CellSystem assemble_cell(const Discretization& disc, int cell, const vector_t& u_loc,
                         const std::vector<Mat3>& strain_old,
                         const std::vector<MaterialPointState>& committed,
                         const MaterialParams& mp, MaterialLaw law, double beta0,
                         const vector_t& f_ext);

struct CellEnergy {
    double energy = 0.0;
    bool failed = false;
};

// Incremental potential of one cell at u_loc without forming forces or
// tangents; the line search probes candidate iterates with this.
CellEnergy cell_incremental_energy(const Discretization& disc, int cell, const vector_t& u_loc,
                                   const std::vector<Mat3>& strain_old,
                                   const std::vector<MaterialPointState>& committed,
                                   const MaterialParams& mp, MaterialLaw law, double beta0,
                                   const vector_t& f_ext);

struct CondensedCell {
    matrix_t Khat;  // Schur complement on the face dofs
    vector_t Rhat;
    Eigen::LDLT<matrix_t> Ktt;
    matrix_t Ktf;
    vector_t Rt;
};

CondensedCell static_condensation(const matrix_t& K, const vector_t& R, int cell_dofs);
vector_t recover_cell_increment(const CondensedCell& cc, const vector_t& dface);

// E(F(u)) per behaviour quadrature point of a cell (plane strain embedding in
// 2D); used to cache the previous-step strains once per load step.
std::vector<Mat3> cell_log_strains(const Discretization& disc, int cell,
                                   const vector_t& u_loc);

// External load vector of one cell (body force plus Neumann faces) at load
// factor t.  u_prev supplies the deformation used by follower tractions.
vector_t cell_load_vector(const Discretization& disc, int cell, const LoadCase& loads,
                          double t, const vector_t* u_prev);

} // namespace hhoplast
