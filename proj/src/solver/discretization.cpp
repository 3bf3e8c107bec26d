#include "hhoplast/solver/discretization.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hhoplast {

Discretization::Discretization(const Mesh& mesh, const DegreeInfo& deg, const QuadOrders& orders,
                               bool parallel)
    : mesh_(&mesh), deg_(deg), orders_(orders)
{
    deg_.validate(true);
    cbs_ = deg_.cell_dofs(mesh.dim);
    fbs_ = deg_.face_dofs(mesh.dim);
    const int n_cells = static_cast<int>(mesh.cells.size());
    ops_.resize(n_cells);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int c = 0; c < n_cells; c++)
        ops_[c] = build_local_operators(mesh, c, deg_, orders_);
    (void)parallel;
}

SystemState make_state(const Discretization& disc)
{
    SystemState state;
    const int n_cells = static_cast<int>(disc.mesh().cells.size());
    const int n_faces = static_cast<int>(disc.mesh().faces.size());
    state.cell_u.assign(n_cells, vector_t::Zero(disc.cell_block_size()));
    state.face_u.assign(n_faces, vector_t::Zero(disc.face_block_size()));
    state.qp_states.resize(n_cells);
    for (int c = 0; c < n_cells; c++)
        state.qp_states[c].assign(disc.ops(c).behavior_rule.size(), MaterialPointState {});
    return state;
}

vector_t gather_local(const Discretization& disc, int cell, const SystemState& state)
{
    const LocalOperators& ops = disc.ops(cell);
    vector_t u = vector_t::Zero(ops.total_dofs);
    u.head(ops.cell_dofs) = state.cell_u[cell];
    const int fbs = disc.face_block_size();
    for (std::size_t f = 0; f < ops.face_ids.size(); f++)
        u.segment(ops.face_offsets[f], fbs) = state.face_u[ops.face_ids[f]];
    return u;
}

void scatter_cell(const Discretization& disc, int cell, const vector_t& u_loc, SystemState& state)
{
    state.cell_u[cell] = u_loc.head(disc.ops(cell).cell_dofs);
}

} // namespace hhoplast
