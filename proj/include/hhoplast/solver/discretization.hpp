#pragma once

#include "hhoplast/hho/local_ops.hpp"
#include "hhoplast/material/params.hpp"

#include <functional>
#include <map>

namespace hhoplast {

enum class MaterialLaw { finite_plasticity, linear_elastic };

struct BoundaryCondition {
    enum class Kind { dirichlet, neumann };
    Kind kind = Kind::dirichlet;
    std::array<bool, 3> mask { true, true, true }; // constrained components
    std::function<Vec3(const Vec3&, double)> value; // (x, load factor) -> data
    bool follower = false; // neumann: geometry re-evaluated at each step start
};

struct LoadCase {
    std::map<int, BoundaryCondition> boundary; // keyed by face tag
    std::function<Vec3(const Vec3&, double)> body;
};

// Geometry-bound, state-free part of the discretization: the local operators
// of every cell plus the global face dof layout.
class Discretization {
  public:
    Discretization(const Mesh& mesh, const DegreeInfo& deg, const QuadOrders& orders,
                   bool parallel = true);

    const Mesh& mesh() const { return *mesh_; }
    const DegreeInfo& degrees() const { return deg_; }
    const QuadOrders& orders() const { return orders_; }
    const LocalOperators& ops(int cell) const { return ops_[cell]; }

    int cell_block_size() const { return cbs_; }
    int face_block_size() const { return fbs_; }
    int n_face_dofs() const { return fbs_ * static_cast<int>(mesh_->faces.size()); }
    int face_offset(int face) const { return fbs_ * face; }

  private:
    const Mesh* mesh_;
    DegreeInfo deg_;
    QuadOrders orders_;
    int cbs_ = 0, fbs_ = 0;
    std::vector<LocalOperators> ops_;
};

struct SystemState {
    std::vector<vector_t> cell_u;
    std::vector<vector_t> face_u;
    std::vector<std::vector<MaterialPointState>> qp_states;
    double time = 0.0;
};

SystemState make_state(const Discretization& disc);

vector_t gather_local(const Discretization& disc, int cell, const SystemState& state);
void scatter_cell(const Discretization& disc, int cell, const vector_t& u_loc,
                  SystemState& state);

} // namespace hhoplast
