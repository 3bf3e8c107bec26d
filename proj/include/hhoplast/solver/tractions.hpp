#pragma once

#include "hhoplast/solver/newton.hpp"

namespace hhoplast {

// Equilibrated face tractions of one cell: the behaviour-projected stress
// normal plus the stabilization adjoint, weighted by the full stabilization
// factor beta = 2 mu beta0.  Coefficients live in the basis of each face, so
// the two sides of an interior face are directly comparable.
std::vector<vector_t> cell_tractions(const Discretization& disc, int cell,
                                     const vector_t& u_loc, const std::vector<Mat3>& piola,
                                     double beta);

// Integral of a face traction polynomial over its face.
Vec3 traction_resultant(const Discretization& disc, int face, const vector_t& coeffs);

// L2(F) norm of a face polynomial given by coefficients.
double traction_norm(const Discretization& disc, int face, const vector_t& coeffs);

// All tractions at the last accepted step of a solver, indexed [face][side]
// with side 0 = cell_minus.
class TractionField {
  public:
    TractionField(const GlobalSolver& solver, const SystemState& state);

    const vector_t& side(int face, int s) const { return per_face_[face][s]; }
    bool has_side(int face, int s) const { return per_face_[face][s].size() > 0; }

    // max over interior faces of |T- + T+| / scale where scale is the largest
    // face traction norm in the mesh.
    double interface_mismatch() const;

    // max over Neumann faces of |T - P_F(t_N)| / scale.
    double neumann_mismatch(const LoadCase& loads, double t) const;

    Vec3 resultant_on(int tag) const;

  private:
    const Discretization& disc_;
    std::vector<std::array<vector_t, 2>> per_face_;
    double scale_ = 0.0;
};

} // namespace hhoplast
