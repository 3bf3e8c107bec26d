#pragma once

#include "hhoplast/approx/basis.hpp"
#include "hhoplast/approx/projector.hpp"

namespace hhoplast {

enum class StabVariant { equal_order, mixed_order };

struct DegreeInfo {
    int k = 1; // face degree
    int l = 1; // cell degree

    StabVariant variant() const
    {
        return l == k ? StabVariant::equal_order : StabVariant::mixed_order;
    }
    // Throws std::invalid_argument unless l in {k, k+1}; k = 0 needs l = 1
    // and allow_lowest_order.
    void validate(bool allow_lowest_order = false) const;

    int cell_dofs(int dim) const { return dim * ScalarBasis::dimension(l, dim); }
    int face_dofs(int dim) const { return dim * ScalarBasis::dimension(k, dim - 1); }
};

struct QuadOrders {
    int behavior; // constitutive integration, >= 2k
    int cell_op;  // cell integrals of the local operators
    int face_op;  // face integrals of the local operators
    int load;     // external load integrals

    static QuadOrders defaults(const DegreeInfo& deg);
};

// All cell-local HHO structure for one cell: reconstruction operators,
// stabilization, quadrature caches.  Local dof vectors are laid out as
// [cell dofs | face dofs in cell face order]; inside a block the scalar
// function index is major and the component minor (dof = i*d + c).
struct LocalOperators {
    int cell = -1;
    int dim = 2;
    DegreeInfo deg;
    int cell_dofs = 0;
    int total_dofs = 0;
    std::vector<int> face_ids;
    std::vector<int> face_offsets; // offset of each face block

    matrix_t gradient;       // G: (d^2 * n_k) x ndof, tensor slot major
    matrix_t displacement;   // D: (d * n_{k+1}) x ndof
    matrix_t stab;           // S: (sum face dofs) x ndof
    matrix_t stab_form;      // Z = sum_F (1/h_F) S_F^t M_F S_F (unit beta)
    matrix_t seminorm_form;  // |v|_{1,T}^2 = v^t Q v

    QuadRule behavior_rule;
    std::vector<matrix_t> grad_at_qp; // per point: d^2 x ndof, evaluates G(v)(x_q)
    std::vector<matrix_t> face_mass;  // vector-valued face mass per face

    ScalarBasis cell_basis;     // degree l
    ScalarBasis grad_basis;     // degree k scalar factor of the tensor basis
    ScalarBasis rec_basis;      // degree k+1
    std::vector<ScalarBasis> face_bases;

    int n_grad_scalar = 0; // ScalarBasis::dimension(k, d)

    // G(v) evaluated at a point from the coefficient image G * v_loc.
    Mat3 gradient_value(const vector_t& grad_coeffs, const Vec3& x) const;

    LocalOperators() : cell_basis(), grad_basis(), rec_basis() {}
};

LocalOperators build_local_operators(const Mesh& mesh, int cell, const DegreeInfo& deg,
                                     const QuadOrders& orders);

// Interpolation onto the local space: cell L2 projection of degree l plus face
// projections of degree k.  rule_boost raises the projection quadrature order
// (needed when probing with polynomials above degree l).
vector_t reduction(const Mesh& mesh, int cell, const DegreeInfo& deg, const VectorField& f,
                   int rule_boost = 0);

double strain_seminorm(const LocalOperators& ops, const vector_t& v);

} // namespace hhoplast
