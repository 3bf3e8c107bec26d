#pragma once

#include "hhoplast/approx/quadrature.hpp"
#include "hhoplast/mesh/mesh.hpp"

#include <array>
#include <vector>

namespace hhoplast {

// Scaled monomials ((x - x_T)/h_T)^alpha in graded-lex order; the first
// function is the constant 1.  Face bases live in an orthonormal frame of the
// face plane with (d-1) intrinsic variables.
class ScalarBasis {
  public:
    static ScalarBasis cell(const Mesh& mesh, int cell, int degree);
    static ScalarBasis face(const Mesh& mesh, int face, int degree);

    int size() const { return static_cast<int>(expo.size()); }
    int degree() const { return deg; }

    vector_t values(const Vec3& x) const;
    // Physical-space gradients, rows are basis functions (cell bases only).
    matrix_t gradients(const Vec3& x) const;

    static int dimension(int degree, int dim);

  private:
    int deg = 0;
    int vars = 2; // number of intrinsic variables
    bool on_face = false;
    Vec3 center = Vec3::Zero();
    double h = 1.0;
    Eigen::Matrix<double, 3, 3> frame = Eigen::Matrix<double, 3, 3>::Identity(); // columns: axes
    std::vector<std::array<int, 3>> expo;

    void build_exponents();
    Vec3 local_coords(const Vec3& x) const;
};

// M_ij = sum_q w_q a_i(x_q) b_j(x_q)
matrix_t scalar_mass(const ScalarBasis& a, const ScalarBasis& b, const QuadRule& rule);

// D_ij = sum_q w_q a_i(x_q) (grad b_j(x_q) . dir)
matrix_t scalar_grad_mass(const ScalarBasis& a, const ScalarBasis& b, const Vec3& dir,
                          const QuadRule& rule);

// K_ij = sum_q w_q grad a_i . grad a_j
matrix_t scalar_stiffness(const ScalarBasis& a, const QuadRule& rule);

} // namespace hhoplast
