#pragma once

#include "hhoplast/approx/basis.hpp"

#include <functional>

namespace hhoplast {

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

// L2 projection with respect to the quadrature inner product.  The rule must
// keep the Gram matrix positive definite (order >= 2*degree with positive
// weights); a numerically singular Gram raises std::runtime_error.
vector_t l2_project(const ScalarBasis& basis, const ScalarField& f, const QuadRule& rule);

// Component-interleaved coefficients (dof = i_scalar * ncomp + c).
vector_t l2_project(const ScalarBasis& basis, const VectorField& f, const QuadRule& rule,
                    int ncomp);

double eval_scalar(const ScalarBasis& basis, const vector_t& coeffs, const Vec3& x);
Vec3 eval_vector(const ScalarBasis& basis, const vector_t& coeffs, int ncomp, const Vec3& x);

} // namespace hhoplast
