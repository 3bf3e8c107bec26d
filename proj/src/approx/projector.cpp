#include "hhoplast/approx/projector.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace hhoplast {

namespace {

Eigen::LDLT<matrix_t> gram_factor(const ScalarBasis& basis, const QuadRule& rule)
{
    const matrix_t gram = scalar_mass(basis, basis, rule);
    Eigen::LDLT<matrix_t> ldlt(gram);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
        throw std::runtime_error("l2_project: singular Gram matrix, quadrature too weak");
    return ldlt;
}

} // namespace

vector_t l2_project(const ScalarBasis& basis, const ScalarField& f, const QuadRule& rule)
{
    const auto ldlt = gram_factor(basis, rule);
    vector_t rhs = vector_t::Zero(basis.size());
    for (std::size_t q = 0; q < rule.size(); q++)
        rhs += rule.weights[q] * f(rule.points[q]) * basis.values(rule.points[q]);
    return ldlt.solve(rhs);
}

vector_t l2_project(const ScalarBasis& basis, const VectorField& f, const QuadRule& rule,
                    int ncomp)
{
    const auto ldlt = gram_factor(basis, rule);
    matrix_t rhs = matrix_t::Zero(basis.size(), ncomp);
    for (std::size_t q = 0; q < rule.size(); q++) {
        const Vec3 val = f(rule.points[q]);
        const vector_t phi = basis.values(rule.points[q]);
        for (int c = 0; c < ncomp; c++)
            rhs.col(c) += rule.weights[q] * val[c] * phi;
    }
    const matrix_t sol = ldlt.solve(rhs);
    vector_t coeffs(basis.size() * ncomp);
    for (int i = 0; i < basis.size(); i++)
        for (int c = 0; c < ncomp; c++)
            coeffs[i * ncomp + c] = sol(i, c);
    return coeffs;
}

double eval_scalar(const ScalarBasis& basis, const vector_t& coeffs, const Vec3& x)
{
    return basis.values(x).dot(coeffs);
}

Vec3 eval_vector(const ScalarBasis& basis, const vector_t& coeffs, int ncomp, const Vec3& x)
{
    const vector_t phi = basis.values(x);
    Vec3 out = Vec3::Zero();
    for (int i = 0; i < basis.size(); i++)
        for (int c = 0; c < ncomp; c++)
            out[c] += coeffs[i * ncomp + c] * phi[i];
    return out;
}

} // namespace hhoplast
