#include "hhoplast/approx/basis.hpp"

#include <stdexcept>

namespace hhoplast {

int ScalarBasis::dimension(int degree, int dim)
{
    switch (dim) {
    case 1: return degree + 1;
    case 2: return (degree + 1) * (degree + 2) / 2;
    case 3: return (degree + 1) * (degree + 2) * (degree + 3) / 6;
    default: throw std::invalid_argument("ScalarBasis::dimension: dim must be 1, 2 or 3");
    }
}

void ScalarBasis::build_exponents()
{
    expo.clear();
    for (int total = 0; total <= deg; total++) {
        if (vars == 1) {
            expo.push_back({ total, 0, 0 });
        } else if (vars == 2) {
            for (int i = total; i >= 0; i--)
                expo.push_back({ i, total - i, 0 });
        } else {
            for (int i = total; i >= 0; i--)
                for (int j = total - i; j >= 0; j--)
                    expo.push_back({ i, j, total - i - j });
        }
    }
}

ScalarBasis ScalarBasis::cell(const Mesh& mesh, int cell, int degree)
{
    ScalarBasis basis;
    basis.deg = degree;
    basis.vars = mesh.dim;
    basis.on_face = false;
    basis.center = mesh.cells[cell].centroid;
    basis.h = 0.5 * mesh.cells[cell].diameter;
    basis.frame.setIdentity();
    basis.build_exponents();
    return basis;
}

ScalarBasis ScalarBasis::face(const Mesh& mesh, int face, int degree)
{
    const Face& f = mesh.faces[face];
    ScalarBasis basis;
    basis.deg = degree;
    basis.vars = mesh.dim - 1;
    basis.on_face = true;
    basis.center = f.centroid;
    basis.h = 0.5 * f.diameter;
    if (mesh.dim == 2) {
        const Vec3 t = (mesh.nodes[f.vertices[1]] - mesh.nodes[f.vertices[0]]).normalized();
        basis.frame.col(0) = t;
    } else {
        const Vec3 t1 = (mesh.nodes[f.vertices[1]] - mesh.nodes[f.vertices[0]]).normalized();
        basis.frame.col(0) = t1;
        basis.frame.col(1) = f.normal.cross(t1);
    }
    basis.build_exponents();
    return basis;
}

Vec3 ScalarBasis::local_coords(const Vec3& x) const
{
    Vec3 u = Vec3::Zero();
    const Vec3 dx = x - center;
    for (int s = 0; s < vars; s++)
        u[s] = frame.col(s).dot(dx) / h;
    return u;
}

vector_t ScalarBasis::values(const Vec3& x) const
{
    const Vec3 u = local_coords(x);
    // powers of each intrinsic variable
    Eigen::Matrix<double, 3, Eigen::Dynamic> pow(3, deg + 1);
    pow.col(0).setOnes();
    for (int p = 1; p <= deg; p++)
        for (int s = 0; s < 3; s++)
            pow(s, p) = pow(s, p - 1) * u[s];
    vector_t vals(size());
    for (int i = 0; i < size(); i++)
        vals[i] = pow(0, expo[i][0]) * pow(1, expo[i][1]) * pow(2, expo[i][2]);
    return vals;
}

matrix_t ScalarBasis::gradients(const Vec3& x) const
{
    const Vec3 u = local_coords(x);
    Eigen::Matrix<double, 3, Eigen::Dynamic> pow(3, deg + 1);
    pow.col(0).setOnes();
    for (int p = 1; p <= deg; p++)
        for (int s = 0; s < 3; s++)
            pow(s, p) = pow(s, p - 1) * u[s];
    matrix_t grads = matrix_t::Zero(size(), 3);
    for (int i = 0; i < size(); i++) {
        for (int s = 0; s < vars; s++) {
            const int e = expo[i][s];
            if (e == 0)
                continue;
            double di = e * pow(s, e - 1) / h;
            for (int t = 0; t < vars; t++)
                if (t != s)
                    di *= pow(t, expo[i][t]);
            grads.row(i) += di * frame.col(s).transpose();
        }
    }
    return grads;
}

matrix_t scalar_mass(const ScalarBasis& a, const ScalarBasis& b, const QuadRule& rule)
{
    matrix_t m = matrix_t::Zero(a.size(), b.size());
    for (std::size_t q = 0; q < rule.size(); q++) {
        const vector_t va = a.values(rule.points[q]);
        const vector_t vb = b.values(rule.points[q]);
        m.noalias() += rule.weights[q] * va * vb.transpose();
    }
    return m;
}

matrix_t scalar_grad_mass(const ScalarBasis& a, const ScalarBasis& b, const Vec3& dir,
                          const QuadRule& rule)
{
    matrix_t m = matrix_t::Zero(a.size(), b.size());
    for (std::size_t q = 0; q < rule.size(); q++) {
        const vector_t va = a.values(rule.points[q]);
        const vector_t gb = b.gradients(rule.points[q]) * dir;
        m.noalias() += rule.weights[q] * va * gb.transpose();
    }
    return m;
}

matrix_t scalar_stiffness(const ScalarBasis& a, const QuadRule& rule)
{
    matrix_t k = matrix_t::Zero(a.size(), a.size());
    for (std::size_t q = 0; q < rule.size(); q++) {
        const matrix_t ga = a.gradients(rule.points[q]);
        k.noalias() += rule.weights[q] * ga * ga.transpose();
    }
    return k;
}

} // namespace hhoplast
