#pragma once

#include <Eigen/Dense>
#include <array>

namespace hhoplast {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

using matrix_t = Eigen::MatrixXd;
using vector_t = Eigen::VectorXd;

// Second-order tensors are flattened row-major: a = 3*i + j.
inline int vec_index(int i, int j) { return 3 * i + j; }

inline Vec9 to_vec9(const Mat3& m)
{
    Vec9 v;
    for (int i = 0; i < 3; i++)
        for (int j = 0; j < 3; j++)
            v(3 * i + j) = m(i, j);
    return v;
}

inline Mat3 from_vec9(const Vec9& v)
{
    Mat3 m;
    for (int i = 0; i < 3; i++)
        for (int j = 0; j < 3; j++)
            m(i, j) = v(3 * i + j);
    return m;
}

inline Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }

inline Mat3 dev(const Mat3& m) { return m - (m.trace() / 3.0) * Mat3::Identity(); }

// Kronecker-style dyad (A (x) B)_{(ij)(kl)} = A_ij B_kl.
inline Mat9 dyad(const Mat3& a, const Mat3& b)
{
    return to_vec9(a) * to_vec9(b).transpose();
}

// Fourth-order identity on symmetric tensors, as a 9x9 map.
inline Mat9 identity_sym()
{
    Mat9 s = Mat9::Zero();
    for (int i = 0; i < 3; i++)
        for (int j = 0; j < 3; j++) {
            s(vec_index(i, j), vec_index(i, j)) += 0.5;
            s(vec_index(i, j), vec_index(j, i)) += 0.5;
        }
    return s;
}

// Isotropic elastic modulus 2 mu I_sym + lambda I (x) I.
inline Mat9 isotropic_modulus(double mu, double lambda)
{
    return 2.0 * mu * identity_sym() + lambda * dyad(Mat3::Identity(), Mat3::Identity());
}

// Indices of the in-plane entries (i,j in {0,1}) inside the length-9 flattening.
inline const std::array<int, 4>& inplane_indices()
{
    static const std::array<int, 4> idx = { 0, 1, 3, 4 };
    return idx;
}

inline Eigen::Matrix4d inplane_block(const Mat9& a)
{
    const auto& idx = inplane_indices();
    Eigen::Matrix4d b;
    for (int p = 0; p < 4; p++)
        for (int q = 0; q < 4; q++)
            b(p, q) = a(idx[p], idx[q]);
    return b;
}

inline Eigen::Vector4d inplane_vec(const Mat3& m)
{
    return Eigen::Vector4d(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

// Smallest eigenvalue of a major-symmetric fourth-order tensor restricted to
// symmetric second-order tensors.  dim = 2 expects the in-plane 4x4 block,
// dim = 3 the full 9x9 operator.
double smallest_symmetric_eigenvalue(const Eigen::Ref<const matrix_t>& a, int dim);

} // namespace hhoplast
