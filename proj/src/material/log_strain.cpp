#include "hhoplast/material/log_strain.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace hhoplast {

namespace {

constexpr double kConfluentTol = 1e-8;

// kron(A, B) with row-major vec: M_{(3i+j),(3k+l)} = A_ik B_jl
Mat9 kron3(const Mat3& a, const Mat3& b)
{
    Mat9 m;
    for (int i = 0; i < 3; i++)
        for (int k = 0; k < 3; k++)
            m.block<3, 3>(3 * i, 3 * k) = a(i, k) * b;
    return m;
}

} // namespace

double log_divided_difference(double a, double b, double tol)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    const double d = a - b;
    if (std::abs(d) <= tol * scale)
        return 1.0 / (a + b);
    return 0.5 * std::log1p(d / b) / d;
}

double log_divided_difference2(double a, double b, double c, double tol)
{
    double s[3] = { a, b, c };
    std::sort(s, s + 3);
    const double scale = std::max({ std::abs(s[0]), std::abs(s[2]) });
    const double gap = tol * scale;
    if (s[2] - s[0] <= gap) {
        const double m = (s[0] + s[1] + s[2]) / 3.0;
        return -1.0 / (4.0 * m * m);
    }
    if (s[1] - s[0] <= gap) {
        const double m = 0.5 * (s[0] + s[1]);
        return (1.0 / (2.0 * m) - log_divided_difference(m, s[2], tol)) / (m - s[2]);
    }
    if (s[2] - s[1] <= gap) {
        const double m = 0.5 * (s[1] + s[2]);
        return (1.0 / (2.0 * m) - log_divided_difference(m, s[0], tol)) / (m - s[0]);
    }
    // all distinct: divide by the largest spread for stability
    return (log_divided_difference(s[0], s[1], tol) - log_divided_difference(s[1], s[2], tol))
           / (s[0] - s[2]);
}

LogStrain::LogStrain(const Mat3& F) : F_(F)
{
    if (!F.allFinite() || F.determinant() <= 0.0)
        throw StepRejection("deformation gradient with non-positive determinant");
    C_ = F.transpose() * F;
    Eigen::SelfAdjointEigenSolver<Mat3> eig(C_);
    lambda_ = eig.eigenvalues();
    V_ = eig.eigenvectors();
    if (lambda_[0] <= 0.0)
        throw StepRejection("degenerate right Cauchy-Green tensor");
    Vec3 loge;
    for (int i = 0; i < 3; i++)
        loge[i] = 0.5 * std::log(lambda_[i]);
    E_ = V_ * loge.asDiagonal() * V_.transpose();

    // dC/dF: dC_MN = dF_iM F_iN + F_iM dF_iN
    dCdF_.setZero();
    for (int m = 0; m < 3; m++)
        for (int n = 0; n < 3; n++)
            for (int i = 0; i < 3; i++) {
                dCdF_(vec_index(m, n), vec_index(i, m)) += F_(i, n);
                dCdF_(vec_index(m, n), vec_index(i, n)) += F_(i, m);
            }
}

Mat9 LogStrain::strain_derivative_wrt_C() const
{
    const Mat9 rot = kron3(V_, V_);
    Vec9 diag;
    for (int a = 0; a < 3; a++)
        for (int b = 0; b < 3; b++)
            diag[vec_index(a, b)] = log_divided_difference(lambda_[a], lambda_[b], kConfluentTol);
    return rot * diag.asDiagonal() * rot.transpose();
}

const Mat9& LogStrain::strain_derivative() const
{
    if (!have_dEdF_) {
        dEdF_ = strain_derivative_wrt_C() * dCdF_;
        have_dEdF_ = true;
    }
    return dEdF_;
}

Mat3 LogStrain::pull_back_stress(const Mat3& T) const
{
    return from_vec9(strain_derivative().transpose() * to_vec9(T));
}

Mat9 LogStrain::stress_second_derivative(const Mat3& T) const
{
    // geometric part: 2 delta_ik S_jl with S = (dE/dC) : T
    const Mat3 s2 = from_vec9(strain_derivative_wrt_C() * to_vec9(T));
    Mat9 w = kron3(Mat3::Identity(), 2.0 * s2);

    // curvature of E(C), contracted with T, in the eigenframe of C
    const Mat3 t_eig = V_.transpose() * T * V_;
    Mat9 m_eig = Mat9::Zero();
    for (int a = 0; a < 3; a++)
        for (int b = 0; b < 3; b++)
            for (int c = 0; c < 3; c++) {
                const double f2 = log_divided_difference2(lambda_[a], lambda_[c], lambda_[b],
                                                          kConfluentTol);
                m_eig(vec_index(a, c), vec_index(c, b)) += f2 * t_eig(a, b);
            }
    const Mat9 w_eig = m_eig + m_eig.transpose();
    const Mat9 rot = kron3(V_, V_);
    const Mat9 w_c = rot * w_eig * rot.transpose();
    w.noalias() += dCdF_.transpose() * w_c * dCdF_;
    return w;
}

} // namespace hhoplast
