#include "hhoplast/solver/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace hhoplast {

double smallest_symmetric_eigenvalue(const Eigen::Ref<const matrix_t>& a, int dim)
{
    // orthonormal basis of the symmetric second-order tensors, flattened in
    // the same slot order as the operator (in-plane 4 entries for dim = 2)
    matrix_t basis;
    const double s = 1.0 / std::sqrt(2.0);
    if (dim == 2) {
        if (a.rows() != 4 || a.cols() != 4)
            throw std::invalid_argument("smallest_symmetric_eigenvalue: expected 4x4 block");
        basis = matrix_t::Zero(4, 3);
        basis(0, 0) = 1.0;                 // e_x (x) e_x
        basis(3, 1) = 1.0;                 // e_y (x) e_y
        basis(1, 2) = basis(2, 2) = s;     // symmetrized shear
    } else if (dim == 3) {
        if (a.rows() != 9 || a.cols() != 9)
            throw std::invalid_argument("smallest_symmetric_eigenvalue: expected 9x9 operator");
        basis = matrix_t::Zero(9, 6);
        basis(0, 0) = basis(4, 1) = basis(8, 2) = 1.0;
        basis(1, 3) = basis(3, 3) = s;
        basis(2, 4) = basis(6, 4) = s;
        basis(5, 5) = basis(7, 5) = s;
    } else {
        throw std::invalid_argument("smallest_symmetric_eigenvalue: dim must be 2 or 3");
    }
    const matrix_t restricted = basis.transpose() * (0.5 * (a + a.transpose())) * basis;
    Eigen::SelfAdjointEigenSolver<matrix_t> eig(restricted);
    return eig.eigenvalues().minCoeff();
}

ThetaHistogram theta_histogram(const std::vector<double>& theta_mpa)
{
    ThetaHistogram h;
    h.counts.assign(h.edges.size() - 1, 0);
    for (double value : theta_mpa) {
        const double gpa = value / 1000.0;
        if (gpa <= h.edges.front()) {
            h.below++;
            continue;
        }
        if (gpa > h.edges.back()) {
            h.above++;
            continue;
        }
        for (std::size_t b = 0; b + 1 < h.edges.size(); b++)
            if (gpa > h.edges[b] && gpa <= h.edges[b + 1]) {
                h.counts[b]++;
                break;
            }
    }
    return h;
}

std::string ThetaHistogram::format() const
{
    std::ostringstream out;
    out << "theta histogram (GPa):\n";
    if (below > 0)
        out << "  (-inf, " << edges.front() << "]: " << below << "\n";
    for (std::size_t b = 0; b + 1 < edges.size(); b++)
        out << "  (" << edges[b] << ", " << edges[b + 1] << "]: "
            << (b < counts.size() ? counts[b] : 0) << "\n";
    if (above > 0)
        out << "  (" << edges.back() << ", inf): " << above << "\n";
    return out.str();
}

} // namespace hhoplast
