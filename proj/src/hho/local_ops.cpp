#include "hhoplast/hho/local_ops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace hhoplast {

void DegreeInfo::validate(bool allow_lowest_order) const
{
    if (k < 0 || (k == 0 && !allow_lowest_order))
        throw std::invalid_argument("DegreeInfo: face degree must be at least 1");
    if (l != k && l != k + 1)
        throw std::invalid_argument("DegreeInfo: cell degree must be k or k+1");
    if (k == 0 && l != 1)
        throw std::invalid_argument("DegreeInfo: k = 0 requires cell degree 1");
}

QuadOrders QuadOrders::defaults(const DegreeInfo& deg)
{
    const int m = std::max(deg.k, deg.l);
    QuadOrders q;
    q.behavior = 2 * deg.k;
    q.cell_op = 2 * (deg.k + 1);
    q.face_op = 2 * m + 1;
    q.load = 2 * m + 2;
    return q;
}

namespace {

// integral of every basis function
vector_t basis_integrals(const ScalarBasis& basis, const QuadRule& rule)
{
    vector_t m = vector_t::Zero(basis.size());
    for (std::size_t q = 0; q < rule.size(); q++)
        m += rule.weights[q] * basis.values(rule.points[q]);
    return m;
}

// C_ij = sum_q w grad a_i . grad b_j
matrix_t cross_stiffness(const ScalarBasis& a, const ScalarBasis& b, const QuadRule& rule)
{
    matrix_t m = matrix_t::Zero(a.size(), b.size());
    for (std::size_t q = 0; q < rule.size(); q++) {
        const matrix_t ga = a.gradients(rule.points[q]);
        const matrix_t gb = b.gradients(rule.points[q]);
        m.noalias() += rule.weights[q] * ga * gb.transpose();
    }
    return m;
}

// interleave a scalar operator over d components
matrix_t expand_vector(const matrix_t& m, int d)
{
    matrix_t out = matrix_t::Zero(m.rows() * d, m.cols() * d);
    for (int i = 0; i < m.rows(); i++)
        for (int j = 0; j < m.cols(); j++)
            for (int c = 0; c < d; c++)
                out(i * d + c, j * d + c) = m(i, j);
    return out;
}

} // namespace

LocalOperators build_local_operators(const Mesh& mesh, int cell, const DegreeInfo& deg,
                                     const QuadOrders& orders)
{
    const int d = mesh.dim;
    const Cell& c = mesh.cells[cell];
    const int nf = static_cast<int>(c.faces.size());

    LocalOperators ops;
    ops.cell = cell;
    ops.dim = d;
    ops.deg = deg;
    ops.face_ids = c.faces;

    const int n_l = ScalarBasis::dimension(deg.l, d);
    const int n_k = ScalarBasis::dimension(deg.k, d);
    const int n_r = ScalarBasis::dimension(deg.k + 1, d);
    const int n_kf = ScalarBasis::dimension(deg.k, d - 1);
    const int fbs = d * n_kf;
    ops.n_grad_scalar = n_k;
    ops.cell_dofs = d * n_l;
    ops.total_dofs = ops.cell_dofs + nf * fbs;
    for (int f = 0; f < nf; f++)
        ops.face_offsets.push_back(ops.cell_dofs + f * fbs);

    ops.cell_basis = ScalarBasis::cell(mesh, cell, deg.l);
    ops.grad_basis = ScalarBasis::cell(mesh, cell, deg.k);
    ops.rec_basis = ScalarBasis::cell(mesh, cell, deg.k + 1);
    for (int f : c.faces)
        ops.face_bases.push_back(ScalarBasis::face(mesh, f, deg.k));

    const QuadRule cell_rule = make_cell_quadrature(mesh, cell, orders.cell_op);
    std::vector<QuadRule> face_rules;
    for (int f : c.faces)
        face_rules.push_back(make_face_quadrature(mesh, f, orders.face_op));
    ops.behavior_rule = make_cell_quadrature(mesh, cell, orders.behavior);

    // scalar building blocks on the cell
    const matrix_t mass_k = scalar_mass(ops.grad_basis, ops.grad_basis, cell_rule);
    const matrix_t mass_l = scalar_mass(ops.cell_basis, ops.cell_basis, cell_rule);
    std::vector<matrix_t> cell_grad(d);
    for (int b = 0; b < d; b++) {
        Vec3 dir = Vec3::Zero();
        dir[b] = 1.0;
        cell_grad[b] = scalar_grad_mass(ops.grad_basis, ops.cell_basis, dir, cell_rule);
    }
    const matrix_t stiff_rec = scalar_stiffness(ops.rec_basis, cell_rule);
    const matrix_t cross_rec_cell = cross_stiffness(ops.rec_basis, ops.cell_basis, cell_rule);
    const vector_t int_rec = basis_integrals(ops.rec_basis, cell_rule);
    const vector_t int_cell = basis_integrals(ops.cell_basis, cell_rule);
    const Eigen::LDLT<matrix_t> mass_l_ldlt(mass_l);
    const matrix_t proj_cell_rec
        = mass_l_ldlt.solve(scalar_mass(ops.cell_basis, ops.rec_basis, cell_rule));

    // scalar dof layout [cell | faces], expanded to vectors at the end
    const int n_s = n_l + nf * n_kf;
    auto scol = [&](int face_idx) { return n_l + face_idx * n_kf; };

    // gradient reconstruction: (G, tau)_T = (grad v_T, tau)_T
    //                                       + sum_F (v_F - v_T, tau n)_F
    matrix_t grad_rhs = matrix_t::Zero(d * d * n_k, ops.total_dofs);
    for (int alpha = 0; alpha < d; alpha++)
        for (int beta = 0; beta < d; beta++) {
            const int slot = alpha * d + beta;
            for (int m = 0; m < n_k; m++)
                for (int i = 0; i < n_l; i++)
                    grad_rhs(slot * n_k + m, i * d + alpha) += cell_grad[beta](m, i);
        }
    const Eigen::LDLT<matrix_t> mass_k_ldlt(mass_k);

    // displacement reconstruction (scalar): Neumann problem + mean value
    matrix_t disp_rhs = matrix_t::Zero(n_r, n_s);
    disp_rhs.block(0, 0, n_r, n_l) = cross_rec_cell;

    // per-face contributions
    std::vector<matrix_t> trace_cell(nf), trace_rec(nf), mass_f(nf);
    for (int f = 0; f < nf; f++) {
        const int fid = c.faces[f];
        const Vec3 n = mesh.outward_normal(cell, fid);
        const QuadRule& fr = face_rules[f];
        const ScalarBasis& fb = ops.face_bases[f];

        mass_f[f] = scalar_mass(fb, fb, fr);
        const Eigen::LDLT<matrix_t> mass_f_ldlt(mass_f[f]);
        trace_cell[f] = mass_f_ldlt.solve(scalar_mass(fb, ops.cell_basis, fr));
        trace_rec[f] = mass_f_ldlt.solve(scalar_mass(fb, ops.rec_basis, fr));

        // gradient rhs: +- n_beta (phi, .)_F
        const matrix_t face_cell = scalar_mass(ops.grad_basis, ops.cell_basis, fr);
        const matrix_t face_face = scalar_mass(ops.grad_basis, fb, fr);
        for (int alpha = 0; alpha < d; alpha++)
            for (int beta = 0; beta < d; beta++) {
                const int slot = alpha * d + beta;
                for (int m = 0; m < n_k; m++) {
                    for (int i = 0; i < n_l; i++)
                        grad_rhs(slot * n_k + m, i * d + alpha) -= n[beta] * face_cell(m, i);
                    for (int j = 0; j < n_kf; j++)
                        grad_rhs(slot * n_k + m, ops.face_offsets[f] + j * d + alpha)
                            += n[beta] * face_face(m, j);
                }
            }

        // displacement rhs: -(v_T, grad w . n)_F + (v_F, grad w . n)_F
        const matrix_t gn_cell = scalar_grad_mass(ops.cell_basis, ops.rec_basis, n, fr);
        const matrix_t gn_face = scalar_grad_mass(fb, ops.rec_basis, n, fr);
        disp_rhs.block(0, 0, n_r, n_l) -= gn_cell.transpose();
        disp_rhs.block(0, scol(f), n_r, n_kf) += gn_face.transpose();
    }

    ops.gradient = matrix_t::Zero(d * d * n_k, ops.total_dofs);
    for (int slot = 0; slot < d * d; slot++)
        ops.gradient.middleRows(slot * n_k, n_k)
            = mass_k_ldlt.solve(grad_rhs.middleRows(slot * n_k, n_k));

    matrix_t disp_s = matrix_t::Zero(n_r, n_s);
    disp_s.bottomRows(n_r - 1) = stiff_rec.bottomRightCorner(n_r - 1, n_r - 1)
                                     .ldlt()
                                     .solve(disp_rhs.bottomRows(n_r - 1));
    // mean-value closure: (D(v), 1)_T = (v_T, 1)_T; the first rec function is 1
    {
        Eigen::RowVectorXd cell_means = Eigen::RowVectorXd::Zero(n_s);
        cell_means.head(n_l) = int_cell.transpose();
        disp_s.row(0) = (cell_means - int_rec.tail(n_r - 1).transpose() * disp_s.bottomRows(n_r - 1))
                        / int_rec[0];
    }
    ops.displacement = expand_vector(disp_s, d);

    // stabilization and strain seminorm (scalar forms first)
    matrix_t stab_s = matrix_t::Zero(nf * n_kf, n_s);
    matrix_t z_s = matrix_t::Zero(n_s, n_s);
    matrix_t q_s = matrix_t::Zero(n_s, n_s);
    q_s.topLeftCorner(n_l, n_l) = cross_stiffness(ops.cell_basis, ops.cell_basis, cell_rule);
    for (int f = 0; f < nf; f++) {
        const int fid = c.faces[f];
        const double hf = mesh.faces[fid].diameter;
        const QuadRule& fr = face_rules[f];

        // S_F = v_F - proj_F(v_T) for the mixed-order variant, with the
        // high-order correction - proj_F((1 - proj_T) D(v)) when l = k
        matrix_t s_f = matrix_t::Zero(n_kf, n_s);
        s_f.block(0, 0, n_kf, n_l) = -trace_cell[f];
        s_f.block(0, scol(f), n_kf, n_kf).setIdentity();
        if (deg.variant() == StabVariant::equal_order)
            s_f -= (trace_rec[f] - trace_cell[f] * proj_cell_rec) * disp_s;
        stab_s.middleRows(f * n_kf, n_kf) = s_f;
        z_s.noalias() += (1.0 / hf) * s_f.transpose() * mass_f[f] * s_f;

        const matrix_t mtt = scalar_mass(ops.cell_basis, ops.cell_basis, fr);
        const matrix_t mtf = scalar_mass(ops.cell_basis, ops.face_bases[f], fr);
        q_s.topLeftCorner(n_l, n_l) += mtt / hf;
        q_s.block(0, scol(f), n_l, n_kf) -= mtf / hf;
        q_s.block(scol(f), 0, n_kf, n_l) -= mtf.transpose() / hf;
        q_s.block(scol(f), scol(f), n_kf, n_kf) += mass_f[f] / hf;

        ops.face_mass.push_back(expand_vector(mass_f[f], d));
    }
    ops.stab = expand_vector(stab_s, d);
    ops.stab_form = expand_vector(z_s, d);
    ops.seminorm_form = expand_vector(q_s, d);

    // behaviour-point evaluation of the gradient image
    for (std::size_t q = 0; q < ops.behavior_rule.size(); q++) {
        const vector_t phi = ops.grad_basis.values(ops.behavior_rule.points[q]);
        matrix_t eq(d * d, ops.total_dofs);
        for (int slot = 0; slot < d * d; slot++)
            eq.row(slot) = phi.transpose() * ops.gradient.middleRows(slot * n_k, n_k);
        ops.grad_at_qp.push_back(std::move(eq));
    }
    return ops;
}

Mat3 LocalOperators::gradient_value(const vector_t& grad_coeffs, const Vec3& x) const
{
    const vector_t phi = grad_basis.values(x);
    Mat3 g = Mat3::Zero();
    for (int alpha = 0; alpha < dim; alpha++)
        for (int beta = 0; beta < dim; beta++)
            g(alpha, beta)
                = phi.dot(grad_coeffs.segment((alpha * dim + beta) * n_grad_scalar, n_grad_scalar));
    return g;
}

vector_t reduction(const Mesh& mesh, int cell, const DegreeInfo& deg, const VectorField& f,
                   int rule_boost)
{
    const int d = mesh.dim;
    const Cell& c = mesh.cells[cell];
    const ScalarBasis cell_basis = ScalarBasis::cell(mesh, cell, deg.l);
    const QuadRule cell_rule = make_cell_quadrature(mesh, cell, 2 * deg.l + rule_boost);

    const int n_l = cell_basis.size();
    const int n_kf = ScalarBasis::dimension(deg.k, d - 1);
    vector_t out = vector_t::Zero(d * (n_l + static_cast<int>(c.faces.size()) * n_kf));
    out.head(d * n_l) = l2_project(cell_basis, f, cell_rule, d);
    int off = d * n_l;
    for (int fid : c.faces) {
        const ScalarBasis face_basis = ScalarBasis::face(mesh, fid, deg.k);
        const QuadRule face_rule = make_face_quadrature(mesh, fid, 2 * deg.k + rule_boost);
        out.segment(off, d * n_kf) = l2_project(face_basis, f, face_rule, d);
        off += d * n_kf;
    }
    return out;
}

double strain_seminorm(const LocalOperators& ops, const vector_t& v)
{
    return std::sqrt(std::max(0.0, v.dot(ops.seminorm_form * v)));
}

} // namespace hhoplast
