#include "hhoplast/solver/assembly.hpp"

namespace hhoplast {

namespace {

Mat3 embed_defgrad(const Mat3& g, int dim)
{
    Mat3 f = Mat3::Identity();
    f.topLeftCorner(dim, dim) += g.topLeftCorner(dim, dim);
    return f;
}

// restrict a 9x9 modulus / 3x3 tensor to the gradient slots of the dimension
matrix_t slot_matrix(const Mat9& a, int dim)
{
    if (dim == 3)
        return a;
    return inplane_block(a);
}

vector_t slot_vector(const Mat3& p, int dim)
{
    if (dim == 3)
        return to_vec9(p);
    return inplane_vec(p);
}

} // namespace

std::vector<Mat3> cell_log_strains(const Discretization& disc, int cell, const vector_t& u_loc)
{
    const LocalOperators& ops = disc.ops(cell);
    std::vector<Mat3> strains(ops.behavior_rule.size());
    for (std::size_t q = 0; q < ops.behavior_rule.size(); q++) {
        const vector_t g = ops.grad_at_qp[q] * u_loc;
        Mat3 gm = Mat3::Zero();
        for (int a = 0; a < ops.dim; a++)
            for (int b = 0; b < ops.dim; b++)
                gm(a, b) = g[a * ops.dim + b];
        strains[q] = LogStrain(embed_defgrad(gm, ops.dim)).strain();
    }
    return strains;
}

CellSystem assemble_cell(const Discretization& disc, int cell, const vector_t& u_loc,
                         const std::vector<Mat3>& strain_old,
                         const std::vector<MaterialPointState>& committed,
                         const MaterialParams& mp, MaterialLaw law, double beta0,
                         const vector_t& f_ext)
{
    const LocalOperators& ops = disc.ops(cell);
    const int d = ops.dim;
    const int n = ops.total_dofs;
    const std::size_t nq = ops.behavior_rule.size();
    const double beta = 2.0 * mp.mu() * beta0;

    CellSystem cs;
    cs.K = beta * ops.stab_form;
    cs.Fint = beta * (ops.stab_form * u_loc);
    cs.trial = committed;
    cs.piola.resize(nq);
    cs.defgrad.resize(nq);
    cs.tangent.resize(nq);
    cs.energy.resize(nq);

    for (std::size_t q = 0; q < nq; q++) {
        const double w = ops.behavior_rule.weights[q];
        const matrix_t& eq = ops.grad_at_qp[q];
        const vector_t g = eq * u_loc;
        Mat3 gm = Mat3::Zero();
        for (int a = 0; a < d; a++)
            for (int b = 0; b < d; b++)
                gm(a, b) = g[a * d + b];

        Mat3 piola;
        Mat9 modulus;
        if (law == MaterialLaw::linear_elastic) {
            const Mat3 eps = sym(gm);
            piola = apply_elastic(mp, eps);
            modulus = isotropic_modulus(mp.mu(), mp.lambda());
            cs.defgrad[q] = embed_defgrad(gm, d);
            cs.energy[q] = elastic_energy(mp, eps);
        } else {
            const Mat3 f = embed_defgrad(gm, d);
            try {
                const LogStrain kin(f);
                const FiniteStepResult fp = finite_plasticity(committed[q], strain_old[q], kin, mp);
                piola = fp.piola;
                modulus = fp.nominal_tangent;
                cs.trial[q] = fp.state;
                cs.defgrad[q] = f;
                cs.energy[q] = elastic_energy(mp, fp.log_strain - fp.state.plastic_strain)
                               + plastic_energy(mp, fp.state.eq_plastic_strain);
            } catch (const StepRejection& e) {
                cs.failed = true;
                cs.error = e.what();
                return cs;
            }
        }
        cs.piola[q] = piola;
        cs.tangent[q] = modulus;
        cs.K.noalias() += w * eq.transpose() * slot_matrix(modulus, d) * eq;
        cs.Fint.noalias() += w * eq.transpose() * slot_vector(piola, d);
        cs.total_energy += w * cs.energy[q];
    }
    cs.total_energy += 0.5 * beta * u_loc.dot(ops.stab_form * u_loc);

    cs.R = cs.Fint;
    if (f_ext.size() == n) {
        cs.R -= f_ext;
        cs.total_energy -= f_ext.dot(u_loc);
    }
    return cs;
}

CellEnergy cell_incremental_energy(const Discretization& disc, int cell, const vector_t& u_loc,
                                   const std::vector<Mat3>& strain_old,
                                   const std::vector<MaterialPointState>& committed,
                                   const MaterialParams& mp, MaterialLaw law, double beta0,
                                   const vector_t& f_ext)
{
    const LocalOperators& ops = disc.ops(cell);
    const int d = ops.dim;
    const double beta = 2.0 * mp.mu() * beta0;

    CellEnergy ce;
    for (std::size_t q = 0; q < ops.behavior_rule.size(); q++) {
        const double w = ops.behavior_rule.weights[q];
        const vector_t g = ops.grad_at_qp[q] * u_loc;
        Mat3 gm = Mat3::Zero();
        for (int a = 0; a < d; a++)
            for (int b = 0; b < d; b++)
                gm(a, b) = g[a * d + b];

        if (law == MaterialLaw::linear_elastic) {
            ce.energy += w * elastic_energy(mp, sym(gm));
        } else {
            try {
                const LogStrain kin(embed_defgrad(gm, d));
                const Mat3 strain_new = kin.strain();
                const SmallStepResult small = small_plasticity(
                    committed[q], strain_old[q], strain_new - strain_old[q], mp);
                ce.energy += w
                             * (elastic_energy(mp, strain_new - small.state.plastic_strain)
                                + plastic_energy(mp, small.state.eq_plastic_strain));
            } catch (const StepRejection&) {
                ce.failed = true;
                return ce;
            }
        }
    }
    ce.energy += 0.5 * beta * u_loc.dot(ops.stab_form * u_loc);
    if (f_ext.size() == ops.total_dofs)
        ce.energy -= f_ext.dot(u_loc);
    return ce;
}

CondensedCell static_condensation(const matrix_t& K, const vector_t& R, int cell_dofs)
{
    const int nf = static_cast<int>(K.rows()) - cell_dofs;
    CondensedCell cc;
    cc.Ktt.compute(K.topLeftCorner(cell_dofs, cell_dofs));
    cc.Ktf = K.topRightCorner(cell_dofs, nf);
    cc.Rt = R.head(cell_dofs);
    const matrix_t ktt_inv_ktf = cc.Ktt.solve(cc.Ktf);
    cc.Khat = K.bottomRightCorner(nf, nf) - cc.Ktf.transpose() * ktt_inv_ktf;
    cc.Rhat = R.tail(nf) - ktt_inv_ktf.transpose() * cc.Rt;
    return cc;
}

vector_t recover_cell_increment(const CondensedCell& cc, const vector_t& dface)
{
    return -cc.Ktt.solve(cc.Rt + cc.Ktf * dface);
}

vector_t cell_load_vector(const Discretization& disc, int cell, const LoadCase& loads, double t,
                          const vector_t* u_prev)
{
    const LocalOperators& ops = disc.ops(cell);
    const Mesh& mesh = disc.mesh();
    const int d = ops.dim;
    vector_t f = vector_t::Zero(ops.total_dofs);

    if (loads.body) {
        const QuadRule rule = make_cell_quadrature(mesh, cell, disc.orders().load);
        for (std::size_t q = 0; q < rule.size(); q++) {
            const Vec3 b = loads.body(rule.points[q], t);
            const vector_t phi = ops.cell_basis.values(rule.points[q]);
            for (int i = 0; i < phi.size(); i++)
                for (int c = 0; c < d; c++)
                    f[i * d + c] += rule.weights[q] * phi[i] * b[c];
        }
    }

    vector_t grad_coeffs;
    for (std::size_t fi = 0; fi < ops.face_ids.size(); fi++) {
        const int fid = ops.face_ids[fi];
        const Face& face = mesh.faces[fid];
        if (!face.on_boundary() || face.tag < 0)
            continue;
        const auto it = loads.boundary.find(face.tag);
        if (it == loads.boundary.end() || it->second.kind != BoundaryCondition::Kind::neumann)
            continue;
        const BoundaryCondition& bc = it->second;
        const QuadRule rule = make_face_quadrature(mesh, fid, disc.orders().load);
        if (bc.follower && u_prev && grad_coeffs.size() == 0)
            grad_coeffs = ops.gradient * (*u_prev);
        for (std::size_t q = 0; q < rule.size(); q++) {
            Vec3 tn = bc.value(rule.points[q], t);
            if (bc.follower && u_prev) {
                // explicit update: transform the nominal data with the
                // deformation at the start of the step (Nanson's relation)
                Mat3 g = Mat3::Identity();
                g.topLeftCorner(d, d)
                    += ops.gradient_value(grad_coeffs, rule.points[q]).topLeftCorner(d, d);
                tn = g.determinant() * g.inverse().transpose() * tn;
            }
            const vector_t chi = ops.face_bases[fi].values(rule.points[q]);
            for (int j = 0; j < chi.size(); j++)
                for (int c = 0; c < d; c++)
                    f[ops.face_offsets[fi] + j * d + c] += rule.weights[q] * chi[j] * tn[c];
        }
    }
    return f;
}

} // namespace hhoplast
