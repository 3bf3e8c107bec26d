#include "hhoplast/solver/tractions.hpp"

#include <cmath>

namespace hhoplast {

std::vector<vector_t> cell_tractions(const Discretization& disc, int cell, const vector_t& u_loc,
                                     const std::vector<Mat3>& piola, double beta)
{
    const LocalOperators& ops = disc.ops(cell);
    const Mesh& mesh = disc.mesh();
    const int d = ops.dim;
    const int n_k = ops.n_grad_scalar;

    // project the stress field onto the degree-k tensor space with the
    // behaviour quadrature (its Gram is exact at this order)
    const QuadRule& br = ops.behavior_rule;
    matrix_t gram = matrix_t::Zero(n_k, n_k);
    matrix_t rhs = matrix_t::Zero(n_k, d * d);
    for (std::size_t q = 0; q < br.size(); q++) {
        const vector_t phi = ops.grad_basis.values(br.points[q]);
        gram.noalias() += br.weights[q] * phi * phi.transpose();
        for (int a = 0; a < d; a++)
            for (int b = 0; b < d; b++)
                rhs.col(a * d + b) += br.weights[q] * piola[q](a, b) * phi;
    }
    const matrix_t proj = gram.ldlt().solve(rhs); // n_k x d^2
    vector_t stress_coeffs(d * d * n_k);
    for (int slot = 0; slot < d * d; slot++)
        stress_coeffs.segment(slot * n_k, n_k) = proj.col(slot);

    const vector_t zu = beta * (ops.stab_form * u_loc);

    std::vector<vector_t> tractions;
    for (std::size_t fi = 0; fi < ops.face_ids.size(); fi++) {
        const int fid = ops.face_ids[fi];
        const Vec3 n = mesh.outward_normal(cell, fid);
        const ScalarBasis& fb = ops.face_bases[fi];
        const int fbs = d * fb.size();
        const QuadRule fr = make_face_quadrature(mesh, fid, disc.orders().face_op);

        vector_t load = vector_t::Zero(fbs);
        for (std::size_t q = 0; q < fr.size(); q++) {
            const Mat3 p = ops.gradient_value(stress_coeffs, fr.points[q]);
            const Vec3 t = p * n;
            const vector_t chi = fb.values(fr.points[q]);
            for (int j = 0; j < fb.size(); j++)
                for (int c = 0; c < d; c++)
                    load[j * d + c] += fr.weights[q] * chi[j] * t[c];
        }
        load += zu.segment(ops.face_offsets[fi], fbs);
        tractions.push_back(
            Eigen::LDLT<matrix_t>(ops.face_mass[fi]).solve(load));
    }
    return tractions;
}

Vec3 traction_resultant(const Discretization& disc, int face, const vector_t& coeffs)
{
    const Mesh& mesh = disc.mesh();
    const int d = mesh.dim;
    const ScalarBasis basis = ScalarBasis::face(mesh, face, disc.degrees().k);
    const QuadRule rule = make_face_quadrature(mesh, face, disc.orders().face_op);
    Vec3 total = Vec3::Zero();
    for (std::size_t q = 0; q < rule.size(); q++) {
        const vector_t chi = basis.values(rule.points[q]);
        for (int j = 0; j < basis.size(); j++)
            for (int c = 0; c < d; c++)
                total[c] += rule.weights[q] * chi[j] * coeffs[j * d + c];
    }
    return total;
}

double traction_norm(const Discretization& disc, int face, const vector_t& coeffs)
{
    const Mesh& mesh = disc.mesh();
    const int d = mesh.dim;
    const ScalarBasis basis = ScalarBasis::face(mesh, face, disc.degrees().k);
    const QuadRule rule = make_face_quadrature(mesh, face, disc.orders().face_op);
    const matrix_t m = scalar_mass(basis, basis, rule);
    double nrm2 = 0.0;
    for (int j = 0; j < basis.size(); j++)
        for (int i = 0; i < basis.size(); i++)
            for (int c = 0; c < d; c++)
                nrm2 += coeffs[i * d + c] * m(i, j) * coeffs[j * d + c];
    return std::sqrt(std::max(0.0, nrm2));
}

TractionField::TractionField(const GlobalSolver& solver, const SystemState& state)
    : disc_(solver.discretization())
{
    const Mesh& mesh = disc_.mesh();
    const double beta = 2.0 * solver.material().mu() * solver.beta0();
    per_face_.resize(mesh.faces.size());
    for (std::size_t c = 0; c < mesh.cells.size(); c++) {
        const vector_t u_loc = gather_local(disc_, static_cast<int>(c), state);
        const auto tf = cell_tractions(disc_, static_cast<int>(c), u_loc,
                                       solver.piola()[c], beta);
        const LocalOperators& ops = disc_.ops(static_cast<int>(c));
        for (std::size_t fi = 0; fi < ops.face_ids.size(); fi++) {
            const int fid = ops.face_ids[fi];
            const int side = mesh.faces[fid].cell_minus == static_cast<int>(c) ? 0 : 1;
            per_face_[fid][side] = tf[fi];
        }
    }
    scale_ = 0.0;
    for (std::size_t f = 0; f < per_face_.size(); f++)
        for (int s = 0; s < 2; s++)
            if (has_side(static_cast<int>(f), s))
                scale_ = std::max(scale_,
                                  traction_norm(disc_, static_cast<int>(f), per_face_[f][s]));
    if (scale_ == 0.0)
        scale_ = 1.0;
}

double TractionField::interface_mismatch() const
{
    double worst = 0.0;
    for (std::size_t f = 0; f < per_face_.size(); f++) {
        if (disc_.mesh().faces[f].on_boundary())
            continue;
        const vector_t jump = per_face_[f][0] + per_face_[f][1];
        worst = std::max(worst, traction_norm(disc_, static_cast<int>(f), jump) / scale_);
    }
    return worst;
}

double TractionField::neumann_mismatch(const LoadCase& loads, double t) const
{
    const Mesh& mesh = disc_.mesh();
    const int d = mesh.dim;
    double worst = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); f++) {
        const Face& face = mesh.faces[f];
        if (!face.on_boundary() || face.tag < 0)
            continue;
        const auto it = loads.boundary.find(face.tag);
        if (it == loads.boundary.end() || it->second.kind != BoundaryCondition::Kind::neumann
            || it->second.follower)
            continue;
        const ScalarBasis basis = ScalarBasis::face(mesh, static_cast<int>(f), disc_.degrees().k);
        const QuadRule rule = make_face_quadrature(mesh, static_cast<int>(f),
                                                   disc_.orders().load);
        const vector_t data = l2_project(
            basis, [&](const Vec3& x) { return it->second.value(x, t); }, rule, d);
        const vector_t diff = per_face_[f][0] - data;
        worst = std::max(worst, traction_norm(disc_, static_cast<int>(f), diff) / scale_);
    }
    return worst;
}

Vec3 TractionField::resultant_on(int tag) const
{
    const Mesh& mesh = disc_.mesh();
    Vec3 total = Vec3::Zero();
    for (std::size_t f = 0; f < mesh.faces.size(); f++)
        if (mesh.faces[f].on_boundary() && mesh.faces[f].tag == tag)
            total += traction_resultant(disc_, static_cast<int>(f), per_face_[f][0]);
    return total;
}

} // namespace hhoplast
