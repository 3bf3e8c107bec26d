#include "hhoplast/io/vtk.hpp"
#include "hhoplast/io/curves.hpp"

#include <fstream>
#include <stdexcept>

namespace hhoplast {

void export_mesh_snapshot(const std::string& path, const Discretization& disc,
                          const SystemState& state)
{
    const Mesh& mesh = disc.mesh();
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("export_mesh_snapshot: cannot open " + path);

    // vertex displacement: average of the adjacent cell polynomials
    std::vector<Vec3> disp(mesh.nodes.size(), Vec3::Zero());
    std::vector<int> mult(mesh.nodes.size(), 0);
    for (std::size_t c = 0; c < mesh.cells.size(); c++) {
        const LocalOperators& ops = disc.ops(static_cast<int>(c));
        for (int v : mesh.cells[c].vertices) {
            disp[v] += eval_vector(ops.cell_basis, state.cell_u[c], mesh.dim, mesh.nodes[v]);
            mult[v]++;
        }
    }
    for (std::size_t v = 0; v < disp.size(); v++)
        if (mult[v] > 0)
            disp[v] /= mult[v];

    out << "# vtk DataFile Version 2.0\ndeformed mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.nodes.size() << " double\n";
    for (std::size_t v = 0; v < mesh.nodes.size(); v++) {
        const Vec3 x = mesh.nodes[v] + disp[v];
        out << format_g17(x.x()) << " " << format_g17(x.y()) << " " << format_g17(x.z())
            << "\n";
    }

    std::size_t list_size = 0;
    for (const Cell& cell : mesh.cells)
        list_size += cell.vertices.size() + 1;
    out << "CELLS " << mesh.cells.size() << " " << list_size << "\n";
    for (const Cell& cell : mesh.cells) {
        out << cell.vertices.size();
        for (int v : cell.vertices)
            out << " " << v;
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.cells.size() << "\n";
    for (const Cell& cell : mesh.cells) {
        int type = 7; // VTK_POLYGON
        if (mesh.dim == 3) {
            if (cell.vertices.size() == 4)
                type = 10; // VTK_TETRA
            else
                type = 42; // VTK_POLYHEDRON (connectivity written as point list)
        }
        out << type << "\n";
    }

    out << "POINT_DATA " << mesh.nodes.size() << "\nVECTORS displacement double\n";
    for (std::size_t v = 0; v < disp.size(); v++)
        out << format_g17(disp[v].x()) << " " << format_g17(disp[v].y()) << " "
            << format_g17(disp[v].z()) << "\n";
}

void export_qp_cloud(const std::string& path, const Discretization& disc,
                     const SystemState& state, const std::vector<std::vector<Mat3>>& piola,
                     const std::vector<std::vector<Mat3>>& defgrad)
{
    const Mesh& mesh = disc.mesh();
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("export_qp_cloud: cannot open " + path);

    std::vector<Vec3> points;
    std::vector<double> eqps, pressure;
    for (std::size_t c = 0; c < mesh.cells.size(); c++) {
        const LocalOperators& ops = disc.ops(static_cast<int>(c));
        for (std::size_t q = 0; q < ops.behavior_rule.size(); q++) {
            const Vec3& x = ops.behavior_rule.points[q];
            points.push_back(x + eval_vector(ops.cell_basis, state.cell_u[c], mesh.dim, x));
            eqps.push_back(state.qp_states[c][q].eq_plastic_strain);
            if (!piola.empty() && !defgrad.empty() && q < piola[c].size()) {
                const Mat3& f = defgrad[c][q];
                const Mat3 cauchy = piola[c][q] * f.transpose() / f.determinant();
                pressure.push_back(cauchy.trace() / 3.0);
            } else {
                pressure.push_back(0.0);
            }
        }
    }

    out << "# vtk DataFile Version 2.0\nquadrature cloud\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << points.size() << " double\n";
    for (const Vec3& p : points)
        out << format_g17(p.x()) << " " << format_g17(p.y()) << " " << format_g17(p.z()) << "\n";
    out << "POINT_DATA " << points.size() << "\n";
    out << "SCALARS eq_plastic_strain double 1\nLOOKUP_TABLE default\n";
    for (double v : eqps)
        out << format_g17(v) << "\n";
    out << "SCALARS mean_stress double 1\nLOOKUP_TABLE default\n";
    for (double v : pressure)
        out << format_g17(v) << "\n";
}

} // namespace hhoplast
