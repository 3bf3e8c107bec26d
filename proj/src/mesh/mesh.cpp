#include "hhoplast/mesh/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hhoplast {

int Mesh::add_tag(const std::string& name)
{
    int id = tag_id(name);
    if (id >= 0)
        return id;
    tag_names.push_back(name);
    return static_cast<int>(tag_names.size()) - 1;
}

int Mesh::tag_id(const std::string& name) const
{
    for (std::size_t i = 0; i < tag_names.size(); i++)
        if (tag_names[i] == name)
            return static_cast<int>(i);
    return -1;
}

static double polygon_signed_area(const std::vector<Vec3>& nodes, const std::vector<int>& loop)
{
    double a = 0.0;
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; i++) {
        const Vec3& p = nodes[loop[i]];
        const Vec3& q = nodes[loop[(i + 1) % n]];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

void Mesh::compute_face_geometry_2d(int f)
{
    Face& face = faces[f];
    const Vec3& a = nodes[face.vertices[0]];
    const Vec3& b = nodes[face.vertices[1]];
    const Vec3 t = b - a;
    face.measure = t.norm();
    face.diameter = face.measure;
    face.centroid = 0.5 * (a + b);
    face.normal = Vec3(t.y(), -t.x(), 0.0) / face.measure;
}

void Mesh::compute_cell_geometry_2d(int c)
{
    Cell& cell = cells[c];
    const auto& loop = cell.vertices;
    const int n = static_cast<int>(loop.size());
    cell.volume = polygon_signed_area(nodes, loop);

    Vec3 cen = Vec3::Zero();
    for (int i = 0; i < n; i++) {
        const Vec3& p = nodes[loop[i]];
        const Vec3& q = nodes[loop[(i + 1) % n]];
        const double cross = p.x() * q.y() - q.x() * p.y();
        cen += cross * (p + q);
    }
    cell.centroid = cen / (6.0 * cell.volume);

    cell.diameter = 0.0;
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++)
            cell.diameter = std::max(cell.diameter, (nodes[loop[i]] - nodes[loop[j]]).norm());
}

void Mesh::finalize_2d()
{
    dim = 2;
    faces.clear();

    for (auto& cell : cells) {
        if (cell.vertices.size() < 3)
            throw std::runtime_error("mesh: 2D cell with fewer than 3 vertices");
        if (polygon_signed_area(nodes, cell.vertices) < 0.0)
            std::reverse(cell.vertices.begin(), cell.vertices.end());
        cell.faces.clear();
    }

    std::map<std::pair<int, int>, int> edge_map;
    for (std::size_t c = 0; c < cells.size(); c++) {
        auto& loop = cells[c].vertices;
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; i++) {
            const int a = loop[i];
            const int b = loop[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = edge_map.find(key);
            if (it == edge_map.end()) {
                Face face;
                face.vertices = { a, b };
                face.cell_minus = static_cast<int>(c);
                faces.push_back(face);
                edge_map.emplace(key, static_cast<int>(faces.size()) - 1);
                cells[c].faces.push_back(static_cast<int>(faces.size()) - 1);
            } else {
                Face& face = faces[it->second];
                if (face.cell_plus >= 0)
                    throw std::runtime_error("mesh: face shared by more than two cells");
                face.cell_plus = static_cast<int>(c);
                cells[c].faces.push_back(it->second);
            }
        }
    }

    for (int f = 0; f < static_cast<int>(faces.size()); f++)
        compute_face_geometry_2d(f);
    for (int c = 0; c < static_cast<int>(cells.size()); c++)
        compute_cell_geometry_2d(c);
}

static void face_geometry_3d(const std::vector<Vec3>& nodes, Face& face)
{
    const auto& loop = face.vertices;
    const int n = static_cast<int>(loop.size());
    Vec3 avec = Vec3::Zero();
    for (int i = 0; i < n; i++)
        avec += nodes[loop[i]].cross(nodes[loop[(i + 1) % n]]);
    avec *= 0.5;
    face.measure = avec.norm();
    if (face.measure <= 0.0)
        throw std::runtime_error("mesh: degenerate 3D face");
    face.normal = avec / face.measure;

    // area-weighted centroid from a fan around the first vertex
    Vec3 cen = Vec3::Zero();
    double area = 0.0;
    const Vec3& p0 = nodes[loop[0]];
    for (int i = 1; i + 1 < n; i++) {
        const Vec3& p1 = nodes[loop[i]];
        const Vec3& p2 = nodes[loop[i + 1]];
        const double a = 0.5 * ((p1 - p0).cross(p2 - p0)).norm();
        cen += a * (p0 + p1 + p2) / 3.0;
        area += a;
    }
    face.centroid = cen / area;

    face.diameter = 0.0;
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++)
            face.diameter = std::max(face.diameter, (nodes[loop[i]] - nodes[loop[j]]).norm());
}

void Mesh::finalize_3d(const std::vector<std::vector<std::vector<int>>>& cell_face_loops)
{
    dim = 3;
    faces.clear();
    if (cell_face_loops.size() != cells.size())
        throw std::runtime_error("mesh: face loops do not match cell count");

    std::map<std::vector<int>, int> face_map;
    for (std::size_t c = 0; c < cells.size(); c++) {
        cells[c].faces.clear();
        std::set<int> verts;
        for (const auto& loop : cell_face_loops[c]) {
            std::vector<int> key = loop;
            std::sort(key.begin(), key.end());
            auto it = face_map.find(key);
            if (it == face_map.end()) {
                Face face;
                face.vertices = loop;
                face.cell_minus = static_cast<int>(c);
                faces.push_back(face);
                face_map.emplace(key, static_cast<int>(faces.size()) - 1);
                cells[c].faces.push_back(static_cast<int>(faces.size()) - 1);
            } else {
                Face& face = faces[it->second];
                if (face.cell_plus >= 0)
                    throw std::runtime_error("mesh: face shared by more than two cells");
                face.cell_plus = static_cast<int>(c);
                cells[c].faces.push_back(it->second);
            }
            verts.insert(loop.begin(), loop.end());
        }
        cells[c].vertices.assign(verts.begin(), verts.end());
    }

    for (auto& face : faces)
        face_geometry_3d(nodes, face);

    for (std::size_t c = 0; c < cells.size(); c++) {
        Cell& cell = cells[c];
        double vol = 0.0;
        for (int f : cell.faces) {
            const Face& face = faces[f];
            const double s = outward_sign(static_cast<int>(c), f);
            vol += s * face.measure * face.centroid.dot(face.normal) / 3.0;
        }
        cell.volume = vol;

        // centroid from signed tets against the origin
        Vec3 cen = Vec3::Zero();
        for (int f : cell.faces) {
            const Face& face = faces[f];
            const double s = outward_sign(static_cast<int>(c), f);
            const auto& loop = face.vertices;
            for (int i = 1; i + 1 < static_cast<int>(loop.size()); i++) {
                const Vec3& a = nodes[loop[0]];
                const Vec3& b = nodes[loop[i]];
                const Vec3& d = nodes[loop[i + 1]];
                const double v = s * a.dot(b.cross(d)) / 6.0;
                cen += v * (a + b + d) / 4.0;
            }
        }
        cell.centroid = cen / cell.volume;

        cell.diameter = 0.0;
        for (std::size_t i = 0; i < cell.vertices.size(); i++)
            for (std::size_t j = i + 1; j < cell.vertices.size(); j++)
                cell.diameter = std::max(
                    cell.diameter, (nodes[cell.vertices[i]] - nodes[cell.vertices[j]]).norm());
    }
}

std::string MeshReport::summary() const
{
    if (ok())
        return "mesh valid";
    std::ostringstream os;
    os << issues.size() << " issue(s):\n";
    for (const auto& issue : issues)
        os << "  - " << issue.what << "\n";
    return os.str();
}

// searches the loop for (a,b) or (b,a) as consecutive entries; returns +1/-1
// according to traversal direction, 0 if absent
static int loop_direction(const std::vector<int>& loop, int a, int b)
{
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; i++) {
        if (loop[i] == a && loop[(i + 1) % n] == b)
            return 1;
        if (loop[i] == b && loop[(i + 1) % n] == a)
            return -1;
    }
    return 0;
}

MeshReport validate_mesh(const Mesh& mesh)
{
    MeshReport report;
    auto flag = [&](const std::string& what) { report.issues.push_back({ what }); };
    const int nv = static_cast<int>(mesh.nodes.size());

    for (std::size_t f = 0; f < mesh.faces.size(); f++) {
        const Face& face = mesh.faces[f];
        const std::string id = "face " + std::to_string(f);
        const std::size_t need = mesh.dim == 2 ? 2 : 3;
        if (face.vertices.size() < need)
            flag(id + ": too few vertices");
        for (int v : face.vertices)
            if (v < 0 || v >= nv)
                flag(id + ": vertex index out of range");
        if (face.cell_minus < 0)
            flag(id + ": no adjacent cell");
        if (face.measure <= 0.0)
            flag(id + ": non-positive measure");
        if (std::abs(face.normal.norm() - 1.0) > 1e-12)
            flag(id + ": normal not unit length");
        if (face.on_boundary() && face.tag < 0)
            flag(id + ": untagged boundary face");
        if (!face.on_boundary() && face.tag >= 0)
            flag(id + ": interior face carries a boundary tag");

        if (mesh.dim == 3) {
            double worst = 0.0;
            for (int v : face.vertices)
                worst = std::max(worst,
                                 std::abs(face.normal.dot(mesh.nodes[v] - face.centroid)));
            if (worst > 1e-12 * std::max(face.diameter, 1e-300))
                flag(id + ": not planar");
        }
    }

    for (std::size_t c = 0; c < mesh.cells.size(); c++) {
        const Cell& cell = mesh.cells[c];
        const std::string id = "cell " + std::to_string(c);
        if (cell.volume <= 0.0)
            flag(id + ": non-positive volume");
        if (cell.faces.empty())
            flag(id + ": no faces");

        double area_sum = 0.0;
        Vec3 closure = Vec3::Zero();
        for (int f : cell.faces) {
            const Face& face = mesh.faces[f];
            if (face.cell_minus != static_cast<int>(c) && face.cell_plus != static_cast<int>(c))
                flag(id + ": face adjacency inconsistent");
            area_sum += face.measure;
            closure += mesh.outward_sign(static_cast<int>(c), f) * face.measure * face.normal;
        }
        if (closure.norm() > 1e-12 * area_sum)
            flag(id + ": boundary faces do not close up");

        if (mesh.dim == 2) {
            double perimeter = 0.0;
            const int n = static_cast<int>(cell.vertices.size());
            for (int i = 0; i < n; i++)
                perimeter += (mesh.nodes[cell.vertices[i]]
                              - mesh.nodes[cell.vertices[(i + 1) % n]])
                                 .norm();
            if (std::abs(perimeter - area_sum) > 1e-12 * perimeter)
                flag(id + ": faces do not tile the cell boundary");
        }
    }

    if (mesh.dim == 2) {
        for (std::size_t f = 0; f < mesh.faces.size(); f++) {
            const Face& face = mesh.faces[f];
            if (face.on_boundary() || face.cell_minus < 0)
                continue;
            const int a = face.vertices[0], b = face.vertices[1];
            const int dir_minus = loop_direction(mesh.cells[face.cell_minus].vertices, a, b);
            const int dir_plus = loop_direction(mesh.cells[face.cell_plus].vertices, a, b);
            if (dir_minus == 0 || dir_plus == 0) {
                flag("face " + std::to_string(f) + ": not an edge of both adjacent cells");
                continue;
            }
            // outward normals as seen by each side
            const Vec3 t = mesh.nodes[b] - mesh.nodes[a];
            const Vec3 n0 = Vec3(t.y(), -t.x(), 0.0).normalized();
            const Vec3 n_minus = dir_minus * n0;
            const Vec3 n_plus = dir_plus * n0;
            if (std::abs(n_minus.dot(n_plus) + 1.0) > 1e-12)
                flag("face " + std::to_string(f) + ": adjacent normals not opposite");
        }
    }

    return report;
}

} // namespace hhoplast
