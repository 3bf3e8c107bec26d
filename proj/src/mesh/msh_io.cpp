#include "hhoplast/mesh/msh_io.hpp"
#include "hhoplast/mesh/build.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hhoplast {

namespace {

[[noreturn]] void fail(const std::string& label, const std::string& what)
{
    throw std::runtime_error(label + ": " + what);
}

std::string coord(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void expect_section(std::istream& in, const std::string& label, const std::string& name)
{
    std::string line;
    while (std::getline(in, line)) {
        // tolerate blank lines and \r line endings
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty())
            continue;
        if (line == name)
            return;
        fail(label, "expected " + name + ", got '" + line + "'");
    }
    fail(label, "unexpected end of file before " + name);
}

// Gmsh node counts per supported element type
int type_nodes(int type)
{
    switch (type) {
    case 1: return 2;  // line
    case 2: return 3;  // triangle
    case 3: return 4;  // quadrangle
    case 4: return 4;  // tetrahedron
    case 5: return 8;  // hexahedron
    default: return 0;
    }
}

int type_dim(int type) { return type == 1 ? 1 : (type <= 3 ? 2 : 3); }

struct RawElement {
    int type = 0;
    int physical = 0;
    std::vector<int> nodes; // zero-based
};

double tet_volume(const std::vector<Vec3>& nodes, const std::array<int, 4>& v)
{
    const Vec3 a = nodes[v[1]] - nodes[v[0]];
    const Vec3 b = nodes[v[2]] - nodes[v[0]];
    const Vec3 c = nodes[v[3]] - nodes[v[0]];
    return a.cross(b).dot(c) / 6.0;
}

// reconstruct the Gmsh vertex ordering of a hexahedral cell from its faces;
// every choice below depends only on vertex ids, never on storage order, so
// meshes with equal content always export the same bytes
std::array<int, 8> hex_vertex_order(const Mesh& mesh, int cell_id)
{
    const Cell& cell = mesh.cells[cell_id];
    if (cell.faces.size() != 6)
        throw std::runtime_error("export_mesh: hexahedron must have 6 quadrangle faces");
    // collect the edges of the cell and pick the bottom face by vertex key
    std::set<std::pair<int, int>> edges;
    int f0 = -1;
    std::vector<int> best_key;
    for (int f : cell.faces) {
        const auto& loop = mesh.faces[f].vertices;
        if (loop.size() != 4)
            throw std::runtime_error("export_mesh: hexahedron must have 6 quadrangle faces");
        for (std::size_t i = 0; i < loop.size(); i++) {
            const int a = loop[i], b = loop[(i + 1) % loop.size()];
            edges.insert({ std::min(a, b), std::max(a, b) });
        }
        std::vector<int> key = loop;
        std::sort(key.begin(), key.end());
        if (f0 < 0 || key < best_key) {
            best_key = key;
            f0 = f;
        }
    }
    // bottom loop oriented so its normal points into the cell, starting at
    // its smallest vertex
    std::vector<int> bottom = mesh.faces[f0].vertices;
    if (mesh.outward_sign(cell_id, f0) > 0)
        std::reverse(bottom.begin(), bottom.end());
    std::rotate(bottom.begin(), std::min_element(bottom.begin(), bottom.end()), bottom.end());
    std::array<int, 8> v{};
    for (int i = 0; i < 4; i++)
        v[i] = bottom[i];
    for (int i = 0; i < 4; i++) {
        int partner = -1;
        for (int w : cell.vertices) {
            if (std::find(bottom.begin(), bottom.end(), w) != bottom.end())
                continue;
            if (edges.count({ std::min(v[i], w), std::max(v[i], w) })) {
                partner = w;
                break;
            }
        }
        if (partner < 0)
            throw std::runtime_error("export_mesh: broken hexahedron connectivity");
        v[4 + i] = partner;
    }
    return v;
}

} // namespace

Mesh import_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("import_mesh: cannot open " + path);
    return import_mesh(in, path);
}

Mesh import_mesh(std::istream& in, const std::string& label)
{
    expect_section(in, label, "$MeshFormat");
    double version = 0.0;
    int file_type = 0, data_size = 0;
    if (!(in >> version >> file_type >> data_size))
        fail(label, "malformed $MeshFormat");
    if (version < 2.0 || version >= 3.0 || file_type != 0)
        fail(label, "only MSH 2.x ASCII is supported");
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    expect_section(in, label, "$EndMeshFormat");

    std::map<int, std::string> physical_names; // file physical id -> name
    std::string line;
    auto peek_section = [&]() -> std::string {
        std::streampos pos = in.tellg();
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (!line.empty()) {
                in.seekg(pos);
                return line;
            }
            pos = in.tellg();
        }
        return {};
    };

    if (peek_section() == "$PhysicalNames") {
        expect_section(in, label, "$PhysicalNames");
        int count = 0;
        if (!(in >> count))
            fail(label, "malformed $PhysicalNames");
        for (int i = 0; i < count; i++) {
            int dim = 0, id = 0;
            if (!(in >> dim >> id))
                fail(label, "malformed physical name entry");
            std::string rest;
            std::getline(in, rest);
            const auto first = rest.find('"');
            const auto last = rest.rfind('"');
            if (first == std::string::npos || last <= first)
                fail(label, "physical name must be quoted");
            physical_names[id] = rest.substr(first + 1, last - first - 1);
        }
        expect_section(in, label, "$EndPhysicalNames");
    }

    expect_section(in, label, "$Nodes");
    int n_nodes = 0;
    if (!(in >> n_nodes) || n_nodes < 0)
        fail(label, "malformed $Nodes");
    std::vector<Vec3> nodes;
    nodes.reserve(n_nodes);
    std::map<int, int> node_index;
    for (int i = 0; i < n_nodes; i++) {
        int id = 0;
        double x = 0, y = 0, z = 0;
        if (!(in >> id >> x >> y >> z))
            fail(label, "malformed node line");
        node_index[id] = static_cast<int>(nodes.size());
        nodes.emplace_back(x, y, z);
    }
    expect_section(in, label, "$EndNodes");

    expect_section(in, label, "$Elements");
    int n_elements = 0;
    if (!(in >> n_elements) || n_elements < 0)
        fail(label, "malformed $Elements");
    std::vector<RawElement> elements;
    int max_dim = 0;
    for (int i = 0; i < n_elements; i++) {
        int id = 0, type = 0, ntags = 0;
        if (!(in >> id >> type >> ntags))
            fail(label, "malformed element line");
        RawElement el;
        el.type = type;
        for (int t = 0; t < ntags; t++) {
            int tag = 0;
            if (!(in >> tag))
                fail(label, "malformed element tags");
            if (t == 0)
                el.physical = tag;
        }
        const int nn = type_nodes(type);
        if (nn == 0)
            fail(label, "unsupported element type " + std::to_string(type));
        for (int v = 0; v < nn; v++) {
            int node = 0;
            if (!(in >> node))
                fail(label, "malformed element nodes");
            const auto it = node_index.find(node);
            if (it == node_index.end())
                fail(label, "element references unknown node");
            el.nodes.push_back(it->second);
        }
        max_dim = std::max(max_dim, type_dim(type));
        elements.push_back(std::move(el));
    }
    expect_section(in, label, "$EndElements");

    if (max_dim < 2)
        fail(label, "no cells found");

    Mesh mesh;
    mesh.dim = max_dim;
    mesh.nodes = std::move(nodes);

    // stable physical id -> mesh tag mapping, ascending file ids
    std::map<int, int> tag_of_physical;
    std::set<int> used_physicals;
    for (const auto& el : elements)
        if (type_dim(el.type) == max_dim - 1 && el.physical != 0)
            used_physicals.insert(el.physical);
    for (const auto& [id, name] : physical_names)
        used_physicals.insert(id);
    for (int id : used_physicals) {
        const auto it = physical_names.find(id);
        const std::string name = it != physical_names.end() ? it->second
                                                            : "tag_" + std::to_string(id);
        tag_of_physical[id] = mesh.add_tag(name);
    }

    std::vector<std::vector<std::vector<int>>> loops3d;
    for (const auto& el : elements) {
        if (type_dim(el.type) != max_dim)
            continue;
        if (max_dim == 2) {
            Cell cell;
            cell.vertices = el.nodes;
            mesh.cells.push_back(cell);
        } else if (el.type == 4) {
            std::array<int, 4> v = { el.nodes[0], el.nodes[1], el.nodes[2], el.nodes[3] };
            mesh.cells.emplace_back();
            loops3d.push_back(tet_face_loops(v, mesh.nodes));
        } else if (el.type == 5) {
            std::array<int, 8> v{};
            std::copy_n(el.nodes.begin(), 8, v.begin());
            mesh.cells.emplace_back();
            loops3d.push_back(hex_face_loops(v));
        } else {
            fail(label, "3d meshes may only contain tetrahedra and hexahedra");
        }
    }
    if (mesh.dim == 2)
        mesh.finalize_2d();
    else
        mesh.finalize_3d(loops3d);

    // attach boundary tags by vertex set
    std::map<std::vector<int>, int> face_of_key;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); f++) {
        std::vector<int> key = mesh.faces[f].vertices;
        std::sort(key.begin(), key.end());
        face_of_key[key] = f;
    }
    for (const auto& el : elements) {
        if (type_dim(el.type) != max_dim - 1 || el.physical == 0)
            continue;
        std::vector<int> key = el.nodes;
        std::sort(key.begin(), key.end());
        const auto it = face_of_key.find(key);
        if (it == face_of_key.end())
            fail(label, "tagged boundary element is not a face of any cell");
        Face& face = mesh.faces[it->second];
        if (!face.on_boundary())
            fail(label, "tagged element lies in the mesh interior");
        face.tag = tag_of_physical.at(el.physical);
    }
    return mesh;
}

void export_mesh(const Mesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("export_mesh: cannot open " + path);
    export_mesh(mesh, out);
}

void export_mesh(const Mesh& mesh, std::ostream& out)
{
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

    if (!mesh.tag_names.empty()) {
        out << "$PhysicalNames\n" << mesh.tag_names.size() << "\n";
        for (std::size_t t = 0; t < mesh.tag_names.size(); t++)
            out << mesh.dim - 1 << " " << t + 1 << " \"" << mesh.tag_names[t] << "\"\n";
        out << "$EndPhysicalNames\n";
    }

    out << "$Nodes\n" << mesh.nodes.size() << "\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); i++)
        out << i + 1 << " " << coord(mesh.nodes[i].x()) << " " << coord(mesh.nodes[i].y())
            << " " << coord(mesh.nodes[i].z()) << "\n";
    out << "$EndNodes\n";

    // boundary elements ordered by (tag, vertex set) so that the output does
    // not depend on the face enumeration order of the mesh
    std::vector<std::pair<std::vector<int>, int>> tagged_faces;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); f++)
        if (mesh.faces[f].on_boundary() && mesh.faces[f].tag >= 0) {
            std::vector<int> key = mesh.faces[f].vertices;
            std::sort(key.begin(), key.end());
            key.insert(key.begin(), mesh.faces[f].tag);
            tagged_faces.emplace_back(std::move(key), f);
        }
    std::sort(tagged_faces.begin(), tagged_faces.end());

    out << "$Elements\n" << tagged_faces.size() + mesh.cells.size() << "\n";
    int next_id = 1;
    for (const auto& [key, f] : tagged_faces) {
        const Face& face = mesh.faces[f];
        int type = 0;
        if (mesh.dim == 2)
            type = 1;
        else if (face.vertices.size() == 3)
            type = 2;
        else if (face.vertices.size() == 4)
            type = 3;
        else
            throw std::runtime_error("export_mesh: only line/triangle/quadrangle faces");
        std::vector<int> loop = face.vertices;
        if (mesh.dim == 3)
            std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());
        out << next_id++ << " " << type << " 2 " << face.tag + 1 << " " << face.tag + 1;
        for (int v : loop)
            out << " " << v + 1;
        out << "\n";
    }
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); c++) {
        const Cell& cell = mesh.cells[c];
        std::vector<int> conn;
        int type = 0;
        if (mesh.dim == 2) {
            if (cell.vertices.size() == 3)
                type = 2;
            else if (cell.vertices.size() == 4)
                type = 3;
            else
                throw std::runtime_error(
                    "export_mesh: general polygonal cells have no MSH 2.2 encoding");
            conn = cell.vertices;
        } else if (cell.vertices.size() == 4 && cell.faces.size() == 4) {
            type = 4;
            std::array<int, 4> v = { cell.vertices[0], cell.vertices[1], cell.vertices[2],
                                     cell.vertices[3] };
            if (tet_volume(mesh.nodes, v) < 0.0)
                std::swap(v[2], v[3]);
            conn.assign(v.begin(), v.end());
        } else if (cell.vertices.size() == 8 && cell.faces.size() == 6) {
            type = 5;
            const auto v = hex_vertex_order(mesh, c);
            conn.assign(v.begin(), v.end());
        } else {
            throw std::runtime_error(
                "export_mesh: general polyhedral cells have no MSH 2.2 encoding");
        }
        out << next_id++ << " " << type << " 2 0 " << c + 1;
        for (int v : conn)
            out << " " << v + 1;
        out << "\n";
    }
    out << "$EndElements\n";
}

} // namespace hhoplast
