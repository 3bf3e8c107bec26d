#include "hhoplast/mesh/build.hpp"

#include <cmath>
#include <stdexcept>

namespace hhoplast {

namespace {

int grid_index(int i, int j, int nx) { return j * (nx + 1) + i; }

void tag_box_boundary_2d(Mesh& mesh, const Box& box)
{
    const int left = mesh.add_tag("left");
    const int right = mesh.add_tag("right");
    const int bottom = mesh.add_tag("bottom");
    const int top = mesh.add_tag("top");
    const double eps = 1e-12 * (box.hi - box.lo).norm();
    for (auto& face : mesh.faces) {
        if (!face.on_boundary())
            continue;
        const Vec3& c = face.centroid;
        if (std::abs(c.x() - box.lo.x()) < eps)
            face.tag = left;
        else if (std::abs(c.x() - box.hi.x()) < eps)
            face.tag = right;
        else if (std::abs(c.y() - box.lo.y()) < eps)
            face.tag = bottom;
        else if (std::abs(c.y() - box.hi.y()) < eps)
            face.tag = top;
    }
}

Mesh build_quad_mesh(int nx, int ny, const Box& box)
{
    Mesh mesh;
    mesh.dim = 2;
    for (int j = 0; j <= ny; j++)
        for (int i = 0; i <= nx; i++) {
            const double x = box.lo.x() + (box.hi.x() - box.lo.x()) * i / nx;
            const double y = box.lo.y() + (box.hi.y() - box.lo.y()) * j / ny;
            mesh.nodes.emplace_back(x, y, 0.0);
        }
    for (int j = 0; j < ny; j++)
        for (int i = 0; i < nx; i++) {
            Cell cell;
            cell.vertices = { grid_index(i, j, nx), grid_index(i + 1, j, nx),
                              grid_index(i + 1, j + 1, nx), grid_index(i, j + 1, nx) };
            mesh.cells.push_back(cell);
        }
    mesh.finalize_2d();
    tag_box_boundary_2d(mesh, box);
    return mesh;
}

Mesh build_tri_mesh(int nx, int ny, const Box& box)
{
    Mesh mesh;
    mesh.dim = 2;
    for (int j = 0; j <= ny; j++)
        for (int i = 0; i <= nx; i++) {
            const double x = box.lo.x() + (box.hi.x() - box.lo.x()) * i / nx;
            const double y = box.lo.y() + (box.hi.y() - box.lo.y()) * j / ny;
            mesh.nodes.emplace_back(x, y, 0.0);
        }
    for (int j = 0; j < ny; j++)
        for (int i = 0; i < nx; i++) {
            const int v00 = grid_index(i, j, nx), v10 = grid_index(i + 1, j, nx);
            const int v11 = grid_index(i + 1, j + 1, nx), v01 = grid_index(i, j + 1, nx);
            Cell lower, upper;
            lower.vertices = { v00, v10, v11 };
            upper.vertices = { v00, v11, v01 };
            mesh.cells.push_back(lower);
            mesh.cells.push_back(upper);
        }
    mesh.finalize_2d();
    tag_box_boundary_2d(mesh, box);
    return mesh;
}

int grid_index_3d(int i, int j, int k, int nx, int ny)
{
    return (k * (ny + 1) + j) * (nx + 1) + i;
}

void make_box_nodes_3d(Mesh& mesh, int nx, int ny, int nz, const Box& box)
{
    for (int k = 0; k <= nz; k++)
        for (int j = 0; j <= ny; j++)
            for (int i = 0; i <= nx; i++) {
                const double x = box.lo.x() + (box.hi.x() - box.lo.x()) * i / nx;
                const double y = box.lo.y() + (box.hi.y() - box.lo.y()) * j / ny;
                const double z = box.lo.z() + (box.hi.z() - box.lo.z()) * k / nz;
                mesh.nodes.emplace_back(x, y, z);
            }
}

void tag_box_boundary_3d(Mesh& mesh, const Box& box)
{
    const int tags[6] = { mesh.add_tag("xmin"), mesh.add_tag("xmax"), mesh.add_tag("ymin"),
                          mesh.add_tag("ymax"), mesh.add_tag("zmin"), mesh.add_tag("zmax") };
    const double eps = 1e-12 * (box.hi - box.lo).norm();
    for (auto& face : mesh.faces) {
        if (!face.on_boundary())
            continue;
        const Vec3& c = face.centroid;
        if (std::abs(c.x() - box.lo.x()) < eps)
            face.tag = tags[0];
        else if (std::abs(c.x() - box.hi.x()) < eps)
            face.tag = tags[1];
        else if (std::abs(c.y() - box.lo.y()) < eps)
            face.tag = tags[2];
        else if (std::abs(c.y() - box.hi.y()) < eps)
            face.tag = tags[3];
        else if (std::abs(c.z() - box.lo.z()) < eps)
            face.tag = tags[4];
        else if (std::abs(c.z() - box.hi.z()) < eps)
            face.tag = tags[5];
    }
}

Mesh build_hex_mesh(int nx, int ny, int nz, const Box& box)
{
    Mesh mesh;
    mesh.dim = 3;
    make_box_nodes_3d(mesh, nx, ny, nz, box);
    std::vector<std::vector<std::vector<int>>> loops;
    for (int k = 0; k < nz; k++)
        for (int j = 0; j < ny; j++)
            for (int i = 0; i < nx; i++) {
                const std::array<int, 8> v = {
                    grid_index_3d(i, j, k, nx, ny),         grid_index_3d(i + 1, j, k, nx, ny),
                    grid_index_3d(i + 1, j + 1, k, nx, ny), grid_index_3d(i, j + 1, k, nx, ny),
                    grid_index_3d(i, j, k + 1, nx, ny),     grid_index_3d(i + 1, j, k + 1, nx, ny),
                    grid_index_3d(i + 1, j + 1, k + 1, nx, ny),
                    grid_index_3d(i, j + 1, k + 1, nx, ny)
                };
                mesh.cells.emplace_back();
                loops.push_back(hex_face_loops(v));
            }
    mesh.finalize_3d(loops);
    tag_box_boundary_3d(mesh, box);
    return mesh;
}

Mesh build_tet_mesh(int nx, int ny, int nz, const Box& box)
{
    Mesh mesh;
    mesh.dim = 3;
    make_box_nodes_3d(mesh, nx, ny, nz, box);
    std::vector<std::vector<std::vector<int>>> loops;
    // Kuhn split: six tets along the main diagonal, matching across hexes
    static const int perms[6][3] = { { 0, 1, 2 }, { 0, 2, 1 }, { 1, 0, 2 },
                                     { 1, 2, 0 }, { 2, 0, 1 }, { 2, 1, 0 } };
    for (int k = 0; k < nz; k++)
        for (int j = 0; j < ny; j++)
            for (int i = 0; i < nx; i++) {
                for (const auto& p : perms) {
                    std::array<int, 3> step = { 0, 0, 0 };
                    std::array<int, 4> v;
                    v[0] = grid_index_3d(i, j, k, nx, ny);
                    for (int s = 0; s < 3; s++) {
                        step[p[s]] = 1;
                        v[s + 1] = grid_index_3d(i + step[0], j + step[1], k + step[2], nx, ny);
                    }
                    mesh.cells.emplace_back();
                    loops.push_back(tet_face_loops(v, mesh.nodes));
                }
            }
    mesh.finalize_3d(loops);
    tag_box_boundary_3d(mesh, box);
    return mesh;
}

} // namespace

std::vector<std::vector<int>> hex_face_loops(const std::array<int, 8>& v)
{
    return {
        { v[0], v[3], v[2], v[1] }, // z = 0
        { v[4], v[5], v[6], v[7] }, // z = 1
        { v[0], v[1], v[5], v[4] }, // y = 0
        { v[3], v[7], v[6], v[2] }, // y = 1
        { v[0], v[4], v[7], v[3] }, // x = 0
        { v[1], v[2], v[6], v[5] }, // x = 1
    };
}

std::vector<std::vector<int>> tet_face_loops(const std::array<int, 4>& v,
                                             const std::vector<Vec3>& nodes)
{
    // orient every face outward by checking against the opposite vertex
    static const int tris[4][3] = { { 1, 2, 3 }, { 0, 3, 2 }, { 0, 1, 3 }, { 0, 2, 1 } };
    std::vector<std::vector<int>> loops;
    for (int f = 0; f < 4; f++) {
        int a = v[tris[f][0]], b = v[tris[f][1]], c = v[tris[f][2]];
        const int opp = v[f];
        const Vec3 n = (nodes[b] - nodes[a]).cross(nodes[c] - nodes[a]);
        if (n.dot(nodes[opp] - nodes[a]) > 0.0)
            std::swap(b, c);
        loops.push_back({ a, b, c });
    }
    return loops;
}

Mesh build_structured_mesh(CellKind kind, const std::array<int, 3>& divisions, const Box& box)
{
    const int nx = divisions[0], ny = divisions[1], nz = divisions[2];
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("build_structured_mesh: divisions must be positive");
    switch (kind) {
    case CellKind::quad:
        return build_quad_mesh(nx, ny, box);
    case CellKind::triangle:
        return build_tri_mesh(nx, ny, box);
    case CellKind::hex:
    case CellKind::tet:
        if (nz < 1)
            throw std::invalid_argument("build_structured_mesh: divisions must be positive");
        return kind == CellKind::hex ? build_hex_mesh(nx, ny, nz, box)
                                     : build_tet_mesh(nx, ny, nz, box);
    }
    throw std::invalid_argument("build_structured_mesh: unknown cell kind");
}

Mesh build_cook_mesh(int n)
{
    if (n < 1)
        throw std::invalid_argument("build_cook_mesh: n must be positive");
    Mesh mesh;
    mesh.dim = 2;
    for (int j = 0; j <= n; j++)
        for (int i = 0; i <= n; i++) {
            const double xi = static_cast<double>(i) / n;
            const double eta = static_cast<double>(j) / n;
            const double x = 48.0 * xi;
            const double y = 44.0 * xi + 44.0 * eta - 28.0 * xi * eta;
            mesh.nodes.emplace_back(x, y, 0.0);
        }
    for (int j = 0; j < n; j++)
        for (int i = 0; i < n; i++) {
            Cell cell;
            cell.vertices = { grid_index(i, j, n), grid_index(i + 1, j, n),
                              grid_index(i + 1, j + 1, n), grid_index(i, j + 1, n) };
            mesh.cells.push_back(cell);
        }
    mesh.finalize_2d();

    const int clamped = mesh.add_tag("clamped");
    const int loaded = mesh.add_tag("loaded");
    const int free_bottom = mesh.add_tag("free_bottom");
    const int free_top = mesh.add_tag("free_top");
    for (auto& face : mesh.faces) {
        if (!face.on_boundary())
            continue;
        const Vec3& c = face.centroid;
        if (std::abs(c.x()) < 1e-10)
            face.tag = clamped;
        else if (std::abs(c.x() - 48.0) < 1e-10)
            face.tag = loaded;
        else if (c.y() < 44.0 * c.x() / 48.0 + 1e-10)
            face.tag = free_bottom;
        else
            face.tag = free_top;
    }
    return mesh;
}

Mesh build_necking_mesh(int nx, int ny)
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("build_necking_mesh: divisions must be positive");
    const double half_length = 53.334 / 2.0;
    const double half_width_end = 12.826 / 2.0;
    const double half_width_mid = 12.595 / 2.0;

    Mesh mesh;
    mesh.dim = 2;
    for (int j = 0; j <= ny; j++)
        for (int i = 0; i <= nx; i++) {
            const double eta = static_cast<double>(j) / ny;
            const double w = half_width_mid + (half_width_end - half_width_mid) * eta;
            const double x = w * i / nx;
            const double y = half_length * eta;
            mesh.nodes.emplace_back(x, y, 0.0);
        }
    for (int j = 0; j < ny; j++)
        for (int i = 0; i < nx; i++) {
            Cell cell;
            cell.vertices = { grid_index(i, j, nx), grid_index(i + 1, j, nx),
                              grid_index(i + 1, j + 1, nx), grid_index(i, j + 1, nx) };
            mesh.cells.push_back(cell);
        }
    mesh.finalize_2d();

    const int axis = mesh.add_tag("axis");
    const int midplane = mesh.add_tag("midplane");
    const int end = mesh.add_tag("end");
    const int lateral = mesh.add_tag("lateral");
    for (auto& face : mesh.faces) {
        if (!face.on_boundary())
            continue;
        const Vec3& c = face.centroid;
        if (std::abs(c.x()) < 1e-10)
            face.tag = axis;
        else if (std::abs(c.y()) < 1e-10)
            face.tag = midplane;
        else if (std::abs(c.y() - half_length) < 1e-10)
            face.tag = end;
        else
            face.tag = lateral;
    }
    return mesh;
}

Mesh build_sphere_octant_mesh(int n_surface, int n_radial, double r_in, double r_out)
{
    if (n_surface < 1 || n_radial < 1)
        throw std::invalid_argument("build_sphere_octant_mesh: divisions must be positive");
    if (!(0.0 < r_in && r_in < r_out))
        throw std::invalid_argument("build_sphere_octant_mesh: need 0 < r_in < r_out");

    Mesh mesh;
    mesh.dim = 3;
    const int n = n_surface;

    // geodesic lattice on the octant triangle (e_x, e_y, e_z)
    auto lattice = [n](int i, int j) { return i * (n + 1) - i * (i - 1) / 2 + j; };
    std::vector<Vec3> surface;
    for (int i = 0; i <= n; i++)
        for (int j = 0; j <= n - i; j++) {
            const int k = n - i - j;
            Vec3 p(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
            surface.push_back(p.normalized());
        }
    const int n_surf_nodes = static_cast<int>(surface.size());

    for (int layer = 0; layer <= n_radial; layer++) {
        const double r = r_in + (r_out - r_in) * layer / n_radial;
        for (const Vec3& s : surface)
            mesh.nodes.push_back(r * s);
    }

    // surface triangulation of the lattice
    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n - i; j++) {
            tris.push_back({ lattice(i, j), lattice(i + 1, j), lattice(i, j + 1) });
            if (j < n - i - 1)
                tris.push_back({ lattice(i + 1, j), lattice(i + 1, j + 1), lattice(i, j + 1) });
        }

    std::vector<std::vector<std::vector<int>>> loops;
    for (int layer = 0; layer < n_radial; layer++) {
        const int lo = layer * n_surf_nodes;
        const int hi = (layer + 1) * n_surf_nodes;
        for (const auto& t : tris) {
            // split the prism into three tets; the quad faces take the
            // diagonal through their smallest vertex id so neighbours agree
            std::array<int, 6> p = { lo + t[0], lo + t[1], lo + t[2],
                                     hi + t[0], hi + t[1], hi + t[2] };
            // rotate so that p[0] is the smallest bottom vertex
            int rot = 0;
            for (int s = 1; s < 3; s++)
                if (p[s] < p[rot])
                    rot = s;
            std::array<int, 6> q = { p[rot], p[(rot + 1) % 3], p[(rot + 2) % 3],
                                     p[3 + rot], p[3 + ((rot + 1) % 3)],
                                     p[3 + ((rot + 2) % 3)] };
            // the free quad face (q1 q2 q5 q4) takes the diagonal through
            // min(q1, q2): two standard decompositions
            std::vector<std::array<int, 4>> tets;
            if (std::min(q[1], q[5]) < std::min(q[2], q[4])) {
                tets = { { q[0], q[1], q[2], q[5] },
                         { q[0], q[1], q[5], q[4] },
                         { q[0], q[4], q[5], q[3] } };
            } else {
                tets = { { q[0], q[1], q[2], q[4] },
                         { q[0], q[4], q[2], q[5] },
                         { q[0], q[4], q[5], q[3] } };
            }
            for (const auto& tet : tets) {
                mesh.cells.emplace_back();
                loops.push_back(tet_face_loops(tet, mesh.nodes));
            }
        }
    }
    mesh.finalize_3d(loops);

    const int inner = mesh.add_tag("inner");
    const int outer = mesh.add_tag("outer");
    const int symx = mesh.add_tag("symx");
    const int symy = mesh.add_tag("symy");
    const int symz = mesh.add_tag("symz");
    const double eps = 1e-9 * r_out;
    for (auto& face : mesh.faces) {
        if (!face.on_boundary())
            continue;
        bool all_in = true, all_out = true, all_x = true, all_y = true, all_z = true;
        for (int v : face.vertices) {
            const Vec3& p = mesh.nodes[v];
            const double r = p.norm();
            all_in = all_in && std::abs(r - r_in) < eps;
            all_out = all_out && std::abs(r - r_out) < eps;
            all_x = all_x && std::abs(p.x()) < eps;
            all_y = all_y && std::abs(p.y()) < eps;
            all_z = all_z && std::abs(p.z()) < eps;
        }
        if (all_in)
            face.tag = inner;
        else if (all_out)
            face.tag = outer;
        else if (all_x)
            face.tag = symx;
        else if (all_y)
            face.tag = symy;
        else if (all_z)
            face.tag = symz;
    }
    return mesh;
}

Mesh build_pentagon_cell()
{
    Mesh mesh;
    mesh.dim = 2;
    mesh.nodes = { Vec3(0, 0, 0), Vec3(0.5, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0) };
    Cell cell;
    cell.vertices = { 0, 1, 2, 3, 4 };
    mesh.cells.push_back(cell);
    mesh.finalize_2d();
    const int boundary = mesh.add_tag("boundary");
    for (auto& face : mesh.faces)
        face.tag = boundary;
    return mesh;
}

} // namespace hhoplast
