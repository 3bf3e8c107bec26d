#pragma once

#include "hhoplast/mesh/mesh.hpp"

namespace hhoplast {

struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Ones();
};

enum class CellKind { quad, triangle, hex, tet };

// Structured mesh of an axis-aligned box.  2D boundary tags: left, right,
// bottom, top.  3D: xmin, xmax, ymin, ymax, zmin, zmax.
Mesh build_structured_mesh(CellKind kind, const std::array<int, 3>& divisions, const Box& box);

// Cook's membrane (0,0)-(48,44)-(48,60)-(0,44) mm meshed with n x n mapped
// quadrangles.  Tags: clamped (x = 0), loaded (x = 48), free_bottom, free_top.
Mesh build_cook_mesh(int n);

// Quarter of a plane-strain bar of half-length 26.667 mm whose half-width
// tapers linearly from 6.413 mm at the end to 6.2975 mm at the midplane.
// Tags: axis (x = 0), midplane (y = 0), end (y = 26.667), lateral.
Mesh build_necking_mesh(int nx, int ny);

// Octant of a spherical shell meshed with tetrahedra: n_surface^2 geodesic
// triangles per radial layer, n_radial layers, 3 tets per prism.  Tags:
// inner, outer, symx, symy, symz.
Mesh build_sphere_octant_mesh(int n_surface, int n_radial, double r_in, double r_out);

// Unit square carrying a single pentagonal cell: a square with one extra
// vertex on the bottom edge, so that edge is split in two faces.
Mesh build_pentagon_cell();

// Outward-oriented face loops of standard cells, for Mesh::finalize_3d.
// Hex corner order: (0,0,0) (1,0,0) (1,1,0) (0,1,0) then the z = 1 layer.
std::vector<std::vector<int>> tet_face_loops(const std::array<int, 4>& v,
                                             const std::vector<Vec3>& nodes);
std::vector<std::vector<int>> hex_face_loops(const std::array<int, 8>& v);

} // namespace hhoplast
