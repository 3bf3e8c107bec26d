#pragma once

#include "hhoplast/mesh/mesh.hpp"

#include <iosfwd>
#include <string>

namespace hhoplast {

// Gmsh MSH 2.2 ASCII, restricted to triangles, quadrangles, tetrahedra and
// hexahedra plus tagged boundary elements (lines / triangles / quadrangles).
// Boundary tags travel as physical names.  Node coordinates are written with
// 17 significant digits so that export followed by import is bit-exact.
Mesh import_mesh(const std::string& path);
Mesh import_mesh(std::istream& in, const std::string& label);

void export_mesh(const Mesh& mesh, const std::string& path);
void export_mesh(const Mesh& mesh, std::ostream& out);

} // namespace hhoplast
