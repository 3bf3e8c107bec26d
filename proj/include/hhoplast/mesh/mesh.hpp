#pragma once

#include "hhoplast/tensor.hpp"

#include <string>
#include <vector>

namespace hhoplast {

struct Face {
    std::vector<int> vertices; // 2D: endpoints; 3D: loop, CCW seen from outside cell_minus
    int cell_minus = -1;       // the stored normal points out of this cell
    int cell_plus = -1;        // -1 on the boundary
    int tag = -1;              // boundary tag id, -1 for interior faces
    double measure = 0.0;
    double diameter = 0.0;
    Vec3 centroid = Vec3::Zero();
    Vec3 normal = Vec3::Zero();

    bool on_boundary() const { return cell_plus < 0; }
};

struct Cell {
    std::vector<int> vertices; // 2D: CCW loop; 3D: unique vertex set
    std::vector<int> faces;
    double volume = 0.0;
    double diameter = 0.0;
    Vec3 centroid = Vec3::Zero();
};

class Mesh {
  public:
    int dim = 2;
    std::vector<Vec3> nodes;
    std::vector<Cell> cells;
    std::vector<Face> faces;
    std::vector<std::string> tag_names;

    int add_tag(const std::string& name);
    int tag_id(const std::string& name) const; // -1 if absent

    double outward_sign(int cell, int face) const
    {
        return faces[face].cell_minus == cell ? 1.0 : -1.0;
    }
    Vec3 outward_normal(int cell, int face) const
    {
        return outward_sign(cell, face) * faces[face].normal;
    }

    // Builds faces, adjacency and all geometric quantities from 2D cell loops.
    void finalize_2d();

    // Builds the mesh from per-cell face loops (each loop oriented outward for
    // its cell); shared faces are identified by their vertex set.
    void finalize_3d(const std::vector<std::vector<std::vector<int>>>& cell_face_loops);

    // Recomputes geometry of a single face / cell (2D path).
    void compute_face_geometry_2d(int f);
    void compute_cell_geometry_2d(int c);
};

struct ValidationIssue {
    std::string what;
};

struct MeshReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// Checks the structural and geometric invariants of a mesh: adjacency counts,
// positive measures, closed cell boundaries, opposite normals across interior
// faces, planarity of 3D faces and boundary tagging.
MeshReport validate_mesh(const Mesh& mesh);

} // namespace hhoplast
