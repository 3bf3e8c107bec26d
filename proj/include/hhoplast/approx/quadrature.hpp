#pragma once

#include "hhoplast/mesh/mesh.hpp"

#include <vector>

namespace hhoplast {

struct QuadRule {
    std::vector<Vec3> points;
    std::vector<double> weights;
    int order = 0;

    std::size_t size() const { return points.size(); }
    double total_weight() const;
};

// Gauss-Legendre nodes/weights on [0,1].
std::vector<std::pair<double, double>> gauss_legendre_01(int npoints);

QuadRule segment_rule(const Vec3& a, const Vec3& b, int order);
QuadRule triangle_rule(const Vec3& a, const Vec3& b, const Vec3& c, int order);
QuadRule tet_rule(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, int order);

// Exact-to-`order` rule with positive weights on a (possibly polygonal or
// polyhedral) cell.  Polygons are fanned from the centroid; if the cell is not
// star-shaped with respect to it, an interior kernel point is searched for.
QuadRule make_cell_quadrature(const Mesh& mesh, int cell, int order);

// Rule on a face: Gauss-Legendre on 2D edges, fanned triangle rules on planar
// 3D polygons.
QuadRule make_face_quadrature(const Mesh& mesh, int face, int order);

} // namespace hhoplast
