#pragma once

#include "hhoplast/solver/newton.hpp"

#include <string>

namespace hhoplast {

// Legacy-format VTK snapshot of the mesh on the deformed configuration with
// the displacement as point data (vertex values averaged over the cells
// sharing the vertex).
void export_mesh_snapshot(const std::string& path, const Discretization& disc,
                          const SystemState& state);

// Quadrature-point cloud on the deformed configuration with the accumulated
// plastic strain and the trace of the Cauchy stress as point scalars.
void export_qp_cloud(const std::string& path, const Discretization& disc,
                     const SystemState& state, const std::vector<std::vector<Mat3>>& piola,
                     const std::vector<std::vector<Mat3>>& defgrad);

} // namespace hhoplast
