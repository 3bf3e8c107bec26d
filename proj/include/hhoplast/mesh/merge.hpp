#pragma once

#include "hhoplast/mesh/mesh.hpp"

#include <cstdint>

namespace hhoplast {

// Agglomerates randomly chosen face-neighbour pairs of a 2D mesh until about
// `fraction` of the original cells have taken part.  The shared face of a pair
// is deleted; hanging vertices stay in place so the neighbours keep their
// original faces.  Two collinear faces of a merged cell are fused into one
// when the cells on their far side allow it (both sides merged, or boundary
// faces with the same tag), which is what produces pentagons next to
// hexagons.  The same (mesh, fraction, seed) always yields the same mesh.
Mesh merge_cells(const Mesh& mesh, double fraction, std::uint64_t seed);

} // namespace hhoplast
