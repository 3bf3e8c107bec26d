#pragma once

#include "hhoplast/solver/newton.hpp"

#include <cstdint>
#include <string>

namespace hhoplast {

// Everything a run needs, with defaults filled in.  Moduli and stresses are
// MPa, lengths mm, forces N; *_GPa / *_kN keys are converted while parsing.
struct ProblemConfig {
    std::string benchmark = "cook"; // cook | necking | sphere | custom
    std::string source_path;        // config file location (for the manifest)
    std::string canonical_text;     // canonicalized config (hash input)

    // mesh
    bool mesh_from_file = false;
    std::string mesh_path;
    std::string cell_kind = "quad"; // structured custom meshes
    std::array<int, 3> divisions = { 0, 0, 0 }; // 0: benchmark default
    double merge_fraction = 0.0;
    std::uint64_t merge_seed = 1;

    DegreeInfo degrees { 1, 1 };
    bool allow_lowest_order = false;
    int quadrature_order = -1; // -1: default 2k

    MaterialParams material;
    MaterialLaw law = MaterialLaw::finite_plasticity;

    SolverOptions solver;
    int steps = 15;
    double load_scale = 1.0;
    bool follower_load = false; // pressure on the deformed configuration

    // custom benchmark boundary conditions
    struct CustomBc {
        std::string tag;
        bool dirichlet = true;
        std::array<bool, 3> mask { true, true, true };
        Vec3 value = Vec3::Zero(); // ramped linearly in the load factor
    };
    std::vector<CustomBc> custom_bcs;
    Vec3 body_force = Vec3::Zero(); // custom benchmark, ramped linearly

    std::string output_dir = "out";
    bool write_fields = true;
    bool write_curves = true;
};

// Reads and validates a JSON config file.  Unknown keys, missing required
// keys and invalid values raise std::invalid_argument with the key name.
ProblemConfig parse_config(const std::string& path);
ProblemConfig parse_config_text(const std::string& text, const std::string& label);

std::uint64_t config_hash(const ProblemConfig& cfg); // FNV-1a of the canonical text

} // namespace hhoplast
