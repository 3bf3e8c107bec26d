#pragma once

#include "hhoplast/solver/newton.hpp"

#include <string>

namespace hhoplast {

// Tab-separated response curves, one row per accepted step (including t = 0):
// step, pseudo-time, control, reaction projected on `axis`, Newton iterations,
// theta_min.  All reals are printed with 17 significant digits so reruns are
// byte-identical.
void write_curves(const std::string& path, const std::vector<StepRecord>& records,
                  const Vec3& axis = Vec3::UnitY());

void write_manifest(const std::string& path, const std::string& config_label,
                    std::uint64_t config_hash, const std::vector<std::string>& extra);

std::string format_g17(double v);

} // namespace hhoplast
