#include "hhoplast/io/curves.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hhoplast {

std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_curves(const std::string& path, const std::vector<StepRecord>& records,
                  const Vec3& axis)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_curves: cannot open " + path);
    out << "step\ttime\tcontrol\treaction\tnewton_iterations\ttheta_min\n";
    for (std::size_t i = 0; i < records.size(); i++) {
        const StepRecord& r = records[i];
        out << i << "\t" << format_g17(r.time) << "\t" << format_g17(r.control) << "\t"
            << format_g17(r.reaction.dot(axis)) << "\t" << r.newton.iterations << "\t"
            << format_g17(r.theta_min) << "\n";
    }
}

void write_manifest(const std::string& path, const std::string& config_label,
                    std::uint64_t config_hash, const std::vector<std::string>& extra)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_manifest: cannot open " + path);
    out << "config: " << config_label << "\n";
    out << "config_hash: " << std::hex << config_hash << std::dec << "\n";
    out << "eigen: " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
        << EIGEN_MINOR_VERSION << "\n";
    out << "compiler: " << __VERSION__ << "\n";
    for (const std::string& line : extra)
        out << line << "\n";
}

} // namespace hhoplast
