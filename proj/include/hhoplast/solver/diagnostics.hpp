#pragma once

#include "hhoplast/tensor.hpp"

#include <vector>

namespace hhoplast {

// Histogram of smallest-eigenvalue values; edges follow the coercivity survey
// convention and are expressed in GPa.
struct ThetaHistogram {
    std::vector<double> edges = { -6.0, -1.0, -0.5, 0.0, 0.5, 1.0, 5.0, 150.0, 170.0 };
    std::vector<int> counts;
    int below = 0;
    int above = 0;

    std::string format() const;
};

ThetaHistogram theta_histogram(const std::vector<double>& theta_mpa);

} // namespace hhoplast
