#pragma once

#include "hhoplast/tensor.hpp"

namespace hhoplast {

// Units: MPa for moduli and stresses, strains dimensionless.
struct MaterialParams {
    double young = 0.0;
    double poisson = 0.0;
    double hardening = 0.0;   // linear hardening modulus H
    double sigma_y0 = 0.0;    // initial yield stress
    double sigma_yinf = 0.0;  // saturation yield stress
    double saturation = 0.0;  // saturation rate delta

    double mu() const { return 0.5 * young / (1.0 + poisson); }
    double lambda() const
    {
        return young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    }
    double bulk() const { return lambda() + 2.0 * mu() / 3.0; }

    // Throws std::invalid_argument unless mu > 0, 3*lambda + 2*mu > 0,
    // sigma_y0 > 0 and the hardening parameters are admissible.
    void validate() const;
};

struct MaterialPointState {
    Mat3 plastic_strain = Mat3::Zero(); // trace-free
    double eq_plastic_strain = 0.0;     // non-decreasing

    void validate() const;
};

// R(p) = sigma_y0 + H p + (sigma_yinf - sigma_y0)(1 - exp(-delta p))
double yield_radius(const MaterialParams& mp, double p);
double yield_radius_slope(const MaterialParams& mp, double p);

// T = 2 mu E + lambda tr(E) I
Mat3 apply_elastic(const MaterialParams& mp, const Mat3& strain);

// Elastic (psi_e) and stored plastic (psi_p) free energy densities.
double elastic_energy(const MaterialParams& mp, const Mat3& elastic_strain);
double plastic_energy(const MaterialParams& mp, double p);
double helmholtz_energy(const MaterialParams& mp, const MaterialPointState& state,
                        const Mat3& total_strain);

} // namespace hhoplast
