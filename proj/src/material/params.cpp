#include "hhoplast/material/params.hpp"

#include <cmath>
#include <stdexcept>

namespace hhoplast {

void MaterialParams::validate() const
{
    if (!(mu() > 0.0) || !std::isfinite(mu()))
        throw std::invalid_argument("MaterialParams: shear modulus must be positive");
    if (!(3.0 * lambda() + 2.0 * mu() > 0.0) || !std::isfinite(lambda()))
        throw std::invalid_argument("MaterialParams: bulk modulus must be positive");
    if (!(sigma_y0 > 0.0))
        throw std::invalid_argument("MaterialParams: initial yield stress must be positive");
    if (hardening < 0.0)
        throw std::invalid_argument("MaterialParams: hardening modulus must be non-negative");
    if (saturation < 0.0)
        throw std::invalid_argument("MaterialParams: saturation rate must be non-negative");
    if (saturation > 0.0 && sigma_yinf < sigma_y0)
        throw std::invalid_argument(
            "MaterialParams: saturation stress must not be below the initial yield stress");
}

void MaterialPointState::validate() const
{
    if (!(eq_plastic_strain >= 0.0))
        throw std::invalid_argument("MaterialPointState: negative equivalent plastic strain");
    if (std::abs(plastic_strain.trace()) > 1e-10 * (1.0 + plastic_strain.norm()))
        throw std::invalid_argument("MaterialPointState: plastic strain must be trace-free");
}

double yield_radius(const MaterialParams& mp, double p)
{
    double r = mp.sigma_y0 + mp.hardening * p;
    if (mp.saturation > 0.0)
        r -= (mp.sigma_yinf - mp.sigma_y0) * std::expm1(-mp.saturation * p);
    return r;
}

double yield_radius_slope(const MaterialParams& mp, double p)
{
    double s = mp.hardening;
    if (mp.saturation > 0.0)
        s += (mp.sigma_yinf - mp.sigma_y0) * mp.saturation * std::exp(-mp.saturation * p);
    return s;
}

Mat3 apply_elastic(const MaterialParams& mp, const Mat3& strain)
{
    return 2.0 * mp.mu() * strain + mp.lambda() * strain.trace() * Mat3::Identity();
}

double elastic_energy(const MaterialParams& mp, const Mat3& elastic_strain)
{
    const double tr = elastic_strain.trace();
    return mp.mu() * elastic_strain.squaredNorm() + 0.5 * mp.lambda() * tr * tr;
}

double plastic_energy(const MaterialParams& mp, double p)
{
    double psi = mp.sigma_y0 * p + 0.5 * mp.hardening * p * p;
    if (mp.saturation > 0.0)
        psi += (mp.sigma_yinf - mp.sigma_y0) * (p + std::expm1(-mp.saturation * p) / mp.saturation);
    return psi;
}

double helmholtz_energy(const MaterialParams& mp, const MaterialPointState& state,
                        const Mat3& total_strain)
{
    return elastic_energy(mp, total_strain - state.plastic_strain)
           + plastic_energy(mp, state.eq_plastic_strain);
}

} // namespace hhoplast
