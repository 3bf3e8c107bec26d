#include "hhoplast/material/plasticity.hpp"

#include <cmath>

namespace hhoplast {

SmallStepResult small_plasticity(const MaterialPointState& state, const Mat3& strain,
                                 const Mat3& dstrain, const MaterialParams& mp)
{
    const double mu = mp.mu();
    const Mat3 strain_new = strain + dstrain;
    const Mat3 trial = apply_elastic(mp, strain_new - state.plastic_strain);
    const Mat3 s_tr = dev(trial);
    const double q_tr = std::sqrt(1.5) * s_tr.norm();
    const double phi_tr = q_tr - yield_radius(mp, state.eq_plastic_strain);

    SmallStepResult out;
    out.state = state;
    const double phi_tol = 1e-12 * mp.sigma_y0;
    if (phi_tr <= phi_tol) {
        out.stress = trial;
        out.tangent = isotropic_modulus(mu, mp.lambda());
        out.yield_value = phi_tr;
        return out;
    }

    // consistency: g(L) = q_tr - 3 mu L - R(p + L) = 0, safeguarded Newton
    const double p0 = state.eq_plastic_strain;
    double lo = 0.0, hi = q_tr / (3.0 * mu);
    double lam = phi_tr / (3.0 * mu + yield_radius_slope(mp, p0));
    lam = std::min(std::max(lam, lo), hi);
    double g = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; it++) {
        g = q_tr - 3.0 * mu * lam - yield_radius(mp, p0 + lam);
        if (std::abs(g) <= phi_tol) {
            converged = true;
            break;
        }
        if (g > 0.0)
            lo = lam;
        else
            hi = lam;
        const double dg = -3.0 * mu - yield_radius_slope(mp, p0 + lam);
        double next = lam - g / dg;
        if (!(next > lo) || !(next < hi))
            next = 0.5 * (lo + hi);
        lam = next;
    }
    if (!converged)
        throw StepRejection("return mapping did not converge");

    const Mat3 nu = 1.5 * s_tr / q_tr; // flow direction, |nu| = sqrt(3/2)
    out.state.plastic_strain += lam * nu;
    out.state.eq_plastic_strain += lam;
    out.stress = trial - 2.0 * mu * lam * nu;
    out.plastic = true;
    out.dlambda = lam;
    out.yield_value = g;

    const double rp = yield_radius_slope(mp, p0 + lam);
    const double c1 = 6.0 * mu * mu / (3.0 * mu + rp);
    const double c2 = 6.0 * mu * mu * lam / q_tr;
    const Mat3 nhat = s_tr / s_tr.norm();
    const Mat9 idev = identity_sym() - dyad(Mat3::Identity(), Mat3::Identity()) / 3.0;
    out.tangent = isotropic_modulus(mu, mp.lambda()) - c2 * idev
                  - (c1 - c2) * dyad(nhat, nhat);
    return out;
}

FiniteStepResult finite_plasticity(const MaterialPointState& state, const Mat3& F_old,
                                   const Mat3& F_new, const MaterialParams& mp)
{
    const LogStrain kin_old(F_old);
    const LogStrain kin_new(F_new);
    return finite_plasticity(state, kin_old.strain(), kin_new, mp);
}

FiniteStepResult finite_plasticity(const MaterialPointState& state, const Mat3& strain_old,
                                   const LogStrain& kin_new, const MaterialParams& mp)
{
    const Mat3 strain_new = kin_new.strain();
    const SmallStepResult small
        = small_plasticity(state, strain_old, strain_new - strain_old, mp);

    FiniteStepResult out;
    out.state = small.state;
    out.log_stress = small.stress;
    out.log_strain = strain_new;
    out.plastic = small.plastic;
    out.piola = kin_new.pull_back_stress(small.stress);
    const Mat9& dEdF = kin_new.strain_derivative();
    out.nominal_tangent = dEdF.transpose() * small.tangent * dEdF
                          + kin_new.stress_second_derivative(small.stress);
    return out;
}

} // namespace hhoplast
