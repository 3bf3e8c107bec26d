#pragma once

#include "hhoplast/material/log_strain.hpp"
#include "hhoplast/material/params.hpp"

namespace hhoplast {

struct SmallStepResult {
    MaterialPointState state;
    Mat3 stress;       // log-conjugate stress T
    Mat9 tangent;      // algorithmic modulus dT/dE (minor + major symmetric)
    bool plastic = false;
    double dlambda = 0.0;
    double yield_value = 0.0; // Phi at the returned state
};

// Radial-return step for von Mises plasticity with Voce hardening in the
// logarithmic strain space.  The consistency equation is solved with a
// safeguarded Newton iteration (bisection fallback) to |Phi| <= 1e-12 sigma_y0
// and fails with StepRejection after 100 iterations.
SmallStepResult small_plasticity(const MaterialPointState& state, const Mat3& strain,
                                 const Mat3& dstrain, const MaterialParams& mp);

struct FiniteStepResult {
    MaterialPointState state;
    Mat3 piola;           // first Piola-Kirchhoff stress
    Mat9 nominal_tangent; // dP/dF (major symmetric)
    Mat3 log_stress;      // T
    Mat3 log_strain;      // E(F_new)
    bool plastic = false;
};

// One constitutive update in the logarithmic strain framework: build E from
// both deformation gradients, run the small-strain update on the increment,
// pull the stress and modulus back to the nominal frame.
FiniteStepResult finite_plasticity(const MaterialPointState& state, const Mat3& F_old,
                                   const Mat3& F_new, const MaterialParams& mp);

// Same update with the old strain precomputed and the kinematics of F_new
// already factorized (per-iteration hot path).
FiniteStepResult finite_plasticity(const MaterialPointState& state, const Mat3& strain_old,
                                   const LogStrain& kin_new, const MaterialParams& mp);

} // namespace hhoplast
