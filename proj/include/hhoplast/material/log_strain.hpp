#pragma once

#include "hhoplast/tensor.hpp"

#include <stdexcept>

namespace hhoplast {

// Raised when a deformation state cannot be evaluated (det F <= 0) or a local
// material solve fails; the load stepping reacts by cutting the step.
struct StepRejection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spectral evaluation of E = 1/2 ln(F^T F) together with its first derivative
// and the action of its second derivative on a stress tensor.  Divided
// differences of 1/2 ln are used throughout, with analytic confluent limits
// once eigenvalues of C come closer than 1e-8 relative.
class LogStrain {
  public:
    explicit LogStrain(const Mat3& F); // throws StepRejection if det F <= 0

    const Mat3& deformation() const { return F_; }
    const Mat3& strain() const { return E_; }

    // dE/dF as a 9x9 matrix, rows indexed by vec(E), columns by vec(F).
    const Mat9& strain_derivative() const;

    // T : d^2E/dF^2 as a 9x9 matrix on vec(F) increments (major symmetric).
    Mat9 stress_second_derivative(const Mat3& T) const;

    // First Piola-Kirchhoff stress P = T : dE/dF for a log-stress T.
    Mat3 pull_back_stress(const Mat3& T) const;

  private:
    Mat3 F_, C_, E_;
    Vec3 lambda_;      // eigenvalues of C, ascending
    Mat3 V_;           // eigenvectors (columns)
    mutable Mat9 dEdF_;
    mutable bool have_dEdF_ = false;
    Mat9 dCdF_;        // dC/dF

    Mat9 strain_derivative_wrt_C() const; // dE/dC in the original frame
};

// Robust divided differences of f(x) = 1/2 ln(x); exposed for testing.
double log_divided_difference(double a, double b, double tol);
double log_divided_difference2(double a, double b, double c, double tol);

} // namespace hhoplast
