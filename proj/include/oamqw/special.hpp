#pragma once

#include <complex>
#include <functional>

namespace oamqw::special {

using cplx = std::complex<double>;

// Kummer's confluent hypergeometric function 1F1(a; b; z), b not a non-positive
// integer. Power series for moderate |z|, large-|z| asymptotic expansion
// otherwise.
cplx hyp1f1(double a, double b, cplx z);

// exp(w) * 1F1(a; b; z) without forming the two factors separately. The HyGG
// modes need this: e^{Re z} and e^{Re w} overflow/underflow individually at
// large radius while their product stays O(1).
cplx exp_hyp1f1(cplx w, double a, double b, cplx z);

// Same, with w + z supplied by the caller when it is known in closed form
// (forming it from two large, nearly opposite numbers loses all precision).
cplx exp_hyp1f1(cplx w, double a, double b, cplx z, cplx w_plus_z);

// The two branches, exposed so tests can check them against each other.
cplx hyp1f1_series(double a, double b, cplx z);
cplx hyp1f1_asymptotic(double a, double b, cplx z);

// Below this |z| hyp1f1 always uses the series; above it the series is kept
// only while cancellation between its terms stays small.
inline constexpr double asymptotic_radius = 24.0;

// Rising factorial (x)_n = Gamma(x + n) / Gamma(x); finite for every real x.
double pochhammer(double x, int n);

// Adaptive Gauss-Kronrod on [a, b]; throws QuadratureFailure when the error
// estimate exceeds rel_tol relative to the integral of |f| (or abs_floor).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8, double abs_floor = 1e-15);

// Same on [a, inf), for integrands with slow algebraic decay.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol = 1e-8, double abs_floor = 1e-15);

}  // namespace oamqw::special
