#pragma once

// Radial-mode numerics: Laguerre-Gauss and Hypergeometric-Gauss amplitudes,
// the q-plate's radial expansion coefficients, near-field overlaps, Gouy
// dephasing between steps and the OAM-dependent fiber-coupling efficiency.

#include "oamqw/core.hpp"

#include <complex>
#include <vector>

namespace oamqw {

struct LGModeSpec {
    int p = 0;        // radial index, >= 0
    int m = 0;        // OAM
    double w0 = 1.0;  // waist radius
    double k = 1.0;   // wave number

    void validate() const;
    double rayleigh_range() const { return k * w0 * w0 / 2.0; }
    double beam_radius(double z) const;
    // Wavefront curvature radius; infinite at the waist.
    double curvature_radius(double z) const;
};

// Normalized so that the integral of |LG|^2 r dr dphi is 1 at every z.
cplx lg_amplitude(const LGModeSpec& spec, double r, double phi, double z);

// Radial part only (azimuthal factor e^{i m phi} dropped).
cplx lg_radial(const LGModeSpec& spec, double r, double z);

struct HyGGModeSpec {
    double p = 0.0;  // real radial index, p > -|m| - 1
    int m = 0;

    void validate() const;
};

// Radial amplitude in rho = r/w0, zeta = z/z_R (azimuthal factor dropped);
// the integral of |HyGG|^2 rho drho dphi is 1. Requires zeta > 0.
cplx hygg_amplitude(const HyGGModeSpec& spec, double rho, double zeta);

// zeta -> 0 limit: normalized rho^{p+|m|} e^{-rho^2}.
double hygg_pupil_form(const HyGGModeSpec& spec, double rho);

struct RadialCoeffs {
    int m = 0;                   // input OAM
    std::vector<double> coeffs;  // c_p, p = 0..p_max

    double power_sum() const;
};

// Expansion coefficient c_p of the pupil profile of an LG_{0,m_in} beam in the
// LG_{p,m_out} basis (the profile a q-plate imprints at its output).
double radial_coefficient(int m_in, int m_out, int p);

// Tuned q = 1/2 plate with L input raising m -> m + 1; m >= 0.
RadialCoeffs qp_radial_coeffs(int m, int p_max);

// |<pupil profile of LG_{0,m-1}, HyGG_{|m-1|-|m|, m}(zeta)>|, both normalized;
// m is the OAM of the q-plate's output mode. Exactly 1 at zeta = 0.
double pupil_overlap(int m, double zeta);

// Free-space Gouy phase between steps for p = 0 modes:
// c_m -> e^{-2 i |m| arctan(d/z_R)} c_m.
WalkState gouy_dephase(const WalkState& state, double d_over_zR);

// Coupling of a flattened LG_{0,m} beam into a Gaussian fiber mode of radius
// sigma (far-field units where a waist-w0 Gaussian maps to radius w0, so
// sigma_over_w0 = 1 is matched).
double coupling_efficiency(int m, double sigma_over_w0 = 1.0);

// Order-0 Hankel transform used for the far field, normalized so a Gaussian
// e^{-rho^2} maps to e^{-kappa^2}: F(kappa) = 2 int f(rho) J0(2 rho kappa) rho drho.
double far_field(const std::function<double(double)>& f, double kappa);

// Amplitude retention |c_0| of the p = 0 term for a q-plate transition
// m_in -> m_out; plug into WalkHooks::qplate_weight for radial losses.
ShiftWeight radial_retention_weight();

}  // namespace oamqw
