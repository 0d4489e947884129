#include "oamqw/modes.hpp"

#include "oamqw/errors.hpp"
#include "oamqw/special.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace oamqw {

namespace {

constexpr cplx I{0.0, 1.0};

// Radial integrals of Gaussian-weighted profiles are negligible beyond this.
constexpr double rho_cut = 8.0;
constexpr double quad_tol = 1e-8;

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

void LGModeSpec::validate() const {
    if (p < 0) {
        throw InvalidParameter("LG radial index p must be non-negative");
    }
    if (!(w0 > 0.0) || !(k > 0.0)) {
        throw InvalidParameter("LG waist and wave number must be positive");
    }
}

double LGModeSpec::beam_radius(double z) const {
    const double t = z / rayleigh_range();
    return w0 * std::sqrt(1.0 + t * t);
}

double LGModeSpec::curvature_radius(double z) const {
    if (z == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double zr = rayleigh_range();
    return z * (1.0 + (zr / z) * (zr / z));
}

cplx lg_radial(const LGModeSpec& spec, double r, double z) {
    spec.validate();
    if (r < 0.0) {
        throw DomainError("LG amplitude needs r >= 0");
    }
    const int am = std::abs(spec.m);
    const double w = spec.beam_radius(z);
    const double x = r / w;
    const double log_norm = 0.5 * ((am + 1) * std::log(2.0) + log_factorial(spec.p) -
                                   std::log(pi) - 2.0 * std::log(w) - log_factorial(spec.p + am));
    const double laguerre = std::assoc_laguerre(static_cast<unsigned>(spec.p),
                                                static_cast<unsigned>(am), 2.0 * x * x);
    const double envelope = std::exp(log_norm - x * x) * std::pow(x, am) * laguerre;

    const double zr = spec.rayleigh_range();
    const double curvature = spec.k * r * r * z / (2.0 * (z * z + zr * zr));
    const double gouy = (2.0 * spec.p + am + 1.0) * std::atan(z / zr);
    return envelope * std::exp(I * (curvature - gouy));
}

cplx lg_amplitude(const LGModeSpec& spec, double r, double phi, double z) {
    return lg_radial(spec, r, z) * std::exp(I * (static_cast<double>(spec.m) * phi));
}

void HyGGModeSpec::validate() const {
    if (!(p > -std::abs(m) - 1.0)) {
        throw InvalidParameter("HyGG index needs p > -|m| - 1");
    }
}

cplx hygg_amplitude(const HyGGModeSpec& spec, double rho, double zeta) {
    spec.validate();
    if (!(zeta > 0.0)) {
        throw DomainError("HyGG amplitude needs zeta > 0; use hygg_pupil_form at the pupil");
    }
    if (rho < 0.0) {
        throw DomainError("HyGG amplitude needs rho >= 0");
    }
    if (!std::isfinite(rho * rho / zeta)) {
        return {0.0, 0.0};  // every HyGG mode decays at least as rho^{-1}
    }
    const double am = std::abs(spec.m);
    const double p = spec.p;
    const double log_norm = 0.5 * ((p + am + 1.0) * std::log(2.0) - std::log(pi) -
                                   std::lgamma(p + am + 1.0)) +
                            std::lgamma(1.0 + am + p / 2.0) - std::lgamma(am + 1.0);
    const cplx zi{zeta, 1.0};
    const cplx phase = std::pow(I, am + 1.0);
    const cplx prefactor = phase * std::exp(log_norm) * std::pow(zeta, p / 2.0) *
                           std::pow(zi, -(1.0 + am + p / 2.0)) * std::pow(rho, am);
    const cplx w = -I * rho * rho / zi;
    const cplx z = rho * rho / (zeta * zi);
    const cplx w_plus_z = -I * rho * rho / zeta;
    return prefactor * special::exp_hyp1f1(w, -p / 2.0, 1.0 + am, z, w_plus_z);
}

double hygg_pupil_form(const HyGGModeSpec& spec, double rho) {
    spec.validate();
    const double e = spec.p + std::abs(spec.m);
    const double log_norm = 0.5 * ((e + 1.0) * std::log(2.0) - std::log(pi) - std::lgamma(e + 1.0));
    return std::exp(log_norm - rho * rho) * std::pow(rho, e);
}

double RadialCoeffs::power_sum() const {
    return std::accumulate(coeffs.begin(), coeffs.end(), 0.0,
                           [](double acc, double c) { return acc + c * c; });
}

double radial_coefficient(int m_in, int m_out, int p) {
    if (p < 0) {
        throw InvalidParameter("radial index p must be non-negative");
    }
    // c_p = <LG_{p,l}| x^{|m_in|/2} e^{-x/2}> in x = 2 rho^2, l = |m_out|:
    // sqrt(1/(p! |m_in|! (p+l)!)) * Gamma(s+1) * (l-s)_p,  s = (l + |m_in|)/2.
    const int a = std::abs(m_in);
    const int l = std::abs(m_out);
    const double s = 0.5 * (l + a);
    const double poch = special::pochhammer(l - s, p);
    if (poch == 0.0) {
        return 0.0;
    }
    const double log_mag = -0.5 * (log_factorial(p) + log_factorial(a) + log_factorial(p + l)) +
                           std::lgamma(s + 1.0);
    return std::exp(log_mag) * poch;
}

RadialCoeffs qp_radial_coeffs(int m, int p_max) {
    if (m < 0) {
        throw InvalidParameter("qp_radial_coeffs takes the input OAM m >= 0");
    }
    if (p_max < 0) {
        throw InvalidParameter("p_max must be non-negative");
    }
    RadialCoeffs rc;
    rc.m = m;
    rc.coeffs.reserve(static_cast<std::size_t>(p_max) + 1);
    for (int p = 0; p <= p_max; ++p) {
        rc.coeffs.push_back(radial_coefficient(m, m + 1, p));
    }
    return rc;
}

double pupil_overlap(int m, double zeta) {
    if (!(zeta >= 0.0)) {
        throw DomainError("pupil_overlap needs zeta >= 0");
    }
    if (zeta == 0.0) {
        return 1.0;
    }
    const int m_in = m - 1;
    const HyGGModeSpec out{static_cast<double>(std::abs(m_in) - std::abs(m)), m};
    const HyGGModeSpec in_profile{0.0, m_in};

    const auto re = special::integrate(
        [&](double rho) {
            return 2.0 * pi * rho * hygg_pupil_form(in_profile, rho) *
                   hygg_amplitude(out, rho, zeta).real();
        },
        0.0, rho_cut, quad_tol);
    const auto im = special::integrate(
        [&](double rho) {
            return 2.0 * pi * rho * hygg_pupil_form(in_profile, rho) *
                   hygg_amplitude(out, rho, zeta).imag();
        },
        0.0, rho_cut, quad_tol);
    // Both profiles are normalized analytically.
    return std::min(1.0, std::hypot(re, im));
}

WalkState gouy_dephase(const WalkState& state, double d_over_zR) {
    if (!(d_over_zR >= 0.0)) {
        throw DomainError("gouy_dephase needs d/z_R >= 0");
    }
    WalkState out = state;
    const double psi = std::atan(d_over_zR);
    for (int m = state.m_min(); m <= state.m_max(); ++m) {
        const cplx f = std::exp(-2.0 * I * (std::abs(m) * psi));
        out.set(Pol::L, m, state.amp(Pol::L, m) * f);
        out.set(Pol::R, m, state.amp(Pol::R, m) * f);
    }
    return out;
}

double far_field(const std::function<double(double)>& f, double kappa) {
    return special::integrate(
        [&](double rho) { return 2.0 * f(rho) * std::cyl_bessel_j(0.0, 2.0 * rho * kappa) * rho; },
        0.0, rho_cut, quad_tol);
}

double coupling_efficiency(int m, double sigma_over_w0) {
    if (!(sigma_over_w0 > 0.0)) {
        throw DomainError("fiber mode radius must be positive");
    }
    // Flattened beam: LG_{0,m} radial magnitude at the waist, azimuthal phase removed.
    const LGModeSpec spec{0, m, 1.0, 2.0};
    const auto flattened = [&](double rho) { return std::abs(lg_radial(spec, rho, 0.0)); };
    const double sigma = sigma_over_w0;
    const double kappa_cut = rho_cut * std::max(1.0, sigma);
    const double overlap = special::integrate(
        [&](double kappa) {
            return 2.0 * pi * kappa * far_field(flattened, kappa) *
                   std::exp(-kappa * kappa / (sigma * sigma));
        },
        0.0, kappa_cut, quad_tol);
    return 2.0 / (pi * sigma * sigma) * overlap * overlap;
}

ShiftWeight radial_retention_weight() {
    return [](int m_in, int m_out) { return std::abs(radial_coefficient(m_in, m_out, 0)); };
}

}  // namespace oamqw
