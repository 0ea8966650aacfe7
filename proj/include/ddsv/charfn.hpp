#pragma once

// Moment generating function psi(z) = E[exp(z X)] of the log shifted swap
// rate, via two equivalent per-segment Riccati recursions.

#include <cmath>
#include <complex>
#include <cstddef>

#include "ddsv/errors.hpp"
#include "ddsv/model.hpp"

namespace ddsv {

using cplx = std::complex<double>;

struct RiccatiState {
    cplx A{0.0, 0.0};
    cplx B{0.0, 0.0};
};

/// Per-segment quantities shared by both recursions and by the gradient sweep.
struct SegmentConstants {
    cplx mu;
    cplx nu;
    cplx mu_minus_nu;  // cancellation-free
    cplx mu_plus_nu;   // cancellation-free
    cplx c;            // mu - eps^2 B(tau_j)
    cplx e;            // exp(-nu dtau)
    cplx zz;           // z - z^2
};

namespace detail {

/// log(1 + x) accurate for small |x|.
inline cplx log1p(cplx x) {
    const double xr = x.real();
    const double xi = x.imag();
    if (std::abs(xr) + std::abs(xi) > 0.5) return std::log(1.0 + x);
    return {0.5 * std::log1p(2.0 * xr + xr * xr + xi * xi), std::atan2(xi, 1.0 + xr)};
}

/// exp(x) - 1 accurate for small |x|.
inline cplx expm1(cplx x) {
    const double a = x.real();
    const double b = x.imag();
    const double sb = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * sb * sb, std::exp(a) * std::sin(b)};
}

inline bool finite(cplx x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

inline SegmentConstants segment_constants(const Segment& s, const ModelParams& p, cplx z, cplx B0) {
    const double eps2 = p.epsilon * p.epsilon;
    SegmentConstants k;
    k.zz = z - z * z;
    k.mu = p.kappa * s.xi - p.epsilon * s.rho_lambda * z;
    k.nu = std::sqrt(k.mu * k.mu + s.lambda_sq * eps2 * k.zz);
    const cplx plus = k.mu + k.nu;
    const cplx minus = k.mu - k.nu;
    // (mu - nu)(mu + nu) = -eps^2 lambda^2 (z - z^2); divide through the larger factor
    const cplx prod = -eps2 * s.lambda_sq * k.zz;
    k.mu_minus_nu = (std::abs(plus) >= std::abs(minus) && plus != cplx{}) ? prod / plus : minus;
    k.mu_plus_nu = (std::abs(minus) > std::abs(plus) && minus != cplx{}) ? prod / minus : plus;
    k.c = k.mu - eps2 * B0;
    k.e = std::exp(-k.nu * s.dtau);
    return k;
}

/// c - nu, formed from the stable mu - nu.
inline cplx c_minus_nu(const SegmentConstants& k, double eps2, cplx B0) { return k.mu_minus_nu - eps2 * B0; }

/// Albrecher-style update written with the decaying exponential e^{-nu dtau}.
inline void albrecher_step(const Segment& s, const ModelParams& p, cplx z, RiccatiState& st, std::size_t j,
                           SegmentConstants* out = nullptr) {
    const double eps2 = p.epsilon * p.epsilon;
    const double kt = p.kappa * p.theta;
    const SegmentConstants k = segment_constants(s, p, z, st.B);
    const cplx cmn = c_minus_nu(k, eps2, st.B);
    const cplx cpn = cmn + 2.0 * k.nu;
    const cplx one_minus_e = -detail::expm1(-k.nu * s.dtau);

    cplx dB;
    cplx dA;
    if (std::abs(cpn) >= std::abs(cmn)) {
        const cplx g = cmn / cpn;
        dB = cmn * one_minus_e / (eps2 * (1.0 - g * k.e));
        // log((1 - g e)/(1 - g))
        const cplx log_term = log1p(cmn * one_minus_e / (2.0 * k.nu));
        dA = kt / eps2 * (k.mu_minus_nu * s.dtau - 2.0 * log_term);
    } else {
        const cplx h = cpn / cmn;  // 1/g
        dB = cmn * one_minus_e * h / (eps2 * (h - k.e));
        const cplx rest = h * one_minus_e / (k.e * (h - 1.0));
        if (finite(rest) && std::abs(rest) < 0.5) {
            // log((h - e)/(h - 1)) = -nu dtau + log1p(rest)
            dA = kt / eps2 * (k.mu_plus_nu * s.dtau - 2.0 * log1p(rest));
        } else {
            dA = kt / eps2 * (k.mu_minus_nu * s.dtau - 2.0 * log1p(one_minus_e / (h - 1.0)));
        }
    }
    if (!finite(dA) || !finite(dB)) throw NumericalError("non-finite Riccati increment", j);
    st.A += dA;
    st.B += dB;
    if (out) *out = k;
}

/// tanh(nu dtau / 2), switching to the decayed form for large Re(nu dtau).
inline cplx half_tanh(const SegmentConstants& k, double dtau) {
    if (k.nu.real() * dtau > 40.0) return (1.0 - k.e) / (1.0 + k.e);
    return std::tanh(0.5 * k.nu * dtau);
}

/// ln(2 nu / E) + (mu - nu) dtau / 2, i.e. D_j less its kappa xi part, after the
/// -kt rho~ lambda z dtau / eps term has been folded in.
inline cplx cui_log_term(const SegmentConstants& k, double eps2, cplx B0, double dtau) {
    const cplx one_minus_e = -detail::expm1(-k.nu * dtau);
    const cplx cmn = c_minus_nu(k, eps2, B0);
    const cplx cpn = cmn + 2.0 * k.nu;
    if (std::abs(cpn) < std::abs(cmn)) {
        // E / (2 nu e) = 1 + (c + nu)(1 - e) / (2 nu e)
        const cplx rest = cpn * one_minus_e / (2.0 * k.nu * k.e);
        if (finite(rest) && std::abs(rest) < 0.5) return 0.5 * k.mu_plus_nu * dtau - log1p(rest);
    }
    // E - 2 nu = (c - nu)(1 - e)
    return -log1p(cmn * one_minus_e / (2.0 * k.nu)) + 0.5 * k.mu_minus_nu * dtau;
}

inline void cui_step(const Segment& s, const ModelParams& p, double v0, cplx z, RiccatiState& st, std::size_t j) {
    const double eps2 = p.epsilon * p.epsilon;
    const double kt = p.kappa * p.theta;
    const SegmentConstants k = segment_constants(s, p, z, st.B);
    const cplx t = half_tanh(k, s.dtau);
    const cplx Q = st.B * (2.0 * k.mu - eps2 * st.B) + s.lambda_sq * k.zz;
    const cplx A1 = Q * t;
    const cplx A2 = (k.nu + k.c * t) / v0;
    const cplx Aj = A1 / A2;

    const cplx E = k.c + k.nu + (k.nu - k.c) * k.e;
    if (E == cplx{}) throw NumericalError("singular segment (E = 0)", j);
    const cplx dA = 2.0 * kt / eps2 * cui_log_term(k, eps2, st.B, s.dtau);
    const cplx dB = -Aj / v0;
    if (!finite(dA) || !finite(dB)) throw NumericalError("non-finite Riccati increment", j);
    st.A += dA;
    st.B += dB;
}

inline void check_params(const ModelParams& p) {
    if (!(p.kappa > 0.0) || !(p.theta > 0.0) || !(p.epsilon > 0.0))
        throw DomainError("kappa, theta and epsilon must be positive");
}

}  // namespace detail

/// A(tau_m, z) + B(tau_m, z) V0.
inline cplx log_psi_albrecher(const ModelParams& p, const PiecewiseCoeffs& coeffs, cplx z) {
    detail::check_params(p);
    RiccatiState st;
    for (std::size_t j = 0; j < coeffs.segments.size(); ++j) detail::albrecher_step(coeffs.segments[j], p, z, st, j);
    return st.A + st.B * coeffs.v0;
}

inline cplx log_psi_cui(const ModelParams& p, const PiecewiseCoeffs& coeffs, cplx z) {
    detail::check_params(p);
    RiccatiState st;
    for (std::size_t j = 0; j < coeffs.segments.size(); ++j) detail::cui_step(coeffs.segments[j], p, coeffs.v0, z, st, j);
    return st.A + st.B * coeffs.v0;
}

inline cplx psi_albrecher(const ModelParams& p, const PiecewiseCoeffs& coeffs, cplx z) {
    return std::exp(log_psi_albrecher(p, coeffs, z));
}

inline cplx psi_cui(const ModelParams& p, const PiecewiseCoeffs& coeffs, cplx z) {
    return std::exp(log_psi_cui(p, coeffs, z));
}

}  // namespace ddsv
