#pragma once

// Analytic gradient chi of ln psi with respect to the 8 model parameters,
// propagated in the same forward segment sweep as psi itself.

#include <array>
#include <complex>
#include <cstddef>

#include "ddsv/charfn.hpp"
#include "ddsv/model.hpp"

namespace ddsv {

/// d psi / dx = psi * chi[x], order (a, b, c, d, kappa, theta, epsilon, rho).
struct CharGrad {
    std::array<cplx, n_params> chi{};
};

struct PsiAndChi {
    cplx log_psi;
    CharGrad grad;
};

inline PsiAndChi psi_and_chi(const ModelParams& p, const PiecewiseCoeffs& coeffs, const CoeffPartials& partials,
                             cplx z) {
    detail::check_params(p);
    if (partials.segments.size() != coeffs.segments.size())
        throw ValidationError("coefficient partials do not match the coefficient grid");
    const double eps = p.epsilon;
    const double eps2 = eps * eps;
    const double kt = p.kappa * p.theta;
    const double v0 = coeffs.v0;

    RiccatiState st;
    std::array<cplx, n_params> dA{}, dB{};
    for (std::size_t j = 0; j < coeffs.segments.size(); ++j) {
        const Segment& s = coeffs.segments[j];
        const SegmentPartials& sp = partials.segments[j];
        const cplx B0 = st.B;
        SegmentConstants k;
        detail::albrecher_step(s, p, z, st, j, &k);

        const double dt = s.dtau;
        const cplx t = detail::half_tanh(k, dt);
        const cplx Q = B0 * (2.0 * k.mu - eps2 * B0) + s.lambda_sq * k.zz;
        const cplx a2v = k.nu + k.c * t;  // V0 * A2
        const cplx Aj = v0 * Q * t / a2v;
        const cplx E = k.c + k.nu + (k.nu - k.c) * k.e;
        const cplx G = detail::cui_log_term(k, eps2, B0, dt);
        const double coef = 2.0 * kt / eps2;

        for (std::size_t x = 0; x < n_params; ++x) {
            const double dkappa = x == pkappa ? 1.0 : 0.0;
            const double dtheta = x == ptheta ? 1.0 : 0.0;
            const double deps = x == pepsilon ? 1.0 : 0.0;
            const double dxi = sp.d_xi[x];
            const double dp = sp.d_rho_lambda[x];
            const double dL = sp.d_lambda_sq[x];
            const cplx dB0 = dB[x];

            const double dkxi = dkappa * s.xi + p.kappa * dxi;
            const cplx dmu = dkxi - (deps * s.rho_lambda + eps * dp) * z;
            const cplx dnu = (k.mu * dmu + 0.5 * (dL * eps2 + 2.0 * s.lambda_sq * eps * deps) * k.zz) / k.nu;
            const cplx dc = dmu - 2.0 * eps * deps * B0 - eps2 * dB0;
            const cplx dQ = 2.0 * dB0 * k.c + 2.0 * B0 * dmu - 2.0 * eps * deps * B0 * B0 + dL * k.zz;
            const cplx dh = 0.5 * dnu * dt;

            // A~1 = A1 cosh(h), A~2 = A2 cosh(h); both divided by A~2
            const cplx dA1_rel = v0 * (dQ * t + Q * dh) / a2v;
            const cplx dA2_rel = (dnu * (1.0 + 0.5 * k.c * dt) + t * (0.5 * k.nu * dnu * dt + dc)) / a2v;
            const cplx dAj = dA1_rel - Aj * dA2_rel;

            const cplx dE_rel = (dnu + dc * t) / a2v - (k.nu - k.c) * dt * dnu * k.e / E;
            const cplx dG = dnu / k.nu - dE_rel + 0.5 * (dmu - dnu) * dt;
            const double dcoef = 2.0 * (dkappa * p.theta + p.kappa * dtheta) / eps2 - 2.0 * coef * deps / eps;

            dA[x] += dcoef * G + coef * dG;
            dB[x] = dB0 - dAj / v0;
        }
        for (std::size_t x = 0; x < n_params; ++x)
            if (!detail::finite(dA[x]) || !detail::finite(dB[x]))
                throw NumericalError("non-finite gradient increment", j);
    }
    PsiAndChi out;
    out.log_psi = st.A + st.B * v0;
    for (std::size_t x = 0; x < n_params; ++x) out.grad.chi[x] = dA[x] + v0 * dB[x];
    return out;
}

inline CharGrad chi(const ModelParams& p, const PiecewiseCoeffs& coeffs, const CoeffPartials& partials, cplx z) {
    return psi_and_chi(p, coeffs, partials, z).grad;
}

/// Chain rule to (a, b, c, d, ln kappa, ln theta, ln epsilon, rho).
inline CharGrad chi_log_vol(const CharGrad& g, const ModelParams& p) {
    if (!(p.kappa > 0.0) || !(p.theta > 0.0) || !(p.epsilon > 0.0))
        throw DomainError("log coordinates need kappa, theta, epsilon > 0");
    CharGrad out = g;
    out.chi[pkappa] *= p.kappa;
    out.chi[ptheta] *= p.theta;
    out.chi[pepsilon] *= p.epsilon;
    return out;
}

}  // namespace ddsv
