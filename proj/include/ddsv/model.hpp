#pragma once

// Parameter vector, the g(u) loading parametrization and the piecewise
// constant coefficients (lambda, rho~, xi) of the frozen swap-rate dynamics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddsv/errors.hpp"
#include "ddsv/market.hpp"

namespace ddsv {

inline constexpr std::size_t n_params = 8;

/// Component order shared by every 8-vector in the library.
enum Param : std::size_t { pa = 0, pb, pc, pd, pkappa, ptheta, pepsilon, prho };

inline constexpr std::array<const char*, n_params> param_names{"a", "b", "c", "d", "kappa", "theta", "epsilon", "rho"};

struct ModelParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double kappa = 1.0;
    double theta = 1.0;
    double epsilon = 0.5;
    double rho = 0.0;

    std::array<double, n_params> to_array() const { return {a, b, c, d, kappa, theta, epsilon, rho}; }

    static ModelParams from_array(std::span<const double> x) {
        if (x.size() != n_params) throw ValidationError("parameter vector must have 8 components");
        return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]};
    }

    double operator[](std::size_t i) const { return to_array().at(i); }

    bool feller() const { return 2.0 * kappa * theta >= epsilon * epsilon; }

    /// Open-domain check: (a,b,c,d) >= 0, kappa, theta, epsilon > 0, |rho| < 1.
    bool admissible() const {
        for (double v : to_array())
            if (!std::isfinite(v)) return false;
        return a >= 0.0 && b >= 0.0 && c >= 0.0 && d >= 0.0 && kappa > 0.0 && theta > 0.0 && epsilon > 0.0 &&
               std::abs(rho) < 1.0;
    }
};

/// Quantities held fixed during calibration.
struct ModelContext {
    double shift = 0.1;
    double v0 = 1.0;
    BetaMatrix betas;

    std::size_t n_factors() const { return betas.n_factors(); }
};

inline double g_eval(double a, double b, double c, double d, double u) {
    return (a + b * u) * std::exp(-c * u) + d;
}

/// (dg/da, dg/db, dg/dc, dg/dd).
inline std::array<double, 4> g_partials(double a, double b, double c, double /*d*/, double u) {
    const double e = std::exp(-c * u);
    return {e, u * e, -(a + b * u) * u * e, 1.0};
}

/// Constants on one tau segment (tau_j, tau_{j+1}].
struct Segment {
    double dtau = 0.0;
    double lambda_sq = 0.0;
    double lambda = 0.0;
    double rho_tilde = 0.0;
    double rho_lambda = 0.0;  // rho~ * lambda
    double xi = 1.0;
};

struct PiecewiseCoeffs {
    std::vector<Segment> segments;  // j = 0..m-1, tau increasing
    double v0 = 1.0;
    std::size_t clamped_segments = 0;

    double horizon() const {
        double t = 0.0;
        for (const auto& s : segments) t += s.dtau;
        return t;
    }
};

struct SegmentPartials {
    std::array<double, n_params> d_lambda_sq{};
    std::array<double, n_params> d_rho_lambda{};
    std::array<double, n_params> d_xi{};
};

struct CoeffPartials {
    std::vector<SegmentPartials> segments;
};

namespace detail {

inline constexpr double rho_clamp = 1.0 - 1e-10;

/// Shared sweep behind build_coeffs and build_coeff_partials.
inline void build_segments(const ModelParams& p, const ModelContext& ctx, const SwapGeometry& geom,
                           PiecewiseCoeffs* coeffs, CoeffPartials* partials) {
    const std::size_t m = geom.m;
    const std::size_t n = geom.n;
    const std::size_t nf = ctx.n_factors();
    if (nf == 0) throw ValidationError("beta matrix is empty");
    if (ctx.betas.rows() < n)
        throw ValidationError("beta file has " + std::to_string(ctx.betas.rows()) + " rows, swap " +
                              std::to_string(m) + "x" + std::to_string(n) + " needs " + std::to_string(n));
    if (!(ctx.v0 > 0.0)) throw DomainError("V0 must be positive");
    const double inv_sqrt_nf = 1.0 / std::sqrt(static_cast<double>(nf));
    const double shift = geom.shift;

    // tail_alpha[k] = sum_{j=max(m,k)}^{n-1} alpha_j
    std::vector<double> tail_alpha(n + 1, 0.0);
    for (std::size_t k = n; k-- > m;) tail_alpha[k] = tail_alpha[k + 1] + geom.alphas[k - m];
    for (std::size_t k = 0; k < m; ++k) tail_alpha[k] = 1.0;

    std::vector<double> drift_weight(n);  // DeltaT_k (F_k + delta) / (1 + DeltaT_k F_k)
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = geom.period(k);
        drift_weight[k] = dt * (geom.forwards[k] + shift) / (1.0 + dt * geom.forwards[k]);
    }

    if (coeffs) {
        coeffs->segments.assign(m, Segment{});
        coeffs->v0 = ctx.v0;
        coeffs->clamped_segments = 0;
    }
    if (partials) partials->segments.assign(m, SegmentPartials{});

    std::vector<double> v(nf), dv(nf);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t l = m - 1 - j;
        const double tl = geom.dates[l];

        std::fill(v.begin(), v.end(), 0.0);
        double rl_unit = 0.0;  // rho~ lambda at rho = 1
        double xi_unit = 0.0;  // (xi - 1) at rho = 1
        std::array<std::vector<double>, 4> dvx;
        for (auto& x : dvx) x.assign(nf, 0.0);
        std::array<double, 4> drl_unit{}, dxi_unit{};

        for (std::size_t k = l; k < n; ++k) {
            const double u = geom.dates[k] - tl;
            const double gk = g_eval(p.a, p.b, p.c, p.d, u);
            if (!(gk > 0.0))
                throw DegenerateLoadingError("loading g(" + std::to_string(u) + ") is not positive");
            const auto dg = g_partials(p.a, p.b, p.c, p.d, u);
            const auto beta = ctx.betas.beta(k - l + 1);
            double s = 0.0;
            for (double bp : beta) s += bp;
            const double corr_unit = inv_sqrt_nf * s;  // rho_k ||gamma_k|| / (rho g)

            const double w_xi = drift_weight[k] * tail_alpha[k] * corr_unit;
            xi_unit += w_xi * gk;
            for (std::size_t x = 0; x < 4; ++x) dxi_unit[x] += w_xi * dg[x];

            if (k >= m) {
                const double om = geom.omegas[k - m];
                for (std::size_t q = 0; q < nf; ++q) {
                    v[q] += om * gk * beta[q];
                    for (std::size_t x = 0; x < 4; ++x) dvx[x][q] += om * dg[x] * beta[q];
                }
                rl_unit += om * gk * corr_unit;
                for (std::size_t x = 0; x < 4; ++x) drl_unit[x] += om * dg[x] * corr_unit;
            }
        }
        const double eps_over_kappa = p.epsilon / p.kappa;
        xi_unit *= eps_over_kappa;
        for (auto& x : dxi_unit) x *= eps_over_kappa;

        double lambda_sq = 0.0;
        for (double x : v) lambda_sq += x * x;
        const double lambda = std::sqrt(lambda_sq);
        const double rho_lambda = p.rho * rl_unit;
        const double xi = 1.0 + p.rho * xi_unit;

        if (coeffs) {
            Segment& seg = coeffs->segments[j];
            seg.dtau = geom.dates[l + 1] - tl;
            seg.lambda_sq = lambda_sq;
            seg.lambda = lambda;
            seg.xi = xi;
            if (lambda == 0.0) {
                if (rho_lambda != 0.0)
                    throw DegenerateLoadingError("segment " + std::to_string(j) +
                                                 ": zero loading norm with nonzero correlation term");
                seg.rho_tilde = 0.0;
                seg.rho_lambda = 0.0;
            } else {
                double rt = rho_lambda / lambda;
                if (std::abs(rt) > rho_clamp) {
                    rt = std::copysign(rho_clamp, rt);
                    ++coeffs->clamped_segments;
                    std::clog << "ddsv: warning: effective correlation clamped on segment " << j << '\n';
                    seg.rho_lambda = rt * lambda;
                } else {
                    seg.rho_lambda = rho_lambda;
                }
                seg.rho_tilde = rt;
            }
        }
        if (partials) {
            SegmentPartials& sp = partials->segments[j];
            for (std::size_t x = 0; x < 4; ++x) {
                double ip = 0.0;
                for (std::size_t q = 0; q < nf; ++q) ip += v[q] * dvx[x][q];
                sp.d_lambda_sq[x] = 2.0 * ip;
                sp.d_rho_lambda[x] = p.rho * drl_unit[x];
                sp.d_xi[x] = p.rho * dxi_unit[x];
            }
            sp.d_xi[pkappa] = -(xi - 1.0) / p.kappa;
            sp.d_xi[pepsilon] = (xi - 1.0) / p.epsilon;
            sp.d_rho_lambda[prho] = rl_unit;
            sp.d_xi[prho] = xi_unit;
        }
    }
}

}  // namespace detail

/// Segment j covers tau in (tau_j, tau_{j+1}] with tau_j = T_m - T_{m-j}; its
/// constants are those of calendar interval [T_l, T_{l+1}), l = m-1-j.
inline PiecewiseCoeffs build_coeffs(const ModelParams& p, const ModelContext& ctx, const SwapGeometry& geom) {
    PiecewiseCoeffs out;
    detail::build_segments(p, ctx, geom, &out, nullptr);
    return out;
}

inline CoeffPartials build_coeff_partials(const ModelParams& p, const ModelContext& ctx, const SwapGeometry& geom) {
    CoeffPartials out;
    detail::build_segments(p, ctx, geom, nullptr, &out);
    return out;
}

inline std::pair<PiecewiseCoeffs, CoeffPartials> build_coeffs_with_partials(const ModelParams& p,
                                                                           const ModelContext& ctx,
                                                                           const SwapGeometry& geom) {
    std::pair<PiecewiseCoeffs, CoeffPartials> out;
    detail::build_segments(p, ctx, geom, &out.first, &out.second);
    return out;
}

}  // namespace ddsv
