#pragma once

// Payer swaption prices and their 8-gradient from the P1/P2 Fourier
// integrals, evaluated by Gauss-Laguerre quadrature.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "ddsv/charfn.hpp"
#include "ddsv/gradient.hpp"
#include "ddsv/market.hpp"
#include "ddsv/model.hpp"
#include "ddsv/quadrature.hpp"

namespace ddsv {

inline constexpr std::size_t default_nodes = 90;

struct PriceAndGrad {
    double price = 0.0;
    double raw_price = 0.0;  // before clamping quadrature noise
    std::array<double, n_params> grad{};
    double p1 = 0.0;
    double p2 = 0.0;
    std::array<double, n_params> grad_p1{};
    std::array<double, n_params> grad_p2{};
};

/// ln psi (and chi when requested) at every node on both contours; shared by
/// all strikes of one (m, n) pair.
struct NodeTable {
    std::vector<cplx> log_psi1;  // z = 1 + iu
    std::vector<cplx> log_psi2;  // z = iu
    std::vector<CharGrad> chi1;
    std::vector<CharGrad> chi2;

    bool has_grad() const { return !chi1.empty(); }
};

inline NodeTable evaluate_nodes(const ModelParams& p, const PiecewiseCoeffs& coeffs, const QuadratureRule& rule) {
    NodeTable t;
    t.log_psi1.resize(rule.size());
    t.log_psi2.resize(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double u = rule.nodes[i];
        t.log_psi1[i] = log_psi_albrecher(p, coeffs, cplx{1.0, u});
        t.log_psi2[i] = log_psi_albrecher(p, coeffs, cplx{0.0, u});
    }
    return t;
}

inline NodeTable evaluate_nodes(const ModelParams& p, const PiecewiseCoeffs& coeffs, const CoeffPartials& partials,
                                const QuadratureRule& rule) {
    NodeTable t;
    const std::size_t n = rule.size();
    t.log_psi1.resize(n);
    t.log_psi2.resize(n);
    t.chi1.resize(n);
    t.chi2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rule.nodes[i];
        const auto r1 = psi_and_chi(p, coeffs, partials, cplx{1.0, u});
        const auto r2 = psi_and_chi(p, coeffs, partials, cplx{0.0, u});
        t.log_psi1[i] = r1.log_psi;
        t.log_psi2[i] = r2.log_psi;
        t.chi1[i] = r1.grad;
        t.chi2[i] = r2.grad;
    }
    return t;
}

/// Prices one strike from a node table. The gradient is filled when the table carries chi.
inline PriceAndGrad price_from_table(const NodeTable& t, const SwapGeometry& geom, double strike,
                                     const QuadratureRule& rule) {
    const double shift = geom.shift;
    if (!(strike + shift > 0.0)) throw DomainError("strike + shift must be positive");
    const double khat = std::log((strike + shift) / (geom.swap_rate + shift));
    const bool grad = t.has_grad();

    double s1 = 0.0, s2 = 0.0;
    std::array<double, n_params> g1{}, g2{};
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double u = rule.nodes[i];
        const double w = rule.compensated_weights[i];
        const cplx iu{0.0, u};
        // e^{-iu khat} psi / (iu)
        const cplx f1 = std::exp(t.log_psi1[i] - iu * khat) / iu;
        const cplx f2 = std::exp(t.log_psi2[i] - iu * khat) / iu;
        s1 += w * f1.real();
        s2 += w * f2.real();
        if (grad) {
            for (std::size_t x = 0; x < n_params; ++x) {
                g1[x] += w * (f1 * t.chi1[i].chi[x]).real();
                g2[x] += w * (f2 * t.chi2[i].chi[x]).real();
            }
        }
    }
    constexpr double inv_pi = std::numbers::inv_pi;
    PriceAndGrad r;
    r.p1 = 0.5 + inv_pi * s1;
    r.p2 = 0.5 + inv_pi * s2;
    const double fwd = geom.swap_rate + shift;
    const double k = strike + shift;
    r.raw_price = geom.annuity * (fwd * r.p1 - k * r.p2);
    r.price = (r.raw_price < 0.0 && -r.raw_price < 1e-12 * geom.annuity) ? 0.0 : r.raw_price;
    if (grad) {
        for (std::size_t x = 0; x < n_params; ++x) {
            r.grad_p1[x] = inv_pi * g1[x];
            r.grad_p2[x] = inv_pi * g2[x];
            r.grad[x] = geom.annuity * (fwd * r.grad_p1[x] - k * r.grad_p2[x]);
        }
    }
    return r;
}

inline std::pair<double, double> p1p2(const ModelParams& p, const PiecewiseCoeffs& coeffs, const SwapGeometry& geom,
                                      double strike, const QuadratureRule& rule) {
    const auto r = price_from_table(evaluate_nodes(p, coeffs, rule), geom, strike, rule);
    return {r.p1, r.p2};
}

inline double price(const ModelParams& p, const PiecewiseCoeffs& coeffs, const SwapGeometry& geom, double strike,
                    const QuadratureRule& rule) {
    return price_from_table(evaluate_nodes(p, coeffs, rule), geom, strike, rule).price;
}

inline PriceAndGrad price_gradient(const ModelParams& p, const PiecewiseCoeffs& coeffs, const CoeffPartials& partials,
                                   const SwapGeometry& geom, double strike, const QuadratureRule& rule) {
    return price_from_table(evaluate_nodes(p, coeffs, partials, rule), geom, strike, rule);
}

}  // namespace ddsv
