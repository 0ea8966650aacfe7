#include "ddsv/gradient.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ddsv/fixtures.hpp"

namespace ddsv {
namespace {

SwapGeometry geometry(std::size_t m, std::size_t n) {
    return swap_geometry(fixtures::synthetic_curve(), TenorGrid::uniform(1, 60), m, n, 0.1);
}

ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    ModelParams p;
    p.a = 0.01 + 0.08 * U(rng);
    p.b = 0.01 + 0.08 * U(rng);
    p.c = 0.2 + 1.0 * U(rng);
    p.d = 0.01 + 0.05 * U(rng);
    p.kappa = 0.3 + 2.0 * U(rng);
    p.theta = 0.5 + 1.0 * U(rng);
    p.epsilon = 0.2 + 0.7 * U(rng);
    p.rho = -0.8 + 1.6 * U(rng);
    return p;
}

TEST(CharGradient, VanishesWherePsiIsConstant) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(5, 15);
    const auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geom);
    for (cplx z : {cplx{0, 0}, cplx{1, 0}}) {
        const auto r = psi_and_chi(p, c, d, z);
        for (std::size_t x = 0; x < n_params; ++x) EXPECT_LT(std::abs(r.grad.chi[x]), 1e-14) << param_names[x];
    }
}

TEST(CharGradient, ThetaDoesNotEnterB) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(4, 9);
    auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geom);
    const cplx z{1.0, 3.7};
    const cplx base = chi(p, c, d, z).chi[ptheta];
    c.v0 = 2.5;
    EXPECT_LT(std::abs(chi(p, c, d, z).chi[ptheta] - base), 1e-15 * std::abs(base));
}

TEST(CharGradient, MatchesFiniteDifferencesOfLogPsi) {
    const auto ctx = fixtures::synthetic_context();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_params(rng);
        const std::size_t m = 1 + t % 12;
        const auto geom = geometry(m, m + 1 + (t * 7) % 15);
        const auto [c, d] = build_coeffs_with_partials(p, ctx, geom);
        const cplx z{t % 2 == 0 ? 1.0 : 0.0, 0.1 + 20.0 * U(rng)};
        const auto an = psi_and_chi(p, c, d, z);
        EXPECT_LT(std::abs(an.log_psi - log_psi_albrecher(p, c, z)), 1e-13 * std::max(1.0, std::abs(an.log_psi)));
        const auto x = p.to_array();
        for (std::size_t i = 0; i < n_params; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
            auto up = x, dn = x;
            up[i] += h;
            dn[i] -= h;
            const auto pu = ModelParams::from_array(up), pd = ModelParams::from_array(dn);
            const cplx fd = (log_psi_albrecher(pu, build_coeffs(pu, ctx, geom), z) -
                             log_psi_albrecher(pd, build_coeffs(pd, ctx, geom), z)) /
                            (2 * h);
            EXPECT_LT(std::abs(an.grad.chi[i] - fd), 1e-5 * std::abs(fd) + 1e-9)
                << "trial " << t << " param " << param_names[i];
        }
    }
}

TEST(CharGradient, LogCoordinateChainRule) {
    CharGrad g;
    g.chi[pkappa] = 0.5;
    g.chi[pa] = 0.25;
    ModelParams p = fixtures::synthetic_truth();
    p.kappa = 2.0;
    const auto out = chi_log_vol(g, p);
    EXPECT_DOUBLE_EQ(out.chi[pkappa].real(), 1.0);
    EXPECT_DOUBLE_EQ(out.chi[pa].real(), 0.25);
    p.epsilon = 0.0;
    EXPECT_THROW(chi_log_vol(g, p), DomainError);
}

TEST(CharGradient, SplittingASegmentChangesNothing) {
    const auto p = fixtures::synthetic_truth();
    const auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geometry(3, 10));
    PiecewiseCoeffs c2;
    CoeffPartials d2;
    c2.v0 = c.v0;
    for (std::size_t j = 0; j < c.segments.size(); ++j) {
        for (double frac : {0.3, 0.7}) {
            Segment s = c.segments[j];
            s.dtau *= frac;
            c2.segments.push_back(s);
            d2.segments.push_back(d.segments[j]);
        }
    }
    for (cplx z : {cplx{1.0, 0.8}, cplx{0.0, 5.0}, cplx{0.4, 30.0}}) {
        const auto a = psi_and_chi(p, c, d, z);
        const auto b = psi_and_chi(p, c2, d2, z);
        EXPECT_LT(std::abs(a.log_psi - b.log_psi), 1e-10 * std::max(1.0, std::abs(a.log_psi)));
        for (std::size_t x = 0; x < n_params; ++x)
            EXPECT_LT(std::abs(a.grad.chi[x] - b.grad.chi[x]), 1e-10 * std::max(1.0, std::abs(a.grad.chi[x])));
    }
}

TEST(CharGradient, ConjugateSymmetry) {
    const auto p = fixtures::synthetic_truth();
    const auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geometry(6, 12));
    for (cplx z : {cplx{1.0, 2.0}, cplx{0.0, 11.0}}) {
        const auto a = chi(p, c, d, z), b = chi(p, c, d, std::conj(z));
        for (std::size_t x = 0; x < n_params; ++x)
            EXPECT_LT(std::abs(b.chi[x] - std::conj(a.chi[x])), 1e-14 * std::max(1.0, std::abs(a.chi[x])));
    }
}

TEST(CharGradient, MismatchedPartialsRejected) {
    const auto p = fixtures::synthetic_truth();
    const auto c = build_coeffs(p, fixtures::synthetic_context(), geometry(3, 5));
    EXPECT_THROW(psi_and_chi(p, c, CoeffPartials{}, cplx{0, 1}), ValidationError);
}

}  // namespace
}  // namespace ddsv
