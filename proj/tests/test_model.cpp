#include "ddsv/model.hpp"

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
    p.a = 0.01 + 0.1 * U(rng);
    p.b = 0.01 + 0.1 * U(rng);
    p.c = 0.2 + 1.0 * U(rng);
    p.d = 0.01 + 0.05 * U(rng);
    p.kappa = 0.3 + 2.0 * U(rng);
    p.theta = 0.5 + 1.0 * U(rng);
    p.epsilon = 0.2 + 0.6 * U(rng);
    p.rho = -0.8 + 1.6 * U(rng);
    return p;
}

ModelParams bumped(ModelParams p, std::size_t i, double h) {
    auto x = p.to_array();
    x[i] += h;
    return ModelParams::from_array(x);
}

TEST(LoadingFunction, ValueAtZeroIsAPlusD) { EXPECT_DOUBLE_EQ(g_eval(0.3, 0.7, 1.1, 0.2, 0.0), 0.5); }

TEST(LoadingFunction, KnownValue) { EXPECT_NEAR(g_eval(1, 2, 3, 0.5, 1.0), 3.0 * std::exp(-3.0) + 0.5, 1e-15); }

TEST(LoadingFunction, ZeroDecayIsAffine) {
    for (double u : {0.0, 1.0, 4.5, 17.0}) EXPECT_DOUBLE_EQ(g_eval(0.1, 0.02, 0.0, 0.03, u), 0.1 + 0.02 * u + 0.03);
}

TEST(LoadingFunction, PartialsAtOrigin) {
    const auto d = g_partials(0.4, 0.3, 0.9, 0.1, 0.0);
    EXPECT_DOUBLE_EQ(d[0], 1.0);
    EXPECT_DOUBLE_EQ(d[1], 0.0);
    EXPECT_DOUBLE_EQ(d[2], 0.0);
    EXPECT_DOUBLE_EQ(d[3], 1.0);
}

TEST(LoadingFunction, PartialsMatchFiniteDifferences) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::array<double, 4> x{0.2 * U(rng), 0.2 * U(rng), 2.0 * U(rng), 0.1 * U(rng)};
        const double u = 30.0 * U(rng);
        const auto d = g_partials(x[0], x[1], x[2], x[3], u);
        for (std::size_t i = 0; i < 4; ++i) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
            auto up = x, dn = x;
            up[i] += h;
            dn[i] -= h;
            const double fd = (g_eval(up[0], up[1], up[2], up[3], u) - g_eval(dn[0], dn[1], dn[2], dn[3], u)) / (2 * h);
            EXPECT_NEAR(d[i], fd, 1e-6 * std::max(std::abs(fd), 1e-3)) << "i=" << i << " u=" << u;
        }
    }
}

TEST(Coefficients, ZeroCorrelationDecouples) {
    auto p = fixtures::synthetic_truth();
    p.rho = 0.0;
    const auto c = build_coeffs(p, fixtures::synthetic_context(), geometry(5, 15));
    ASSERT_EQ(c.segments.size(), 5u);
    for (const auto& s : c.segments) {
        EXPECT_EQ(s.rho_tilde, 0.0);
        EXPECT_EQ(s.xi, 1.0);
        EXPECT_GT(s.lambda, 0.0);
    }
}

TEST(Coefficients, SingleForwardWithAlignedBetas) {
    const ModelContext ctx{0.1, 1.0, BetaMatrix(2, std::vector<std::vector<double>>(20, {1.0, 0.0}))};
    const auto geom = geometry(4, 5);
    const auto p = fixtures::synthetic_truth();
    const auto c = build_coeffs(p, ctx, geom);
    for (std::size_t j = 0; j < 4; ++j) {
        const std::size_t l = 3 - j;
        const double u = geom.dates[4] - geom.dates[l];
        EXPECT_NEAR(c.segments[j].lambda, g_eval(p.a, p.b, p.c, p.d, u) * geom.omegas[0], 1e-15);
        EXPECT_NEAR(c.segments[j].rho_tilde, p.rho / std::sqrt(2.0), 1e-15);
        EXPECT_DOUBLE_EQ(c.segments[j].dtau, 1.0);
    }
}

// Plain nested sums over forwards and factors, written without the running
// tail sums used by the library.
TEST(Coefficients, MatchDirectSummation) {
    const auto ctx = fixtures::synthetic_context();
    std::mt19937_64 rng(5);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 2}, {3, 8}, {7, 17}, {10, 20}}) {
        const auto geom = geometry(m, n);
        const auto p = random_params(rng);
        const auto c = build_coeffs(p, ctx, geom);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t l = m - 1 - j;
            double lam2 = 0.0, rl = 0.0, xi1 = 0.0;
            for (std::size_t k = m; k < n; ++k)
                for (std::size_t kk = m; kk < n; ++kk) {
                    const auto bk = ctx.betas.beta(k - l + 1), bkk = ctx.betas.beta(kk - l + 1);
                    const double dot = bk[0] * bkk[0] + bk[1] * bkk[1];
                    lam2 += geom.omegas[k - m] * geom.omegas[kk - m] *
                            g_eval(p.a, p.b, p.c, p.d, geom.dates[k] - geom.dates[l]) *
                            g_eval(p.a, p.b, p.c, p.d, geom.dates[kk] - geom.dates[l]) * dot;
                }
            for (std::size_t k = m; k < n; ++k) {
                const auto bk = ctx.betas.beta(k - l + 1);
                rl += p.rho / std::sqrt(2.0) * (bk[0] + bk[1]) * geom.omegas[k - m] *
                      g_eval(p.a, p.b, p.c, p.d, geom.dates[k] - geom.dates[l]);
            }
            for (std::size_t k = l; k < n; ++k) {
                double tail = 0.0;
                for (std::size_t i = std::max(m, k); i < n; ++i) tail += geom.alphas[i - m];
                if (k < m) tail = 1.0;
                const auto bk = ctx.betas.beta(k - l + 1);
                const double dt = geom.period(k);
                xi1 += dt * (geom.forwards[k] + 0.1) / (1 + dt * geom.forwards[k]) * tail * p.rho / std::sqrt(2.0) *
                       (bk[0] + bk[1]) * g_eval(p.a, p.b, p.c, p.d, geom.dates[k] - geom.dates[l]);
            }
            xi1 *= p.epsilon / p.kappa;
            EXPECT_NEAR(c.segments[j].lambda_sq, lam2, 1e-13 * lam2);
            EXPECT_NEAR(c.segments[j].rho_lambda, rl, 1e-13 * std::abs(rl) + 1e-16);
            EXPECT_NEAR(c.segments[j].xi, 1.0 + xi1, 1e-13);
        }
    }
}

TEST(Coefficients, PartialsMatchFiniteDifferences) {
    const auto ctx = fixtures::synthetic_context();
    const auto geom = geometry(5, 15);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_params(rng);
        const auto [c, d] = build_coeffs_with_partials(p, ctx, geom);
        const auto x = p.to_array();
        for (std::size_t i = 0; i < n_params; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
            const auto up = build_coeffs(bumped(p, i, h), ctx, geom);
            const auto dn = build_coeffs(bumped(p, i, -h), ctx, geom);
            for (std::size_t j = 0; j < c.segments.size(); ++j) {
                auto check = [&](double an, double fd, const char* what) {
                    EXPECT_NEAR(an, fd, 1e-5 * std::abs(fd) + 1e-9) << what << " param " << param_names[i] << " seg " << j;
                };
                check(d.segments[j].d_lambda_sq[i], (up.segments[j].lambda_sq - dn.segments[j].lambda_sq) / (2 * h),
                      "lambda^2");
                check(d.segments[j].d_rho_lambda[i],
                      (up.segments[j].rho_lambda - dn.segments[j].rho_lambda) / (2 * h), "rho lambda");
                check(d.segments[j].d_xi[i], (up.segments[j].xi - dn.segments[j].xi) / (2 * h), "xi");
            }
        }
    }
}

TEST(Coefficients, XiScalesWithVolOfVol) {
    const auto p = fixtures::synthetic_truth();
    const auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geometry(6, 16));
    for (std::size_t j = 0; j < c.segments.size(); ++j)
        EXPECT_NEAR(d.segments[j].d_xi[pepsilon], (c.segments[j].xi - 1.0) / p.epsilon, 1e-15);
}

TEST(Coefficients, XiTendsToOneAsVolOfVolVanishes) {
    auto p = fixtures::synthetic_truth();
    p.epsilon = 1e-8;
    for (const auto& s : build_coeffs(p, fixtures::synthetic_context(), geometry(10, 20)).segments)
        EXPECT_NEAR(s.xi, 1.0, 1e-8);
}

TEST(Coefficients, LoadingScalesWithOmega) {
    const auto p = fixtures::synthetic_truth();
    const auto ctx = fixtures::synthetic_context();
    auto geom = geometry(3, 9);
    const auto base = build_coeffs(p, ctx, geom);
    for (auto& w : geom.omegas) w *= 2.0;
    const auto twice = build_coeffs(p, ctx, geom);
    for (std::size_t j = 0; j < base.segments.size(); ++j) {
        EXPECT_NEAR(twice.segments[j].lambda, 2.0 * base.segments[j].lambda, 1e-15);
        EXPECT_NEAR(twice.segments[j].rho_tilde, base.segments[j].rho_tilde, 1e-15);
        EXPECT_DOUBLE_EQ(twice.segments[j].xi, base.segments[j].xi);
    }
}

TEST(Coefficients, SegmentsCoverTheExpiry) {
    const auto c = build_coeffs(fixtures::synthetic_truth(), fixtures::synthetic_context(), geometry(7, 12));
    EXPECT_DOUBLE_EQ(c.horizon(), 7.0);
    EXPECT_EQ(c.clamped_segments, 0u);
}

TEST(Coefficients, ShortBetaFileRejected) {
    const ModelContext ctx{0.1, 1.0, fixtures::synthetic_betas(10)};
    EXPECT_THROW(build_coeffs(fixtures::synthetic_truth(), ctx, geometry(5, 15)), ValidationError);
}

TEST(Coefficients, NonPositiveLoadingRejected) {
    ModelParams p{0.0, 0.0, 0.5, 0.0, 1, 1, 0.5, 0.2};
    EXPECT_THROW(build_coeffs(p, fixtures::synthetic_context(), geometry(2, 4)), DegenerateLoadingError);
}

TEST(ModelParamsTest, FellerAndAdmissibility) {
    ModelParams p = fixtures::synthetic_truth();
    EXPECT_TRUE(p.feller());
    EXPECT_TRUE(p.admissible());
    p.epsilon = 1.5;
    EXPECT_FALSE(p.feller());
    p.rho = 1.0;
    EXPECT_FALSE(p.admissible());
    EXPECT_THROW(ModelParams::from_array(std::vector<double>(7, 0.1)), ValidationError);
}

}  // namespace
}  // namespace ddsv
