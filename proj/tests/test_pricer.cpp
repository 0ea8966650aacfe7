#include "ddsv/pricer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ddsv/fixtures.hpp"
#include "mc_oracle.hpp"

namespace ddsv {
namespace {

SwapGeometry geometry(std::size_t m, std::size_t n) {
    return swap_geometry(fixtures::synthetic_curve(), TenorGrid::uniform(1, 60), m, n, 0.1);
}

TEST(Quadrature, OnePointRule) {
    const auto r = quad_rule(1);
    EXPECT_NEAR(r.nodes[0], 1.0, 1e-15);
    EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
}

TEST(Quadrature, TwoPointRule) {
    const auto r = quad_rule(2);
    const double s = std::sqrt(2.0);
    EXPECT_NEAR(r.nodes[0], 2.0 - s, 1e-15);
    EXPECT_NEAR(r.nodes[1], 2.0 + s, 1e-15);
    EXPECT_NEAR(r.weights[0], (2.0 + s) / 4.0, 1e-15);
    EXPECT_NEAR(r.weights[1], (2.0 - s) / 4.0, 1e-15);
}

TEST(Quadrature, ReproducesFactorialMoments) {
    for (std::size_t n : {10u, 45u, 90u, 180u}) {
        const auto r = quad_rule(n);
        double fact = 1.0;
        for (int k = 0; k <= 20; ++k) {
            if (k > 0) fact *= k;
            if (static_cast<std::size_t>(k) > 2 * n - 1) break;
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            EXPECT_NEAR(s, fact, 1e-12 * fact) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Quadrature, CompensatedWeightsAndOrdering) {
    const auto r = quad_rule(90);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i > 0) {
            EXPECT_GT(r.nodes[i], r.nodes[i - 1]);
        }
        EXPECT_NEAR(r.compensated_weights[i], r.weights[i] * std::exp(r.nodes[i]),
                    1e-12 * r.compensated_weights[i] + 1e-300);
    }
    EXPECT_THROW(quad_rule(0), DomainError);
    EXPECT_THROW(quad_rule(257), DomainError);
}

TEST(Pricer, ProbabilitiesVanishForFarStrikes) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(3, 8);
    const auto c = build_coeffs(p, fixtures::synthetic_context(), geom);
    const auto [p1, p2] = p1p2(p, c, geom, geom.swap_rate + 0.25, quad_rule(90));
    EXPECT_NEAR(p1, 0.0, 1e-6);
    EXPECT_NEAR(p2, 0.0, 1e-6);
}

TEST(Pricer, AtTheMoneyHalfAtTinyVariance) {
    ModelParams p{1e-5, 1e-5, 0.5, 1e-5, 1.0, 1.0, 0.3, 0.0};
    const auto geom = geometry(2, 7);
    const auto c = build_coeffs(p, fixtures::synthetic_context(), geom);
    const auto [p1, p2] = p1p2(p, c, geom, geom.swap_rate, quad_rule(90));
    EXPECT_NEAR(p1, 0.5, 1e-3);
    EXPECT_NEAR(p2, 0.5, 1e-3);
}

TEST(Pricer, AgreesWithMonteCarlo) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(2, 7);
    const auto c = build_coeffs(p, fixtures::synthetic_context(), geom);
    const auto rule = quad_rule(90);
    for (double off : {-0.01, 0.0, 0.01}) {
        const double K = geom.swap_rate + off;
        const auto mc = testing::mc_payer(p, c, geom, K, 20000, 50, 1234);
        EXPECT_NEAR(price(p, c, geom, K, rule), mc.price, 4.0 * mc.std_error) << "offset " << off;
    }
}

TEST(Pricer, ArbitrageBounds) {
    const auto p = fixtures::synthetic_truth();
    const auto rule = quad_rule(90);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 2}, {5, 15}, {10, 20}}) {
        const auto geom = geometry(m, n);
        const auto c = build_coeffs(p, fixtures::synthetic_context(), geom);
        double prev = std::numeric_limits<double>::infinity();
        for (double off = -0.03; off <= 0.03; off += 0.0025) {
            const double K = geom.swap_rate + off;
            const double v = price(p, c, geom, K, rule);
            EXPECT_GE(v, geom.annuity * std::max(geom.swap_rate - K, 0.0) - 1e-12);
            EXPECT_LE(v, geom.annuity * (geom.swap_rate + geom.shift));
            EXPECT_LE(v, prev + 1e-14);
            prev = v;
        }
    }
}

TEST(Pricer, LongTermVarianceRaisesAtTheMoneyPrice) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(5, 15);
    const auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geom);
    const auto r = price_gradient(p, c, d, geom, geom.swap_rate, quad_rule(90));
    EXPECT_GT(r.grad[ptheta], 0.0);
}

TEST(Pricer, QuadratureConverged) {
    const auto p = fixtures::synthetic_truth();
    const auto r90 = quad_rule(90), r180 = quad_rule(180);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 11}, {5, 15}, {10, 20}}) {
        const auto geom = geometry(m, n);
        const auto c = build_coeffs(p, fixtures::synthetic_context(), geom);
        for (double off : {-0.01, 0.0, 0.01}) {
            const double K = geom.swap_rate + off;
            const double a = price(p, c, geom, K, r90), b = price(p, c, geom, K, r180);
            EXPECT_NEAR(a, b, 1e-9 * b);
        }
    }
}

TEST(Pricer, GradientPathReturnsSamePrice) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(3, 13);
    const auto [c, d] = build_coeffs_with_partials(p, fixtures::synthetic_context(), geom);
    const auto rule = quad_rule(90);
    for (double off : {-0.005, 0.0, 0.005}) {
        const double K = geom.swap_rate + off;
        EXPECT_NEAR(price_gradient(p, c, d, geom, K, rule).price, price(p, c, geom, K, rule), 1e-16);
    }
}

TEST(Pricer, GradientMatchesFiniteDifferences) {
    const auto ctx = fixtures::synthetic_context();
    const auto geom = geometry(4, 14);
    const auto rule = quad_rule(90);
    const auto p = fixtures::synthetic_truth();
    const double K = geom.swap_rate + 0.005;
    const auto [c, d] = build_coeffs_with_partials(p, ctx, geom);
    const auto an = price_gradient(p, c, d, geom, K, rule);
    const auto x = p.to_array();
    for (std::size_t i = 0; i < n_params; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        auto up = x, dn = x;
        up[i] += h;
        dn[i] -= h;
        const auto pu = ModelParams::from_array(up), pd = ModelParams::from_array(dn);
        const double fd =
            (price(pu, build_coeffs(pu, ctx, geom), geom, K, rule) - price(pd, build_coeffs(pd, ctx, geom), geom, K, rule)) /
            (2 * h);
        EXPECT_NEAR(an.grad[i], fd, 1e-5 * std::abs(fd) + 1e-10) << param_names[i];
    }
}

TEST(Pricer, NonPositiveShiftedStrikeRejected) {
    const auto p = fixtures::synthetic_truth();
    const auto geom = geometry(2, 4);
    const auto c = build_coeffs(p, fixtures::synthetic_context(), geom);
    EXPECT_THROW(price(p, c, geom, -0.2, quad_rule(20)), DomainError);
}

}  // namespace
}  // namespace ddsv
