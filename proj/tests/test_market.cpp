#include "ddsv/market.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ddsv/fixtures.hpp"

namespace ddsv {
namespace {

ZeroCurve irregular_curve() {
    return ZeroCurve({{0.5, 0.9975}, {1, 0.994}, {2, 0.985}, {3.5, 0.968}, {5, 0.95}, {7, 0.92}, {10, 0.87}});
}

ZeroCurve flat_curve(double r, int last) {
    std::vector<ZeroCurve::Pillar> p;
    for (int t = 1; t <= last; ++t) p.push_back({double(t), std::exp(-r * t)});
    return ZeroCurve(p);
}

TEST(ForwardRate, UnitDiscountsGiveZero) {
    ZeroCurve c({{1, 1.0}, {2, 1.0}});
    EXPECT_DOUBLE_EQ(forward_rate(c, TenorGrid::uniform(1, 2), 1), 0.0);
}

TEST(ForwardRate, DirectSubstitution) {
    ZeroCurve c({{1, 1.0}, {2, 0.98}});
    EXPECT_NEAR(forward_rate(c, TenorGrid::uniform(1, 2), 1), 1 / 0.98 - 1, 1e-15);
}

TEST(ForwardRate, LogLinearMatchesHighPrecision) {
    // mpmath, 40 digits
    const double ref[] = {0.0060362173038229376258, 0.0091370558375634517766, 0.011673984503359577094,
                          0.01213289916210025207,   0.012592021993302839722,  0.016173555871325512542,
                          0.016173555871325512542,  0.018801380823012811452,  0.018801380823012811452,
                          0.018801380823012811452,  0.018801380823012811452,  0.018801380823012811452};
    const auto c = irregular_curve();
    const auto g = TenorGrid::uniform(1, 12);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(forward_rate(c, g, j), ref[j], 1e-15 * 50) << "j=" << j;
}

TEST(ForwardRate, IndexBeyondGridIsRangeError) {
    EXPECT_THROW(forward_rate(irregular_curve(), TenorGrid::uniform(1, 3), 3), RangeError);
}

TEST(ForwardRate, RefiningOnInterpolantLeavesForwardsUnchanged) {
    const auto c = irregular_curve();
    std::vector<ZeroCurve::Pillar> refined(c.pillars().begin() + 1, c.pillars().end());
    for (double t : {0.25, 1.5, 2.7, 4.0, 6.0, 8.5}) refined.push_back({t, c.discount(t)});
    std::sort(refined.begin(), refined.end(), [](auto& a, auto& b) { return a.maturity < b.maturity; });
    const ZeroCurve c2(refined);
    const auto g = TenorGrid::uniform(1, 10);
    for (std::size_t j = 0; j < 10; ++j)
        EXPECT_NEAR(forward_rate(c2, g, j), forward_rate(c, g, j), 1e-12 * std::abs(forward_rate(c, g, j)));
}

TEST(ZeroCurveTest, RejectsBadInput) {
    EXPECT_THROW(ZeroCurve({{1, 0.99}, {1, 0.98}}), ValidationError);
    EXPECT_THROW(ZeroCurve({{0, 0.99}, {1, 0.98}}), ValidationError);
    EXPECT_THROW(ZeroCurve({{1, -0.5}}), ValidationError);
    EXPECT_THROW(irregular_curve().discount(-1), RangeError);
}

TEST(SwapGeometryTest, SinglePeriodCollapses) {
    const auto g = swap_geometry(irregular_curve(), TenorGrid::uniform(1, 10), 3, 4, 0.1);
    EXPECT_NEAR(g.alphas[0], 1.0, 1e-15);
    EXPECT_NEAR(g.swap_rate_sensitivities[0], 1.0, 1e-15);
    EXPECT_NEAR(g.omegas[0], 1.0, 1e-14);
}

TEST(SwapGeometryTest, FlatCurveMatchesSymbolic) {
    const auto g = swap_geometry(flat_curve(0.01, 5), TenorGrid::uniform(1, 5), 1, 3, 0.1);
    EXPECT_NEAR(g.swap_rate, 0.01005016708416805754216546, 1e-16);
    EXPECT_NEAR(g.annuity, 1.950644206855263479153342, 1e-15);
    const double a1 = 0.5024999791668749978918864, a2 = 0.4975000208331250021081136;
    EXPECT_NEAR(g.alphas[0], a1, 1e-15);
    EXPECT_NEAR(g.alphas[1], a2, 1e-15);
    // on a flat curve every forward equals R0, so dR/dF = alpha and omega = alpha
    EXPECT_NEAR(g.swap_rate_sensitivities[0], a1, 1e-15);
    EXPECT_NEAR(g.swap_rate_sensitivities[1], a2, 1e-15);
    EXPECT_NEAR(g.omegas[0], a1, 1e-14);
    EXPECT_NEAR(g.omegas[1], a2, 1e-14);
}

TEST(SwapGeometryTest, IrregularCurveMatchesHighPrecision) {
    const auto g = swap_geometry(irregular_curve(), TenorGrid::uniform(1, 10), 2, 6, 0.1);
    EXPECT_NEAR(g.swap_rate, 0.013118870483262989001, 1e-15);
    EXPECT_NEAR(g.annuity, 3.8204759062393272138, 1e-14);
    const double ref[4][3] = {{0.25484621231454467145, 0.25484621231454467145, 0.25159101963421061496},
                              {0.25179125441483079944, 0.25142744476146451736, 0.24923594259362143032},
                              {0.24866012070604296755, 0.24805130426112981108, 0.24689601112105237425},
                              {0.24470241256458156156, 0.24396682081476109442, 0.25055495133207548232}};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(g.alphas[i], ref[i][0], 1e-14);
        EXPECT_NEAR(g.swap_rate_sensitivities[i], ref[i][1], 1e-14);
        EXPECT_NEAR(g.omegas[i], ref[i][2], 1e-14);
    }
}

TEST(SwapGeometryTest, SwapRateIdentityOnRandomCurves) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-0.005, 0.05);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ZeroCurve::Pillar> p;
        double lp = 0.0;
        for (int t = 1; t <= 15; ++t) {
            lp -= U(rng);
            p.push_back({double(t), std::exp(lp)});
        }
        const ZeroCurve c(p);
        const auto grid = TenorGrid::uniform(1, 15);
        const std::size_t m = 1 + trial % 5, n = m + 1 + trial % 9;
        const auto g = swap_geometry(c, grid, m, n, 0.1);
        double composed = 0.0, sum_alpha_dt = 0.0;
        for (std::size_t j = m; j < n; ++j) {
            composed += g.alphas[j - m] * g.forwards[j];
            sum_alpha_dt += g.alphas[j - m] * grid.delta(j);
        }
        EXPECT_NEAR(composed, g.swap_rate, 1e-12 * std::abs(g.swap_rate) + 1e-17);
        EXPECT_NEAR(sum_alpha_dt, 1.0, 1e-14);
        EXPECT_GT(g.annuity, 0.0);
    }
}

TEST(SwapGeometryTest, NegativeShiftedRateIsDomainError) {
    ZeroCurve c({{1, 1.0}, {2, 1.2}, {3, 1.45}});
    EXPECT_THROW(swap_geometry(c, TenorGrid::uniform(1, 3), 1, 3, 0.01), DomainError);
    EXPECT_THROW(swap_geometry(irregular_curve(), TenorGrid::uniform(1, 5), 3, 3, 0.1), DomainError);
}

TEST(Bachelier, ZeroVolIsIntrinsic) { EXPECT_DOUBLE_EQ(bachelier_price(0.02, 0.01, 0.0, 1.0, 1.0), 0.01); }

TEST(Bachelier, AtTheMoneyClosedForm) {
    EXPECT_NEAR(bachelier_price(0.02, 0.02, 0.01, 1.0, 1.0), 0.01 / std::sqrt(2 * std::numbers::pi), 1e-17);
}

TEST(Bachelier, MatchesGaussianQuadrature) {
    EXPECT_NEAR(bachelier_price(0.021, 0.018, 0.0075, 2.5, 4.2), 0.026802128495922590137, 1e-16);
    EXPECT_NEAR(bachelier_price(0.01, 0.03, 0.012, 10, 7.5), 0.053955398969818210388, 1e-16);
    EXPECT_NEAR(bachelier_price(-0.002, 0.001, 0.006, 0.5, 0.97), 0.00058095597456905488387, 1e-17);
}

TEST(Bachelier, MonotoneInVolAndStrike) {
    double prev = -1.0;
    for (double s = 0.0; s <= 0.02; s += 0.0005) {
        const double p = bachelier_price(0.02, 0.021, s, 3.0, 2.0);
        EXPECT_GE(p, prev);
        prev = p;
    }
    prev = 1e9;
    for (double k = -0.01; k <= 0.05; k += 0.001) {
        const double p = bachelier_price(0.02, k, 0.008, 3.0, 2.0);
        EXPECT_LE(p, prev);
        prev = p;
    }
}

TEST(Bachelier, RejectsBadInputs) {
    EXPECT_THROW(bachelier_price(0.02, 0.02, -0.01, 1, 1), DomainError);
    EXPECT_THROW(bachelier_price(0.02, 0.02, 0.01, -1, 1), DomainError);
}

TEST(BetaMatrixTest, NormalizesAndIndexesByLag) {
    BetaMatrix b(2, {{1.0, 0.0}, {0.6, 0.8}});
    EXPECT_EQ(b.rows(), 2u);
    EXPECT_DOUBLE_EQ(b.beta(2)[1], 0.8);
    EXPECT_THROW(b.beta(0), RangeError);
    EXPECT_THROW(b.beta(3), RangeError);
    EXPECT_THROW(BetaMatrix(2, {{1.0, 1.0}}), ValidationError);
    EXPECT_THROW(BetaMatrix(2, {{1.0}}), ValidationError);
}

TEST(LoadMarket, EmptyQuotesFile) {
    std::istringstream in("maturity,tenor,strike_offset_bps,normal_vol,price,weight\n");
    try {
        read_quote_rows(in);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("no quotes"), std::string::npos);
    }
}

TEST(LoadMarket, VolAndPriceTogetherRejected) {
    std::istringstream in("maturity,tenor,strike_offset_bps,normal_vol,price,weight\n1,2,0,0.01,0.003,1\n");
    EXPECT_THROW(read_quote_rows(in), ValidationError);
}

TEST(LoadMarket, NonPositiveWeightRejected) {
    std::istringstream in("maturity,tenor,strike_offset_bps,normal_vol,price,weight\n1,2,0,0.01,,0\n");
    EXPECT_THROW(read_quote_rows(in), ValidationError);
}

TEST(LoadMarket, MalformedRowReportsLine) {
    std::istringstream in("maturity,tenor,strike_offset_bps,normal_vol,price,weight\n1,2,0,0.01,,1\n1,x,0,0.01,,1\n");
    try {
        read_quote_rows(in, "q.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadMarket, SampleBookLoads280Quotes) {
    const std::string dir = DDSV_SAMPLE_DIR;
    const auto md = load_market(dir + "/curve.csv", dir + "/quotes_280.csv", dir + "/betas.csv");
    ASSERT_EQ(md.quotes.size(), 280u);
    std::size_t atm = 0;
    for (const auto& q : md.quotes) {
        EXPECT_GT(q.price, 0.0);
        EXPECT_TRUE(q.normal_vol.has_value());
        if (q.strike_offset_bps == 0.0) ++atm;
        else EXPECT_EQ(q.n - q.m, 10u);
    }
    EXPECT_EQ(atm, 196u);
    EXPECT_EQ(md.grid.last(), 60u);
}

TEST(LoadMarket, VolQuotesConvertThroughBachelier) {
    std::istringstream c("maturity_years,discount\n1,0.99\n2,0.975\n3,0.96\n");
    std::istringstream q(
        "maturity,tenor,strike_offset_bps,normal_vol,price,weight\n1,2,50,0.008,,2\n2,1,0,,0.0031,1\n");
    std::istringstream b("1,0\n0,1\n");
    const auto md = assemble_market(read_curve(c), read_quote_rows(q), read_betas(b, 2));
    const auto g = swap_geometry(md.curve, md.grid, 1, 3, 0.1);
    EXPECT_DOUBLE_EQ(md.quotes[0].strike, g.swap_rate + 0.005);
    EXPECT_DOUBLE_EQ(md.quotes[0].price, bachelier_price(g.swap_rate, g.swap_rate + 0.005, 0.008, 1.0, g.annuity));
    EXPECT_DOUBLE_EQ(md.quotes[0].weight, 2.0);
    EXPECT_DOUBLE_EQ(md.quotes[1].price, 0.0031);
}

}  // namespace
}  // namespace ddsv
