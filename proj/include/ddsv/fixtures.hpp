#pragma once

// Built-in synthetic market: an upward-sloping curve, rotating two-factor
// loadings and a 60-quote book priced exactly under a known parameter set.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ddsv/calib.hpp"
#include "ddsv/market.hpp"
#include "ddsv/model.hpp"

namespace ddsv::fixtures {

inline ModelParams synthetic_truth() { return {0.03, 0.05, 0.6, 0.04, 0.8, 1.0, 0.6, -0.3}; }

/// Zero rates rising from about 1% to 2.5%, annual pillars to 60y.
inline ZeroCurve synthetic_curve() {
    std::vector<ZeroCurve::Pillar> pillars;
    for (int t = 1; t <= 60; ++t) {
        const double T = t;
        const double r = 0.01 + 0.015 * (1.0 - std::exp(-T / 8.0));
        pillars.push_back({T, std::exp(-r * T)});
    }
    return ZeroCurve(pillars);
}

/// beta_k = (cos phi_k, sin phi_k) with phi_k increasing in the lag k.
inline BetaMatrix synthetic_betas(std::size_t rows = 60) {
    std::vector<std::vector<double>> b;
    for (std::size_t k = 0; k < rows; ++k) {
        const double phi = 1.2 * (1.0 - std::exp(-static_cast<double>(k) / 10.0));
        b.push_back({std::cos(phi), std::sin(phi)});
    }
    return BetaMatrix(2, b);
}

inline ModelContext synthetic_context(double shift = 0.1) { return {shift, 1.0, synthetic_betas()}; }

/// 24 ATM quotes (expiries {1,2,3,5,7,10} x tenors {1,2,5,10}) and 36 OTM
/// quotes on the 10y tenor at offsets +-{25,50,100} bps.
inline std::vector<QuoteRow> synthetic_rows() {
    std::vector<QuoteRow> rows;
    std::size_t line = 2;
    for (double m : {1.0, 2.0, 3.0, 5.0, 7.0, 10.0}) {
        for (double t : {1.0, 2.0, 5.0, 10.0}) rows.push_back({line++, m, t, 0.0, std::nullopt, 1.0, 1.0});
        for (double off : {-100.0, -50.0, -25.0, 25.0, 50.0, 100.0})
            rows.push_back({line++, m, 10.0, off, std::nullopt, 1.0, 1.0});
    }
    return rows;
}

/// The 60-quote book with prices generated at `truth`.
inline MarketData synthetic_market(const ModelParams& truth = synthetic_truth(), std::size_t nodes = default_nodes) {
    MarketOptions opt;
    MarketData md = assemble_market(synthetic_curve(), synthetic_rows(), synthetic_betas(), opt);
    CalibOptions copt;
    copt.nodes = nodes;
    const CalibProblem prob(md, synthetic_context(md.shift), copt);
    const auto prices = prob.prices(truth);
    for (std::size_t q = 0; q < md.quotes.size(); ++q) md.quotes[q].price = prices[q];
    return md;
}

}  // namespace ddsv::fixtures
