// Prices a 5y x 10y payer swaption across strikes and prints the price
// sensitivities to the eight model parameters.

#include <cstdio>

#include "ddsv/fixtures.hpp"
#include "ddsv/pricer.hpp"

int main() {
    using namespace ddsv;

    const ZeroCurve curve = fixtures::synthetic_curve();
    const TenorGrid grid = TenorGrid::uniform(1.0, 60);
    const ModelContext ctx{0.1, 1.0, fixtures::synthetic_betas()};
    const ModelParams p{0.03, 0.05, 0.6, 0.04, 0.8, 1.0, 0.6, -0.3};

    const SwapGeometry geom = swap_geometry(curve, grid, 5, 15, ctx.shift);
    const auto [coeffs, partials] = build_coeffs_with_partials(p, ctx, geom);
    const QuadratureRule rule = quad_rule(default_nodes);

    std::printf("forward swap rate %.6f, annuity %.6f\n\n", geom.swap_rate, geom.annuity);
    std::printf("%8s %12s", "off_bp", "price");
    for (const char* name : param_names) std::printf(" %10s", name);
    std::printf("\n");
    for (double bps : {-100.0, -50.0, 0.0, 50.0, 100.0}) {
        const double K = geom.swap_rate + bps * 1e-4;
        const PriceAndGrad r = price_gradient(p, coeffs, partials, geom, K, rule);
        std::printf("%8.0f %12.8f", bps, r.price);
        for (double g : r.grad) std::printf(" %10.6f", g);
        std::printf("\n");
    }
}
