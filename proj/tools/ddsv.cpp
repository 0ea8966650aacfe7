// ddsv: calibration benchmark, one-off pricing and gradient checks.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ddsv/bench.hpp"
#include "ddsv/fixtures.hpp"
#include "ddsv/pricer.hpp"

namespace {

using namespace ddsv;

struct MarketArgs {
    std::string curve, quotes, betas;
};

void add_market_options(CLI::App* cmd, MarketArgs& a) {
    cmd->add_option("--curve", a.curve, "discount curve CSV (maturity_years,discount)")->check(CLI::ExistingFile);
    cmd->add_option("--quotes", a.quotes, "quotes CSV (maturity,tenor,strike_offset_bps,normal_vol,price,weight)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--betas", a.betas, "factor loadings CSV, one row per lag")->check(CLI::ExistingFile);
}

// Market files when all three are given, else the built-in synthetic book.
MarketData market_from(const MarketArgs& a, double shift, std::size_t n_factors) {
    const int given = !a.curve.empty() + !a.quotes.empty() + !a.betas.empty();
    if (given == 3) {
        MarketOptions opt;
        opt.shift = shift;
        opt.n_factors = n_factors;
        return load_market(a.curve, a.quotes, a.betas, opt);
    }
    if (given != 0) throw ValidationError("--curve, --quotes and --betas must be given together");
    if (shift != 0.1 || n_factors != 2) throw ValidationError("the synthetic market is fixed at shift 0.1, two factors");
    std::clog << "ddsv: no market files given, using the synthetic 60-quote book\n";
    return fixtures::synthetic_market();
}

json read_json_arg(const std::string& s) {
    if (std::filesystem::exists(s)) {
        std::ifstream in(s);
        return json::parse(in);
    }
    return json::parse(s);
}

// Accepts {"a": .., ..., "rho": ..} or an array of eight numbers.
ModelParams theta_from_json(const json& j) {
    std::array<double, n_params> x{};
    if (j.is_array()) {
        if (j.size() != n_params) throw ValidationError("theta array must have 8 entries");
        for (std::size_t i = 0; i < n_params; ++i) x[i] = j[i].get<double>();
    } else {
        for (std::size_t i = 0; i < n_params; ++i) {
            if (!j.contains(param_names[i])) throw ValidationError(std::string("theta is missing '") + param_names[i] + "'");
            x[i] = j.at(param_names[i]).get<double>();
        }
    }
    const auto p = ModelParams::from_array(x);
    if (!p.admissible()) throw DomainError("theta is outside the admissible region");
    return p;
}

void print_summary(const BenchReport& rep) {
    std::printf("%-12s %5s %11s %11s %11s %9s %9s %9s %7s\n", "method", "runs", "F_min", "F_median", "F_max", "obj",
                "grad", "cpu_s", "feller%");
    for (const auto& m : rep.methods)
        std::printf("%-12s %5zu %11.3e %11.3e %11.3e %9.2f %9.2f %9.3f %7.1f\n", m.method.c_str(), m.runs,
                    m.quantiles[0], m.quantiles[2], m.quantiles[4], m.mean_obj_calls, m.mean_grad_calls,
                    m.mean_cpu_seconds, m.feller_violation_pct);
}

int run_calibrate(const MarketArgs& ma, const std::string& config, const std::vector<std::string>& methods,
                  std::optional<std::size_t> starts, std::optional<std::uint64_t> seed,
                  std::optional<std::size_t> threads, const std::string& out) {
    BenchConfig cfg = config.empty() ? BenchConfig{} : bench_config_from_json(read_json_arg(config));
    if (!methods.empty()) cfg.methods = methods;
    if (starts) cfg.n_starts = *starts;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    const auto md = market_from(ma, cfg.shift, cfg.n_factors);
    CalibOptions copt;
    copt.nodes = cfg.nodes;
    const CalibProblem prob(md, ModelContext{md.shift, cfg.v0, md.betas}, copt);
    std::clog << "ddsv: " << prob.n_quotes() << " quotes, " << cfg.methods.size() << " methods x " << cfg.n_starts
              << " starts\n";
    const auto rep = run_matrix(prob, cfg);
    write_report(rep, out);
    print_summary(rep);
    std::clog << "ddsv: report written to " << out << "\n";
    return 0;
}

int run_price(const MarketArgs& ma, const std::string& theta, std::size_t nodes, std::optional<double> expiry,
              std::optional<double> tenor, double offset_bps) {
    const auto p = theta_from_json(read_json_arg(theta));
    const auto md = market_from(ma, 0.1, 2);
    const ModelContext ctx{md.shift, 1.0, md.betas};
    const auto rule = quad_rule(nodes);
    if (expiry || tenor) {
        if (!expiry || !tenor) throw ValidationError("--expiry and --tenor go together");
        const auto m = static_cast<std::size_t>(std::lround(*expiry / md.grid.delta(0)));
        const auto n = m + static_cast<std::size_t>(std::lround(*tenor / md.grid.delta(0)));
        const auto geom = swap_geometry(md.curve, md.grid, m, n, md.shift);
        const double K = geom.swap_rate + offset_bps * 1e-4;
        std::printf("swap_rate %.10f annuity %.10f strike %.10f price %.12e\n", geom.swap_rate, geom.annuity, K,
                    price(p, build_coeffs(p, ctx, geom), geom, K, rule));
        return 0;
    }
    CalibOptions copt;
    copt.nodes = nodes;
    const CalibProblem prob(md, ctx, copt);
    const auto ps = prob.prices(p);
    std::printf("%6s %6s %8s %14s %14s %11s\n", "expiry", "tenor", "off_bp", "model", "market", "rel_err");
    for (std::size_t q = 0; q < ps.size(); ++q) {
        const auto& s = md.quotes[q];
        std::printf("%6.2f %6.2f %8.1f %14.8e %14.8e %11.3e\n", md.grid.date(s.m), md.grid.date(s.n) - md.grid.date(s.m),
                    s.strike_offset_bps, ps[q], s.price, (ps[q] - s.price) / s.price);
    }
    std::printf("F = %.6e\n", prob.objective(p));
    return 0;
}

int run_gradcheck(const MarketArgs& ma, const std::string& theta, std::size_t nodes, double rel_step, double tol) {
    const auto p = theta_from_json(read_json_arg(theta));
    const auto md = market_from(ma, 0.1, 2);
    const ModelContext ctx{md.shift, 1.0, md.betas};
    const auto rule = quad_rule(nodes);
    std::array<double, n_params> worst{};
    std::size_t failures = 0;
    const auto x = p.to_array();
    for (const auto& q : md.quotes) {
        const auto geom = swap_geometry(md.curve, md.grid, q.m, q.n, md.shift);
        const auto [c, d] = build_coeffs_with_partials(p, ctx, geom);
        const auto an = price_gradient(p, c, d, geom, q.strike, rule);
        for (std::size_t i = 0; i < n_params; ++i) {
            const double h = rel_step * std::max(1.0, std::abs(x[i]));
            auto up = x, dn = x;
            up[i] += h;
            dn[i] -= h;
            const auto pu = ModelParams::from_array(up), pd = ModelParams::from_array(dn);
            const double fd = (price(pu, build_coeffs(pu, ctx, geom), geom, q.strike, rule) -
                               price(pd, build_coeffs(pd, ctx, geom), geom, q.strike, rule)) /
                              (2.0 * h);
            const double ratio = std::abs(an.grad[i] - fd) / std::max(tol * std::abs(fd), 1e-10);
            worst[i] = std::max(worst[i], ratio);
            if (!(ratio < 1.0)) ++failures;
        }
    }
    std::printf("%-8s %12s\n", "param", "worst err/tol");
    for (std::size_t i = 0; i < n_params; ++i) std::printf("%-8s %12.4f\n", param_names[i], worst[i]);
    std::printf("%zu quotes, %zu component failures\n", md.quotes.size(), failures);
    return failures == 0 ? 0 : 1;
}

int run_synth(const std::string& out, const std::string& theta) {
    const auto p = theta.empty() ? fixtures::synthetic_truth() : theta_from_json(read_json_arg(theta));
    const auto md = fixtures::synthetic_market(p);
    std::filesystem::create_directories(out);
    const std::filesystem::path dir(out);
    std::ofstream curve(dir / "curve.csv"), betas(dir / "betas.csv"), quotes(dir / "quotes.csv");
    if (!curve || !betas || !quotes) throw Error("cannot write into '" + out + "'");
    for (auto* s : {&curve, &betas, &quotes}) s->precision(17);
    curve << "maturity_years,discount\n";
    for (const auto& pl : md.curve.pillars())
        if (pl.maturity > 0.0) curve << pl.maturity << ',' << pl.discount << '\n';
    betas << "beta_1,beta_2\n";
    for (std::size_t k = 1; k <= md.betas.rows(); ++k) {
        const auto b = md.betas.beta(k);
        betas << b[0] << ',' << b[1] << '\n';
    }
    quotes << "maturity,tenor,strike_offset_bps,normal_vol,price,weight\n";
    for (const auto& q : md.quotes)
        quotes << md.grid.date(q.m) << ',' << md.grid.date(q.n) - md.grid.date(q.m) << ',' << q.strike_offset_bps
               << ",," << q.price << ',' << q.weight << '\n';
    std::clog << "ddsv: wrote " << md.quotes.size() << " quotes to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDSV LIBOR market model: swaption pricing and calibration benchmarks"};
    app.require_subcommand(1);

    MarketArgs ma;
    std::string config, out = "bench_out", theta;
    std::vector<std::string> methods;
    std::optional<std::size_t> starts, threads;
    std::optional<std::uint64_t> seed;
    auto* cal = app.add_subcommand("calibrate", "run the method x start benchmark matrix and write the report");
    add_market_options(cal, ma);
    cal->add_option("--config", config, "JSON file (or inline JSON) with BenchConfig keys");
    cal->add_option("--method", methods, "method to run, repeatable")->check(CLI::IsMember(known_methods()));
    cal->add_option("--starts", starts, "number of random starts");
    cal->add_option("--seed", seed, "seed of the start sampler");
    cal->add_option("--threads", threads, "worker threads, 0 for all cores");
    cal->add_option("--out", out, "output directory")->capture_default_str();

    std::size_t nodes = default_nodes;
    std::optional<double> expiry, tenor;
    double offset_bps = 0.0;
    auto* pr = app.add_subcommand("price", "price the quote book or a single payer swaption");
    add_market_options(pr, ma);
    pr->add_option("--theta", theta, "parameters as JSON (file or inline)")->required();
    pr->add_option("--nodes", nodes, "Gauss-Laguerre nodes")->capture_default_str();
    pr->add_option("--expiry", expiry, "expiry in years");
    pr->add_option("--tenor", tenor, "swap tenor in years");
    pr->add_option("--offset-bps", offset_bps, "strike offset from the forward swap rate")->capture_default_str();

    double rel_step = 1e-6, tol = 1e-4;
    auto* gc = app.add_subcommand("gradcheck", "compare the analytic price gradient with central differences");
    add_market_options(gc, ma);
    gc->add_option("--theta", theta, "parameters as JSON (file or inline)")->required();
    gc->add_option("--nodes", nodes, "Gauss-Laguerre nodes")->capture_default_str();
    gc->add_option("--rel-step", rel_step, "relative FD step")->capture_default_str();
    gc->add_option("--tol", tol, "relative tolerance")->capture_default_str();

    std::string synth_out = "synthetic";
    auto* sy = app.add_subcommand("synth", "write the synthetic market as CSV files");
    sy->add_option("--out", synth_out, "output directory")->capture_default_str();
    sy->add_option("--theta", theta, "generating parameters as JSON (default: built-in truth)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*cal) return run_calibrate(ma, config, methods, starts, seed, threads, out);
        if (*pr) return run_price(ma, theta, nodes, expiry, tenor, offset_bps);
        if (*gc) return run_gradcheck(ma, theta, nodes, rel_step, tol);
        if (*sy) return run_synth(synth_out, theta);
    } catch (const std::exception& e) {
        std::cerr << "ddsv: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
