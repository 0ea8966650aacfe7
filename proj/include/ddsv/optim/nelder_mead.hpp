#pragma once

// Nelder-Mead simplex search on a total objective (+inf marks infeasible points).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "ddsv/errors.hpp"
#include "ddsv/optim/result.hpp"

namespace ddsv {

struct NelderMeadConfig {
    std::size_t max_iter = 500;  // per run
    std::size_t runs = 3;        // restarts from the best vertex, counted including the first run
    double tol = 1e-12;          // sample std-dev of the vertex values
    double initial_step = 0.1;   // relative perturbation per coordinate
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
};

namespace detail {

inline double simplex_spread(const std::vector<double>& fv) {
    const double n = static_cast<double>(fv.size());
    const double mean = std::accumulate(fv.begin(), fv.end(), 0.0) / n;
    if (!std::isfinite(mean)) return std::numeric_limits<double>::infinity();
    double ss = 0.0;
    for (double v : fv) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0));
}

}  // namespace detail

template <class Obj>
OptResult nelder_mead(Obj&& obj, const Eigen::VectorXd& x0, const NelderMeadConfig& cfg = {}) {
    if (cfg.runs == 0) throw ValidationError("Nelder-Mead needs at least one run");
    const Eigen::Index n = x0.size();
    std::size_t calls = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++calls;
        const double v = obj(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    OptResult res;
    Eigen::VectorXd start = x0;
    double f_start = eval(start);
    res.history.push_back(f_start);
    std::size_t total_iter = 0;
    Termination reason = Termination::max_iter;

    for (std::size_t run = 0; run < cfg.runs; ++run) {
        std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(n) + 1, start);
        std::vector<double> fv(static_cast<std::size_t>(n) + 1, f_start);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = start(i) != 0.0 ? cfg.initial_step * std::abs(start(i)) : 2.5e-4;
            auto& v = xs[static_cast<std::size_t>(i) + 1];
            v(i) = start(i) + h;
            double fvi = eval(v);
            if (!std::isfinite(fvi)) {
                v(i) = start(i) - h;
                fvi = eval(v);
            }
            fv[static_cast<std::size_t>(i) + 1] = fvi;
        }
        if (std::none_of(fv.begin(), fv.end(), [](double v) { return std::isfinite(v); }))
            throw InitializationError("every vertex of the initial simplex is infeasible");

        std::vector<std::size_t> order(fv.size());
        std::size_t it = 0;
        reason = Termination::max_iter;
        for (; it < cfg.max_iter; ++it) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            if (detail::simplex_spread(fv) < cfg.tol) {
                reason = Termination::simplex_small;
                break;
            }
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second = order[order.size() - 2];

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += xs[order[i]];
            centroid /= static_cast<double>(n);

            const Eigen::VectorXd xr = centroid + cfg.reflection * (centroid - xs[worst]);
            const double fr = eval(xr);
            if (fr < fv[best]) {
                const Eigen::VectorXd xe = centroid + cfg.expansion * (xr - centroid);
                const double fe = eval(xe);
                if (fe < fr) {
                    xs[worst] = xe;
                    fv[worst] = fe;
                } else {
                    xs[worst] = xr;
                    fv[worst] = fr;
                }
                continue;
            }
            if (fr < fv[second]) {
                xs[worst] = xr;
                fv[worst] = fr;
                continue;
            }
            bool accepted = false;
            if (fr < fv[worst]) {
                const Eigen::VectorXd xc = centroid + cfg.contraction * (xr - centroid);
                const double fc = eval(xc);
                if (fc <= fr) {
                    xs[worst] = xc;
                    fv[worst] = fc;
                    accepted = true;
                }
            } else {
                const Eigen::VectorXd xc = centroid + cfg.contraction * (xs[worst] - centroid);
                const double fc = eval(xc);
                if (fc < fv[worst]) {
                    xs[worst] = xc;
                    fv[worst] = fc;
                    accepted = true;
                }
            }
            if (!accepted) {
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    if (i == best) continue;
                    xs[i] = xs[best] + cfg.shrink * (xs[i] - xs[best]);
                    fv[i] = eval(xs[i]);
                }
            }
        }
        total_iter += it;
        const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
        if (fv[best] <= f_start) {
            start = xs[best];
            f_start = fv[best];
        }
        res.history.push_back(f_start);
    }
    res.x = start;
    res.F = f_start;
    res.iterations = total_iter;
    res.n_obj_calls = calls;
    res.n_grad_calls = 0;
    res.reason = std::isfinite(f_start) ? reason : Termination::numeric;
    return res;
}

}  // namespace ddsv
