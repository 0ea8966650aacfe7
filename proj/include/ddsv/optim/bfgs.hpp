#pragma once

// Quasi-Newton descent with box constraints: active bounds are frozen, the
// search direction is restricted to the free variables and the Wolfe line
// search is capped at the box.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddsv/errors.hpp"
#include "ddsv/optim/bounds.hpp"
#include "ddsv/optim/result.hpp"

namespace ddsv {

struct BFGSConfig {
    std::size_t max_iter = 30;
    double grad_tol = 1e-10;
    double step_tol = 1e-14;
    double c1 = 1e-4;
    double c2 = 0.9;
    std::size_t max_line_evals = 20;
};

/// fg(x) -> (F, grad F); both are produced by one call.
template <class FG>
OptResult bfgs_bounded(FG&& fg, const Eigen::VectorXd& x0, const Bounds& box, const BFGSConfig& cfg = {}) {
    if (!(cfg.c1 > 0.0 && cfg.c1 < cfg.c2 && cfg.c2 < 1.0))
        throw ValidationError("Wolfe constants must satisfy 0 < c1 < c2 < 1");
    const Eigen::Index n = x0.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t calls = 0;
    auto eval = [&](const Eigen::VectorXd& x, double& F, Eigen::VectorXd& g) {
        ++calls;
        try {
            auto r = fg(x);
            F = r.first;
            g = std::move(r.second);
        } catch (const Error&) {
            F = inf;
        }
        if (!std::isfinite(F) || !g.allFinite()) F = inf;
        return std::isfinite(F);
    };

    OptResult res;
    Eigen::VectorXd x = box.clamp(x0);
    double F = inf;
    Eigen::VectorXd g;
    auto finish = [&](Termination why, std::size_t k) {
        res.x = x;
        res.F = F;
        res.iterations = k;
        res.n_obj_calls = calls;
        res.n_grad_calls = calls;
        res.reason = why;
        return res;
    };
    if (!eval(x, F, g)) return finish(Termination::numeric, 0);
    res.history.push_back(F);

    const double bound_tol = 1e-12;
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool fresh_H = true;  // H is a multiple of I; rescaled on the next update
    std::size_t k = 0;
    for (; k < cfg.max_iter; ++k) {
        if ((box.clamp(x - g) - x).cwiseAbs().maxCoeff() <= cfg.grad_tol) return finish(Termination::gradient_small, k);

        std::vector<bool> at_lo(static_cast<std::size_t>(n)), at_hi(static_cast<std::size_t>(n)),
            active(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            at_lo[u] = x(i) <= box.lower(i) + bound_tol * std::max(1.0, std::abs(box.lower(i)));
            at_hi[u] = x(i) >= box.upper(i) - bound_tol * std::max(1.0, std::abs(box.upper(i)));
            active[u] = (at_lo[u] && g(i) > 0.0) || (at_hi[u] && g(i) < 0.0);
        }
        auto restrict = [&](Eigen::VectorXd v) {
            for (Eigen::Index i = 0; i < n; ++i)
                if (active[static_cast<std::size_t>(i)]) v(i) = 0.0;
            return v;
        };
        const Eigen::VectorXd gf = restrict(g);
        auto blocked = [&](Eigen::VectorXd v) {
            for (Eigen::Index i = 0; i < n; ++i)
                if ((at_lo[static_cast<std::size_t>(i)] && v(i) < 0.0) || (at_hi[static_cast<std::size_t>(i)] && v(i) > 0.0))
                    v(i) = 0.0;
            return v;
        };
        Eigen::VectorXd d = blocked(restrict(-H * gf));
        if (!(d.dot(g) < 0.0)) {
            H.setIdentity();
            fresh_H = true;
            d = blocked(-gf);
        }
        if (!(d.dot(g) < 0.0)) return finish(Termination::gradient_small, k);

        double t_max = inf;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (d(i) > 0.0) t_max = std::min(t_max, (box.upper(i) - x(i)) / d(i));
            if (d(i) < 0.0) t_max = std::min(t_max, (box.lower(i) - x(i)) / d(i));
        }
        if (!(t_max > 0.0)) return finish(Termination::step_small, k);

        // Strong Wolfe by bracketing and bisection; at the box edge Armijo suffices.
        const double slope0 = g.dot(d);
        double lo = 0.0, hi = std::min(1.0, t_max);
        double t = hi;
        bool bracketed = false;
        double F_t = inf;
        Eigen::VectorXd g_t, x_t;
        bool found = false;
        double best_t = 0.0, best_F = F;
        Eigen::VectorXd best_g = g;
        for (std::size_t ls = 0; ls < cfg.max_line_evals; ++ls) {
            x_t = box.clamp(x + t * d);
            const bool ok = eval(x_t, F_t, g_t);
            if (ok && F_t < best_F) {
                best_F = F_t;
                best_t = t;
                best_g = g_t;
            }
            if (!ok || F_t > F + cfg.c1 * t * slope0) {
                hi = t;
                bracketed = true;
            } else {
                const double slope = g_t.dot(d);
                if (std::abs(slope) <= -cfg.c2 * slope0 || (t >= t_max && slope < 0.0)) {
                    found = true;
                    break;
                }
                if (slope > 0.0) {
                    hi = t;
                    bracketed = true;
                } else {
                    lo = t;
                }
            }
            if (bracketed) t = 0.5 * (lo + hi);
            else t = std::min(2.0 * t, t_max);
            if (!bracketed && lo >= t_max) break;
        }
        if (!found) {
            if (best_t == 0.0) {
                if (fresh_H) return finish(Termination::step_small, k);
                H.setIdentity();
                fresh_H = true;
                continue;
            }
            t = best_t;
            x_t = box.clamp(x + t * d);
            F_t = best_F;
            g_t = best_g;
        }
        const Eigen::VectorXd s = x_t - x;
        const Eigen::VectorXd y = g_t - g;
        const double F_prev = F;
        const bool tiny = s.norm() <= cfg.step_tol * std::max(1.0, x.norm()) || !(F_t < F_prev);
        if (tiny && !fresh_H) {
            H.setIdentity();
            fresh_H = true;
            continue;
        }
        x = x_t;
        F = F_t;
        g = g_t;
        res.history.push_back(F);
        if (tiny) return finish(Termination::step_small, k + 1);

        const double ys = y.dot(s);
        if (ys > 1e-300) {
            if (fresh_H) H *= ys / y.squaredNorm();
            const Eigen::VectorXd Hy = H * y;
            const double yHy = y.dot(Hy);
            if (yHy > 0.0) {
                H += -Hy * Hy.transpose() / yHy + s * s.transpose() / ys;
                fresh_H = false;
            }
        }
    }
    return finish(Termination::max_iter, k);
}

}  // namespace ddsv
