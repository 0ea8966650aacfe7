#pragma once

// Levenberg-Marquardt with Nielsen damping, and its projected
// bound-constrained extension.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <tuple>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ddsv/errors.hpp"
#include "ddsv/optim/bounds.hpp"
#include "ddsv/optim/result.hpp"

namespace ddsv {

struct LMConfig {
    double tau = 1e-3;
    double eps1 = 1e-10;
    double eps2 = 1e-10;
    double eps3 = 1e-10;
    std::size_t k_max = 100;
    double gamma = 0.9999;
    double beta = 0.5;
    double sigma = 1e-4;
    std::size_t max_damping_retries = 60;
    std::size_t max_backtracks = 40;
    /// Apply the rejection update mu <- mu nu, nu <- 2 nu when the projected
    /// trial fails the gamma test and a fallback step is taken instead.
    bool escalate_on_fallback = false;
};

struct IdentityProjector {
    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return x; }
    bool feasible(const Eigen::VectorXd&) const { return true; }
};

namespace detail {

inline void check_lm_config(const LMConfig& c) {
    if (!(c.tau > 0.0) || !(c.eps1 > 0.0) || !(c.eps2 > 0.0) || !(c.eps3 > 0.0))
        throw ValidationError("LM tolerances and tau must be positive");
    for (double v : {c.gamma, c.beta, c.sigma})
        if (!(v > 0.0 && v < 1.0)) throw ValidationError("LM constants gamma, beta, sigma must lie in (0,1)");
}

/// Counts calls and maps evaluation failures to +inf / empty results.
template <class Resid, class Jac>
struct LsCounter {
    Resid& resid;
    Jac& jac;
    std::size_t n_f = 0;
    std::size_t n_j = 0;

    std::pair<Eigen::VectorXd, double> f(const Eigen::VectorXd& x) {
        ++n_f;
        try {
            Eigen::VectorXd r = resid(x);
            const double F = 0.5 * r.squaredNorm();
            if (!std::isfinite(F)) return {r, std::numeric_limits<double>::infinity()};
            return {std::move(r), F};
        } catch (const Error&) {
            return {Eigen::VectorXd(), std::numeric_limits<double>::infinity()};
        }
    }

    bool J(const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
        ++n_j;
        try {
            out = jac(x);
        } catch (const Error&) {
            return false;
        }
        return out.allFinite();
    }
};

template <class Resid, class Jac, class Proj>
OptResult lm_core(Resid& resid, Jac& jac, const Eigen::VectorXd& x0, const LMConfig& cfg, const Proj& proj,
                  bool bounded) {
    check_lm_config(cfg);
    LsCounter<Resid, Jac> ev{resid, jac};
    OptResult res;
    Eigen::VectorXd x = bounded ? proj(x0) : x0;

    auto finish = [&](Termination why, std::size_t k, double F) {
        res.x = x;
        res.F = F;
        res.iterations = k;
        res.reason = why;
        res.n_obj_calls = ev.n_f;
        res.n_grad_calls = ev.n_j;
        return res;
    };

    Eigen::VectorXd f;
    double F = 0.0;
    std::tie(f, F) = ev.f(x);
    if (!std::isfinite(F)) return finish(Termination::numeric, 0, F);
    res.history.push_back(F);
    Eigen::MatrixXd J;
    if (!ev.J(x, J)) return finish(Termination::numeric, 0, F);
    Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * f;

    auto stationarity = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& grad) {
        return bounded ? (proj(at - grad) - at).cwiseAbs().maxCoeff() : grad.cwiseAbs().maxCoeff();
    };
    if (F <= cfg.eps1) return finish(Termination::f_small, 0, F);
    if (stationarity(x, g) <= cfg.eps2) return finish(Termination::gradient_small, 0, F);

    double mu = cfg.tau * A.diagonal().maxCoeff();
    if (!(mu > 0.0)) mu = cfg.tau;
    double nu = 2.0;

    // Armijo backtracking on F(P(x + t dir)) against the slope g^T (P(.) - x).
    auto armijo = [&](const Eigen::VectorXd& dir, double t0, Eigen::VectorXd& x_out, Eigen::VectorXd& f_out,
                      double& F_out) {
        double t = t0;
        for (std::size_t l = 0; l < cfg.max_backtracks; ++l, t *= cfg.beta) {
            Eigen::VectorXd xt = proj(x + t * dir);
            auto [ft, Ft] = ev.f(xt);
            if (std::isfinite(Ft) && Ft <= F + cfg.sigma * g.dot(xt - x) && Ft < F) {
                x_out = std::move(xt);
                f_out = std::move(ft);
                F_out = Ft;
                return true;
            }
        }
        return false;
    };

    std::size_t k = 0;
    while (k < cfg.k_max) {
        bool moved = false;
        Eigen::VectorXd x_new, f_new;
        double F_new = 0.0;
        for (std::size_t retry = 0; retry <= cfg.max_damping_retries && !moved; ++retry) {
            Eigen::MatrixXd M = A;
            M.diagonal().array() += mu;
            Eigen::LLT<Eigen::MatrixXd> llt(M);
            if (llt.info() != Eigen::Success) {
                mu *= nu;
                nu *= 2.0;
                continue;
            }
            Eigen::VectorXd d = llt.solve(-g);
            if (!d.allFinite()) {
                mu *= nu;
                nu *= 2.0;
                continue;
            }
            if (d.squaredNorm() <= cfg.eps3 * cfg.eps3 * x.squaredNorm())
                return finish(Termination::step_small, k, F);

            x_new = bounded ? proj(x + d) : Eigen::VectorXd(x + d);
            d = x_new - x;
            if (bounded && d.squaredNorm() <= cfg.eps3 * cfg.eps3 * x.squaredNorm()) {
                // the projected step vanished; fall through to the gradient branches
                F_new = std::numeric_limits<double>::infinity();
            } else {
                std::tie(f_new, F_new) = ev.f(x_new);
            }

            if (!bounded || F_new <= cfg.gamma * F) {
                const double dF = F - F_new;
                const double dL = -g.dot(d) - 0.5 * d.dot(A * d);
                if (dF > 0.0 && dL > 0.0) {
                    const double eta = dF / dL;
                    const double r = 2.0 * eta - 1.0;
                    mu *= std::max(1.0 / 3.0, 1.0 - r * r * r);
                    nu = 2.0;
                    moved = true;
                } else {
                    mu *= nu;
                    nu *= 2.0;
                }
            } else if (g.dot(d) < 0.0) {
                if (cfg.escalate_on_fallback) {
                    mu *= nu;
                    nu *= 2.0;
                }
                moved = armijo(d, cfg.beta, x_new, f_new, F_new);
                if (!moved) moved = armijo(-g, 1.0, x_new, f_new, F_new);
                if (!moved) return finish(Termination::step_small, k, F);
            } else {
                if (cfg.escalate_on_fallback) {
                    mu *= nu;
                    nu *= 2.0;
                }
                moved = armijo(-g, 1.0, x_new, f_new, F_new);
                if (!moved) return finish(Termination::step_small, k, F);
            }
            if (!std::isfinite(mu) || mu > 1e300) return finish(Termination::numeric, k, F);
        }
        if (!moved) return finish(Termination::numeric, k, F);

        x = std::move(x_new);
        f = std::move(f_new);
        F = F_new;
        res.history.push_back(F);
        ++k;
        if (F <= cfg.eps1) return finish(Termination::f_small, k, F);
        if (k >= cfg.k_max) break;
        if (!ev.J(x, J)) return finish(Termination::numeric, k, F);
        A = J.transpose() * J;
        g = J.transpose() * f;
        if (stationarity(x, g) <= cfg.eps2) return finish(Termination::gradient_small, k, F);
    }
    return finish(Termination::max_iter, k, F);
}

}  // namespace detail

/// Classic LM: resid(x) -> f, jac(x) -> J; minimizes |f|^2 / 2.
template <class Resid, class Jac>
OptResult lm(Resid&& resid, Jac&& jac, const Eigen::VectorXd& x0, const LMConfig& cfg = {}) {
    IdentityProjector id;
    return detail::lm_core(resid, jac, x0, cfg, id, false);
}

/// Projected LM: every trial point is mapped through proj; falls back to an
/// Armijo line search and then a projected gradient step.
template <class Resid, class Jac, class Proj>
OptResult lm_bc(Resid&& resid, Jac&& jac, const Eigen::VectorXd& x0, const LMConfig& cfg, const Proj& proj) {
    return detail::lm_core(resid, jac, x0, cfg, proj, true);
}

template <class Resid, class Jac>
OptResult lm_bc(Resid&& resid, Jac&& jac, const Eigen::VectorXd& x0, const Bounds& box, const LMConfig& cfg = {}) {
    return lm_bc(resid, jac, x0, cfg, BoxProjector{box});
}

}  // namespace ddsv
