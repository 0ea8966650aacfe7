#pragma once

// Log-volatility coordinates (ln kappa, ln theta, ln epsilon), in which the
// Feller condition becomes the half-space ln kappa + ln theta + ln 2 >= 2 ln epsilon,
// and the LM variants that keep iterates inside it.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include <Eigen/Core>

#include "ddsv/errors.hpp"
#include "ddsv/optim/bounds.hpp"
#include "ddsv/optim/lm.hpp"
#include "ddsv/optim/nelder_mead.hpp"
#include "ddsv/optim/result.hpp"

namespace ddsv {

inline constexpr Eigen::Index log_vol_first = 4;
inline constexpr Eigen::Index log_vol_last = 6;

inline Eigen::VectorXd to_log_vol(const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    for (Eigen::Index i = log_vol_first; i <= log_vol_last; ++i) {
        if (!(x(i) > 0.0)) throw DomainError("log coordinates need kappa, theta, epsilon > 0");
        y(i) = std::log(x(i));
    }
    return y;
}

inline Eigen::VectorXd from_log_vol(const Eigen::VectorXd& y) {
    Eigen::VectorXd x = y;
    for (Eigen::Index i = log_vol_first; i <= log_vol_last; ++i) x(i) = std::exp(y(i));
    return x;
}

inline Bounds log_vol_bounds(const Bounds& b) {
    Bounds out = b;
    for (Eigen::Index i = log_vol_first; i <= log_vol_last; ++i) {
        out.lower(i) = b.lower(i) > 0.0 ? std::log(b.lower(i)) : -std::numeric_limits<double>::infinity();
        out.upper(i) = std::log(b.upper(i));
    }
    return out;
}

inline bool feller_satisfied(const Eigen::VectorXd& x) { return 2.0 * x(4) * x(5) >= x(6) * x(6); }

/// Box clamp, Euclidean projection onto the Feller half-space, box clamp again.
struct FellerProjector {
    Bounds box;             // in log coordinates
    double margin = 1e-12;  // keeps rounding on the feasible side

    static Eigen::VectorXd normal() {
        Eigen::VectorXd n = Eigen::VectorXd::Zero(8);
        n(4) = 1.0;
        n(5) = 1.0;
        n(6) = -2.0;
        return n;
    }
    static double offset() { return -std::numbers::ln2; }

    static double slack(const Eigen::VectorXd& y) { return normal().dot(y) - offset(); }

    Eigen::VectorXd operator()(const Eigen::VectorXd& y_in) const {
        Eigen::VectorXd y = box.clamp(y_in);
        const Eigen::VectorXd nv = normal();
        const double s = slack(y);
        if (s >= 0.0) return y;
        y += (margin - s) / nv.squaredNorm() * nv;
        y = box.clamp(y);
        const double s2 = slack(y);
        if (s2 < 0.0) {
            // epsilon pinned at its lower bound: lift kappa, then theta
            y(4) = std::min(y(4) + 0.5 * (margin - s2), box.upper(4));
            y(5) = std::min(y(5) + std::max(0.0, margin - slack(y)), box.upper(5));
        }
        return y;
    }

    bool feasible(const Eigen::VectorXd& y) const { return box.contains(y) && slack(y) >= 0.0; }
};

/// Wraps natural-coordinate resid/jac into log coordinates.
template <class Resid, class Jac>
struct LogVolProblem {
    Resid resid;
    Jac jac;

    Eigen::VectorXd residual(const Eigen::VectorXd& y) const { return resid(from_log_vol(y)); }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const {
        const Eigen::VectorXd x = from_log_vol(y);
        Eigen::MatrixXd J = jac(x);
        for (Eigen::Index i = log_vol_first; i <= log_vol_last; ++i) J.col(i) *= x(i);
        return J;
    }
};

template <class Resid, class Jac>
LogVolProblem<Resid, Jac> feller_transform(Resid resid, Jac jac) {
    return {std::move(resid), std::move(jac)};
}

/// Projected LM in log coordinates; iterates stay in box and Feller half-space.
template <class Resid, class Jac>
OptResult lm_bleic(Resid&& resid, Jac&& jac, const Eigen::VectorXd& x0, const Bounds& box, const LMConfig& cfg = {}) {
    auto prob = feller_transform(std::ref(resid), std::ref(jac));
    FellerProjector proj{log_vol_bounds(box)};
    const Eigen::VectorXd y0 = proj(to_log_vol(box.clamp(x0)));
    auto r = [&](const Eigen::VectorXd& y) { return prob.residual(y); };
    auto j = [&](const Eigen::VectorXd& y) { return prob.jacobian(y); };
    OptResult res = lm_bc(r, j, y0, cfg, proj);
    res.x = from_log_vol(res.x);
    res.feller_satisfied = feller_satisfied(res.x);
    return res;
}

struct HybridConfig {
    double threshold = 0.3;
    NelderMeadConfig nm{200, 1};
};

/// lm_bleic, then Nelder-Mead on the penalized objective when F stays above the threshold.
template <class Resid, class Jac, class Obj>
OptResult lm_bleic_nm(Resid&& resid, Jac&& jac, Obj&& penalized, const Eigen::VectorXd& x0, const Bounds& box,
                      const LMConfig& cfg = {}, const HybridConfig& hyb = {}) {
    OptResult lmr = lm_bleic(resid, jac, x0, box, cfg);
    if (!(lmr.F > hyb.threshold)) return lmr;
    OptResult nmr;
    try {
        nmr = nelder_mead(penalized, lmr.x, hyb.nm);
    } catch (const InitializationError&) {
        return lmr;
    }
    OptResult out = nmr.F < lmr.F ? nmr : lmr;
    out.iterations = lmr.iterations + nmr.iterations;
    out.n_obj_calls = lmr.n_obj_calls + nmr.n_obj_calls;
    out.n_grad_calls = lmr.n_grad_calls + nmr.n_grad_calls;
    out.history = lmr.history;
    out.history.insert(out.history.end(), nmr.history.begin(), nmr.history.end());
    out.feller_satisfied = feller_satisfied(out.x);
    return out;
}

}  // namespace ddsv
