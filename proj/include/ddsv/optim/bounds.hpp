#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include <Eigen/Core>

#include "ddsv/errors.hpp"

namespace ddsv {

/// Componentwise box LB <= x <= UB; infinite entries allowed.
struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Bounds() = default;
    Bounds(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size()) throw ValidationError("bound vectors differ in length");
        for (Eigen::Index i = 0; i < lower.size(); ++i)
            if (!(lower(i) < upper(i))) throw ValidationError("lower bound must be below upper bound");
    }

    static Bounds unbounded(Eigen::Index n) {
        const double inf = std::numeric_limits<double>::infinity();
        return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
    }

    /// LB = (1e-5, ..., 1e-5, -0.999), UB = (inf, ..., inf, 0.999).
    static Bounds model_defaults() {
        const double inf = std::numeric_limits<double>::infinity();
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(8, 1e-5);
        Eigen::VectorXd hi = Eigen::VectorXd::Constant(8, inf);
        lo(7) = -0.999;
        hi(7) = 0.999;
        return {lo, hi};
    }

    Eigen::Index size() const { return lower.size(); }

    bool contains(const Eigen::VectorXd& x) const {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (!(x(i) >= lower(i) && x(i) <= upper(i))) return false;
        return true;
    }

    Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

/// Clamp onto a box; the default projector of the bound-constrained LM.
struct BoxProjector {
    Bounds box;

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return box.clamp(x); }
    bool feasible(const Eigen::VectorXd& x) const { return box.contains(x); }
};

}  // namespace ddsv
