#pragma once

// Gauss-Laguerre rule for the weight e^{-u} on (0, inf).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ddsv/errors.hpp"

namespace ddsv {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;              // w_i, may underflow for large nodes
    std::vector<double> compensated_weights;  // w_i e^{u_i}

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

/// L_n(x) and L_{n-1}(x) scaled by a common factor 2^{-shift}; returns shift.
/// Extended precision keeps the polished nodes and weights at full double accuracy.
inline int laguerre_scaled(std::size_t n, long double x, long double& ln, long double& ln1) {
    long double p0 = 1.0L;
    long double p1 = 1.0L - x;
    int shift = 0;
    if (n == 0) {
        ln = 1.0L;
        ln1 = 0.0L;
        return 0;
    }
    for (std::size_t k = 1; k < n; ++k) {
        const long double kk = static_cast<long double>(k);
        const long double p2 = ((2.0L * kk + 1.0L - x) * p1 - kk * p0) / (kk + 1.0L);
        p0 = p1;
        p1 = p2;
        if (std::abs(p1) > 1e200L) {
            p0 = std::ldexp(p0, -600);
            p1 = std::ldexp(p1, -600);
            shift += 600;
        }
    }
    ln = p1;
    ln1 = p0;
    return shift;
}

}  // namespace detail

inline QuadratureRule quad_rule(std::size_t n) {
    if (n < 1 || n > 256) throw DomainError("quadrature size must be in [1, 256], got " + std::to_string(n));
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
    for (std::size_t i = 0; i < n; ++i) diag(static_cast<Eigen::Index>(i)) = 2.0 * static_cast<double>(i) + 1.0;
    for (std::size_t i = 1; i < n; ++i) sub(static_cast<Eigen::Index>(i - 1)) = static_cast<double>(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(static_cast<Eigen::Index>(n - 1)), Eigen::EigenvaluesOnly);

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.compensated_weights.resize(n);
    const long double np1 = static_cast<long double>(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        long double x = es.eigenvalues()(static_cast<Eigen::Index>(i));
        for (int it = 0; it < 10; ++it) {
            long double ln = 0.0L, ln1 = 0.0L;
            detail::laguerre_scaled(n, x, ln, ln1);
            const long double dln = static_cast<long double>(n) * (ln - ln1) / x;
            const long double step = ln / dln;
            x -= step;
            if (std::abs(step) <= 1e-19L * x) break;
        }
        rule.nodes[i] = static_cast<double>(x);
        // w = x / ((n+1)^2 L_{n+1}(x)^2), in log space
        long double l_next = 0.0L, l_cur = 0.0L;
        const int shift = detail::laguerre_scaled(n + 1, x, l_next, l_cur);
        const long double log_w =
            std::log(x) - 2.0L * std::log(np1) - 2.0L * (std::log(std::abs(l_next)) + shift * std::log(2.0L));
        rule.weights[i] = static_cast<double>(std::exp(log_w));
        rule.compensated_weights[i] = static_cast<double>(std::exp(log_w + x));
    }
    return rule;
}

}  // namespace ddsv
