#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ddsv {

enum class Termination { gradient_small, step_small, f_small, simplex_small, max_iter, numeric };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::gradient_small: return "gradient-small";
        case Termination::step_small: return "step-small";
        case Termination::f_small: return "F-small";
        case Termination::simplex_small: return "simplex-small";
        case Termination::max_iter: return "max-iter";
        case Termination::numeric: return "numeric";
    }
    return "unknown";
}

struct OptResult {
    Eigen::VectorXd x;
    double F = 0.0;
    std::size_t iterations = 0;
    std::size_t n_obj_calls = 0;
    std::size_t n_grad_calls = 0;
    Termination reason = Termination::max_iter;
    bool feller_satisfied = false;
    std::vector<double> history;  // F after each accepted step, starting with F(x0)
};

}  // namespace ddsv
