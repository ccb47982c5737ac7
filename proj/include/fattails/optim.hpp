// optim.hpp
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fattails {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct OptimResult {
    std::vector<double> x;
    double fmin = 0.0;
    std::size_t iterations = 0;
    std::size_t n_eval = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double step = 0.1;     // initial simplex offset, scaled by max(1, |x0_i|)
    double tol_f = 1e-10;  // absolute spread of simplex function values
    double tol_x = 1e-8;   // max coordinate spread of the simplex
    std::size_t max_iter = 2000;
};

struct BfgsOptions {
    double tol_f = 1e-9;   // absolute per-step objective decrease
    double tol_g = 1e-8;   // max-norm of the gradient
    double grad_h = 1e-6;  // central-difference step, scaled by max(1, |x_i|)
    std::size_t max_iter = 300;
};

// Derivative-free simplex search; returns the best point ever evaluated.
OptimResult nelder_mead(const ObjectiveFn& f, std::vector<double> x0,
                        const NelderMeadOptions& opts = {});

// Quasi-Newton with numerical central-difference gradients, damped inverse-
// Hessian updates, and Armijo backtracking. Not converged on line-search
// failure or iteration cap; callers fall back to nelder_mead from result.x.
OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0,
                          const BfgsOptions& opts = {});

}  // namespace fattails
