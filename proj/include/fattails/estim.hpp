// estim.hpp
#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "fattails/dist.hpp"

namespace fattails {

using DistParams = std::variant<NormalParams, StudentTParams, StableParams>;

struct FitResult {
    DistParams params;
    std::optional<double> loglik;  // absent for the stable regression fit
    std::size_t iterations = 0;
    bool converged = false;
};

// mu = sample mean, sigma = sample standard deviation (n-1 denominator).
// Throws TooShortError (< 2), ZeroVarianceError.
FitResult fit_normal(const std::vector<double>& data);

// Joint ML over (nu, mu, sigma) of the location-scale t; nu searched in
// [0.5, 200] on a log scale, sigma through a log transform. Derivative-free
// simplex with 3 restarts from perturbed moment starts; best restart wins.
// Throws TooShortError (< 10); non-convergence returns best-so-far, flagged.
FitResult fit_studentt(const std::vector<double>& data);

// Iterative regression estimation of S1 stable parameters: quantile-method
// start, then alternating characteristic-function modulus regression (alpha,
// gamma) and phase regression (beta, delta) on re-standardized data, until
// alpha and gamma move < 1e-4 or 10 iterations. Output clamped into the legal
// parameter box; clamping or hitting the iteration cap clears `converged`.
// No loglik. Throws TooShortError (< 200).
FitResult fit_stable_koutrouvelis(const std::vector<double>& data);

// Quantile-method starting point for the stable regression, exposed for
// direct testing. Table inputs are clamped to the tabulated ranges.
StableParams mcculloch_initial(const std::vector<double>& data);

// Linear-interpolation percentile at rank p/100 * (n-1), p in [0, 100].
double percentile(const std::vector<double>& data, double p);

}  // namespace fattails
