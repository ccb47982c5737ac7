// garch.hpp
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fattails {

enum class VarianceKind { garch, egarch };

// Model shape: ARMA(ar, ma) mean equation plus a conditional-variance
// recursion of order (p, q) -- p lags of variance, q lags of innovation.
struct GarchSpec {
    std::size_t ar = 0;
    std::size_t ma = 0;
    VarianceKind kind = VarianceKind::garch;
    std::size_t p = 1;
    std::size_t q = 1;
};

// Coefficients for one model. Only the block matching `kind` is read:
//   garch : sigma2_t = d + sum_i beta_i sigma2_{t-i} + sum_j gamma_j e2_{t-j}
//   egarch: log sigma2_t = omega + sum_i b_i log sigma2_{t-i}
//             + sum_j [ a_j (|z_{t-j}| - sqrt(2/pi)) + theta_j z_{t-j} ]
// Mean equation (both kinds):
//   e_t = r_t - mu - sum_i ar_i r_{t-i} - sum_j ma_j e_{t-j}
struct GarchParams {
    double mu = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;

    double d = 0.0;
    std::vector<double> beta;
    std::vector<double> gamma_coef;

    double omega = 0.0;
    std::vector<double> eg_b;
    std::vector<double> eg_a;
    std::vector<double> eg_theta;
};

// Output of running a fully specified model over a return series.
struct GarchFilter {
    std::vector<double> cond_var;       // sigma2_t
    std::vector<double> residuals;      // e_t
    std::vector<double> std_residuals;  // e_t / sigma_t
    double loglik = 0.0;                // Gaussian quasi-likelihood
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    std::vector<double> cond_var;
    std::vector<double> residuals;
    std::vector<double> std_residuals;
    double loglik = 0.0;
    double aic = 0.0;  // 2 k - 2 loglik
    std::size_t n_params = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Runs the filter recursions at the given coefficients. Presample values:
// sigma2_0 is pinned at the sample variance of the returns, out-of-range
// variance and squared-innovation lags also use the sample variance
// (log sample variance / zero innovation terms for egarch); out-of-range
// return lags use the sample mean and out-of-range residual lags zero.
// Throws InvalidParamsError on size mismatches or an illegal variance
// block, TooShortError, ZeroVarianceError.
GarchFilter filter_garch(const std::vector<double>& returns, const GarchSpec& spec,
                         const GarchParams& params);

// Gaussian quasi-maximum-likelihood fit of `spec`. The search runs in an
// unconstrained parametrization (variance persistence through a logistic,
// lag shares through a softmax, ARMA and egarch variance lags through
// partial-autocorrelation transforms), so returned coefficients always lie
// in the stationary region. Quasi-Newton first, simplex fallback if it
// stalls. Throws TooShortError (< 100 + longest lag), ZeroVarianceError.
GarchFit fit_garch(const std::vector<double>& returns, const GarchSpec& spec);

// fit_garch with the constant-mean GARCH(1,1) spec.
GarchFit fit_garch11(const std::vector<double>& returns);

// Candidate grids for model selection.
// arma_garch_grid: ar, ma, p, q each in {1, 2} (16 specs, nested in that
// order); egarch_grid: constant mean, p, q in {1, 2, 3} (9 specs).
std::vector<GarchSpec> arma_garch_grid();
std::vector<GarchSpec> egarch_grid();

// Index of the fit with the lowest AIC. Fits flagged non-converged are
// ignored unless every fit is; exact AIC ties go to fewer parameters, then
// to the earlier index. Throws AllFitsFailedError on an empty vector.
std::size_t select_best_fit(const std::vector<GarchFit>& fits);

// Draws a return path of length n after a 500-step burn-in, starting the
// recursions from the model's unconditional moments. Innovations are unit
// variance: standard normal when t_nu == 0, otherwise Student-t with t_nu
// (> 2) degrees of freedom scaled by sqrt((nu-2)/nu). Throws
// InvalidParamsError (size mismatch, non-stationary variance, bad t_nu).
std::vector<double> simulate_garch(std::size_t n, const GarchSpec& spec,
                                   const GarchParams& params, std::uint64_t seed,
                                   double t_nu = 0.0);

}  // namespace fattails
