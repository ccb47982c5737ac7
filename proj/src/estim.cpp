// estim.cpp
#include "fattails/estim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fattails/errors.hpp"
#include "fattails/optim.hpp"

namespace fattails {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Quantile-method tables (McCulloch): psi_1/psi_2 map the quantile ratios
// (nu_alpha, nu_beta) to (alpha, beta); phi_3/phi_5 map (alpha, |beta|) to
// the scale and location factors. psi_1/phi_3 are even in the skew argument,
// psi_2/phi_5 odd.
// ---------------------------------------------------------------------------

constexpr double kNuAlphaGrid[15] = {2.439, 2.5, 2.6, 2.7, 2.8, 3.0, 3.2, 3.5,
                                     4.0,   5.0, 6.0, 8.0, 10.0, 15.0, 25.0};
constexpr double kNuBetaGrid[7] = {0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};

// rows: nu_alpha, cols: nu_beta
constexpr double kAlphaTable[15][7] = {
    {2.000, 2.000, 2.000, 2.000, 2.000, 2.000, 2.000},
    {1.916, 1.924, 1.924, 1.924, 1.924, 1.924, 1.924},
    {1.808, 1.813, 1.829, 1.829, 1.829, 1.829, 1.829},
    {1.729, 1.730, 1.737, 1.745, 1.745, 1.745, 1.745},
    {1.664, 1.663, 1.663, 1.668, 1.676, 1.676, 1.676},
    {1.563, 1.560, 1.553, 1.548, 1.547, 1.547, 1.547},
    {1.484, 1.480, 1.471, 1.460, 1.448, 1.438, 1.438},
    {1.391, 1.386, 1.378, 1.364, 1.337, 1.318, 1.318},
    {1.279, 1.273, 1.266, 1.250, 1.210, 1.184, 1.150},
    {1.128, 1.121, 1.114, 1.101, 1.067, 1.027, 0.973},
    {1.029, 1.021, 1.014, 1.004, 0.974, 0.935, 0.874},
    {0.896, 0.892, 0.884, 0.883, 0.855, 0.823, 0.769},
    {0.818, 0.812, 0.806, 0.801, 0.780, 0.756, 0.691},
    {0.698, 0.695, 0.692, 0.689, 0.676, 0.656, 0.597},
    {0.593, 0.590, 0.588, 0.586, 0.579, 0.563, 0.513}};

constexpr double kBetaTable[15][7] = {
    {0.0, 2.160, 1.000, 1.000, 1.000, 1.000, 1.000},
    {0.0, 1.592, 3.390, 1.000, 1.000, 1.000, 1.000},
    {0.0, 0.759, 1.800, 1.000, 1.000, 1.000, 1.000},
    {0.0, 0.482, 1.048, 1.694, 1.000, 1.000, 1.000},
    {0.0, 0.360, 0.760, 1.232, 2.229, 1.000, 1.000},
    {0.0, 0.253, 0.518, 0.823, 1.575, 1.000, 1.000},
    {0.0, 0.203, 0.410, 0.632, 1.244, 1.906, 1.000},
    {0.0, 0.165, 0.332, 0.499, 0.943, 1.560, 1.000},
    {0.0, 0.136, 0.271, 0.404, 0.689, 1.230, 2.195},
    {0.0, 0.109, 0.216, 0.323, 0.539, 0.827, 1.917},
    {0.0, 0.096, 0.190, 0.284, 0.472, 0.693, 1.759},
    {0.0, 0.082, 0.163, 0.243, 0.412, 0.601, 1.596},
    {0.0, 0.074, 0.147, 0.220, 0.377, 0.546, 1.482},
    {0.0, 0.064, 0.128, 0.191, 0.330, 0.478, 1.362},
    {0.0, 0.056, 0.112, 0.167, 0.285, 0.428, 1.274}};

constexpr double kAlphaGrid[16] = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2,
                                   1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
constexpr double kBetaGrid[5] = {0.0, 0.25, 0.5, 0.75, 1.0};

// rows: alpha (ascending), cols: |beta|
constexpr double kScaleTable[16][5] = {
    {2.588, 3.073, 4.534, 6.636, 9.144},
    {2.337, 2.634, 3.542, 4.808, 6.247},
    {2.189, 2.392, 3.004, 3.844, 4.775},
    {2.098, 2.244, 2.676, 3.265, 3.912},
    {2.040, 2.149, 2.461, 2.886, 3.356},
    {2.000, 2.085, 2.311, 2.624, 2.973},
    {1.980, 2.040, 2.205, 2.435, 2.696},
    {1.965, 2.007, 2.125, 2.294, 2.491},
    {1.955, 1.984, 2.067, 2.188, 2.333},
    {1.946, 1.967, 2.022, 2.106, 2.211},
    {1.939, 1.952, 1.988, 2.045, 2.116},
    {1.933, 1.940, 1.962, 1.997, 2.043},
    {1.927, 1.930, 1.943, 1.961, 1.987},
    {1.921, 1.922, 1.927, 1.936, 1.947},
    {1.914, 1.915, 1.916, 1.918, 1.921},
    {1.908, 1.908, 1.908, 1.908, 1.908}};

constexpr double kShiftTable[16][5] = {
    {0.0, -0.061, -0.279, -0.659, -1.198},
    {0.0, -0.078, -0.272, -0.581, -0.997},
    {0.0, -0.089, -0.262, -0.520, -0.853},
    {0.0, -0.096, -0.250, -0.469, -0.742},
    {0.0, -0.099, -0.237, -0.424, -0.652},
    {0.0, -0.098, -0.223, -0.380, -0.576},
    {0.0, -0.095, -0.208, -0.346, -0.508},
    {0.0, -0.090, -0.192, -0.310, -0.447},
    {0.0, -0.084, -0.173, -0.276, -0.390},
    {0.0, -0.075, -0.154, -0.241, -0.335},
    {0.0, -0.066, -0.134, -0.206, -0.283},
    {0.0, -0.056, -0.111, -0.170, -0.232},
    {0.0, -0.043, -0.088, -0.132, -0.179},
    {0.0, -0.030, -0.061, -0.092, -0.123},
    {0.0, -0.017, -0.032, -0.049, -0.064},
    {0.0, 0.000, 0.000, 0.000, 0.000}};

template <std::size_t NR, std::size_t NC>
double bilinear(const double (&rows)[NR], const double (&cols)[NC],
                const double (&table)[NR][NC], double x, double y) {
    x = std::clamp(x, rows[0], rows[NR - 1]);
    y = std::clamp(y, cols[0], cols[NC - 1]);
    std::size_t i = 0;
    while (i + 2 < NR && rows[i + 1] <= x) ++i;
    std::size_t j = 0;
    while (j + 2 < NC && cols[j + 1] <= y) ++j;
    const double tx = (x - rows[i]) / (rows[i + 1] - rows[i]);
    const double ty = (y - cols[j]) / (cols[j + 1] - cols[j]);
    return (1.0 - tx) * (1.0 - ty) * table[i][j] + tx * (1.0 - ty) * table[i + 1][j] +
           (1.0 - tx) * ty * table[i][j + 1] + tx * ty * table[i + 1][j + 1];
}

// ---------------------------------------------------------------------------
// Regression frequency-count tables, keyed by the current alpha estimate
// (rows) and sample size (columns 200 / 800 / 1600); nearest entry is used.
// ---------------------------------------------------------------------------

constexpr double kModulusAlphaRows[8] = {1.9, 1.5, 1.3, 1.1, 0.9, 0.7, 0.5, 0.3};
constexpr int kModulusCounts[8][3] = {{9, 9, 9},     {11, 11, 11}, {22, 16, 14},
                                      {24, 18, 15},  {28, 22, 18}, {30, 24, 20},
                                      {86, 68, 56},  {134, 124, 118}};

constexpr double kPhaseAlphaRows[7] = {1.9, 1.5, 1.1, 0.9, 0.7, 0.5, 0.3};
constexpr int kPhaseCounts[7][3] = {{9, 10, 11},  {12, 14, 15}, {16, 18, 17},
                                    {14, 14, 14}, {24, 16, 16}, {40, 38, 36},
                                    {70, 68, 66}};

constexpr double kSizeCols[3] = {200.0, 800.0, 1600.0};

template <std::size_t NR>
int nearest_count(const double (&rows)[NR], const int (&table)[NR][3], double alpha,
                  std::size_t n) {
    std::size_t ri = 0;
    for (std::size_t i = 1; i < NR; ++i)
        if (std::fabs(rows[i] - alpha) < std::fabs(rows[ri] - alpha)) ri = i;
    std::size_t ci = 0;
    for (std::size_t j = 1; j < 3; ++j)
        if (std::fabs(kSizeCols[j] - static_cast<double>(n)) <
            std::fabs(kSizeCols[ci] - static_cast<double>(n)))
            ci = j;
    return table[ri][ci];
}

struct Ecf {
    double re = 0.0;
    double im = 0.0;
};

Ecf ecf_at(const std::vector<double>& x, double t) {
    Ecf v;
    for (double xi : x) {
        v.re += std::cos(t * xi);
        v.im += std::sin(t * xi);
    }
    v.re /= static_cast<double>(x.size());
    v.im /= static_cast<double>(x.size());
    return v;
}

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    return {(sy - slope * sx) / n, slope};
}

double student_t_nll(const std::vector<double>& data, double nu, double mu, double sigma) {
    const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                     0.5 * std::log(nu * kPi) - std::log(sigma);
    double nll = 0.0;
    for (double x : data) {
        const double z = (x - mu) / sigma;
        nll -= c - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    }
    return nll;
}

}  // namespace

double percentile(const std::vector<double>& data, double p) {
    if (data.empty()) throw EmptyInputError("percentile of empty data");
    if (!(p >= 0.0 && p <= 100.0)) throw InvalidParamsError("percentile rank outside [0,100]");
    std::vector<double> s = data;
    std::sort(s.begin(), s.end());
    const double rank = p / 100.0 * static_cast<double>(s.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= s.size()) return s.back();
    const double frac = rank - static_cast<double>(lo);
    return s[lo] + frac * (s[lo + 1] - s[lo]);
}

FitResult fit_normal(const std::vector<double>& data) {
    const std::size_t n = data.size();
    if (n < 2) throw TooShortError("normal fit needs at least 2 observations");
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : data) ss += (v - mean) * (v - mean);
    const auto [dlo, dhi] = std::minmax_element(data.begin(), data.end());
    if (ss == 0.0 || *dlo == *dhi) throw ZeroVarianceError("all observations identical");
    const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
    // sum (x-mu)^2 / (2 sigma^2) = (n-1)/2 at the ML/moment values
    const double loglik = -0.5 * static_cast<double>(n) * std::log(2.0 * kPi) -
                          static_cast<double>(n) * std::log(sigma) -
                          0.5 * static_cast<double>(n - 1);
    FitResult res;
    res.params = NormalParams{mean, sigma};
    res.loglik = loglik;
    res.iterations = 0;
    res.converged = true;
    return res;
}

FitResult fit_studentt(const std::vector<double>& data) {
    const std::size_t n = data.size();
    if (n < 10) throw TooShortError("t fit needs at least 10 observations");

    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double v : data) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
    const auto [dlo, dhi] = std::minmax_element(data.begin(), data.end());
    if (sd == 0.0 || *dlo == *dhi) throw ZeroVarianceError("all observations identical");
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    const double kurt = m4 / (m2 * m2);

    // Moment start: kurtosis of t is 3 + 6/(nu - 4) for nu > 4.
    double nu0 = kurt > 3.3 ? std::clamp(4.0 + 6.0 / (kurt - 3.0), 2.3, 100.0) : 30.0;

    const double log_nu_lo = std::log(0.5), log_nu_hi = std::log(200.0);
    const auto nll = [&](const std::vector<double>& x) {
        if (x[0] < log_nu_lo || x[0] > log_nu_hi || std::fabs(x[2]) > 30.0) {
            double excess = std::max(0.0, x[0] - log_nu_hi) + std::max(0.0, log_nu_lo - x[0]) +
                            std::max(0.0, std::fabs(x[2]) - 30.0);
            return 1e10 * (1.0 + excess);
        }
        const double nu = std::exp(x[0]);
        const double mu = mean + x[1] * sd;
        const double sigma = sd * std::exp(x[2]);
        return student_t_nll(data, nu, mu, sigma);
    };

    const double s0 = nu0 > 2.5 ? std::sqrt((nu0 - 2.0) / nu0) : 0.7;
    const std::vector<std::vector<double>> starts = {
        {std::log(nu0), 0.0, std::log(s0)},
        {std::log(std::max(0.6, nu0 * 0.4)), 0.0, std::log(s0 * 0.7)},
        {std::log(std::min(150.0, nu0 * 3.0)), 0.0, std::log(std::min(1.4, s0 * 1.4))}};

    NelderMeadOptions opts;
    opts.step = 0.25;
    opts.tol_f = 1e-10;
    opts.tol_x = 1e-8;
    opts.max_iter = 4000;

    OptimResult best;
    best.fmin = std::numeric_limits<double>::infinity();
    for (const auto& x0 : starts) {
        const auto r = nelder_mead(nll, x0, opts);
        if (r.fmin < best.fmin) best = r;
    }

    FitResult res;
    res.params = StudentTParams{std::exp(best.x[0]), mean + best.x[1] * sd,
                                sd * std::exp(best.x[2])};
    res.loglik = -best.fmin;
    res.iterations = best.iterations;
    res.converged = best.converged;
    return res;
}

StableParams mcculloch_initial(const std::vector<double>& data) {
    if (data.empty()) throw EmptyInputError("quantile start of empty data");
    const double q05 = percentile(data, 5.0);
    const double q25 = percentile(data, 25.0);
    const double q50 = percentile(data, 50.0);
    const double q75 = percentile(data, 75.0);
    const double q95 = percentile(data, 95.0);
    const double iqr = q75 - q25;
    const double span = q95 - q05;
    if (iqr <= 0.0 || span <= 0.0) throw ZeroVarianceError("degenerate quantile spread");

    const double nu_alpha = span / iqr;
    const double nu_beta = (q95 + q05 - 2.0 * q50) / span;
    const double nb = std::fabs(nu_beta);
    const double nb_sign = nu_beta < 0.0 ? -1.0 : 1.0;

    double alpha, beta;
    if (nu_alpha >= kNuAlphaGrid[0]) {
        alpha = std::clamp(bilinear(kNuAlphaGrid, kNuBetaGrid, kAlphaTable, nu_alpha, nb),
                           0.1, 2.0);
        beta = std::clamp(nb_sign * bilinear(kNuAlphaGrid, kNuBetaGrid, kBetaTable, nu_alpha, nb),
                          -1.0, 1.0);
    } else {
        alpha = 2.0;
        beta = nu_beta == 0.0 ? 0.0 : nb_sign;
    }

    const double ab = std::fabs(beta);
    const double gamma = iqr / bilinear(kAlphaGrid, kBetaGrid, kScaleTable, alpha, ab);
    const double shift_factor =
        (beta < 0.0 ? -1.0 : 1.0) * bilinear(kAlphaGrid, kBetaGrid, kShiftTable, alpha, ab);
    const double zeta = q50 + gamma * shift_factor;
    const double delta =
        std::fabs(alpha - 1.0) > 1e-12 ? zeta - beta * gamma * std::tan(kPi * alpha / 2.0) : zeta;
    return {alpha, beta, gamma, delta};
}

FitResult fit_stable_koutrouvelis(const std::vector<double>& data) {
    const std::size_t n = data.size();
    if (n < 200) throw TooShortError("stable regression fit needs at least 200 observations");

    const StableParams init = mcculloch_initial(data);
    double alpha = init.alpha;
    double beta = init.beta;
    double gamma_tot = init.gamma;
    double delta_tot = init.delta;

    bool converged = false;
    bool clamped = false;
    std::size_t it = 0;
    std::vector<double> s(n);
    for (it = 1; it <= 10; ++it) {
        for (std::size_t i = 0; i < n; ++i) s[i] = (data[i] - delta_tot) / gamma_tot;

        // modulus regression: log(-log |ecf|^2) = log(2 gamma^alpha) + alpha log t
        const int K = nearest_count(kModulusAlphaRows, kModulusCounts, alpha, n);
        std::vector<double> w, y;
        w.reserve(static_cast<std::size_t>(K));
        y.reserve(static_cast<std::size_t>(K));
        for (int k = 1; k <= K; ++k) {
            const double t = kPi * k / 25.0;
            const Ecf e = ecf_at(s, t);
            const double mod2 =
                std::clamp(e.re * e.re + e.im * e.im, 1e-15, 1.0 - 1e-15);
            w.push_back(std::log(t));
            y.push_back(std::log(-std::log(mod2)));
        }
        const Line mod_line = ols(w, y);
        double alpha_new = mod_line.slope;
        if (alpha_new < 0.1 || alpha_new > 2.0) {
            clamped = true;
            alpha_new = std::clamp(alpha_new, 0.1, 2.0);
        }
        const double gamma_s =
            std::pow(0.5 * std::exp(mod_line.intercept), 1.0 / alpha_new);

        // phase regression: arg ecf(u) = delta u + beta gamma^alpha tan(pi alpha/2) u^alpha
        const int L = nearest_count(kPhaseAlphaRows, kPhaseCounts, alpha_new, n);
        double suu = 0.0, suv = 0.0, svv = 0.0, stu = 0.0, stv = 0.0;
        double prev_phase = 0.0;
        for (int l = 1; l <= L; ++l) {
            const double u = kPi * l / 50.0;
            const Ecf e = ecf_at(s, u);
            double phase = std::atan2(e.im, e.re);
            phase += 2.0 * kPi * std::round((prev_phase - phase) / (2.0 * kPi));
            prev_phase = phase;
            const double v = std::pow(u, alpha_new);
            suu += u * u;
            suv += u * v;
            svv += v * v;
            stu += phase * u;
            stv += phase * v;
        }
        const double det = suu * svv - suv * suv;
        double delta_s, tau;
        if (std::fabs(det) > 1e-12 * suu * svv) {
            delta_s = (stu * svv - stv * suv) / det;
            tau = (stv * suu - stu * suv) / det;
        } else {  // u and u^alpha collinear (alpha near 1): drop the skew regressor
            delta_s = stu / suu;
            tau = 0.0;
        }
        const double tan_half = std::tan(kPi * alpha_new / 2.0);
        double beta_new = 0.0;
        if (std::fabs(tan_half) > 1e-10)
            beta_new = tau / (std::pow(gamma_s, alpha_new) * tan_half);
        if (beta_new < -1.0 || beta_new > 1.0) {
            clamped = true;
            beta_new = std::clamp(beta_new, -1.0, 1.0);
        }

        delta_tot += gamma_tot * delta_s;
        gamma_tot *= gamma_s;
        const double alpha_step = std::fabs(alpha_new - alpha);
        alpha = alpha_new;
        beta = beta_new;
        if (alpha_step < 1e-4 && std::fabs(gamma_s - 1.0) < 1e-4) {
            converged = true;
            break;
        }
    }

    if (!(gamma_tot > 0.0) || !std::isfinite(gamma_tot) || !std::isfinite(delta_tot)) {
        clamped = true;
        gamma_tot = init.gamma;
        delta_tot = init.delta;
    }

    FitResult res;
    res.params = StableParams{alpha, beta, gamma_tot, delta_tot};
    res.iterations = std::min<std::size_t>(it, 10);
    res.converged = converged && !clamped;
    return res;
}

}  // namespace fattails
