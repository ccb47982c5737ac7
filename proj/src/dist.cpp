// dist.cpp
#include "fattails/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fattails/errors.hpp"
#include "fattails/rng.hpp"

namespace fattails {

namespace {

constexpr double kPi = std::numbers::pi;
// Inside this band around alpha = 1 the alpha = 1 branch of the stable law
// is used (tan(pi*alpha/2) blows up at the boundary).
constexpr double kAlphaOneBand = 1e-8;

void require(bool ok, const char* what) {
    if (!ok) throw InvalidParamsError(what);
}

bool fin(double x) { return std::isfinite(x); }

}  // namespace

void validate(const NormalParams& p) {
    require(fin(p.mu) && fin(p.sigma) && p.sigma > 0.0,
            "normal params: need finite mu and sigma > 0");
}

void validate(const StudentTParams& p) {
    require(fin(p.nu) && p.nu > 0.0 && fin(p.mu) && fin(p.sigma) && p.sigma > 0.0,
            "student-t params: need nu > 0, sigma > 0, all finite");
}

void validate(const StableParams& p) {
    require(fin(p.alpha) && p.alpha > 0.0 && p.alpha <= 2.0 && fin(p.beta) &&
                p.beta >= -1.0 && p.beta <= 1.0 && fin(p.gamma) && p.gamma > 0.0 &&
                fin(p.delta),
            "stable params: need alpha in (0,2], beta in [-1,1], gamma > 0");
}

double normal_pdf(double x, const NormalParams& p) {
    validate(p);
    const double z = (x - p.mu) / p.sigma;
    return std::exp(-0.5 * z * z) / (p.sigma * std::sqrt(2.0 * kPi));
}

double normal_cdf(double x, const NormalParams& p) {
    validate(p);
    const double z = (x - p.mu) / p.sigma;
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    require(fin(p) && p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0,1)");
    // Peter Acklam's rational approximation, then one Halley step on erfc.
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement: e = Phi(x) - p, u = e / phi(x).
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double studentt_pdf(double x, const StudentTParams& p) {
    validate(p);
    const double nu = p.nu;
    const double z = (x - p.mu) / p.sigma;
    const double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * kPi) -
                      0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    return std::exp(lg) / p.sigma;
}

std::complex<double> stable_cf(double kappa, const StableParams& p) {
    validate(p);
    require(fin(kappa), "stable_cf: kappa must be finite");
    if (kappa == 0.0) return {1.0, 0.0};
    const double sgn = kappa > 0.0 ? 1.0 : -1.0;
    const double ak = std::fabs(kappa);
    double re, im;
    if (std::fabs(p.alpha - 1.0) <= kAlphaOneBand) {
        const double scale = p.gamma * ak;
        re = -scale;
        im = -scale * p.beta * (2.0 / kPi) * sgn * std::log(ak) + p.delta * kappa;
    } else {
        const double pw = std::pow(p.gamma * ak, p.alpha);
        re = -pw;
        im = pw * p.beta * std::tan(0.5 * kPi * p.alpha) * sgn + p.delta * kappa;
    }
    return std::exp(std::complex<double>(re, im));
}

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct GilPelaez {
    double alpha;
    double beta;
    double z;
    bool one;  // alpha == 1 branch

    // Im[e^{-ikz} cf0(k)] / k  =  e^{-k^alpha} sin(theta(k) - k z) / k
    double operator()(double k) const {
        double theta, decay;
        if (one) {
            theta = -k * beta * (2.0 / kPi) * std::log(k);
            decay = std::exp(-k);
        } else {
            const double ka = std::pow(k, alpha);
            theta = ka * beta * std::tan(0.5 * kPi * alpha);
            decay = std::exp(-ka);
        }
        return decay * std::sin(theta - k * z) / k;
    }
};

template <typename F>
double gk15(const F& f, double lo, double hi, double* err) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double resk = kWgk[7] * f(c);
    double resg = kWg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double fv = f(c - h * kXgk[i]) + f(c + h * kXgk[i]);
        resk += kWgk[i] * fv;
        if (i % 2 == 1) resg += kWg[i / 2] * fv;
    }
    *err = std::fabs((resk - resg) * h);
    return resk * h;
}

template <typename F>
double adapt(const F& f, double lo, double hi, double tol, int depth, bool* ok) {
    double err;
    const double v = gk15(f, lo, hi, &err);
    if (err <= tol || hi - lo < 1e-14) return v;
    if (depth >= 48) {
        *ok = false;
        return v;
    }
    const double mid = 0.5 * (lo + hi);
    return adapt(f, lo, mid, 0.5 * tol, depth + 1, ok) +
           adapt(f, mid, hi, 0.5 * tol, depth + 1, ok);
}

}  // namespace

double stable_cdf_numeric(double x, const StableParams& p, double tol) {
    validate(p);
    require(fin(x), "stable_cdf_numeric: x must be finite");
    require(fin(tol) && tol > 0.0, "stable_cdf_numeric: tol must be positive");

    const bool one = std::fabs(p.alpha - 1.0) <= kAlphaOneBand;
    const double alpha = one ? 1.0 : p.alpha;
    // Standardize: X = gamma Z + delta (alpha != 1);
    //              X = gamma Z + delta + (2/pi) beta gamma ln(gamma) (alpha == 1).
    double shift = p.delta;
    if (one) shift += (2.0 / kPi) * p.beta * p.gamma * std::log(p.gamma);
    const GilPelaez f{alpha, p.beta, (x - shift) / p.gamma, one};

    // |integrand| <= e^{-k^alpha}/k; beyond kmax the tail is ~1e-20.
    const double kmax = std::pow(45.0, 1.0 / alpha);
    // Panels no wider than half an oscillation of sin(k z).
    const double step = std::min(0.5, kPi / (1.0 + std::fabs(f.z)));
    const int npanels = static_cast<int>(std::ceil(kmax / step));
    bool ok = true;
    double integral = 0.0;
    for (int i = 0; i < npanels; ++i) {
        const double lo = kmax * i / npanels;
        const double hi = kmax * (i + 1) / npanels;
        integral += adapt(f, lo, hi, tol / npanels, 0, &ok);
    }
    if (!ok)
        throw ConvergenceError("stable_cdf_numeric: quadrature failed at tol=" +
                               std::to_string(tol));
    return std::clamp(0.5 - integral / kPi, 0.0, 1.0);
}

std::vector<double> stable_cdf_grid(const std::vector<double>& xs, const StableParams& p,
                                    double tol) {
    require(std::is_sorted(xs.begin(), xs.end()),
            "stable_cdf_grid: grid must be ascending");
    std::vector<double> out;
    out.reserve(xs.size());
    double prev = 0.0;
    for (double x : xs) {
        // Clamping keeps the grid monotone even at quadrature noise level.
        prev = std::max(prev, stable_cdf_numeric(x, p, tol));
        out.push_back(prev);
    }
    return out;
}

std::vector<double> sample_normal(std::size_t n, const NormalParams& p, Rng& rng) {
    validate(p);
    std::vector<double> out(n);
    for (double& v : out) v = p.mu + p.sigma * rng.normal();
    return out;
}

std::vector<double> sample_normal(std::size_t n, const NormalParams& p, std::uint64_t seed) {
    Rng rng(seed);
    return sample_normal(n, p, rng);
}

std::vector<double> sample_studentt(std::size_t n, const StudentTParams& p, Rng& rng) {
    validate(p);
    std::vector<double> out(n);
    for (double& v : out) {
        const double z = rng.normal();
        const double w = rng.chi_square(p.nu) / p.nu;
        v = p.mu + p.sigma * z / std::sqrt(w);
    }
    return out;
}

std::vector<double> sample_studentt(std::size_t n, const StudentTParams& p, std::uint64_t seed) {
    Rng rng(seed);
    return sample_studentt(n, p, rng);
}

std::vector<double> sample_stable(std::size_t n, const StableParams& p, Rng& rng) {
    validate(p);
    std::vector<double> out(n);
    if (std::fabs(p.alpha - 1.0) > kAlphaOneBand) {
        const double a = p.alpha;
        const double inva = 1.0 / a;
        const double th0 = std::atan(p.beta * std::tan(0.5 * kPi * a)) / a;
        const double scale0 = std::pow(std::cos(a * th0), -inva);
        for (double& v : out) {
            const double phi = kPi * (rng.uniform() - 0.5);
            const double w = rng.exponential();
            const double zv = scale0 * std::sin(a * (phi + th0)) /
                              std::pow(std::cos(phi), inva) *
                              std::pow(std::cos(phi - a * (phi + th0)) / w, (1.0 - a) * inva);
            v = p.gamma * zv + p.delta;
        }
    } else {
        const double b = p.beta;
        // S1 scale rule at alpha = 1 picks up a log term.
        const double shift = p.delta + (2.0 / kPi) * b * p.gamma * std::log(p.gamma);
        for (double& v : out) {
            const double phi = kPi * (rng.uniform() - 0.5);
            const double w = rng.exponential();
            double zv;
            if (b == 0.0) {
                zv = std::tan(phi);
            } else {
                const double pb = 0.5 * kPi + b * phi;
                zv = (2.0 / kPi) *
                     (pb * std::tan(phi) -
                      b * std::log(0.5 * kPi * w * std::cos(phi) / pb));
            }
            v = p.gamma * zv + shift;
        }
    }
    return out;
}

std::vector<double> sample_stable(std::size_t n, const StableParams& p, std::uint64_t seed) {
    Rng rng(seed);
    return sample_stable(n, p, rng);
}

}  // namespace fattails
