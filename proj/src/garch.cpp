// garch.cpp
#include "fattails/garch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fattails/dist.hpp"
#include "fattails/errors.hpp"
#include "fattails/optim.hpp"
#include "fattails/rng.hpp"

namespace fattails {

namespace {

constexpr double kLn2Pi = 1.8378770664093454836;
constexpr double kAbsMeanNormal = 0.79788456080286535588;  // E|Z| = sqrt(2/pi)
constexpr double kLogVarCap = 50.0;  // clamp on log sigma2 in the egarch recursion

std::size_t max_lag(const GarchSpec& s) {
    return std::max(std::max(s.ar, s.ma), std::max(s.p, s.q));
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidParamsError(std::string(what) + " must be finite");
}

void validate_model(const GarchSpec& spec, const GarchParams& p) {
    if (p.ar.size() != spec.ar || p.ma.size() != spec.ma)
        throw InvalidParamsError("mean-equation coefficient count does not match the spec");
    if (!std::isfinite(p.mu)) throw InvalidParamsError("mu must be finite");
    require_finite(p.ar, "ar coefficients");
    require_finite(p.ma, "ma coefficients");
    if (spec.kind == VarianceKind::garch) {
        if (p.beta.size() != spec.p || p.gamma_coef.size() != spec.q)
            throw InvalidParamsError("variance coefficient count does not match the spec");
        if (!(p.d > 0.0) || !std::isfinite(p.d))
            throw InvalidParamsError("variance intercept d must be positive");
        for (double b : p.beta)
            if (!(b >= 0.0) || !std::isfinite(b))
                throw InvalidParamsError("beta coefficients must be non-negative");
        for (double g : p.gamma_coef)
            if (!(g >= 0.0) || !std::isfinite(g))
                throw InvalidParamsError("gamma coefficients must be non-negative");
    } else {
        if (p.eg_b.size() != spec.p || p.eg_a.size() != spec.q ||
            p.eg_theta.size() != spec.q)
            throw InvalidParamsError("variance coefficient count does not match the spec");
        if (!std::isfinite(p.omega)) throw InvalidParamsError("omega must be finite");
        require_finite(p.eg_b, "log-variance lag coefficients");
        require_finite(p.eg_a, "magnitude coefficients");
        require_finite(p.eg_theta, "sign coefficients");
    }
}

struct SeriesMoments {
    double mean = 0.0;
    double var = 0.0;  // n-1 denominator
};

SeriesMoments series_moments(const std::vector<double>& r, std::size_t min_n) {
    if (r.size() < min_n)
        throw TooShortError("need at least " + std::to_string(min_n) + " observations, got " +
                            std::to_string(r.size()));
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    if (*lo == *hi) throw ZeroVarianceError("return series has zero variance");
    SeriesMoments m;
    for (double x : r) m.mean += x;
    m.mean /= static_cast<double>(r.size());
    for (double x : r) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(r.size() - 1);
    if (!(m.var > 0.0)) throw ZeroVarianceError("return series has zero variance");
    return m;
}

// Core recursion shared by the public filter and the fit objective. Fills
// e with mean-equation residuals and s2 with conditional variances; returns
// the Gaussian quasi-log-likelihood. Presample conventions are documented
// on filter_garch.
double run_filter(const std::vector<double>& r, const GarchSpec& spec, const GarchParams& p,
                  double rbar, double vhat, std::vector<double>& e, std::vector<double>& s2) {
    const std::size_t n = r.size();
    e.resize(n);
    s2.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double m = p.mu;
        for (std::size_t i = 0; i < spec.ar; ++i)
            m += p.ar[i] * (t >= i + 1 ? r[t - i - 1] : rbar);
        for (std::size_t j = 0; j < spec.ma; ++j)
            m += p.ma[j] * (t >= j + 1 ? e[t - j - 1] : 0.0);
        e[t] = r[t] - m;
    }
    if (spec.kind == VarianceKind::garch) {
        s2[0] = vhat;
        for (std::size_t t = 1; t < n; ++t) {
            double v = p.d;
            for (std::size_t i = 0; i < spec.p; ++i)
                v += p.beta[i] * (t >= i + 1 ? s2[t - i - 1] : vhat);
            for (std::size_t j = 0; j < spec.q; ++j) {
                const double e2 = t >= j + 1 ? e[t - j - 1] * e[t - j - 1] : vhat;
                v += p.gamma_coef[j] * e2;
            }
            s2[t] = v;
        }
    } else {
        const double lvhat = std::log(vhat);
        // s2 holds log variance during the recursion
        s2[0] = lvhat;
        for (std::size_t t = 1; t < n; ++t) {
            double lv = p.omega;
            for (std::size_t i = 0; i < spec.p; ++i)
                lv += p.eg_b[i] * (t >= i + 1 ? s2[t - i - 1] : lvhat);
            for (std::size_t j = 0; j < spec.q; ++j) {
                if (t < j + 1) continue;  // presample innovation terms drop out
                const double z = e[t - j - 1] / std::sqrt(std::exp(s2[t - j - 1]));
                lv += p.eg_a[j] * (std::fabs(z) - kAbsMeanNormal) + p.eg_theta[j] * z;
            }
            s2[t] = std::clamp(lv, -kLogVarCap, kLogVarCap);
        }
        for (std::size_t t = 0; t < n; ++t) s2[t] = std::exp(s2[t]);
    }
    double nll = 0.0;
    for (std::size_t t = 0; t < n; ++t)
        nll += kLn2Pi + std::log(s2[t]) + e[t] * e[t] / s2[t];
    return -0.5 * nll;
}

// tanh map to partial autocorrelations, then the Levinson-style recursion
// to the coefficients of a stationary AR polynomial 1 - sum a_i L^i.
std::vector<double> pacf_to_poly(const double* u, std::size_t k) {
    std::vector<double> pac(k), a(k), prev;
    for (std::size_t i = 0; i < k; ++i) pac[i] = a[i] = std::tanh(u[i]);
    for (std::size_t j = 1; j < k; ++j) {
        prev.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(j));
        for (std::size_t i = 0; i < j; ++i) a[i] = prev[i] - pac[j] * prev[j - 1 - i];
    }
    return a;
}

// Unconstrained layout: [mu | ar pacs | ma pacs | variance block] where the
// garch variance block is [persistence logit | p+q-1 share logits | log d]
// (first beta share logit pinned at zero) and the egarch block is
// [omega | p log-variance pacs | q magnitude | q sign] coefficients.
std::size_t codec_dim(const GarchSpec& s) {
    std::size_t k = 1 + s.ar + s.ma;
    if (s.kind == VarianceKind::garch)
        k += 1 + (s.p + s.q - 1) + 1;
    else
        k += 1 + s.p + 2 * s.q;
    return k;
}

GarchParams decode(const GarchSpec& s, const std::vector<double>& u) {
    GarchParams p;
    std::size_t k = 0;
    p.mu = u[k++];
    if (s.ar) {
        p.ar = pacf_to_poly(&u[k], s.ar);
        k += s.ar;
    }
    if (s.ma) {
        p.ma = pacf_to_poly(&u[k], s.ma);
        for (double& v : p.ma) v = -v;  // invertible 1 + sum ma_j L^j
        k += s.ma;
    }
    if (s.kind == VarianceKind::garch) {
        const double pers = 1.0 / (1.0 + std::exp(-u[k++]));
        std::vector<double> w(s.p + s.q, 0.0);
        for (std::size_t i = 1; i < w.size(); ++i) w[i] = u[k++];
        const double mx = *std::max_element(w.begin(), w.end());
        double sum = 0.0;
        for (double& v : w) {
            v = std::exp(v - mx);
            sum += v;
        }
        p.beta.resize(s.p);
        p.gamma_coef.resize(s.q);
        for (std::size_t i = 0; i < s.p; ++i) p.beta[i] = pers * w[i] / sum;
        for (std::size_t j = 0; j < s.q; ++j) p.gamma_coef[j] = pers * w[s.p + j] / sum;
        p.d = std::exp(u[k++]);
    } else {
        p.omega = u[k++];
        p.eg_b = pacf_to_poly(&u[k], s.p);
        k += s.p;
        p.eg_a.assign(u.begin() + static_cast<std::ptrdiff_t>(k),
                      u.begin() + static_cast<std::ptrdiff_t>(k + s.q));
        k += s.q;
        p.eg_theta.assign(u.begin() + static_cast<std::ptrdiff_t>(k),
                          u.begin() + static_cast<std::ptrdiff_t>(k + s.q));
        k += s.q;
    }
    return p;
}

std::vector<double> start_point(const GarchSpec& s, double rbar, double vhat) {
    std::vector<double> u(codec_dim(s), 0.0);
    std::size_t k = 0;
    u[k++] = rbar;
    k += s.ar + s.ma;  // white-noise mean start
    if (s.kind == VarianceKind::garch) {
        u[k++] = std::log(0.9 / 0.1);  // persistence 0.9
        // share the persistence 0.85/0.15 between the beta and gamma blocks
        const double bshare = 0.85 / static_cast<double>(s.p);
        const double gshare = 0.15 / static_cast<double>(s.q);
        for (std::size_t i = 1; i < s.p; ++i) u[k++] = 0.0;
        for (std::size_t j = 0; j < s.q; ++j) u[k++] = std::log(gshare / bshare);
        u[k++] = std::log(vhat * 0.1);  // d so the unconditional variance is vhat
    } else {
        u[k++] = 0.1 * std::log(vhat);  // omega = (1 - 0.9) log vhat
        u[k++] = std::atanh(0.9);       // first log-variance lag 0.9
        for (std::size_t i = 1; i < s.p; ++i) u[k++] = 0.0;
        u[k] = 0.1;  // first magnitude coefficient; the rest stay zero
        k += 2 * s.q;
    }
    return u;
}

}  // namespace

GarchFilter filter_garch(const std::vector<double>& returns, const GarchSpec& spec,
                         const GarchParams& params) {
    validate_model(spec, params);
    const auto m = series_moments(returns, std::max<std::size_t>(2, max_lag(spec) + 1));
    GarchFilter out;
    out.loglik = run_filter(returns, spec, params, m.mean, m.var, out.residuals, out.cond_var);
    out.std_residuals.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        out.std_residuals[t] = out.residuals[t] / std::sqrt(out.cond_var[t]);
    return out;
}

GarchFit fit_garch(const std::vector<double>& returns, const GarchSpec& spec) {
    const auto m = series_moments(returns, 100 + max_lag(spec));
    const double n = static_cast<double>(returns.size());

    std::vector<double> ebuf, s2buf;
    // per-observation scale keeps the optimizer tolerances meaningful
    const auto objective = [&](const std::vector<double>& u) {
        const double ll = run_filter(returns, spec, decode(spec, u), m.mean, m.var, ebuf, s2buf);
        return std::isfinite(ll) ? -ll / n : 1e12;
    };

    BfgsOptions bopt;
    bopt.max_iter = 300;
    auto res = bfgs_minimize(objective, start_point(spec, m.mean, m.var), bopt);
    std::size_t iterations = res.iterations;
    bool converged = res.converged;
    if (!converged) {
        NelderMeadOptions nopt;
        nopt.step = 0.25;
        nopt.max_iter = 3000;
        const auto nm = nelder_mead(objective, res.x, nopt);
        iterations += nm.iterations;
        converged = nm.converged;
        if (nm.fmin <= res.fmin) res = nm;
    }

    GarchFit fit;
    fit.spec = spec;
    fit.params = decode(spec, res.x);
    fit.loglik =
        run_filter(returns, spec, fit.params, m.mean, m.var, fit.residuals, fit.cond_var);
    fit.std_residuals.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        fit.std_residuals[t] = fit.residuals[t] / std::sqrt(fit.cond_var[t]);
    fit.n_params = codec_dim(spec);
    fit.aic = 2.0 * static_cast<double>(fit.n_params) - 2.0 * fit.loglik;
    fit.iterations = iterations;
    fit.converged = converged;
    return fit;
}

GarchFit fit_garch11(const std::vector<double>& returns) {
    return fit_garch(returns, GarchSpec{});
}

std::vector<GarchSpec> arma_garch_grid() {
    std::vector<GarchSpec> grid;
    for (std::size_t ar = 1; ar <= 2; ++ar)
        for (std::size_t ma = 1; ma <= 2; ++ma)
            for (std::size_t p = 1; p <= 2; ++p)
                for (std::size_t q = 1; q <= 2; ++q)
                    grid.push_back({ar, ma, VarianceKind::garch, p, q});
    return grid;
}

std::vector<GarchSpec> egarch_grid() {
    std::vector<GarchSpec> grid;
    for (std::size_t p = 1; p <= 3; ++p)
        for (std::size_t q = 1; q <= 3; ++q)
            grid.push_back({0, 0, VarianceKind::egarch, p, q});
    return grid;
}

std::size_t select_best_fit(const std::vector<GarchFit>& fits) {
    if (fits.empty()) throw AllFitsFailedError("no candidate fits to select from");
    bool any_converged = false;
    for (const auto& f : fits) any_converged = any_converged || f.converged;
    std::size_t best = fits.size();
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (any_converged && !fits[i].converged) continue;
        if (best == fits.size()) {
            best = i;
            continue;
        }
        const bool wins = fits[i].aic < fits[best].aic ||
                          (fits[i].aic == fits[best].aic &&
                           fits[i].n_params < fits[best].n_params);
        if (wins) best = i;
    }
    return best;
}

std::vector<double> simulate_garch(std::size_t n, const GarchSpec& spec,
                                   const GarchParams& p, std::uint64_t seed, double t_nu) {
    validate_model(spec, p);
    if (t_nu != 0.0 && !(t_nu > 2.0 && std::isfinite(t_nu)))
        throw InvalidParamsError("t_nu must be 0 (normal) or > 2");
    double ar_abs = 0.0, ar_sum = 0.0;
    for (double a : p.ar) {
        ar_abs += std::fabs(a);
        ar_sum += a;
    }
    if (ar_abs >= 1.0)
        throw InvalidParamsError("autoregressive coefficients too large to simulate");
    const double mean0 = p.mu / (1.0 - ar_sum);  // unconditional mean

    double v0 = 0.0;   // unconditional variance (garch)
    double lv0 = 0.0;  // unconditional log variance (egarch)
    if (spec.kind == VarianceKind::garch) {
        double pers = 0.0;
        for (double b : p.beta) pers += b;
        for (double g : p.gamma_coef) pers += g;
        if (pers >= 1.0)
            throw InvalidParamsError("beta and gamma must sum below one to simulate");
        v0 = p.d / (1.0 - pers);
    } else {
        double b_abs = 0.0, b_sum = 0.0;
        for (double b : p.eg_b) {
            b_abs += std::fabs(b);
            b_sum += b;
        }
        if (b_abs >= 1.0)
            throw InvalidParamsError("log-variance lags too large to simulate");
        lv0 = p.omega / (1.0 - b_sum);  // unconditional log variance
    }

    constexpr std::size_t kBurn = 500;
    const std::size_t total = n + kBurn;
    Rng rng(seed);
    std::vector<double> z;
    if (t_nu == 0.0) {
        z = sample_normal(total, {0.0, 1.0}, rng);
    } else {
        z = sample_studentt(total, {t_nu, 0.0, 1.0}, rng);
        const double unit = std::sqrt((t_nu - 2.0) / t_nu);
        for (double& v : z) v *= unit;
    }

    std::vector<double> r(total), e(total), s2(total);
    for (std::size_t t = 0; t < total; ++t) {
        if (spec.kind == VarianceKind::garch) {
            double v = p.d;
            for (std::size_t i = 0; i < spec.p; ++i)
                v += p.beta[i] * (t >= i + 1 ? s2[t - i - 1] : v0);
            for (std::size_t j = 0; j < spec.q; ++j)
                v += p.gamma_coef[j] * (t >= j + 1 ? e[t - j - 1] * e[t - j - 1] : v0);
            s2[t] = v;
        } else {
            double lv = p.omega;
            for (std::size_t i = 0; i < spec.p; ++i)
                lv += p.eg_b[i] * (t >= i + 1 ? std::log(s2[t - i - 1]) : lv0);
            for (std::size_t j = 0; j < spec.q; ++j) {
                if (t < j + 1) continue;
                const double zl = z[t - j - 1];
                lv += p.eg_a[j] * (std::fabs(zl) - kAbsMeanNormal) + p.eg_theta[j] * zl;
            }
            s2[t] = std::exp(std::clamp(lv, -kLogVarCap, kLogVarCap));
        }
        e[t] = std::sqrt(s2[t]) * z[t];
        double mval = p.mu;
        for (std::size_t i = 0; i < spec.ar; ++i)
            mval += p.ar[i] * (t >= i + 1 ? r[t - i - 1] : mean0);
        for (std::size_t j = 0; j < spec.ma; ++j)
            mval += p.ma[j] * (t >= j + 1 ? e[t - j - 1] : 0.0);
        r[t] = mval + e[t];
    }
    return std::vector<double>(r.begin() + kBurn, r.end());
}

}  // namespace fattails
