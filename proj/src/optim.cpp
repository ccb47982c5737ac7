// optim.cpp
#include "fattails/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fattails/errors.hpp"

namespace fattails {

namespace {

std::vector<double> gradient(const ObjectiveFn& f, const std::vector<double>& x, double h0,
                             std::size_t& n_eval) {
    const std::size_t n = x.size();
    std::vector<double> g(n);
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = h0 * std::max(1.0, std::fabs(x[i]));
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
        n_eval += 2;
    }
    return g;
}

}  // namespace

OptimResult nelder_mead(const ObjectiveFn& f, std::vector<double> x0,
                        const NelderMeadOptions& opts) {
    if (x0.empty()) throw InvalidParamsError("nelder_mead needs at least one dimension");
    const std::size_t n = x0.size();
    OptimResult res;

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        pts[i + 1][i] += opts.step * std::max(1.0, std::fabs(x0[i]));
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);
    res.n_eval = n + 1;

    std::vector<std::size_t> order(n + 1);
    auto best_x = x0;
    double best_f = fv[0];
    const auto note = [&](const std::vector<double>& x, double fx) {
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    };
    for (std::size_t i = 0; i <= n; ++i) note(pts[i], fv[i]);

    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&fv](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t lo = order[0], hi = order[n], second_hi = order[n - 1];

        double spread_x = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread_x = std::max(spread_x, std::fabs(pts[hi][i] - pts[lo][i]));
        if (std::fabs(fv[hi] - fv[lo]) < opts.tol_f || spread_x < opts.tol_x) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        const auto blend = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + t * (pts[hi][j] - centroid[j]);
            return x;
        };

        const auto refl = blend(-1.0);
        const double f_refl = f(refl);
        ++res.n_eval;
        note(refl, f_refl);

        if (f_refl < fv[lo]) {
            const auto expa = blend(-2.0);
            const double f_expa = f(expa);
            ++res.n_eval;
            note(expa, f_expa);
            pts[hi] = f_expa < f_refl ? expa : refl;
            fv[hi] = std::min(f_expa, f_refl);
        } else if (f_refl < fv[second_hi]) {
            pts[hi] = refl;
            fv[hi] = f_refl;
        } else {
            const bool outside = f_refl < fv[hi];
            const auto contr = blend(outside ? -0.5 : 0.5);
            const double f_contr = f(contr);
            ++res.n_eval;
            note(contr, f_contr);
            if (f_contr < std::min(f_refl, fv[hi])) {
                pts[hi] = contr;
                fv[hi] = f_contr;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
                    fv[i] = f(pts[i]);
                    ++res.n_eval;
                    note(pts[i], fv[i]);
                }
            }
        }
    }

    res.x = best_x;
    res.fmin = best_f;
    return res;
}

OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0,
                          const BfgsOptions& opts) {
    if (x0.empty()) throw InvalidParamsError("bfgs_minimize needs at least one dimension");
    const std::size_t n = x0.size();
    OptimResult res;

    std::vector<double> x = std::move(x0);
    double fx = f(x);
    res.n_eval = 1;
    std::vector<double> g = gradient(f, x, opts.grad_h, res.n_eval);

    // inverse Hessian estimate, row-major
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

    std::vector<double> p(n), x_new(n), g_new(n), s(n), y(n), Hy(n);
    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        double gmax = 0.0;
        bool bad_grad = false;
        for (double v : g) {
            if (!std::isfinite(v)) bad_grad = true;
            gmax = std::max(gmax, std::fabs(v));
        }
        if (bad_grad) break;
        if (gmax < opts.tol_g) {
            res.converged = true;
            break;
        }

        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = 0.0;
            for (std::size_t j = 0; j < n; ++j) p[i] -= H[i * n + j] * g[j];
        }
        for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
        if (slope >= 0.0) {  // H lost positive definiteness; restart from steepest descent
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) H[i * n + j] = i == j ? 1.0 : 0.0;
                p[i] = -g[i];
            }
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
        }

        constexpr double kArmijo = 1e-4;
        double t = 1.0;
        double f_new = 0.0;
        bool line_ok = false;
        while (t > 1e-14) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * p[i];
            f_new = f(x_new);
            ++res.n_eval;
            if (std::isfinite(f_new) && f_new <= fx + kArmijo * t * slope) {
                line_ok = true;
                break;
            }
            t *= 0.5;
        }
        if (!line_ok) break;

        g_new = gradient(f, x_new, opts.grad_h, res.n_eval);
        double ys = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
            ys += y[i] * s[i];
        }
        if (ys > 1e-12) {
            const double rho = 1.0 / ys;
            double yHy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                Hy[i] = 0.0;
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
                yHy += y[i] * Hy[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i * n + j] += (1.0 + rho * yHy) * rho * s[i] * s[j] -
                                    rho * (s[i] * Hy[j] + Hy[i] * s[j]);
        }

        const double decrease = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if (decrease < opts.tol_f) {
            res.converged = true;
            ++res.iterations;
            break;
        }
    }

    res.x = std::move(x);
    res.fmin = fx;
    return res;
}

}  // namespace fattails
