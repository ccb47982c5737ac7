// kstest.cpp
#include "fattails/kstest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fattails/errors.hpp"
#include "fattails/rng.hpp"

namespace fattails {

double kolmogorov_q(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 0.4) {
        // Dual theta series; converges in one or two terms for small lambda.
        const double f = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double s = 0.0;
        for (int j = 1; j <= 20; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double t = std::exp(-odd * odd * f);
            s += t;
            if (t < 1e-18 * (s + 1e-300)) break;
        }
        const double p = std::sqrt(2.0 * std::numbers::pi) / lambda * s;
        return std::clamp(1.0 - p, 0.0, 1.0);
    }
    double s = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double t = (j % 2 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        s += t;
        if (std::fabs(t) < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptyInputError("ks_two_sample: empty sample");
    for (double v : a)
        if (!std::isfinite(v)) throw InvalidParamsError("ks_two_sample: non-finite value");
    for (double v : b)
        if (!std::isfinite(v)) throw InvalidParamsError("ks_two_sample: non-finite value");

    std::vector<double> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const std::size_t n1 = sa.size(), n2 = sb.size();

    // Track n1*n2*(ECDF_a - ECDF_b) as an exact integer; record the extremum
    // only after consuming every observation tied at the current value.
    long long diff = 0, maxdiff = 0;
    std::size_t i = 0, j = 0;
    while (i < n1 || j < n2) {
        double x;
        if (j >= n2 || (i < n1 && sa[i] <= sb[j]))
            x = sa[i];
        else
            x = sb[j];
        while (i < n1 && sa[i] == x) {
            diff += static_cast<long long>(n2);
            ++i;
        }
        while (j < n2 && sb[j] == x) {
            diff -= static_cast<long long>(n1);
            ++j;
        }
        maxdiff = std::max(maxdiff, std::llabs(diff));
    }

    KsResult res;
    res.n1 = n1;
    res.n2 = n2;
    res.statistic = static_cast<double>(maxdiff) / (static_cast<double>(n1) * n2);
    const double neff = static_cast<double>(n1) * n2 / (static_cast<double>(n1) + n2);
    res.p_value = kolmogorov_q(std::sqrt(neff) * res.statistic);
    return res;
}

KsSimResult ks_simulation(const std::vector<double>& empirical, const ModelSampler& sampler,
                          int n_reps, std::uint64_t seed, std::size_t sample_size) {
    if (empirical.empty()) throw EmptyInputError("ks_simulation: empty empirical sample");
    if (n_reps <= 0) throw InvalidParamsError("ks_simulation: n_reps must be positive");
    if (!sampler) throw InvalidParamsError("ks_simulation: null sampler");

    const std::size_t m = sample_size ? sample_size : empirical.size();
    KsSimResult res;
    res.n_reps = n_reps;
    double sum = 0.0;
    for (int rep = 0; rep < n_reps; ++rep) {
        const std::uint64_t rep_seed = mix64(mix64(seed) ^ static_cast<std::uint64_t>(rep + 1));
        const std::vector<double> synth = sampler(m, rep_seed);
        const KsResult ks = ks_two_sample(empirical, synth);
        sum += ks.statistic;
        if (ks.p_value < 0.01) ++res.reject_1pct;
        if (ks.p_value < 0.05) ++res.reject_5pct;
        if (ks.p_value < 0.10) ++res.reject_10pct;
    }
    res.mean_statistic = sum / n_reps;
    return res;
}

}  // namespace fattails
