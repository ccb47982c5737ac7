// kstest.hpp
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace fattails {

struct KsResult {
    double statistic = 0.0;  // sup_x |ECDF_a(x) - ECDF_b(x)|
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

// Exact two-sample Kolmogorov-Smirnov statistic via a merged sweep over both
// sorted samples.  The running ECDF gap is tracked in integer units of
// 1/(n1*n2), so ties cost no precision.  The p-value is asymptotic:
// Q_ks(sqrt(n1*n2/(n1+n2)) * D).
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

// Upper tail of the Kolmogorov distribution,
//   Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2),
// evaluated through the dual theta series for small lambda.
double kolmogorov_q(double lambda);

struct KsSimResult {
    double mean_statistic = 0.0;
    int reject_1pct = 0;
    int reject_5pct = 0;
    int reject_10pct = 0;
    int n_reps = 0;
};

// sampler(n, seed) must return n model draws for the given seed.
using ModelSampler = std::function<std::vector<double>(std::size_t, std::uint64_t)>;

// Monte-Carlo model adequacy check: draw n_reps synthetic samples, KS-test
// each against the empirical series, count rejections at p < 1%/5%/10%.
// sample_size 0 means "match the empirical length".  Replication seeds are
// derived deterministically from `seed`.
KsSimResult ks_simulation(const std::vector<double>& empirical, const ModelSampler& sampler,
                          int n_reps, std::uint64_t seed, std::size_t sample_size = 0);

}  // namespace fattails
