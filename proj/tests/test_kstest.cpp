// test_kstest.cpp
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fattails/dist.hpp"
#include "fattails/errors.hpp"
#include "fattails/kstest.hpp"
#include "fattails/rng.hpp"
#include "oracles.hpp"

using namespace fattails;

TEST_CASE("ks statistic on the worked example") {
    // ECDFs of {0,1,2} and {0.5,1.5} differ by at most 1/3
    const auto r = ks_two_sample({0.0, 1.0, 2.0}, {0.5, 1.5});
    CHECK(r.statistic == 1.0 / 3.0);
    CHECK(r.n1 == 3);
    CHECK(r.n2 == 2);
}

TEST_CASE("ks statistic edge cases") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(ks_two_sample(a, a).statistic == 0.0);
    CHECK(ks_two_sample(a, a).p_value == 1.0);
    // disjoint supports: D = 1
    CHECK(ks_two_sample({1.0, 2.0}, {5.0, 6.0, 7.0}).statistic == 1.0);
    // ties across samples
    CHECK(ks_two_sample({1.0, 1.0, 2.0}, {1.0, 2.0, 2.0}).statistic == 1.0 / 3.0);
    CHECK_THROWS_AS(ks_two_sample({}, a), EmptyInputError);
    CHECK_THROWS_AS(ks_two_sample(a, {}), EmptyInputError);
    CHECK_THROWS_AS(ks_two_sample({std::nan("")}, a), InvalidParamsError);
}

TEST_CASE("ks statistic equals brute force on random small samples") {
    Rng rng(123);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n1 = 1 + static_cast<std::size_t>(rng.uniform() * 40);
        const std::size_t n2 = 1 + static_cast<std::size_t>(rng.uniform() * 40);
        std::vector<double> a(n1), b(n2);
        // coarse grid induces plenty of ties
        for (double& v : a) v = std::floor(rng.uniform() * 8.0) / 2.0;
        for (double& v : b) v = std::floor(rng.uniform() * 8.0) / 2.0;
        const double want = oracle::ks_brute(a, b);
        CHECK(ks_two_sample(a, b).statistic == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("kolmogorov_q matches the series reference values") {
    // 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2), mpmath
    CHECK(kolmogorov_q(0.3) == doctest::Approx(0.9999906941986654).epsilon(1e-12));
    CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
    CHECK(kolmogorov_q(0.8) == doctest::Approx(0.5441424115741981).epsilon(1e-12));
    CHECK(kolmogorov_q(1.0) == doctest::Approx(0.2699996716773545).epsilon(1e-12));
    CHECK(kolmogorov_q(1.2) == doctest::Approx(0.1122496666707250).epsilon(1e-12));
    CHECK(kolmogorov_q(1.5) == doctest::Approx(0.0222179626165251).epsilon(1e-12));
    CHECK(kolmogorov_q(2.0) == doctest::Approx(0.0006709252557797).epsilon(1e-9));
    // continuity across the series crossover (slope ~0.1, so +-1e-9 moves Q by ~2e-10)
    CHECK(kolmogorov_q(0.4 - 1e-9) == doctest::Approx(kolmogorov_q(0.4 + 1e-9)).epsilon(1e-7));
    CHECK(kolmogorov_q(0.0) == 1.0);
    CHECK(kolmogorov_q(-1.0) == 1.0);
}

TEST_CASE("matched-model p-values are approximately uniform") {
    // 200 replications of N(0,1) vs N(0,1), n = 10^4 each side.
    const int reps = 200;
    const std::size_t n = 10000;
    std::vector<double> pvals(reps);
    for (int i = 0; i < reps; ++i) {
        const auto a = sample_normal(n, {0.0, 1.0}, derive_seed(55, "unif", "a", i));
        const auto b = sample_normal(n, {0.0, 1.0}, derive_seed(55, "unif", "b", i));
        pvals[i] = ks_two_sample(a, b).p_value;
    }
    std::sort(pvals.begin(), pvals.end());
    double d = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double lo = static_cast<double>(i) / reps;
        const double hi = static_cast<double>(i + 1) / reps;
        d = std::max({d, std::fabs(pvals[i] - lo), std::fabs(pvals[i] - hi)});
    }
    CHECK(d < 0.115);  // one-sample KS 1% critical distance at n=200
}

TEST_CASE("ks_simulation accepts the matched model and rejects a wrong one") {
    const auto empirical = sample_normal(4000, {0.0, 1.0}, 777);
    const ModelSampler normal_model = [](std::size_t n, std::uint64_t seed) {
        return sample_normal(n, {0.0, 1.0}, seed);
    };
    const ModelSampler fat_model = [](std::size_t n, std::uint64_t seed) {
        return sample_studentt(n, {2.0, 0.0, 1.0}, seed);
    };

    const KsSimResult ok = ks_simulation(empirical, normal_model, 100, 31);
    CHECK(ok.n_reps == 100);
    CHECK(ok.reject_1pct <= ok.reject_5pct);
    CHECK(ok.reject_5pct <= ok.reject_10pct);
    CHECK(ok.reject_1pct <= 10);
    CHECK(ok.mean_statistic < 0.05);

    const KsSimResult bad = ks_simulation(empirical, fat_model, 100, 37);
    CHECK(bad.reject_1pct >= 95);

    // determinism
    const KsSimResult again = ks_simulation(empirical, normal_model, 100, 31);
    CHECK(again.mean_statistic == ok.mean_statistic);
    CHECK(again.reject_1pct == ok.reject_1pct);

    // explicit sample size is honored
    const KsSimResult small = ks_simulation(empirical, normal_model, 10, 41, 500);
    CHECK(small.n_reps == 10);

    CHECK_THROWS_AS(ks_simulation({}, normal_model, 10, 1), EmptyInputError);
    CHECK_THROWS_AS(ks_simulation(empirical, normal_model, 0, 1), InvalidParamsError);
}
