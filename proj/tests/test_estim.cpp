// test_estim.cpp
#include <doctest.h>

#include <cmath>
#include <variant>
#include <vector>

#include "fattails/dist.hpp"
#include "fattails/errors.hpp"
#include "fattails/estim.hpp"

using namespace fattails;

TEST_CASE("percentile uses linear rank interpolation") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(percentile(x, 0.0) == 1.0);
    CHECK(percentile(x, 100.0) == 5.0);
    CHECK(percentile(x, 50.0) == 3.0);
    CHECK(percentile(x, 5.0) == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(percentile(x, 95.0) == doctest::Approx(4.8).epsilon(1e-14));
    CHECK(percentile({3.0, 1.0}, 75.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK_THROWS_AS(percentile({}, 50.0), EmptyInputError);
    CHECK_THROWS_AS(percentile(x, -1.0), InvalidParamsError);
    CHECK_THROWS_AS(percentile(x, 101.0), InvalidParamsError);
}

TEST_CASE("quantile-method start matches the reference implementation") {
    // frozen against an independent table-interpolation implementation of the
    // same quantile estimator, evaluated on these exact draws
    {
        const auto x = sample_stable(20000, {1.5, 0.5, 1.0, 0.0}, 9001);
        const auto m = mcculloch_initial(x);
        CHECK(m.alpha == doctest::Approx(1.53474857666166).epsilon(1e-12));
        CHECK(m.beta == doctest::Approx(0.571752902521572).epsilon(1e-12));
        CHECK(m.gamma == doctest::Approx(1.02288447987217).epsilon(1e-12));
        CHECK(m.delta == doctest::Approx(0.00611728968322023).epsilon(1e-9));
    }
    {
        const auto x = sample_stable(20000, {1.8, -0.3, 2.0, 1.0}, 9011);
        const auto m = mcculloch_initial(x);
        CHECK(m.alpha == doctest::Approx(1.8131325089629).epsilon(1e-12));
        CHECK(m.beta == doctest::Approx(-0.257142649684503).epsilon(1e-12));
        CHECK(m.gamma == doctest::Approx(1.99511256003412).epsilon(1e-12));
        CHECK(m.delta == doctest::Approx(1.00828064452356).epsilon(1e-12));
    }
    {
        const auto x = sample_stable(20000, {1.1, 0.9, 0.5, -2.0}, 9021);
        const auto m = mcculloch_initial(x);
        CHECK(m.alpha == doctest::Approx(1.11154630803125).epsilon(1e-12));
        CHECK(m.beta == doctest::Approx(0.97511993544955).epsilon(1e-12));
        CHECK(m.gamma == doctest::Approx(0.482943540708045).epsilon(1e-12));
        CHECK(m.delta == doctest::Approx(-2.19590634271035).epsilon(1e-12));
    }
}

TEST_CASE("quantile-method start on symmetric data has zero skew") {
    std::vector<double> x;
    for (int i = 1; i <= 999; ++i) x.push_back(std::tan(3.14159265358979 * (i / 1000.0 - 0.5)));
    const auto m = mcculloch_initial(x);
    CHECK(std::fabs(m.beta) < 1e-12);
    CHECK(m.alpha == doctest::Approx(1.0).epsilon(0.08));
    CHECK(m.delta == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
    CHECK_THROWS_AS(mcculloch_initial(std::vector<double>(50, 3.0)), ZeroVarianceError);
    CHECK_THROWS_AS(mcculloch_initial({}), EmptyInputError);
}

TEST_CASE("fit_normal computes moments and loglik") {
    const auto two = fit_normal({-1.0, 1.0});
    const auto pn = std::get<NormalParams>(two.params);
    CHECK(pn.mu == 0.0);
    CHECK(pn.sigma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(two.converged);

    const auto four = fit_normal({-1.0, 0.0, 1.0, 2.0});
    const auto p4 = std::get<NormalParams>(four.params);
    CHECK(p4.mu == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p4.sigma == doctest::Approx(1.2909944487358056).epsilon(1e-14));
    REQUIRE(four.loglik.has_value());
    CHECK(*four.loglik == doctest::Approx(-6.1974053803506723).epsilon(1e-13));

    CHECK_THROWS_AS(fit_normal({1.0}), TooShortError);
    CHECK_THROWS_AS(fit_normal({2.0, 2.0, 2.0}), ZeroVarianceError);
}

TEST_CASE("fit_normal Monte-Carlo recovery") {
    const auto x = sample_normal(100000, {0.5, 2.0}, 1201);
    const auto f = fit_normal(x);
    const auto p = std::get<NormalParams>(f.params);
    CHECK(p.mu == doctest::Approx(0.5).epsilon(0.04));
    CHECK(p.sigma == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("fit_studentt recovers heavy-tailed parameters") {
    const StudentTParams truth{2.75, 0.000394, 0.009835};
    const auto x = sample_studentt(100000, truth, 90000);
    const auto f = fit_studentt(x);
    REQUIRE(f.converged);
    const auto p = std::get<StudentTParams>(f.params);
    CHECK(p.nu == doctest::Approx(2.75).epsilon(0.15 / 2.75));
    // 3 standard errors of the location, se ~ sd/sqrt(n) with sd = sigma sqrt(nu/(nu-2))
    CHECK(std::fabs(p.mu - truth.mu) < 3.0 * 0.0188 / std::sqrt(100000.0));
    CHECK(p.sigma == doctest::Approx(truth.sigma).epsilon(0.02));
    REQUIRE(f.loglik.has_value());

    CHECK_THROWS_AS(fit_studentt({1, 2, 3, 4, 5, 6, 7, 8, 9}), TooShortError);
    CHECK_THROWS_AS(fit_studentt(std::vector<double>(64, 1.0)), ZeroVarianceError);
}

TEST_CASE("fit_studentt on normal data drifts to the large-nu boundary") {
    const auto x = sample_normal(100000, {0.0, 1.0}, 424242);
    const auto f = fit_studentt(x);
    const auto p = std::get<StudentTParams>(f.params);
    CHECK(p.nu >= 50.0);
    CHECK(p.sigma == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("fit_studentt weakly dominates the Gaussian limit") {
    const auto x = sample_studentt(20000, {4.0, 0.0, 1.0}, 1301);
    const auto t = fit_studentt(x);
    const auto n = fit_normal(x);
    const auto pn = std::get<NormalParams>(n.params);
    // loglik of the normal-moment parameters under t with nu = 200
    double cap_ll = 0.0;
    for (double v : x) cap_ll += std::log(studentt_pdf(v, {200.0, pn.mu, pn.sigma}));
    CHECK(*t.loglik >= cap_ll - 1e-6);
    CHECK(*t.loglik >= *n.loglik - 1e-6);
}

TEST_CASE("fit_studentt is affine equivariant within estimator noise") {
    const auto x = sample_studentt(100000, {3.5, 0.2, 1.3}, 1409);
    std::vector<double> y;
    for (double v : x) y.push_back(2.5 * v - 7.0);
    const auto fx = std::get<StudentTParams>(fit_studentt(x).params);
    const auto fy = std::get<StudentTParams>(fit_studentt(y).params);
    CHECK(fy.nu == doctest::Approx(fx.nu).epsilon(0.02));
    CHECK(fy.mu == doctest::Approx(2.5 * fx.mu - 7.0).epsilon(0.02));
    CHECK(fy.sigma == doctest::Approx(2.5 * fx.sigma).epsilon(0.02));
}

TEST_CASE("stable regression fit recovers symmetric heavy tails") {
    const auto x = sample_stable(100000, {1.5265, 0.0, 0.008, 0.0}, 50000);
    const auto f = fit_stable_koutrouvelis(x);
    CHECK(f.converged);
    CHECK(f.iterations <= 10);
    const auto p = std::get<StableParams>(f.params);
    CHECK(p.alpha == doctest::Approx(1.5265).epsilon(0.05 / 1.5265));
    CHECK(p.gamma == doctest::Approx(0.008).epsilon(0.05));
    CHECK(std::fabs(p.beta) <= 0.1);
    CHECK(std::fabs(p.delta) <= 0.0005);
    CHECK_FALSE(f.loglik.has_value());
}

TEST_CASE("stable regression fit recovers skewed parameters") {
    const auto x = sample_stable(100000, {1.3, 0.5, 2.0, -1.0}, 50007);
    const auto f = fit_stable_koutrouvelis(x);
    const auto p = std::get<StableParams>(f.params);
    CHECK(p.alpha == doctest::Approx(1.3).epsilon(0.05 / 1.3));
    CHECK(p.beta == doctest::Approx(0.5).epsilon(0.2));
    CHECK(p.gamma == doctest::Approx(2.0).epsilon(0.05));
    CHECK(p.delta == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("stable regression fit on Gaussian data reaches the boundary") {
    const auto x = sample_normal(100000, {0.0, 1.0}, 31337);
    const auto f = fit_stable_koutrouvelis(x);
    const auto p = std::get<StableParams>(f.params);
    CHECK(p.alpha >= 1.95);
    CHECK(std::fabs(p.beta) <= 0.1);
    // N(0, 1) corresponds to scale 1/sqrt(2)
    CHECK(p.gamma == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("stable regression output always satisfies the parameter box") {
    // adversarial inputs: uniform grid, near-degenerate spike plus outlier
    std::vector<double> uniform;
    for (int i = 0; i < 1000; ++i) uniform.push_back(i * 0.001);
    std::vector<double> spike(400, 0.0);
    for (int i = 0; i < 400; ++i) spike[i] = (i % 7) * 1e-6;
    spike.push_back(1e6);
    for (const auto& data : {uniform, spike}) {
        const auto f = fit_stable_koutrouvelis(data);
        const auto p = std::get<StableParams>(f.params);
        CHECK_NOTHROW(validate(p));
        CHECK(p.alpha <= 2.0);
        CHECK(p.alpha > 0.0);
        CHECK(std::fabs(p.beta) <= 1.0);
        CHECK(p.gamma > 0.0);
    }
    CHECK_THROWS_AS(fit_stable_koutrouvelis(std::vector<double>(199, 1.0)), TooShortError);
}

TEST_CASE("stable regression fit is affine equivariant within noise") {
    const auto x = sample_stable(100000, {1.6, 0.3, 1.0, 0.5}, 1511);
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v + 2.0);
    const auto fx = std::get<StableParams>(fit_stable_koutrouvelis(x).params);
    const auto fy = std::get<StableParams>(fit_stable_koutrouvelis(y).params);
    CHECK(fy.alpha == doctest::Approx(fx.alpha).epsilon(0.02));
    CHECK(std::fabs(fy.beta - fx.beta) < 0.05);
    CHECK(fy.gamma == doctest::Approx(3.0 * fx.gamma).epsilon(0.02));
    CHECK(fy.delta == doctest::Approx(3.0 * fx.delta + 2.0).epsilon(0.05));
}
