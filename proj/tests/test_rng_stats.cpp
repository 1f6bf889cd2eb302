#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "volterra/noise.hpp"
#include "volterra/rng.hpp"
#include "volterra/stats.hpp"

using namespace volterra;

TEST_CASE("streams are reproducible and derivation is stable") {
    RngStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream parent(42);
    const auto before = RngStream(42).next_u64();
    RngStream child = parent.derive(7);
    CHECK(parent.next_u64() == before);  // derive does not disturb the parent

    // same (root, path) gives the same child regardless of parent usage
    RngStream parent2(42);
    for (int i = 0; i < 5; ++i) parent2.next_u64();
    RngStream child2 = parent2.derive(7);
    CHECK(child.next_u64() == child2.next_u64());

    // distinct path elements give distinct streams
    CHECK(RngStream(42).derive(1).next_u64() !=
          RngStream(42).derive(2).next_u64());
    CHECK(RngStream(1).next_u64() != RngStream(2).next_u64());
}

TEST_CASE("uniform output stays inside the open interval") {
    RngStream s(9);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("gaussian moments match the standard normal") {
    RngStream s(123);
    const int n = 200000;
    std::vector<double> x(n);
    s.fill_gaussian(x);
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean(x)) < 4 * se);
    CHECK(std::abs(variance(x) - 1.0) < 4 * std::sqrt(2.0) * se);
    CHECK(std::abs(central_moment(x, 3)) < 4 * std::sqrt(15.0) * se);
    CHECK(std::abs(central_moment(x, 4) - 3.0) < 4 * std::sqrt(96.0) * se);
}

TEST_CASE("exact moments of the standardized laws") {
    CHECK(noise_moment(NoiseLaw::Gaussian, 4) == Rational(3));
    CHECK(noise_moment(NoiseLaw::Gaussian, 6) == Rational(15));
    CHECK(noise_moment(NoiseLaw::Gaussian, 3) == Rational(0));
    CHECK(noise_moment(NoiseLaw::Rademacher, 2) == Rational(1));
    CHECK(noise_moment(NoiseLaw::Rademacher, 4) == Rational(1));
    CHECK(noise_moment(NoiseLaw::Rademacher, 5) == Rational(0));
    // uniform on [-sqrt(3), sqrt(3)]: mu_{2m} = 3^m / (2m+1)
    CHECK(noise_moment(NoiseLaw::CenteredUniform, 2) == Rational(1));
    CHECK(noise_moment(NoiseLaw::CenteredUniform, 4) == Rational(9, 5));
    CHECK(noise_moment(NoiseLaw::CenteredUniform, 6) == Rational(27, 7));
    // Exp(1) - 1: mu_3 = 2, mu_4 = 9
    CHECK(noise_moment(NoiseLaw::ShiftedExponential, 3) == Rational(2));
    CHECK(noise_moment(NoiseLaw::ShiftedExponential, 4) == Rational(9));
    for (auto law :
         {NoiseLaw::Gaussian, NoiseLaw::Rademacher, NoiseLaw::CenteredUniform,
          NoiseLaw::ShiftedExponential}) {
        CHECK(noise_moment(law, 0) == Rational(1));
        CHECK(noise_moment(law, 1) == Rational(0));
        CHECK(noise_moment(law, 2) == Rational(1));
    }
}

TEST_CASE("sampled moments agree with the exact table") {
    const int n = 400000;
    for (auto law :
         {NoiseLaw::Gaussian, NoiseLaw::Rademacher, NoiseLaw::CenteredUniform,
          NoiseLaw::ShiftedExponential}) {
        RngStream s(2026);
        std::vector<double> x(n);
        sample_noise(law, s, x);
        for (int p = 1; p <= 5; ++p) {
            double acc = 0.0;
            for (double v : x) acc += std::pow(v, p);
            acc /= n;
            const double exact = to_double(noise_moment(law, p));
            // SE of the p-th raw moment from the 2p-th moment
            const double m2p = to_double(noise_moment(law, 2 * p));
            const double se =
                std::sqrt(std::max(m2p - exact * exact, 0.0) / n);
            CHECK(std::abs(acc - exact) < 5 * se + 1e-12);
        }
    }
}

TEST_CASE("noise law names round-trip") {
    for (auto law :
         {NoiseLaw::Gaussian, NoiseLaw::Rademacher, NoiseLaw::CenteredUniform,
          NoiseLaw::ShiftedExponential})
        CHECK(noise_law_from_string(to_string(law)) == law);
    CHECK_THROWS_AS(noise_law_from_string("cauchy"), std::invalid_argument);
}

TEST_CASE("moment vectors fail loudly beyond the supplied order") {
    const MomentVector mv = MomentVector::of(NoiseLaw::Gaussian, 6);
    CHECK(mv.max_order() == 6);
    CHECK(mv.standardized());
    CHECK(mv[6] == Rational(15));
    CHECK_THROWS_AS(mv[7], std::out_of_range);
    CHECK_THROWS_AS(MomentVector({Rational(2)}), std::invalid_argument);
}

TEST_CASE("pairwise summation is accurate on a large power-law sum") {
    const int n = 1 << 18;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = std::pow(static_cast<double>(i + 1), -1.1);
    // reference: long double accumulation
    long double acc = 0.0L;
    for (int i = n - 1; i >= 0; --i) acc += x[i];
    CHECK(pairwise_sum(x) ==
          doctest::Approx(static_cast<double>(acc)).epsilon(1e-14));
    CHECK(mean(x) ==
          doctest::Approx(static_cast<double>(acc) / n).epsilon(1e-14));
}

TEST_CASE("variance and central moments on a hand-checked sample") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    CHECK(mean(x) == doctest::Approx(2.5));
    CHECK(variance(x) == doctest::Approx(5.0 / 3.0));  // unbiased
    CHECK(central_moment(x, 2) == doctest::Approx(1.25));
    CHECK(central_moment(x, 3) == doctest::Approx(0.0));
}

TEST_CASE("log-log fit recovers a planted slope") {
    std::vector<double> x, y;
    for (int i = 1; i <= 8; ++i) {
        x.push_back(static_cast<double>(i));
        y.push_back(3.0 * std::pow(static_cast<double>(i), 2.5));
    }
    const SlopeFit fit = fit_loglog_slope(x, y);
    CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(fit.ci_halfwidth < 1e-10);

    CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2, 3},
                                     std::vector<double>{1, 2, 3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2, 3, 4},
                                     std::vector<double>{1, 2, -3, 4}),
                    std::invalid_argument);
}

TEST_CASE("linear fit is exact on a line") {
    const std::vector<double> x = {0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v - 1.0);
    const SlopeFit fit = fit_linear(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(fit.intercept == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("two-sample KS separates shifted samples only") {
    RngStream s(7);
    const int n = 4000;
    std::vector<double> a(n), b(n), c(n);
    s.fill_gaussian(a);
    s.fill_gaussian(b);
    for (int i = 0; i < n; ++i) c[i] = b[i] + 0.5;
    CHECK_FALSE(ks_two_sample(a, b).rejected_1pct);
    CHECK(ks_two_sample(a, c).rejected_1pct);
}

TEST_CASE("normality test accepts gaussian and rejects exponential data") {
    RngStream s(11);
    const int n = 2000;
    std::vector<double> g(n), e(n);
    s.fill_gaussian(g);
    for (auto& v : e) v = -std::log(s.next_uniform()) - 1.0;
    CHECK_FALSE(anderson_darling_normal(g).rejected_1pct);
    CHECK(anderson_darling_normal(e).rejected_1pct);
    CHECK_THROWS_AS(anderson_darling_normal({1, 2, 3}), std::invalid_argument);
}

TEST_CASE("bootstrap interval brackets the plug-in mean") {
    RngStream s(5);
    std::vector<double> x(500);
    s.fill_gaussian(x);
    const auto ci = bootstrap_ci(
        x, [](std::span<const double> v) { return mean(v); }, 400,
        RngStream(99));
    CHECK(ci.lo <= ci.estimate);
    CHECK(ci.estimate <= ci.hi);
    CHECK(ci.hi - ci.lo < 0.5);
    CHECK(ci.hi - ci.lo > 0.01);
}

TEST_CASE("normal cdf reference points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(-8.0) < 1e-14);
}
