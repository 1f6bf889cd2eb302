#include <cmath>
#include <vector>

#include "doctest.h"
#include "volterra/kernel.hpp"
#include "volterra/simulate.hpp"
#include "volterra/stats.hpp"

using namespace volterra;

namespace {

const NoiseSpec gauss2 = NoiseSpec::make(NoiseLaw::Gaussian, 2);
const NoiseSpec sexp3 = NoiseSpec::make(NoiseLaw::ShiftedExponential, 3);

}  // namespace

TEST_CASE("order-1 path is a moving average of the innovations") {
    const auto weights = TruncatedKernel::from_function(
        1, 3, [](std::span<const int> i) { return 1.0 / i[0]; });
    const auto path = simulate_path(weights, gauss2, 5, 77);
    for (int n = 1; n <= 5; ++n) {
        double expect = 0.0;
        for (int i = 1; i <= 3; ++i) expect += path.eps_at(n - i) / i;
        CHECK(path.X[static_cast<std::size_t>(n - 1)] ==
              doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("order-2 path matches the hand-expanded quadratic form") {
    const auto a = TruncatedKernel::from_function(
        2, 2, [](std::span<const int> i) {
            return static_cast<double>(i[0] + 10 * i[1]);
        });
    const auto path = simulate_path(a, sexp3, 4, 5);
    for (int n = 1; n <= 4; ++n) {
        double expect = 0.0;
        for (int i1 = 1; i1 <= 2; ++i1)
            for (int i2 = 1; i2 <= 2; ++i2)
                expect += (i1 + 10.0 * i2) * path.eps_at(n - i1) *
                          path.eps_at(n - i2);
        CHECK(path.X[static_cast<std::size_t>(n - 1)] ==
              doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("simulation is bitwise reproducible and path-indexed") {
    const auto a =
        TruncatedKernel::from_kernel(Kernel::power_sum(2, -1.2), 8);
    const auto p1 = simulate_path(a, gauss2, 16, 99, 3);
    const auto p2 = simulate_path(a, gauss2, 16, 99, 3);
    CHECK(p1.X == p2.X);
    CHECK(p1.eps == p2.eps);
    const auto p3 = simulate_path(a, gauss2, 16, 99, 4);
    CHECK(p1.X != p3.X);
    // innovations can be drawn independently of the simulation
    CHECK(draw_innovations(gauss2, 16, 8, 99, 3) == p1.eps);
}

TEST_CASE("exact mean by the partition formula") {
    // order 2: E X = mu_2 sum_i a(i, i)
    const auto a2 =
        TruncatedKernel::from_kernel(Kernel::power_sum(2, -1.2), 8);
    double diag = 0.0;
    for (int i = 1; i <= 8; ++i) diag += a2.at({i, i});
    CHECK(exact_mean(a2, gauss2) == doctest::Approx(diag).epsilon(1e-13));

    // order 3, symmetric noise: every partition carries an odd moment
    const auto a3 =
        TruncatedKernel::from_kernel(Kernel::power_sum(3, -1.9), 4);
    CHECK(exact_mean(a3, NoiseSpec::make(NoiseLaw::Gaussian, 3)) == 0.0);

    // order 3, skewed noise, a = 1 on {1,2}^3: E X = mu_3 sum_i a(i,i,i) = 4
    const auto ones3 = TruncatedKernel::from_function(
        3, 2, [](std::span<const int>) { return 1.0; });
    CHECK(exact_mean(ones3, sexp3) == doctest::Approx(4.0).epsilon(1e-13));

    // Monte Carlo cross-check on a non-trivial kernel and skewed noise
    const auto a2s =
        TruncatedKernel::from_kernel(Kernel::power_sum(2, -1.2), 6);
    const NoiseSpec noise = NoiseSpec::make(NoiseLaw::ShiftedExponential, 2);
    const int paths = 20000;
    std::vector<double> x0(paths);
    for (int p = 0; p < paths; ++p)
        x0[static_cast<std::size_t>(p)] =
            simulate_path(a2s, noise, 1, 1234, static_cast<std::uint64_t>(p))
                .X[0];
    const double se = std::sqrt(variance(x0) / paths);
    CHECK(std::abs(mean(x0) - exact_mean(a2s, noise)) < 5 * se);
}

TEST_CASE("closed-form mean of the power-sum family matches the table route") {
    for (int k : {1, 2, 3}) {
        const auto table =
            TruncatedKernel::from_kernel(Kernel::power_sum(k, -0.6 * k - 0.3),
                                         6);
        const double direct = exact_mean(table, sexp3);
        const double fast =
            exact_mean_powersum(1.0, -0.6 * k - 0.3, k, 6, sexp3);
        CHECK(fast == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("term paths add up to the centered path") {
    struct Case {
        Kernel kernel;
        NoiseSpec noise;
    };
    const Case cases[] = {
        {Kernel::power_sum(2, -1.2), gauss2},
        {Kernel::power_sum(2, -1.2), NoiseSpec::make(NoiseLaw::Rademacher, 2)},
        {Kernel::ratio_form({0.3, 0.3, 0.3}, 2.6), sexp3},
        {Kernel::product_power({-0.7, -0.8}),
         NoiseSpec::make(NoiseLaw::CenteredUniform, 2)},
    };
    for (const auto& tc : cases) {
        const int M = 4, N = 8;
        const auto table = TruncatedKernel::from_kernel(tc.kernel, M);
        const auto path = simulate_path(table, tc.noise, N, 31);
        const auto terms =
            enumerate_terms(table.order(), tc.noise.moments);
        const auto pieces = decompose_path(table, path, terms, tc.noise);
        REQUIRE(pieces.size() == terms.size());
        const double mu = exact_mean(table, tc.noise);
        for (int n = 0; n < N; ++n) {
            double total = 0.0;
            for (const auto& piece : pieces)
                total += piece[static_cast<std::size_t>(n)];
            const double centered = path.X[static_cast<std::size_t>(n)] - mu;
            CHECK(total == doctest::Approx(centered).epsilon(1e-9));
        }
    }
}

TEST_CASE("exponential-sum approximation of the power weight") {
    for (double alpha : {-0.7, -1.2, -1.9}) {
        const auto approx = ExpSumApprox::fit(alpha);
        CHECK(approx.max_rel_error(alpha) < 5e-6);
        for (double m : {1.0, 7.0, 1000.0})
            CHECK(approx.eval(m) ==
                  doctest::Approx(std::pow(m, alpha)).epsilon(1e-5));
    }
}

TEST_CASE("factorized fast path agrees with direct summation") {
    for (int k : {1, 2, 3}) {
        const double alpha = -0.6 * k - 0.3;
        const int M = 16, N = 50;
        const auto table =
            TruncatedKernel::from_kernel(Kernel::power_sum(k, alpha), M);
        const auto direct = simulate_path(table, gauss2, N, 2024);
        const auto fast =
            simulate_powersum_path(1.0, alpha, k, M, gauss2, N, 2024);
        CHECK(fast.eps == direct.eps);
        for (int n = 0; n < N; ++n)
            CHECK(fast.X[static_cast<std::size_t>(n)] ==
                  doctest::Approx(direct.X[static_cast<std::size_t>(n)])
                      .epsilon(1e-9));
    }
}

TEST_CASE("partial sums match the cumulative centered path") {
    const double alpha = -1.2;
    const int k = 2, M = 32;
    const std::vector<int> horizons = {4, 16, 60};
    const auto S =
        powersum_partial_sums(1.0, alpha, k, M, gauss2, horizons, 55, 2);
    const auto path = simulate_powersum_path(1.0, alpha, k, M, gauss2, 60, 55, 2);
    const double mu = exact_mean_powersum(1.0, alpha, k, M, gauss2);
    double acc = 0.0;
    std::size_t idx = 0;
    for (int n = 1; n <= 60; ++n) {
        acc += path.X[static_cast<std::size_t>(n - 1)] - mu;
        if (idx < horizons.size() && n == horizons[idx]) {
            CHECK(S[idx] == doctest::Approx(acc).epsilon(1e-10));
            ++idx;
        }
    }
    CHECK(idx == horizons.size());
}

TEST_CASE("off-diagonal polynomial forms") {
    // order 1: plain weighted sum
    const auto h1 = TruncatedKernel::from_function(
        1, 3, [](std::span<const int> i) { return 2.0 * i[0]; });
    const std::vector<double> eps = {0.5, -1.5, 2.0};
    CHECK(discrete_chaos(h1, eps) ==
          doctest::Approx(2.0 * 0.5 - 4.0 * 1.5 + 6.0 * 2.0));

    // order 2 with a single off-diagonal entry
    const auto h2 = TruncatedKernel::from_function(
        2, 2, [](std::span<const int> i) {
            return (i[0] == 1 && i[1] == 2) ? 1.0 : 0.0;
        });
    const std::vector<double> e2 = {3.0, -2.0};
    CHECK(discrete_chaos(h2, e2) == doctest::Approx(-6.0));
    CHECK(chaos_variance(h2) == doctest::Approx(1.0));

    // symmetrization leaves the off-diagonal form unchanged
    const auto h2s = h2.symmetrized();
    CHECK(discrete_chaos(h2s, e2) == doctest::Approx(discrete_chaos(h2, e2)));
    CHECK(chaos_variance(h2s) == doctest::Approx(chaos_variance(h2)));

    // isometry: the sample variance over gaussian draws matches k! sum' h~^2
    const auto h = TruncatedKernel::from_kernel(Kernel::power_sum(2, -1.2), 6);
    const int draws = 40000;
    std::vector<double> q(draws);
    RngStream stream(314);
    std::vector<double> e(6);
    for (int i = 0; i < draws; ++i) {
        stream.fill_gaussian(e);
        q[static_cast<std::size_t>(i)] = discrete_chaos(h, e);
    }
    const double v = variance(q);
    const double target = chaos_variance(h);
    // SE of the variance of a fourth-moment-heavy statistic
    const double se = std::sqrt((central_moment(q, 4) - v * v) / draws);
    CHECK(std::abs(mean(q)) < 5 * std::sqrt(v / draws));
    CHECK(std::abs(v - target) < 5 * se);
}

TEST_CASE("square-summability screens") {
    CHECK(check_l2_power_bounds({-0.6, -0.7}).well_defined);
    CHECK_FALSE(check_l2_power_bounds({-0.4, -0.7}).well_defined);

    // compactly supported table: every partial sum is eventually constant
    const auto report = check_l2_tabulated(
        2,
        [](std::span<const int> i) {
            return (i[0] <= 8 && i[1] <= 8)
                       ? 1.0 / static_cast<double>(i[0] + i[1])
                       : 0.0;
        },
        {16, 32, 64, 128}, 0.03);
    CHECK(report.well_defined);
    CHECK_FALSE(report.conclusive);  // truncations probe, they never decide
    // conditions: two square sums plus one scalar diagonal condition
    CHECK(report.entries.size() == 3);
    for (const auto& e : report.entries) {
        CHECK_FALSE(e.divergent);
        CHECK_FALSE(e.skipped);
    }

    // constant table: every condition grows polynomially and is flagged
    const auto bad = check_l2_tabulated(
        2, [](std::span<const int>) { return 1.0; }, {16, 32, 64, 128}, 0.03);
    CHECK_FALSE(bad.well_defined);
    for (const auto& e : bad.entries) CHECK(e.divergent);

    // the budget guard skips rather than stalls
    const auto skipped = check_l2_tabulated(
        2, [](std::span<const int>) { return 0.0; }, {8, 16, 32, 4096}, 0.03,
        1e4);
    bool any_skipped = false;
    for (const auto& e : skipped.entries) any_skipped |= e.skipped;
    CHECK(any_skipped);
    CHECK_FALSE(skipped.conclusive);
}
