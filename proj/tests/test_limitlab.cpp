#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "volterra/limitlab.hpp"
#include "volterra/simulate.hpp"

using namespace volterra;

TEST_CASE("autocovariance of white noise is flat") {
    RngStream root(17);
    std::vector<std::vector<double>> paths(64);
    for (std::size_t p = 0; p < paths.size(); ++p) {
        paths[p].resize(512);
        RngStream s = root.derive(p);
        s.fill_gaussian(paths[p]);
    }
    const auto acf = empirical_acf(paths, 20, 4, 16);
    CHECK(acf.gamma_hat[0] == doctest::Approx(1.0).epsilon(0.05));
    for (std::size_t lag = 1; lag < acf.gamma_hat.size(); ++lag)
        CHECK(std::abs(acf.gamma_hat[lag]) < 5.0 * acf.se[lag] + 0.02);

    // too few observations per lag
    std::vector<std::vector<double>> shorty(4, std::vector<double>(50, 0.0));
    CHECK_THROWS_AS(empirical_acf(shorty, 20), std::invalid_argument);
}

TEST_CASE("lattice autocovariance closed cases") {
    const auto a = TruncatedKernel::from_kernel(Kernel::power_sum(2, -1.2), 16);
    // lag 0 coincides with the off-diagonal chaos variance
    CHECK(semi_analytic_acf(a, 0) == doctest::Approx(chaos_variance(a)));
    // beyond the table horizon the supports no longer overlap
    CHECK(semi_analytic_acf(a, 16) == 0.0);
    CHECK(semi_analytic_acf(a, 40) == 0.0);
    CHECK(semi_analytic_acf(a, 1) > 0.0);
}

TEST_CASE("sampled autocovariance tracks the lattice prediction") {
    const int M = 128, N = 4096, n_paths = 48, L = 40;
    const auto a =
        TruncatedKernel::from_kernel(Kernel::power_sum(2, -1.2), M);
    const NoiseSpec noise = NoiseSpec::make(NoiseLaw::Gaussian, 2);
    const double mu = exact_mean(a, noise);
    std::vector<std::vector<double>> paths(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        auto path = simulate_powersum_path(1.0, -1.2, 2, M, noise, N, 606,
                                           static_cast<std::uint64_t>(p));
        for (auto& v : path.X) v -= mu;
        paths[static_cast<std::size_t>(p)] = std::move(path.X);
    }
    const auto acf = empirical_acf(paths, L, 8, 32);
    for (int lag : {8, 16, 24, 32}) {
        // the lattice prediction covers the off-diagonal part, which
        // dominates at these lags
        const double ref = semi_analytic_acf(a, lag);
        CHECK(acf.gamma_hat[static_cast<std::size_t>(lag)] ==
              doctest::Approx(ref).epsilon(0.15));
    }
    CHECK(acf.fit_valid);
    // gamma(n) ~ n^{2H-2} = n^{-0.4} for this kernel
    CHECK(acf.fit.slope == doctest::Approx(-0.4).epsilon(0.5));
}

TEST_CASE("partial-sum variance scaling utilities") {
    // iid increments: Var S_N = N, slope 1 in log-log
    RngStream root(23);
    const std::vector<int> N_list = {64, 128, 256, 512};
    std::vector<std::vector<double>> S(256);
    for (std::size_t p = 0; p < S.size(); ++p) {
        RngStream s = root.derive(p);
        double acc = 0.0;
        int idx = 0;
        for (int n = 1; n <= 512; ++n) {
            acc += s.next_gaussian();
            if (idx < 4 && n == N_list[static_cast<std::size_t>(idx)]) {
                S[p].push_back(acc);
                ++idx;
            }
        }
    }
    const auto vs = partial_sum_variance(S, N_list);
    CHECK(vs.fit_valid);
    CHECK(vs.fit.slope == doctest::Approx(1.0).epsilon(0.25));
    CHECK_FALSE(vs.ci_warning);
    for (std::size_t i = 0; i < vs.var.size(); ++i) {
        CHECK(vs.var[i] == doctest::Approx(static_cast<double>(N_list[i]))
                               .epsilon(0.35));
        CHECK(vs.se[i] > 0.0);
    }

    // degenerate sums cannot be fitted
    std::vector<std::vector<double>> zero(128,
                                          std::vector<double>(4, 0.0));
    const auto vz = partial_sum_variance(zero, N_list);
    CHECK_FALSE(vz.fit_valid);

    // few paths triggers the confidence warning
    std::vector<std::vector<double>> few(S.begin(), S.begin() + 20);
    CHECK(partial_sum_variance(few, N_list).ci_warning);
}

TEST_CASE("memory classification") {
    const auto lm = classify_memory_ghkb(2, -1.2);
    CHECK(lm.regime == Regime::LongMemory);
    CHECK(lm.H == doctest::Approx(0.8));
    CHECK(classify_memory_ghkb(2, -0.9).regime == Regime::Inconclusive);

    CHECK(classify_memory_power_bounds({-1.1, -1.2}, true).regime ==
          Regime::ShortMemory);
    CHECK(classify_memory_power_bounds({-0.9, -1.2}, true).regime ==
          Regime::Inconclusive);
    CHECK(classify_memory_power_bounds({-0.8, -0.9}, false).regime ==
          Regime::ShortMemory);
    CHECK(classify_memory_power_bounds({-0.6, -0.6}, false).regime ==
          Regime::Inconclusive);
}

TEST_CASE("limit specification built from an admissible kernel") {
    const auto spec2 = build_limit_spec(Kernel::power_sum(2, -1.2));
    CHECK(spec2.k == 2);
    CHECK(spec2.H == doctest::Approx(0.8));
    REQUIRE(spec2.terms.size() == 1);
    CHECK(spec2.terms[0].r == 0);
    CHECK(spec2.terms[0].order == 2);
    CHECK(spec2.terms[0].d == Rational(1));

    const auto spec5 = build_limit_spec(Kernel::power_sum(5, -2.7));
    REQUIRE(spec5.terms.size() == 3);
    CHECK(spec5.terms[0].d == Rational(1));
    CHECK(spec5.terms[1].d == Rational(10));
    CHECK(spec5.terms[2].d == Rational(15));
    CHECK(spec5.terms[1].order == 3);
    CHECK(spec5.terms[2].trace.alpha() == doctest::Approx(-0.7));

    const auto spec4 = build_limit_spec(Kernel::power_sum(4, -2.2));
    REQUIRE(spec4.terms.size() == 2);  // the order-0 pairing is dropped
    CHECK(spec4.terms[1].d == Rational(6));

    CHECK_THROWS_AS(build_limit_spec(Kernel::power_sum(2, -0.4)),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_limit_spec(Kernel::product_power({-0.6, -0.7})),
                    std::invalid_argument);
}

TEST_CASE("limit variance against the window-norm reference") {
    const auto spec = build_limit_spec(Kernel::power_sum(2, -1.2));
    const auto v1 = limit_variance(spec, 1.0);
    CHECK(v1.value == doctest::Approx(2.0 * 4.440743818).epsilon(1e-4));
    // self-similar scaling t^{2H}
    const auto vh = limit_variance(spec, 0.5);
    CHECK(vh.value / v1.value ==
          doctest::Approx(std::pow(0.5, 1.6)).epsilon(1e-6));
}

TEST_CASE("discretization grid covers the requested window") {
    const auto grid = ChaosGrid::build(1.0, 16.0, 256, 1.01, 1e4);
    double total = 0.0;
    for (std::size_t i = 0; i < grid.width.size(); ++i) {
        CHECK(grid.width[i] > 0.0);
        CHECK(grid.center[i] < 1.0);
        // the tail may overshoot the window by at most one growing cell
        CHECK(grid.center[i] > 1.0 - 1.02 * 1e4);
        total += grid.width[i];
    }
    CHECK(total == doctest::Approx(1e4).epsilon(0.02));
    CHECK(grid.cells() >= 256);
    // cells are disjoint and ordered
    for (std::size_t i = 1; i < grid.center.size(); ++i)
        CHECK(grid.center[i - 1] - 0.5 * grid.width[i - 1] >=
              grid.center[i] + 0.5 * grid.width[i] - 1e-9);
}

TEST_CASE("first-order limit simulation matches the window norm") {
    const Kernel ps3 = Kernel::power_sum(3, -1.9);
    const TraceKernel tr(ps3, 1);  // arity 1
    const auto grid = ChaosGrid::build(1.0, 32.0, 512, 1.005, 1e5);
    const int draws = 6000;
    const auto z = simulate_hermite(tr, 1.0, grid, draws, 808);
    REQUIRE(z.size() == static_cast<std::size_t>(draws));
    const double v = variance(z);
    const double target = tr.l2_norm_sq_h(1.0).value;
    CHECK(std::abs(mean(z)) < 5.0 * std::sqrt(v / draws));
    CHECK(v == doctest::Approx(target).epsilon(0.10));
}

TEST_CASE("second-order limit simulation matches the chaos isometry") {
    const Kernel ps2 = Kernel::power_sum(2, -1.2);
    const TraceKernel tr(ps2, 0);
    const auto grid = ChaosGrid::build(1.0, 32.0, 512, 1.005, 1e5);
    const int draws = 6000;
    const auto z = simulate_hermite(tr, 1.0, grid, draws, 909);
    const double v = variance(z);
    // Var Z_2 = 2 ||h~_1||^2
    CHECK(v == doctest::Approx(2.0 * 4.440743818).epsilon(0.10));
    CHECK(std::abs(mean(z)) < 5.0 * std::sqrt(central_moment(z, 2) / draws));
}

TEST_CASE("combined limit draws share increments across times") {
    const auto spec = build_limit_spec(Kernel::power_sum(2, -1.2));
    const auto grid = ChaosGrid::build(1.0, 32.0, 256, 1.01, 1e4);
    const auto z = simulate_limit(spec, {0.5, 1.0}, grid, 2000, 111);
    REQUIRE(z.size() == 2);
    REQUIRE(z[0].size() == 2000);
    const double v_half = variance(z[0]);
    const double v_one = variance(z[1]);
    CHECK(v_half / v_one == doctest::Approx(std::pow(0.5, 1.6)).epsilon(0.25));
    // increments are shared, so Z(0.5) and Z(1) are strongly dependent
    double cov = 0.0;
    const double m0 = mean(z[0]), m1 = mean(z[1]);
    for (std::size_t i = 0; i < z[0].size(); ++i)
        cov += (z[0][i] - m0) * (z[1][i] - m1);
    cov /= static_cast<double>(z[0].size() - 1);
    CHECK(cov / std::sqrt(v_half * v_one) > 0.5);
    // determinism
    const auto z2 = simulate_limit(spec, {0.5, 1.0}, grid, 2000, 111);
    CHECK(z2[1] == z[1]);
}

TEST_CASE("short-memory comparison on a separable kernel") {
    CltParams params;
    params.gamma = {-1.1, -1.1};
    params.M = 48;
    params.N = 1 << 10;
    params.paths = 400;
    params.seed = 7;
    const auto rep = clt_compare(params);
    CHECK_FALSE(rep.sigma2_nonpositive);
    CHECK(rep.sigma2_paths > 0.0);
    // the autocovariance route and the split halves agree with the direct
    // estimate at Monte Carlo accuracy
    CHECK(rep.sigma2_acf ==
          doctest::Approx(rep.sigma2_paths).epsilon(0.35));
    CHECK(rep.sigma2_split_a ==
          doctest::Approx(rep.sigma2_split_b)
              .epsilon(5.0 * rep.sigma2_split_joint_se /
                           rep.sigma2_paths +
                       0.3));
    CHECK_FALSE(rep.normality.rejected_1pct);
}

TEST_CASE("long-memory comparison end to end on a small configuration") {
    NcltParams params;
    params.alpha = -1.2;
    params.k = 2;
    params.M = 1 << 14;
    params.N = 1 << 9;
    params.paths = 150;
    params.limit_draws = 800;
    params.seed = 3;
    params.grid_cells_core = 512;
    params.grid_core_width = 33.0;
    params.grid_total_width = 1e5;
    const auto rep = nclt_compare(params);
    CHECK(rep.H == doctest::Approx(0.8));
    CHECK(rep.self_sim_expected == doctest::Approx(std::pow(0.5, 1.6)));
    CHECK(rep.var_t1 > 0.0);
    CHECK(rep.limit_var_quad == doctest::Approx(2.0 * 4.440743818).epsilon(1e-3));
    // small-sample run: agreement is loose but must be in the right regime
    CHECK(rep.var_t1 == doctest::Approx(rep.limit_var_quad).epsilon(0.5));
    CHECK(rep.self_sim_ratio ==
          doctest::Approx(rep.self_sim_expected).epsilon(0.5));
    CHECK(rep.ks_t1.threshold_1pct > 0.0);
}

TEST_CASE("moment-ratio diagnostics of polynomial forms") {
    // order-1 gaussian form: (E Q^4)^{1/4} / (E Q^2)^{1/2} = 3^{1/4}
    const auto h1 = TruncatedKernel::from_function(
        1, 8, [](std::span<const int> i) { return 1.0 / i[0]; });
    const auto res =
        hypercontractivity_ratio(h1, NoiseLaw::Gaussian, 4.0, 60000, 13);
    CHECK(res.ratio == doctest::Approx(std::pow(3.0, 0.25)).epsilon(0.02));
    CHECK(res.ci_lo < res.ratio);
    CHECK(res.ratio < res.ci_hi);

    // the ratio is exactly scale invariant
    const auto h2 = TruncatedKernel::from_function(
        1, 8, [](std::span<const int> i) { return 2.0 / i[0]; });
    const auto res2 =
        hypercontractivity_ratio(h2, NoiseLaw::Gaussian, 4.0, 60000, 13);
    CHECK(res2.ratio == doctest::Approx(res.ratio).epsilon(1e-12));
}
