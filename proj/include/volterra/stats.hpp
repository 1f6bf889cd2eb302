#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "volterra/rng.hpp"

namespace volterra {

// Pairwise summation; the big power-law accumulations lose digits under a
// naive running sum.
double pairwise_sum(std::span<const double> x);

double mean(std::span<const double> x);
// Unbiased sample variance.
double variance(std::span<const double> x);
double central_moment(std::span<const double> x, int p);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_halfwidth = 0.0;  // 95% on the slope
};

// OLS of log y on log x. Throws std::invalid_argument for y <= 0 or fewer
// than 4 points.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);
SlopeFit fit_linear(std::span<const double> x, std::span<const double> y);

struct KsResult {
    double statistic = 0.0;
    double threshold_1pct = 0.0;
    bool rejected_1pct = false;
};
// Two-sample Kolmogorov-Smirnov.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct AdResult {
    double a2_star = 0.0;        // small-sample adjusted statistic
    double threshold_1pct = 0.0; // case with estimated mean and variance
    bool rejected_1pct = false;
};
// Anderson-Darling test of normality with estimated parameters.
AdResult anderson_darling_normal(std::vector<double> x);

struct BootstrapCi {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
// Percentile bootstrap CI for a statistic evaluated on resamples.
template <class Stat>
BootstrapCi bootstrap_ci(std::span<const double> x, Stat stat, int reps,
                         RngStream stream, double level = 0.95);

double normal_cdf(double z);

// ---- template definition ----
template <class Stat>
BootstrapCi bootstrap_ci(std::span<const double> x, Stat stat, int reps,
                         RngStream stream, double level) {
    std::vector<double> resample(x.size());
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        for (auto& v : resample) {
            const auto idx = stream.next_u64() % x.size();
            v = x[idx];
        }
        stats.push_back(stat(std::span<const double>(resample)));
    }
    std::vector<double> sorted = stats;
    std::sort(sorted.begin(), sorted.end());
    const double tail = (1.0 - level) / 2.0;
    const auto pick = [&](double q) {
        auto i = static_cast<std::size_t>(q * (sorted.size() - 1));
        return sorted[i];
    };
    return BootstrapCi{stat(x), pick(tail), pick(1.0 - tail)};
}

}  // namespace volterra
