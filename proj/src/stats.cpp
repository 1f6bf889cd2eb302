#include "volterra/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace volterra {

namespace {

double pairwise_sum_impl(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
    return pairwise_sum_impl(x.data(), x.size());
}

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty sample");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("variance: need >= 2 points");
    const double m = mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - m;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

double central_moment(std::span<const double> x, int p) {
    if (x.empty()) throw std::invalid_argument("central_moment: empty sample");
    const double m = mean(x);
    std::vector<double> pw(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        pw[i] = std::pow(x[i] - m, p);
    return pairwise_sum(pw) / static_cast<double>(x.size());
}

SlopeFit fit_linear(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 4)
        throw std::invalid_argument("fit_linear: need >= 4 matched points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_linear: degenerate x");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += r * r;
    }
    const double se =
        std::sqrt(rss / (static_cast<double>(n - 2) * sxx));
    fit.ci_halfwidth = 1.959963984540054 * se;
    return fit;
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument(
            "fit_loglog_slope: need >= 4 matched points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw std::invalid_argument(
                "fit_loglog_slope: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_linear(lx, ly);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double t = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= t) ++ia;
        while (ib < b.size() && b[ib] <= t) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na -
                                 static_cast<double>(ib) / nb));
    }
    KsResult res;
    res.statistic = d;
    // c(alpha) * sqrt((n+m)/(n m)) with c(0.01) = 1.628
    res.threshold_1pct = 1.628 * std::sqrt((na + nb) / (na * nb));
    res.rejected_1pct = d > res.threshold_1pct;
    return res;
}

AdResult anderson_darling_normal(std::vector<double> x) {
    const std::size_t n = x.size();
    if (n < 8)
        throw std::invalid_argument("anderson_darling_normal: need >= 8 points");
    const double m = mean(x);
    const double sd = std::sqrt(variance(x));
    std::sort(x.begin(), x.end());
    double a2 = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = normal_cdf((x[i] - m) / sd);
        const double zj = normal_cdf((x[n - 1 - i] - m) / sd);
        const double lo = std::clamp(zi, 1e-15, 1.0 - 1e-15);
        const double hi = std::clamp(zj, 1e-15, 1.0 - 1e-15);
        a2 += (2.0 * static_cast<double>(i) + 1.0) *
              (std::log(lo) + std::log1p(-hi));
    }
    a2 = -dn - a2 / dn;
    AdResult res;
    // small-sample adjustment for the estimated-parameters case
    res.a2_star = a2 * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
    res.threshold_1pct = 1.092;
    res.rejected_1pct = res.a2_star > res.threshold_1pct;
    return res;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

}  // namespace volterra
