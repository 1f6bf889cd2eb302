#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "volterra/appell.hpp"
#include "volterra/noise.hpp"
#include "volterra/terms.hpp"
#include "volterra/truncated_kernel.hpp"

namespace volterra {

// One realized path X(1..N) together with the innovation window that
// produced it; replaying (seed, config) reproduces X bitwise.
struct VolterraPath {
    std::vector<double> X;    // X[n-1] = X(n)
    std::vector<double> eps;  // eps_at(t) for t = 1-M .. N
    int M = 0;
    std::uint64_t seed = 0;

    double eps_at(int t) const {
        return eps[static_cast<std::size_t>(t + M - 1)];
    }
};

// Draws the innovation window for (seed, path_index) without simulating.
std::vector<double> draw_innovations(const NoiseSpec& noise, int N, int M,
                                     std::uint64_t seed,
                                     std::uint64_t path_index = 0);

// Direct summation of X(n) = sum_{i in {1..M}^k} a(i) eps_{n-i_1}...eps_{n-i_k}.
VolterraPath simulate_path(const TruncatedKernel& kernel,
                           const NoiseSpec& noise, int N, std::uint64_t seed,
                           std::uint64_t path_index = 0);
// Same sum on an externally supplied innovation window (size N + M).
std::vector<double> evaluate_path(const TruncatedKernel& kernel,
                                  const std::vector<double>& eps, int N);

// Exponential-sum approximation m^alpha ~ sum_q c_q e^{-lambda_q m},
// valid uniformly for m >= 1; lets the power-sum kernel factorize so a path
// costs O(Q) per step instead of O(M^k).
struct ExpSumApprox {
    std::vector<double> c;
    std::vector<double> lambda;

    static ExpSumApprox fit(double alpha);
    double eval(double m) const;
    // sup over m in [1, m_check] of |eval(m) - m^alpha| / m^alpha
    double max_rel_error(double alpha, double m_check = 1e7) const;
};

// Fast path for scale * (i_1+...+i_k)^alpha kernels via the factorized
// recursion; diagonals are included exactly as in the direct sum.
VolterraPath simulate_powersum_path(double scale, double alpha, int k, int M,
                                    const NoiseSpec& noise, int N,
                                    std::uint64_t seed,
                                    std::uint64_t path_index = 0,
                                    bool keep_eps = true);

// Centered partial-sum trajectory of the fast path at the given horizons,
// without materializing X; S[j] = sum_{n <= horizons[j]} (X(n) - mean).
std::vector<double> powersum_partial_sums(double scale, double alpha, int k,
                                          int M, const NoiseSpec& noise,
                                          const std::vector<int>& horizons,
                                          std::uint64_t seed,
                                          std::uint64_t path_index);

// E X by the partition formula: sum over partitions of mu_{p_1}..mu_{p_m}
// times the off-diagonal sum of a_pi.
double exact_mean(const TruncatedKernel& kernel, const NoiseSpec& noise);
// E X for the scale * power-sum kernel, k <= 3 (higher orders would need
// off-diagonal lattice sums that the fast path is meant to avoid).
double exact_mean_powersum(double scale, double alpha, int k, int M,
                           const NoiseSpec& noise);

// Per-term paths X_pi^j(n) on a given innovation window; their sum over all
// admissible terms reproduces X(n) - E X pathwise.
std::vector<std::vector<double>> decompose_path(
    const TruncatedKernel& kernel, const VolterraPath& path,
    const std::vector<TermIndex>& terms, const NoiseSpec& noise);

// Off-diagonal polynomial form Q_k(h) = sum' h(i) eps_{i_1}...eps_{i_k} over
// the table lattice with eps = (eps_1..eps_M).
double discrete_chaos(const TruncatedKernel& h,
                      const std::vector<double>& eps);
// k! sum' h~(i)^2, the Gaussian variance of Q_k(h)
double chaos_variance(const TruncatedKernel& h);

struct L2ConditionEntry {
    std::string partition;
    std::vector<int> T;  // empty = square-sum condition on a_pi
    std::vector<double> M_values;
    std::vector<double> partial_sums;
    double slope = 0.0;  // log-log growth of partial sums vs M
    bool divergent = false;
    bool skipped = false;  // evaluation budget exceeded
};

struct L2Report {
    bool power_bound_route = false;
    bool well_defined = false;
    bool conclusive = false;
    double slope_threshold = 0.0;
    std::vector<L2ConditionEntry> entries;
    std::string note;
};

// Sufficient condition |a(i)| <= c prod i_j^{gamma_j}: well-defined when
// every gamma_j < -1/2.
L2Report check_l2_power_bounds(const std::vector<double>& gamma);

// Finite analogues of the square-summability conditions on a growing
// truncation ladder; divergence is flagged when the log-log growth slope of
// a partial sum exceeds the threshold. Advisory: infinite-sum conditions can
// only be probed, not decided, on truncations.
L2Report check_l2_tabulated(
    int k, const std::function<double(std::span<const int>)>& a,
    const std::vector<int>& M_values, double slope_threshold,
    double eval_budget = 1e8);

}  // namespace volterra
