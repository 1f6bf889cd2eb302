#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "volterra/kernel.hpp"
#include "volterra/noise.hpp"
#include "volterra/rational.hpp"
#include "volterra/simulate.hpp"
#include "volterra/stats.hpp"
#include "volterra/truncated_kernel.hpp"

namespace volterra {

struct AcfSeries {
    std::vector<int> lags;            // 0..L
    std::vector<double> gamma_hat;
    std::vector<double> se;           // across-path standard errors
    std::vector<double> gamma_theory; // c * n^{exponent} overlay; empty if n/a
    SlopeFit fit;                     // log-log fit over the window
    bool fit_valid = false;
    int fit_lo = 0, fit_hi = 0;
};

// Mean-corrected sample autocovariance averaged across paths; requires
// N >= 10 L. The overlay uses the supplied exponent with the constant
// matched at the middle of the fit window (NaN exponent skips it).
AcfSeries empirical_acf(const std::vector<std::vector<double>>& paths, int L,
                        int fit_lo = 4, int fit_hi = 40,
                        double theory_exponent =
                            std::numeric_limits<double>::quiet_NaN());

// k! sum' a(i) a(i + n 1) over the truncated lattice (off-diagonal chaos
// autocovariance; exact, no sampling).
double semi_analytic_acf(const TruncatedKernel& kernel, int n);

struct VarScale {
    std::vector<double> N;
    std::vector<double> var;
    std::vector<double> se;  // standard error of the variance estimate
    SlopeFit fit;
    bool fit_valid = false;   // false when some variance is non-positive
    bool ci_warning = false;  // fewer than 100 paths
};

// Across-path variance of centered partial sums; S[path][idx] is the
// centered partial sum at N_list[idx].
VarScale partial_sum_variance(const std::vector<std::vector<double>>& S,
                              const std::vector<int>& N_list);

enum class Regime { LongMemory, ShortMemory, Inconclusive };

struct ClassificationResult {
    Regime regime = Regime::Inconclusive;
    double H = 0.0;  // meaningful for LongMemory only
    std::string basis;
};

// Admissible homogeneous kernel spec: long memory with H = alpha + k/2 + 1.
ClassificationResult classify_memory_ghkb(int k, double alpha);
// Power bounds |a(i)| <= c prod i_j^{gamma_j}; the diagonal-included test
// needs every gamma_j < -1, the off-diagonal-only test accepts
// gamma_j < -1/2 with sum gamma_j < -k/2 - 1/2.
ClassificationResult classify_memory_power_bounds(
    const std::vector<double>& gamma, bool diagonal_included);

// The limit of N^{-H} sum_{n<=Nt} (X(n) - E X): a combination of
// off-diagonal multiple integrals of the paired traces, equivalently the
// centered Stratonovich expansion; the order-0 summand is dropped.
struct LimitSpec {
    int k = 0;
    double alpha = 0.0;
    double H = 0.0;
    struct Term {
        int r;
        Rational d;        // pairing multiplicity
        TraceKernel trace; // arity k - 2r
        int order;         // chaos order k - 2r
    };
    std::vector<Term> terms;
};

LimitSpec build_limit_spec(const Kernel& kernel, QuadratureConfig quad = {});

// sum_r d_r^2 (k-2r)! ||h~_t||^2 with cross-order terms vanishing by
// orthogonality; std_error aggregates the quasi-random components.
L2Result limit_variance(const LimitSpec& spec, double t);

// Spatial discretization cells for the multiple-integral simulator: a
// uniform core over [t - core_width, t] plus geometrically growing tail
// cells down to t - total_width.
struct ChaosGrid {
    std::vector<double> center;
    std::vector<double> width;
    double t_max = 0.0;

    static ChaosGrid build(double t_max, double core_width, int core_cells,
                           double tail_growth, double total_width);
    int cells() const { return static_cast<int>(center.size()); }
};

// Off-diagonal multiple sum over grid cells with Gaussian increments;
// returns `draws` samples of Z_d(t). Arity 3 requires a small grid.
std::vector<double> simulate_hermite(const TraceKernel& trace, double t,
                                     const ChaosGrid& grid, int draws,
                                     std::uint64_t seed);

// Samples of Z(t) = sum_r d_r Z_{k-2r}(t) at each requested t; all terms
// and all t share one increment record per draw. Result is [t_index][draw].
std::vector<std::vector<double>> simulate_limit(
    const LimitSpec& spec, const std::vector<double>& t_values,
    const ChaosGrid& grid, int draws, std::uint64_t seed);

struct NcltParams {
    double scale = 1.0;
    double alpha = -1.2;
    int k = 2;
    int M = 1 << 22;
    int N = 1 << 14;
    int paths = 2000;
    NoiseLaw law = NoiseLaw::Gaussian;
    std::uint64_t seed = 1;
    int limit_draws = 2000;
    int grid_cells_core = 2048;
    double grid_core_width = 51.0;
    double grid_total_width = 1e6;
    double grid_tail_growth = 1.005;
};

struct NcltReport {
    double H = 0.0;
    double var_t1 = 0.0, var_t1_se = 0.0;
    double var_thalf = 0.0;
    double limit_var_quad = 0.0, limit_var_quad_se = 0.0;
    double limit_var_mc = 0.0, limit_var_mc_se = 0.0;
    double fourth_moment_t1 = 0.0, limit_fourth_moment = 0.0;
    double self_sim_ratio = 0.0;     // var(t=0.5) / var(t=1)
    double self_sim_expected = 0.0;  // 0.5^{2H}
    KsResult ks_t1;
};

NcltReport nclt_compare(const NcltParams& params);

struct CltParams {
    std::vector<double> gamma = {-1.1, -1.1};
    int M = 64;
    int N = 1 << 12;
    int paths = 2000;
    NoiseLaw law = NoiseLaw::Gaussian;
    std::uint64_t seed = 1;
    int acf_lag = 50;
};

struct CltReport {
    double sigma2_paths = 0.0;     // variance of N^{-1/2} S_N across paths
    double sigma2_paths_se = 0.0;
    double sigma2_acf = 0.0;       // gamma_hat(0) + 2 sum gamma_hat(n)
    double sigma2_split_a = 0.0, sigma2_split_b = 0.0;
    double sigma2_split_joint_se = 0.0;
    AdResult normality;
    bool sigma2_nonpositive = false;
};

CltReport clt_compare(const CltParams& params);

struct HyperResult {
    double ratio = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
};

// MC estimate of (E|Q_k(h)|^p)^{1/p} / (E Q_k(h)^2)^{1/2} with a bootstrap
// confidence interval.
HyperResult hypercontractivity_ratio(const TruncatedKernel& h, NoiseLaw law,
                                     double p, int samples,
                                     std::uint64_t seed);

}  // namespace volterra
