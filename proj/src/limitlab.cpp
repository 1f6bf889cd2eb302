#include "volterra/limitlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace volterra {

namespace {

double variance_se(std::span<const double> x) {
    // SE of the sample variance via the central fourth moment
    const double v = variance(x);
    const double m4 = central_moment(x, 4);
    const double n = static_cast<double>(x.size());
    return std::sqrt(std::max(m4 - v * v, 0.0) / n);
}

std::uint64_t subseed(std::uint64_t seed, std::uint64_t channel) {
    return RngStream(seed).derive(channel).key();
}

}  // namespace

AcfSeries empirical_acf(const std::vector<std::vector<double>>& paths, int L,
                        int fit_lo, int fit_hi, double theory_exponent) {
    if (paths.empty()) throw std::invalid_argument("empirical_acf: no paths");
    const int N = static_cast<int>(paths[0].size());
    if (N < 10 * L)
        throw std::invalid_argument("empirical_acf: need N >= 10 L");
    const std::size_t P = paths.size();
    AcfSeries out;
    out.lags.resize(static_cast<std::size_t>(L) + 1);
    for (int n = 0; n <= L; ++n) out.lags[static_cast<std::size_t>(n)] = n;
    std::vector<std::vector<double>> per_path(
        P, std::vector<double>(static_cast<std::size_t>(L) + 1, 0.0));
    for (std::size_t p = 0; p < P; ++p) {
        if (static_cast<int>(paths[p].size()) != N)
            throw std::invalid_argument("empirical_acf: ragged path lengths");
        const double m = mean(paths[p]);
        for (int n = 0; n <= L; ++n) {
            double s = 0.0;
            for (int t = 0; t + n < N; ++t)
                s += (paths[p][static_cast<std::size_t>(t)] - m) *
                     (paths[p][static_cast<std::size_t>(t + n)] - m);
            per_path[p][static_cast<std::size_t>(n)] =
                s / static_cast<double>(N);
        }
    }
    out.gamma_hat.resize(static_cast<std::size_t>(L) + 1);
    out.se.resize(static_cast<std::size_t>(L) + 1);
    for (int n = 0; n <= L; ++n) {
        std::vector<double> col(P);
        for (std::size_t p = 0; p < P; ++p)
            col[p] = per_path[p][static_cast<std::size_t>(n)];
        out.gamma_hat[static_cast<std::size_t>(n)] = mean(col);
        out.se[static_cast<std::size_t>(n)] =
            P > 1 ? std::sqrt(variance(col) / static_cast<double>(P)) : 0.0;
    }
    out.fit_lo = fit_lo;
    out.fit_hi = std::min(fit_hi, L);
    std::vector<double> fx, fy;
    for (int n = out.fit_lo; n <= out.fit_hi; ++n) {
        const double g = out.gamma_hat[static_cast<std::size_t>(n)];
        if (g > 0.0) {
            fx.push_back(static_cast<double>(n));
            fy.push_back(g);
        }
    }
    if (fx.size() >= 4) {
        out.fit = fit_loglog_slope(fx, fy);
        out.fit_valid = true;
    }
    if (!std::isnan(theory_exponent) && out.fit_valid) {
        const int mid = (out.fit_lo + out.fit_hi) / 2;
        const double c = out.gamma_hat[static_cast<std::size_t>(mid)] /
                         std::pow(static_cast<double>(mid), theory_exponent);
        out.gamma_theory.resize(static_cast<std::size_t>(L) + 1, 0.0);
        for (int n = 1; n <= L; ++n)
            out.gamma_theory[static_cast<std::size_t>(n)] =
                c * std::pow(static_cast<double>(n), theory_exponent);
    }
    return out;
}

double semi_analytic_acf(const TruncatedKernel& kernel, int n) {
    if (n < 0) throw std::invalid_argument("semi_analytic_acf: lag must be >= 0");
    const int k = kernel.order();
    const int M = kernel.horizon();
    std::vector<int> idx(static_cast<std::size_t>(k), 1);
    std::vector<int> shifted(static_cast<std::size_t>(k));
    double s = 0.0;
    const auto distinct = [&](std::span<const int> i) {
        for (std::size_t a = 0; a < i.size(); ++a)
            for (std::size_t b = a + 1; b < i.size(); ++b)
                if (i[a] == i[b]) return false;
        return true;
    };
    do {
        if (!distinct(idx)) continue;
        bool in_range = true;
        for (int j = 0; j < k && in_range; ++j) {
            shifted[static_cast<std::size_t>(j)] =
                idx[static_cast<std::size_t>(j)] + n;
            in_range = shifted[static_cast<std::size_t>(j)] <= M;
        }
        if (!in_range) continue;
        s += kernel.at(idx) * kernel.at(shifted);
    } while ([&] {
        for (int j = k - 1; j >= 0; --j) {
            if (idx[static_cast<std::size_t>(j)] < M) {
                ++idx[static_cast<std::size_t>(j)];
                return true;
            }
            idx[static_cast<std::size_t>(j)] = 1;
        }
        return false;
    }());
    return to_double(Rational(factorial(static_cast<unsigned>(k)))) * s;
}

VarScale partial_sum_variance(const std::vector<std::vector<double>>& S,
                              const std::vector<int>& N_list) {
    if (S.empty()) throw std::invalid_argument("partial_sum_variance: no paths");
    VarScale out;
    out.ci_warning = S.size() < 100;
    std::vector<double> col(S.size());
    for (std::size_t j = 0; j < N_list.size(); ++j) {
        for (std::size_t p = 0; p < S.size(); ++p) {
            if (S[p].size() != N_list.size())
                throw std::invalid_argument(
                    "partial_sum_variance: ragged sample matrix");
            col[p] = S[p][j];
        }
        out.N.push_back(static_cast<double>(N_list[j]));
        out.var.push_back(variance(col));
        out.se.push_back(variance_se(col));
    }
    if (std::all_of(out.var.begin(), out.var.end(),
                    [](double v) { return v > 0.0; }) &&
        out.var.size() >= 4) {
        out.fit = fit_loglog_slope(out.N, out.var);
        out.fit_valid = true;
    }
    return out;
}

ClassificationResult classify_memory_ghkb(int k, double alpha) {
    ClassificationResult out;
    const double lo = -(static_cast<double>(k) + 1.0) / 2.0;
    const double hi = -static_cast<double>(k) / 2.0;
    if (alpha > lo && alpha < hi) {
        out.regime = Regime::LongMemory;
        out.H = alpha + 0.5 * k + 1.0;
        out.basis = "admissible homogeneous kernel: H = alpha + k/2 + 1";
    } else {
        out.basis = "alpha outside the admissible range";
    }
    return out;
}

ClassificationResult classify_memory_power_bounds(
    const std::vector<double>& gamma, bool diagonal_included) {
    ClassificationResult out;
    const double k = static_cast<double>(gamma.size());
    const double total = std::accumulate(gamma.begin(), gamma.end(), 0.0);
    if (diagonal_included) {
        if (std::all_of(gamma.begin(), gamma.end(),
                        [](double g) { return g < -1.0; })) {
            out.regime = Regime::ShortMemory;
            out.basis = "diagonal-included summability: every gamma_j < -1";
        } else {
            out.basis = "diagonal-included test inconclusive";
        }
        return out;
    }
    if (std::all_of(gamma.begin(), gamma.end(),
                    [](double g) { return g < -0.5; }) &&
        total < -k / 2.0 - 0.5) {
        out.regime = Regime::ShortMemory;
        out.basis =
            "off-diagonal criterion: gamma_j < -1/2 and sum < -k/2 - 1/2";
    } else {
        out.basis = "off-diagonal test inconclusive";
    }
    return out;
}

LimitSpec build_limit_spec(const Kernel& kernel, QuadratureConfig quad) {
    const GhkbReport report = validate_ghkb(kernel);
    if (!report.valid) {
        std::string why = "build_limit_spec: kernel fails validation";
        for (const auto& f : report.failures) why += "; " + f;
        throw std::invalid_argument(why);
    }
    if (!kernel.is_symmetric())
        throw std::invalid_argument("build_limit_spec: kernel must be symmetric");
    LimitSpec spec;
    spec.k = kernel.arity();
    spec.alpha = kernel.alpha();
    spec.H = kernel.hurst();
    for (int r = 0; spec.k - 2 * r >= 1; ++r)
        spec.terms.push_back(LimitSpec::Term{r, d_coeff(spec.k, r),
                                             TraceKernel(kernel, r, quad),
                                             spec.k - 2 * r});
    return spec;
}

L2Result limit_variance(const LimitSpec& spec, double t) {
    double total = 0.0, var_err = 0.0;
    for (const auto& term : spec.terms) {
        const double d = to_double(term.d);
        const double fact =
            to_double(Rational(factorial(static_cast<unsigned>(term.order))));
        const L2Result norm = term.trace.l2_norm_sq_h(t);
        total += d * d * fact * norm.value;
        const double contrib_se = d * d * fact * norm.std_error;
        var_err += contrib_se * contrib_se;
    }
    return {total, std::sqrt(var_err)};
}

ChaosGrid ChaosGrid::build(double t_max, double core_width, int core_cells,
                           double tail_growth, double total_width) {
    if (core_cells < 1 || !(core_width > 0.0) || !(tail_growth > 1.0) ||
        !(total_width >= core_width))
        throw std::invalid_argument("chaos grid: bad parameters");
    ChaosGrid grid;
    grid.t_max = t_max;
    double edge = t_max;
    double w = core_width / core_cells;
    for (int c = 0; c < core_cells; ++c) {
        grid.center.push_back(edge - 0.5 * w);
        grid.width.push_back(w);
        edge -= w;
    }
    while (t_max - edge < total_width) {
        w *= tail_growth;
        grid.center.push_back(edge - 0.5 * w);
        grid.width.push_back(w);
        edge -= w;
    }
    return grid;
}

namespace {

// cell mean of h_t by a small tensor Gauss rule; each axis uses a
// different node set (3-, 4- and 2-point) so that no evaluation point of
// a same-cell average lands on the diagonal where h_t blows up
// returns the cell mean of h_t, or the root mean square of h_t carrying
// the sign of the mean when `rms` is set; the rms variant keeps the
// second moment of the discretized chaos exact on cells where h_t is far
// from constant (the near-diagonal ones), at the price of a shape error
// that vanishes with the cell size
double cell_average(const TraceKernel& trace, double t,
                    std::span<const double> center,
                    std::span<const double> width, bool rms = false) {
    static constexpr double kN3[] = {-0.7745966692414834, 0.0,
                                     0.7745966692414834};
    static constexpr double kW3[] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    static constexpr double kN4[] = {-0.8611363115940526, -0.3399810435848563,
                                     0.3399810435848563, 0.8611363115940526};
    static constexpr double kW4[] = {0.17392742256872693, 0.32607257743127305,
                                     0.32607257743127305,
                                     0.17392742256872693};
    static constexpr double kN2[] = {-0.5773502691896257, 0.5773502691896257};
    static constexpr double kW2[] = {0.5, 0.5};
    struct AxisRule {
        const double* node;
        const double* weight;
        int n;
    };
    static constexpr AxisRule kRule[3] = {
        {kN3, kW3, 3}, {kN4, kW4, 4}, {kN2, kW2, 2}};
    const int d = static_cast<int>(center.size());
    double acc = 0.0, acc2 = 0.0;
    double y[3];
    int q[3] = {0, 0, 0};
    for (;;) {
        double wgt = 1.0;
        for (int a = 0; a < d; ++a) {
            y[a] = center[a] + 0.5 * width[a] * kRule[a].node[q[a]];
            wgt *= kRule[a].weight[q[a]];
        }
        const double v = trace.eval_h_t(
            t, std::span<const double>(y, static_cast<std::size_t>(d)));
        acc += wgt * v;
        acc2 += wgt * v * v;
        int a = 0;
        for (; a < d; ++a) {
            if (++q[a] < kRule[a].n) break;
            q[a] = 0;
        }
        if (a == d) break;
    }
    return rms ? std::copysign(std::sqrt(acc2), acc) : acc;
}

// signed rms of h_t over a same-cell square of an arity-2 table; h_t
// behaves like |y1 - y2|^{alpha_r + 1} across the diagonal, so the gap
// variable is integrated after the substitution gap = w u^{1/(2 alpha_r
// + 3)}, which makes the integrand regular and the cell's second moment
// accurate even though the singularity lies inside the cell
double diag_cell_value(const TraceKernel& trace, double t, double center,
                       double w) {
    static constexpr double kNode[8] = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
        0.7966664774136267,  0.9602898564975363};
    static constexpr double kWeight[8] = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
        0.2223810344533745, 0.1012285362903763};
    static constexpr double kTau[3] = {0.1127016653792583, 0.5,
                                       0.8872983346207417};
    static constexpr double kTauW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    const double m = 2.0 * trace.alpha() + 3.0;
    const double a = center - 0.5 * w;
    double mean = 0.0, msq = 0.0;
    for (int q = 0; q < 8; ++q) {
        const double u = 0.5 * (kNode[q] + 1.0);
        const double gap = w * std::pow(u, 1.0 / m);
        const double jac = (w / m) * std::pow(u, 1.0 / m - 1.0);
        double hm = 0.0, hs = 0.0;
        for (int s = 0; s < 3; ++s) {
            const double y2 = a + kTau[s] * (w - gap);
            const double y[2] = {y2 + gap, y2};
            const double v =
                trace.eval_h_t(t, std::span<const double>(y, 2));
            hm += kTauW[s] * v;
            hs += kTauW[s] * v * v;
        }
        const double cw = 0.5 * kWeight[q] * jac * (w - gap);
        mean += cw * hm;
        msq += cw * hs;
    }
    mean *= 2.0 / (w * w);
    msq *= 2.0 / (w * w);
    return std::copysign(std::sqrt(std::max(msq, 0.0)), mean);
}

// h_t tabulated over grid cells with sqrt(cell width) folded in; the
// multilinear form is evaluated in Wick products, so diagonal entries
// contribute through z^2 - 1 (and the order-3 analogue) exactly as the
// discretized stochastic integral does, and no diagonal mass is dropped.
// Near-diagonal entries are cell-averaged because h_t grows like
// |y1 - y2|^{alpha_r + 1} there and the midpoint value underestimates them.
struct TabulatedChaos {
    int d = 1;
    int G = 0;
    std::vector<double> table;
    double wick_const = 0.0;        // order 2: sum of diagonal entries
    std::vector<double> wick_lin;   // order 3: contraction over repeats

    static TabulatedChaos make(const TraceKernel& trace, double t,
                               const ChaosGrid& grid) {
        TabulatedChaos tab;
        tab.d = trace.arity();
        tab.G = grid.cells();
        const std::size_t G = static_cast<std::size_t>(tab.G);
        if (tab.d == 1) {
            tab.table.resize(G);
            for (std::size_t c = 0; c < G; ++c)
                tab.table[c] = trace.eval_h_t(t, {grid.center[c]}) *
                               std::sqrt(grid.width[c]);
        } else if (tab.d == 2) {
            tab.table.resize(G * G);
            for (std::size_t c1 = 0; c1 < G; ++c1) {
                const double sw1 = std::sqrt(grid.width[c1]);
                for (std::size_t c2 = 0; c2 < G; ++c2) {
                    const double gap =
                        std::abs(grid.center[c1] - grid.center[c2]);
                    const double band =
                        3.0 * (grid.width[c1] + grid.width[c2]);
                    const double ctr[2] = {grid.center[c1], grid.center[c2]};
                    const double wid[2] = {grid.width[c1], grid.width[c2]};
                    double value;
                    if (c1 == c2)
                        value = diag_cell_value(trace, t, ctr[0], wid[0]);
                    else if (gap <= band)
                        value = cell_average(trace, t, ctr, wid, true);
                    else
                        value = trace.eval_h_t(t, {ctr[0], ctr[1]});
                    tab.table[c1 * G + c2] =
                        value * sw1 * std::sqrt(grid.width[c2]);
                }
            }
            for (std::size_t c = 0; c < G; ++c)
                tab.wick_const += tab.table[c * G + c];
        } else if (tab.d == 3) {
            if (tab.G > 128)
                throw std::invalid_argument(
                    "arity-3 chaos tables need a grid of <= 128 cells");
            tab.table.resize(G * G * G, 0.0);
            for (std::size_t c1 = 0; c1 < G; ++c1)
                for (std::size_t c2 = 0; c2 < G; ++c2)
                    for (std::size_t c3 = 0; c3 < G; ++c3) {
                        const double ctr[3] = {grid.center[c1],
                                               grid.center[c2],
                                               grid.center[c3]};
                        const double wid[3] = {grid.width[c1], grid.width[c2],
                                               grid.width[c3]};
                        double value;
                        if (c1 == c2 || c1 == c3 || c2 == c3) {
                            value = cell_average(trace, t, ctr, wid, true);
                        } else {
                            value =
                                trace.eval_h_t(t, {ctr[0], ctr[1], ctr[2]});
                            if (!std::isfinite(value))
                                value = cell_average(trace, t, ctr, wid);
                        }
                        tab.table[(c1 * G + c2) * G + c3] =
                            value * std::sqrt(wid[0] * wid[1] * wid[2]);
                    }
            tab.wick_lin.assign(G, 0.0);
            for (std::size_t c = 0; c < G; ++c)
                for (std::size_t i = 0; i < G; ++i)
                    tab.wick_lin[c] += tab.table[(i * G + i) * G + c] +
                                       tab.table[(i * G + c) * G + i] +
                                       tab.table[(c * G + i) * G + i];
        } else {
            throw std::invalid_argument(
                "chaos simulation supports arity <= 3");
        }
        return tab;
    }

    double eval(std::span<const double> z) const {
        const std::size_t G = static_cast<std::size_t>(this->G);
        if (d == 1) {
            double s = 0.0;
            for (std::size_t c = 0; c < G; ++c) s += table[c] * z[c];
            return s;
        }
        if (d == 2) {
            double s = 0.0;
            for (std::size_t c1 = 0; c1 < G; ++c1) {
                const double* row = table.data() + c1 * G;
                double inner = 0.0;
                for (std::size_t c2 = 0; c2 < G; ++c2)
                    inner += row[c2] * z[c2];
                s += z[c1] * inner;
            }
            return s - wick_const;
        }
        double s = 0.0;
        for (std::size_t c1 = 0; c1 < G; ++c1)
            for (std::size_t c2 = 0; c2 < G; ++c2) {
                const double* row = table.data() + (c1 * G + c2) * G;
                double inner = 0.0;
                for (std::size_t c3 = 0; c3 < G; ++c3)
                    inner += row[c3] * z[c3];
                s += z[c1] * z[c2] * inner;
            }
        for (std::size_t c = 0; c < G; ++c) s -= wick_lin[c] * z[c];
        return s;
    }
};

}  // namespace

std::vector<double> simulate_hermite(const TraceKernel& trace, double t,
                                     const ChaosGrid& grid, int draws,
                                     std::uint64_t seed) {
    const TabulatedChaos tab = TabulatedChaos::make(trace, t, grid);
    RngStream root(seed);
    std::vector<double> z(static_cast<std::size_t>(grid.cells()));
    std::vector<double> out(static_cast<std::size_t>(draws));
    for (int s = 0; s < draws; ++s) {
        RngStream stream = root.derive(static_cast<std::uint64_t>(s));
        stream.fill_gaussian(z);
        out[static_cast<std::size_t>(s)] = tab.eval(z);
    }
    return out;
}

std::vector<std::vector<double>> simulate_limit(
    const LimitSpec& spec, const std::vector<double>& t_values,
    const ChaosGrid& grid, int draws, std::uint64_t seed) {
    std::vector<std::vector<TabulatedChaos>> tabs;  // [t][term]
    for (double t : t_values) {
        std::vector<TabulatedChaos> row;
        for (const auto& term : spec.terms)
            row.push_back(TabulatedChaos::make(term.trace, t, grid));
        tabs.push_back(std::move(row));
    }
    RngStream root(seed);
    std::vector<double> z(static_cast<std::size_t>(grid.cells()));
    std::vector<std::vector<double>> out(
        t_values.size(), std::vector<double>(static_cast<std::size_t>(draws)));
    for (int s = 0; s < draws; ++s) {
        RngStream stream = root.derive(static_cast<std::uint64_t>(s));
        stream.fill_gaussian(z);
        for (std::size_t ti = 0; ti < t_values.size(); ++ti) {
            double total = 0.0;
            for (std::size_t r = 0; r < spec.terms.size(); ++r)
                total += to_double(spec.terms[r].d) * tabs[ti][r].eval(z);
            out[ti][static_cast<std::size_t>(s)] = total;
        }
    }
    return out;
}

NcltReport nclt_compare(const NcltParams& params) {
    NcltReport report;
    const double H =
        params.alpha + 0.5 * static_cast<double>(params.k) + 1.0;
    report.H = H;
    const NoiseSpec noise = NoiseSpec::make(params.law, params.k);
    const std::vector<int> horizons = {params.N / 2, params.N};
    const double norm = std::pow(static_cast<double>(params.N), -H);
    std::vector<double> y1(static_cast<std::size_t>(params.paths));
    std::vector<double> yh(static_cast<std::size_t>(params.paths));
    const std::uint64_t sim_seed = subseed(params.seed, 1);
    for (int p = 0; p < params.paths; ++p) {
        const std::vector<double> S = powersum_partial_sums(
            params.scale, params.alpha, params.k, params.M, noise, horizons,
            sim_seed, static_cast<std::uint64_t>(p));
        yh[static_cast<std::size_t>(p)] = norm * S[0];
        y1[static_cast<std::size_t>(p)] = norm * S[1];
    }
    report.var_t1 = variance(y1);
    report.var_t1_se = variance_se(y1);
    report.var_thalf = variance(yh);
    report.fourth_moment_t1 = central_moment(y1, 4);
    report.self_sim_ratio = report.var_thalf / report.var_t1;
    report.self_sim_expected = std::pow(0.5, 2.0 * H);

    const Kernel kernel =
        params.scale == 1.0
            ? Kernel::power_sum(params.k, params.alpha)
            : Kernel::scale(params.scale,
                            Kernel::power_sum(params.k, params.alpha));
    const LimitSpec spec = build_limit_spec(kernel);
    const L2Result quad = limit_variance(spec, 1.0);
    report.limit_var_quad = quad.value;
    report.limit_var_quad_se = quad.std_error;

    const ChaosGrid grid = ChaosGrid::build(
        1.0, params.grid_core_width, params.grid_cells_core,
        params.grid_tail_growth, params.grid_total_width);
    const auto limit_samples = simulate_limit(
        spec, {1.0}, grid, params.limit_draws, subseed(params.seed, 2));
    report.limit_var_mc = variance(limit_samples[0]);
    report.limit_var_mc_se = variance_se(limit_samples[0]);
    report.limit_fourth_moment = central_moment(limit_samples[0], 4);
    report.ks_t1 = ks_two_sample(y1, limit_samples[0]);
    return report;
}

CltReport clt_compare(const CltParams& params) {
    CltReport report;
    const int k = static_cast<int>(params.gamma.size());
    const NoiseSpec noise = NoiseSpec::make(params.law, k);
    const int M = params.M, N = params.N;
    // separable product-power kernel: X(n) = prod_j sum_i i^{gamma_j} eps_{n-i}
    std::vector<std::vector<double>> weights(
        static_cast<std::size_t>(k),
        std::vector<double>(static_cast<std::size_t>(M)));
    for (int j = 0; j < k; ++j)
        for (int i = 1; i <= M; ++i)
            weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                i - 1)] =
                std::pow(static_cast<double>(i),
                         params.gamma[static_cast<std::size_t>(j)]);
    // E X: the only surviving partition at mu_1 = 0 couples all k slots on
    // one diagonal only for k <= 3; compute the general mean exactly via a
    // small truncated table when k is small, otherwise from the diagonal.
    double mean_x = 0.0;
    {
        const Kernel kern = Kernel::product_power(params.gamma);
        if (std::pow(static_cast<double>(M), k) <= 1e7) {
            const TruncatedKernel table = TruncatedKernel::from_kernel(kern, M);
            mean_x = exact_mean(table, noise);
        } else if (k == 2) {
            for (int i = 1; i <= M; ++i)
                mean_x += weights[0][static_cast<std::size_t>(i - 1)] *
                          weights[1][static_cast<std::size_t>(i - 1)];
            mean_x *= to_double(noise.moments[2]);
        } else {
            throw std::invalid_argument(
                "clt_compare: mean computation needs M^k <= 1e7 or k = 2");
        }
    }

    const std::uint64_t sim_seed = subseed(params.seed, 1);
    std::vector<double> y(static_cast<std::size_t>(params.paths));
    std::vector<std::vector<double>> kept_paths;
    const int acf_paths = std::min(params.paths, 200);
    std::vector<double> u(static_cast<std::size_t>(k));
    for (int p = 0; p < params.paths; ++p) {
        const std::vector<double> eps =
            draw_innovations(noise, N, M, sim_seed,
                             static_cast<std::uint64_t>(p));
        const double* e = eps.data() + M - 1;
        std::vector<double> X(static_cast<std::size_t>(N));
        double S = 0.0;
        for (int n = 1; n <= N; ++n) {
            double x = 1.0;
            for (int j = 0; j < k; ++j) {
                const double* w = weights[static_cast<std::size_t>(j)].data();
                double uj = 0.0;
                for (int i = 1; i <= M; ++i) uj += w[i - 1] * e[n - i];
                x *= uj;
            }
            X[static_cast<std::size_t>(n - 1)] = x;
            S += x - mean_x;
        }
        y[static_cast<std::size_t>(p)] =
            S / std::sqrt(static_cast<double>(N));
        if (p < acf_paths) kept_paths.push_back(std::move(X));
    }
    report.sigma2_paths = variance(y);
    report.sigma2_paths_se = variance_se(y);
    report.normality = anderson_darling_normal(y);
    const std::size_t half = y.size() / 2;
    std::vector<double> ya(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<double> yb(y.begin() + static_cast<std::ptrdiff_t>(half), y.end());
    report.sigma2_split_a = variance(ya);
    report.sigma2_split_b = variance(yb);
    report.sigma2_split_joint_se = std::sqrt(
        variance_se(ya) * variance_se(ya) + variance_se(yb) * variance_se(yb));
    const AcfSeries acf = empirical_acf(kept_paths, params.acf_lag,
                                        4, params.acf_lag);
    report.sigma2_acf = acf.gamma_hat[0];
    for (int n = 1; n <= params.acf_lag; ++n)
        report.sigma2_acf += 2.0 * acf.gamma_hat[static_cast<std::size_t>(n)];
    report.sigma2_nonpositive = report.sigma2_acf <= 0.0;
    return report;
}

HyperResult hypercontractivity_ratio(const TruncatedKernel& h, NoiseLaw law,
                                     double p, int samples,
                                     std::uint64_t seed) {
    if (!(p > 2.0))
        throw std::invalid_argument("hypercontractivity: need p > 2");
    if (h.sum_sq() <= 0.0)
        throw std::invalid_argument("hypercontractivity: zero table");
    RngStream root(seed);
    std::vector<double> eps(static_cast<std::size_t>(h.horizon()));
    std::vector<double> q(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        RngStream stream = root.derive(static_cast<std::uint64_t>(s));
        sample_noise(law, stream, eps);
        q[static_cast<std::size_t>(s)] = discrete_chaos(h, eps);
    }
    const auto ratio_stat = [&](std::span<const double> sample) {
        double mp = 0.0, m2 = 0.0;
        for (double v : sample) {
            mp += std::pow(std::abs(v), p);
            m2 += v * v;
        }
        mp /= static_cast<double>(sample.size());
        m2 /= static_cast<double>(sample.size());
        return std::pow(mp, 1.0 / p) / std::sqrt(m2);
    };
    const BootstrapCi ci =
        bootstrap_ci(std::span<const double>(q), ratio_stat, 200,
                     RngStream(subseed(seed, 99)));
    return HyperResult{ci.estimate, ci.lo, ci.hi};
}

}  // namespace volterra
