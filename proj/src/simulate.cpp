#include "volterra/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volterra/stats.hpp"

namespace volterra {

namespace {

bool advance_odometer(std::span<int> i, int M) {
    for (int j = static_cast<int>(i.size()) - 1; j >= 0; --j) {
        if (i[static_cast<std::size_t>(j)] < M) {
            ++i[static_cast<std::size_t>(j)];
            return true;
        }
        i[static_cast<std::size_t>(j)] = 1;
    }
    return false;
}

bool all_distinct(std::span<const int> i) {
    for (std::size_t a = 0; a < i.size(); ++a)
        for (std::size_t b = a + 1; b < i.size(); ++b)
            if (i[a] == i[b]) return false;
    return true;
}

double int_pow(double u, int k) {
    double v = 1.0;
    for (int j = 0; j < k; ++j) v *= u;
    return v;
}

}  // namespace

std::vector<double> draw_innovations(const NoiseSpec& noise, int N, int M,
                                     std::uint64_t seed,
                                     std::uint64_t path_index) {
    RngStream stream = RngStream(seed).derive(path_index);
    std::vector<double> eps(static_cast<std::size_t>(N) +
                            static_cast<std::size_t>(M));
    sample_noise(noise.law, stream, eps);
    return eps;
}

std::vector<double> evaluate_path(const TruncatedKernel& kernel,
                                  const std::vector<double>& eps, int N) {
    const int k = kernel.order();
    const int M = kernel.horizon();
    if (N < 1) throw std::invalid_argument("evaluate_path: N must be >= 1");
    if (eps.size() < static_cast<std::size_t>(N + M))
        throw std::invalid_argument("evaluate_path: innovation window short");
    // eps index of time t is t + M - 1
    const double* e = eps.data() + M - 1;  // e[t] = eps_t for t >= 1-M
    const std::vector<double>& a = kernel.values();
    std::vector<double> X(static_cast<std::size_t>(N));
    if (k == 1) {
        for (int n = 1; n <= N; ++n) {
            double s = 0.0;
            for (int i = 1; i <= M; ++i)
                s += a[static_cast<std::size_t>(i - 1)] * e[n - i];
            X[static_cast<std::size_t>(n - 1)] = s;
        }
        return X;
    }
    if (k == 2) {
        for (int n = 1; n <= N; ++n) {
            double s = 0.0;
            for (int i1 = 1; i1 <= M; ++i1) {
                const double e1 = e[n - i1];
                const double* row =
                    a.data() + static_cast<std::size_t>(i1 - 1) *
                                   static_cast<std::size_t>(M);
                double inner = 0.0;
                for (int i2 = 1; i2 <= M; ++i2)
                    inner += row[i2 - 1] * e[n - i2];
                s += e1 * inner;
            }
            X[static_cast<std::size_t>(n - 1)] = s;
        }
        return X;
    }
    if (k == 3) {
        for (int n = 1; n <= N; ++n) {
            double s = 0.0;
            for (int i1 = 1; i1 <= M; ++i1) {
                const double e1 = e[n - i1];
                for (int i2 = 1; i2 <= M; ++i2) {
                    const double e12 = e1 * e[n - i2];
                    const double* row =
                        a.data() +
                        (static_cast<std::size_t>(i1 - 1) *
                             static_cast<std::size_t>(M) +
                         static_cast<std::size_t>(i2 - 1)) *
                            static_cast<std::size_t>(M);
                    double inner = 0.0;
                    for (int i3 = 1; i3 <= M; ++i3)
                        inner += row[i3 - 1] * e[n - i3];
                    s += e12 * inner;
                }
            }
            X[static_cast<std::size_t>(n - 1)] = s;
        }
        return X;
    }
    std::vector<int> idx(static_cast<std::size_t>(k), 1);
    for (int n = 1; n <= N; ++n) {
        double s = 0.0;
        std::fill(idx.begin(), idx.end(), 1);
        std::size_t flat = 0;
        do {
            double prod = a[flat++];
            for (int j = 0; j < k; ++j)
                prod *= e[n - idx[static_cast<std::size_t>(j)]];
            s += prod;
        } while (advance_odometer(idx, M));
        X[static_cast<std::size_t>(n - 1)] = s;
    }
    return X;
}

VolterraPath simulate_path(const TruncatedKernel& kernel,
                           const NoiseSpec& noise, int N, std::uint64_t seed,
                           std::uint64_t path_index) {
    VolterraPath path;
    path.M = kernel.horizon();
    path.seed = seed;
    path.eps = draw_innovations(noise, N, kernel.horizon(), seed, path_index);
    path.X = evaluate_path(kernel, path.eps, N);
    return path;
}

ExpSumApprox ExpSumApprox::fit(double alpha) {
    if (!(alpha < 0.0))
        throw std::invalid_argument("exp-sum fit: alpha must be negative");
    // m^alpha = (1/Gamma(-alpha)) int_0^inf t^{-alpha-1} e^{-mt} dt;
    // trapezoid in x = log t
    // the left cutoff controls the error at large m (~ e^{alpha x_lo}); -44
    // keeps the relative error below ~1e-6 even for alpha near -1/2
    const double x_lo = -44.0, x_hi = 8.0, h = 0.3;
    const double gamma = std::tgamma(-alpha);
    ExpSumApprox out;
    for (double x = x_lo; x <= x_hi + 1e-12; x += h) {
        const bool endpoint = x < x_lo + 1e-12 || x > x_hi - 1e-12;
        out.lambda.push_back(std::exp(x));
        out.c.push_back((endpoint ? 0.5 : 1.0) * h * std::exp(-alpha * x) /
                        gamma);
    }
    return out;
}

double ExpSumApprox::eval(double m) const {
    double s = 0.0;
    for (std::size_t q = 0; q < c.size(); ++q)
        s += c[q] * std::exp(-lambda[q] * m);
    return s;
}

double ExpSumApprox::max_rel_error(double alpha, double m_check) const {
    double worst = 0.0;
    const int points = 2000;
    for (int p = 0; p <= points; ++p) {
        const double m = std::exp(std::log(m_check) * p / points);
        const double exact = std::pow(m, alpha);
        worst = std::max(worst, std::abs(eval(m) - exact) / exact);
    }
    return worst;
}

namespace {

// Shared driver for the factorized recursion
// u_q(t+1) = e^{-lambda_q} (u_q(t) + eps_t) - e^{-lambda_q (M+1)} eps_{t-M}
// with X(n) = scale * sum_q c_q u_q(n)^k; emit(n, X(n)) is called for n=1..N.
template <class Emit>
void run_powersum_recursion(double scale, double alpha, int k, int M, int N,
                            const std::vector<double>& eps, Emit&& emit) {
    const ExpSumApprox approx = ExpSumApprox::fit(alpha);
    const std::size_t Q = approx.c.size();
    std::vector<double> u(Q, 0.0), decay(Q), tail(Q);
    for (std::size_t q = 0; q < Q; ++q) {
        decay[q] = std::exp(-approx.lambda[q]);
        const double t = -approx.lambda[q] * (M + 1);
        tail[q] = t < -745.0 ? 0.0 : std::exp(t);
    }
    const double* e = eps.data() + M - 1;  // e[t] = eps_t for t >= 1-M
    for (int t = 1 - M; t <= N - 1; ++t) {
        const double et = e[t];
        const double etail = (t - M >= 1 - M) ? e[t - M] : 0.0;
        for (std::size_t q = 0; q < Q; ++q)
            u[q] = decay[q] * (u[q] + et) - tail[q] * etail;
        const int n = t + 1;
        if (n >= 1) {
            double x = 0.0;
            for (std::size_t q = 0; q < Q; ++q)
                x += approx.c[q] * int_pow(u[q], k);
            emit(n, scale * x);
        }
    }
}

}  // namespace

VolterraPath simulate_powersum_path(double scale, double alpha, int k, int M,
                                    const NoiseSpec& noise, int N,
                                    std::uint64_t seed,
                                    std::uint64_t path_index, bool keep_eps) {
    VolterraPath path;
    path.M = M;
    path.seed = seed;
    std::vector<double> eps =
        draw_innovations(noise, N, M, seed, path_index);
    path.X.resize(static_cast<std::size_t>(N));
    run_powersum_recursion(scale, alpha, k, M, N, eps, [&](int n, double x) {
        path.X[static_cast<std::size_t>(n - 1)] = x;
    });
    if (keep_eps)
        path.eps = std::move(eps);
    else
        path.M = 0;
    return path;
}

std::vector<double> powersum_partial_sums(double scale, double alpha, int k,
                                          int M, const NoiseSpec& noise,
                                          const std::vector<int>& horizons,
                                          std::uint64_t seed,
                                          std::uint64_t path_index) {
    if (horizons.empty())
        throw std::invalid_argument("powersum_partial_sums: empty horizons");
    if (!std::is_sorted(horizons.begin(), horizons.end()))
        throw std::invalid_argument(
            "powersum_partial_sums: horizons must be increasing");
    const int N = horizons.back();
    const double mean = exact_mean_powersum(scale, alpha, k, M, noise);
    std::vector<double> eps = draw_innovations(noise, N, M, seed, path_index);
    std::vector<double> out(horizons.size(), 0.0);
    double running = 0.0;
    std::size_t next = 0;
    run_powersum_recursion(scale, alpha, k, M, N, eps, [&](int n, double x) {
        running += x - mean;
        while (next < horizons.size() &&
               horizons[next] == n) {
            out[next] = running;
            ++next;
        }
    });
    return out;
}

double exact_mean(const TruncatedKernel& kernel, const NoiseSpec& noise) {
    const int k = kernel.order();
    double total = 0.0;
    for (const auto& pi : enumerate_partitions(k)) {
        Rational weight(1);
        for (int p : pi.sizes()) weight *= noise.moments[p];
        if (weight == 0) continue;
        std::vector<int> T(static_cast<std::size_t>(pi.block_count()));
        for (int t = 0; t < pi.block_count(); ++t)
            T[static_cast<std::size_t>(t)] = t + 1;
        const std::vector<int> fixed(
            static_cast<std::size_t>(pi.block_count()), 0);
        total += to_double(weight) * s_prime_sum(kernel, pi, T, fixed);
    }
    return total;
}

double exact_mean_powersum(double scale, double alpha, int k, int M,
                           const NoiseSpec& noise) {
    if (k > 3)
        throw std::invalid_argument(
            "exact_mean_powersum: supported for k <= 3");
    if (k == 1) return 0.0;  // mu_1 = 0
    // every partition containing a singleton block carries mu_1 = 0; for
    // k <= 3 only the full-diagonal partition remains
    const double mu_k = to_double(noise.moments[k]);
    double s = 0.0;
    for (int i = M; i >= 1; --i)
        s += std::pow(static_cast<double>(k) * i, alpha);
    return scale * mu_k * s;
}

std::vector<std::vector<double>> decompose_path(
    const TruncatedKernel& kernel, const VolterraPath& path,
    const std::vector<TermIndex>& terms, const NoiseSpec& noise) {
    const int k = kernel.order();
    const int M = kernel.horizon();
    const int N = static_cast<int>(path.X.size());
    if (path.M != M)
        throw std::invalid_argument("decompose_path: horizon mismatch");
    int max_j = 0;
    for (const auto& term : terms)
        for (int j : term.j) max_j = std::max(max_j, j);
    const AppellFamily appell(noise.moments, std::max(max_j, k));

    std::vector<std::vector<double>> out(
        terms.size(), std::vector<double>(static_cast<std::size_t>(N), 0.0));
    std::vector<int> assigned;
    std::vector<int> lattice(static_cast<std::size_t>(k));
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
        const TermIndex& term = terms[ti];
        const Partition& pi = term.partition;
        if (pi.ground_size() != k)
            throw std::invalid_argument("decompose_path: term order mismatch");
        const int m = pi.block_count();
        const double c = to_double(term.c);
        assigned.assign(static_cast<std::size_t>(m), 0);
        for (int n = 1; n <= N; ++n) {
            double total = 0.0;
            // off-diagonal sum over (i_1..i_m) in {1..M}^m, all distinct
            const std::function<double(int)> recurse = [&](int t) -> double {
                if (t == m) {
                    for (int e = 1; e <= k; ++e)
                        lattice[static_cast<std::size_t>(e - 1)] =
                            assigned[static_cast<std::size_t>(pi.block_of(e))];
                    double v = kernel.at(lattice);
                    for (int q = 0; q < m; ++q) {
                        const int jq = term.j[static_cast<std::size_t>(q)];
                        if (jq > 0)
                            v *= appell.eval(
                                jq,
                                path.eps_at(
                                    n - assigned[static_cast<std::size_t>(q)]));
                    }
                    return v;
                }
                double s = 0.0;
                for (int v = 1; v <= M; ++v) {
                    bool clash = false;
                    for (int q = 0; q < t && !clash; ++q)
                        if (assigned[static_cast<std::size_t>(q)] == v)
                            clash = true;
                    if (clash) continue;
                    assigned[static_cast<std::size_t>(t)] = v;
                    s += recurse(t + 1);
                }
                return s;
            };
            total = recurse(0);
            out[ti][static_cast<std::size_t>(n - 1)] = c * total;
        }
    }
    return out;
}

double discrete_chaos(const TruncatedKernel& h, const std::vector<double>& eps) {
    const int k = h.order();
    const int M = h.horizon();
    if (eps.size() < static_cast<std::size_t>(M))
        throw std::invalid_argument("discrete_chaos: need M innovations");
    const std::vector<double>& v = h.values();
    if (k == 1) {
        double s = 0.0;
        for (int i = 1; i <= M; ++i)
            s += v[static_cast<std::size_t>(i - 1)] *
                 eps[static_cast<std::size_t>(i - 1)];
        return s;
    }
    if (k == 2) {
        double s = 0.0;
        for (int i1 = 1; i1 <= M; ++i1) {
            const double e1 = eps[static_cast<std::size_t>(i1 - 1)];
            const double* row = v.data() + static_cast<std::size_t>(i1 - 1) *
                                               static_cast<std::size_t>(M);
            for (int i2 = 1; i2 <= M; ++i2) {
                if (i2 == i1) continue;
                s += row[i2 - 1] * e1 * eps[static_cast<std::size_t>(i2 - 1)];
            }
        }
        return s;
    }
    std::vector<int> idx(static_cast<std::size_t>(k), 1);
    double s = 0.0;
    std::size_t flat = 0;
    std::fill(idx.begin(), idx.end(), 1);
    do {
        const double hv = v[flat++];
        if (hv != 0.0 && all_distinct(idx)) {
            double prod = hv;
            for (int j = 0; j < k; ++j)
                prod *=
                    eps[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)] - 1)];
            s += prod;
        }
    } while (advance_odometer(idx, M));
    return s;
}

double chaos_variance(const TruncatedKernel& h) {
    const int k = h.order();
    const int M = h.horizon();
    std::vector<int> idx(static_cast<std::size_t>(k), 1);
    double s = 0.0;
    do {
        if (all_distinct(idx)) {
            const double hv = h.at_symmetrized(idx);
            s += hv * hv;
        }
    } while (advance_odometer(idx, M));
    return to_double(Rational(factorial(static_cast<unsigned>(k)))) * s;
}

L2Report check_l2_power_bounds(const std::vector<double>& gamma) {
    L2Report report;
    report.power_bound_route = true;
    report.conclusive = true;
    report.well_defined = std::all_of(gamma.begin(), gamma.end(),
                                      [](double g) { return g < -0.5; });
    report.note = report.well_defined
                      ? "all exponents below -1/2: L2 well-defined"
                      : "some exponent >= -1/2: sufficient condition fails";
    return report;
}

L2Report check_l2_tabulated(
    int k, const std::function<double(std::span<const int>)>& a,
    const std::vector<int>& M_values, double slope_threshold,
    double eval_budget) {
    if (M_values.size() < 4)
        throw std::invalid_argument("check_l2_tabulated: need >= 4 truncations");
    L2Report report;
    report.power_bound_route = false;
    report.slope_threshold = slope_threshold;
    report.note =
        "advisory: truncated partial-sum growth diagnostics, not a decision "
        "procedure for the infinite-sum conditions";

    std::vector<int> lattice(static_cast<std::size_t>(k));
    const auto a_pi = [&](const Partition& pi, std::span<const int> blockv) {
        for (int e = 1; e <= k; ++e)
            lattice[static_cast<std::size_t>(e - 1)] =
                blockv[static_cast<std::size_t>(pi.block_of(e))];
        return a(lattice);
    };

    bool any_divergent = false;
    for (const auto& pi : enumerate_partitions(k)) {
        const int m = pi.block_count();
        const auto finish_entry = [&](L2ConditionEntry entry) {
            bool fit_ok = !entry.skipped;
            for (double v : entry.partial_sums)
                if (!(v > 0.0)) fit_ok = false;
            if (fit_ok) {
                const SlopeFit fit = fit_loglog_slope(entry.M_values,
                                                      entry.partial_sums);
                entry.slope = fit.slope;
                entry.divergent = fit.slope >= slope_threshold;
            }
            any_divergent = any_divergent || entry.divergent;
            report.entries.push_back(std::move(entry));
        };

        // square-summability of a_pi off the diagonals
        {
            L2ConditionEntry entry;
            entry.partition = pi.to_string();
            double cost = 0.0;
            for (int M : M_values) cost += std::pow(M, m);
            if (cost > eval_budget) {
                entry.skipped = true;
            } else {
                std::vector<int> blockv(static_cast<std::size_t>(m), 1);
                for (int M : M_values) {
                    double s = 0.0;
                    std::fill(blockv.begin(), blockv.end(), 1);
                    do {
                        if (!all_distinct(blockv)) continue;
                        const double v = a_pi(pi, blockv);
                        s += v * v;
                    } while (advance_odometer(blockv, M));
                    entry.M_values.push_back(static_cast<double>(M));
                    entry.partial_sums.push_back(s);
                }
            }
            finish_entry(std::move(entry));
        }

        // S'_T |a_pi| conditions for every admissible nonempty T
        const std::vector<int> sizes = pi.sizes();
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            bool admissible = true;
            for (int t = 0; t < m; ++t)
                if ((mask >> t) & 1u)
                    if (sizes[static_cast<std::size_t>(t)] < 2)
                        admissible = false;
            if (!admissible) continue;
            L2ConditionEntry entry;
            entry.partition = pi.to_string();
            for (int t = 0; t < m; ++t)
                if ((mask >> t) & 1u) entry.T.push_back(t + 1);
            double cost = 0.0;
            for (int M : M_values) cost += std::pow(M, m);
            if (cost > eval_budget) {
                entry.skipped = true;
                finish_entry(std::move(entry));
                continue;
            }
            const int f = m - static_cast<int>(entry.T.size());
            std::vector<int> blockv(static_cast<std::size_t>(m), 1);
            std::vector<int> free_pos, sum_pos;
            for (int t = 0; t < m; ++t)
                ((mask >> t) & 1u ? sum_pos : free_pos).push_back(t);
            for (int M : M_values) {
                // inner absolute sum over the T blocks, distinct from each
                // other and from the free values
                const std::function<double(std::size_t)> inner =
                    [&](std::size_t pos) -> double {
                    if (pos == sum_pos.size())
                        return std::abs(a_pi(pi, blockv));
                    const int t = sum_pos[pos];
                    double s = 0.0;
                    for (int v = 1; v <= M; ++v) {
                        bool clash = false;
                        for (int q = 0; q < m && !clash; ++q) {
                            if (q == t) continue;
                            const bool counted =
                                std::find(free_pos.begin(), free_pos.end(),
                                          q) != free_pos.end() ||
                                std::find(sum_pos.begin(),
                                          sum_pos.begin() +
                                              static_cast<std::ptrdiff_t>(pos),
                                          q) !=
                                    sum_pos.begin() +
                                        static_cast<std::ptrdiff_t>(pos);
                            if (counted &&
                                blockv[static_cast<std::size_t>(q)] == v)
                                clash = true;
                        }
                        if (clash) continue;
                        blockv[static_cast<std::size_t>(t)] = v;
                        s += inner(pos + 1);
                    }
                    return s;
                };
                double total = 0.0;
                if (f == 0) {
                    total = inner(0);
                } else {
                    // off-diagonal sum over free blocks of the squared
                    // inner sums
                    std::vector<int> freev(static_cast<std::size_t>(f), 1);
                    do {
                        bool distinct = all_distinct(freev);
                        if (distinct) {
                            for (std::size_t q = 0; q < freev.size(); ++q)
                                blockv[static_cast<std::size_t>(
                                    free_pos[q])] = freev[q];
                            const double s = inner(0);
                            total += s * s;
                        }
                    } while (advance_odometer(freev, M));
                }
                entry.M_values.push_back(static_cast<double>(M));
                entry.partial_sums.push_back(total);
            }
            finish_entry(std::move(entry));
        }
    }
    report.well_defined = !any_divergent;
    report.conclusive = false;
    return report;
}

}  // namespace volterra
