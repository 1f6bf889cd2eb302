// Command-line front end: every experiment and utility in the library,
// with JSON config override, CSV/JSON artifacts and a tolerance manifest
// driving pass/fail. Exit codes: 0 success, 1 usage error, 2 tolerance
// failure, 3 numeric failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "volterra/acceptance.hpp"
#include "volterra/appell.hpp"
#include "volterra/kernel.hpp"
#include "volterra/kernel_json.hpp"
#include "volterra/limitlab.hpp"
#include "volterra/partitions.hpp"
#include "volterra/simulate.hpp"
#include "volterra/stats.hpp"
#include "volterra/terms.hpp"

using nlohmann::json;
using namespace volterra;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitNumeric = 3;

std::string g_out_dir;

std::string out_path(const std::string& name) {
    if (g_out_dir.empty() || g_out_dir == ".") return name;
    return g_out_dir + "/" + name;
}

// stable shortest-round-trip formatting so artifact files are
// byte-identical for identical configurations
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = std::strtod(buf, nullptr);
    for (int prec = 1; prec <= 16; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == parsed) return shorter;
    }
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void emit(const json& doc) { std::printf("%s\n", doc.dump(2).c_str()); }

void write_run_manifest(const std::string& command, const json& params,
                        double wall_seconds) {
    json doc;
    doc["command"] = command;
    doc["params"] = params;
    doc["wall_seconds"] = wall_seconds;
    write_text(out_path("run_manifest.json"), doc.dump(2) + "\n");
}

struct KernelOpts {
    std::string spec;  // name or inline JSON
    int k = 2;
    double alpha = -1.2;
    std::vector<double> gamma;
    std::vector<double> ratio_a;
    double ratio_b = 0.0;
    double scale = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kernel", spec,
                        "kernel: powersum | product | ratio | inline JSON")
            ->default_val("powersum");
        cmd->add_option("--k", k, "kernel order");
        cmd->add_option("--alpha", alpha, "homogeneity exponent (powersum)");
        cmd->add_option("--gamma", gamma, "exponents (product kernel)")
            ->delimiter(',');
        cmd->add_option("--ratio-a", ratio_a, "numerator exponents (ratio)")
            ->delimiter(',');
        cmd->add_option("--ratio-b", ratio_b, "denominator exponent (ratio)");
        cmd->add_option("--scale", scale, "scalar multiplier");
    }

    Kernel build() const {
        Kernel base = [&] {
            if (!spec.empty() && spec.front() == '{')
                return kernel_from_string(spec);
            if (spec == "powersum") return Kernel::power_sum(k, alpha);
            if (spec == "product") return Kernel::product_power(gamma);
            if (spec == "ratio") return Kernel::ratio_form(ratio_a, ratio_b);
            throw CLI::ValidationError("--kernel",
                                       "unknown kernel form: " + spec);
        }();
        return scale == 1.0 ? base : Kernel::scale(scale, base);
    }
};

json slope_json(const SlopeFit& fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"ci_halfwidth", fit.ci_halfwidth}};
}

// --config JSON overrides flags: each key/value is appended as a flag of
// the active subcommand after the user-supplied arguments, with take-last
// resolution
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json doc;
    in >> doc;
    if (!doc.is_object())
        throw CLI::ValidationError("--config", "expected a JSON object");
    std::vector<std::string> args;
    for (const auto& [key, value] : doc.items()) {
        args.push_back("--" + key);
        if (value.is_string())
            args.push_back(value.get<std::string>());
        else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!joined.empty()) joined += ",";
                joined += v.is_string() ? v.get<std::string>() : v.dump();
            }
            args.push_back(joined);
        } else if (!value.is_boolean() || !value.get<bool>()) {
            args.push_back(value.dump());
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diagonal-included polynomial moving averages: simulation, "
                 "decomposition and limit experiments"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    const char* env_out = std::getenv("VOLTERRA_OUT");
    g_out_dir = env_out ? env_out : ".";
    app.add_option("--out", g_out_dir, "artifact output directory");
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON file whose keys override subcommand flags");

    int exit_code = kExitOk;
    json params;
    std::string command;
    std::function<void()> action;

    // ---- kernel validate / trace / htnorm ---------------------------------
    auto* kernel_cmd = app.add_subcommand("kernel", "kernel utilities");
    kernel_cmd->require_subcommand(1);

    {
        auto* cmd = kernel_cmd->add_subcommand(
            "validate", "admissibility report for a kernel");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        cmd->callback([&, opts] {
            command = "kernel validate";
            action = [&, opts] {
                const Kernel kernel = opts->build();
                const GhkbReport rep = validate_ghkb(kernel);
                json doc;
                doc["kernel"] = kernel_to_json(kernel);
                doc["valid"] = rep.valid;
                doc["alpha_in_range"] = rep.alpha_in_range;
                doc["homogeneous"] = rep.homogeneous;
                doc["homogeneity_max_rel_err"] = rep.homogeneity_max_rel_err;
                doc["bounded"] = rep.bounded;
                doc["bound_constant"] = rep.bound_constant;
                doc["failures"] = rep.failures;
                params = doc["kernel"];
                emit(doc);
                if (!rep.valid) exit_code = kExitTolerance;
            };
        });
    }
    {
        auto* cmd = kernel_cmd->add_subcommand(
            "trace", "paired trace of a kernel at given points");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto r = std::make_shared<int>(1);
        auto points = std::make_shared<std::vector<double>>();
        cmd->add_option("--r", *r, "number of integrated pairs");
        cmd->add_option("--x", *points,
                        "evaluation point(s), flattened coordinates")
            ->delimiter(',')
            ->required();
        cmd->callback([&, opts, r, points] {
            command = "kernel trace";
            action = [&, opts, r, points] {
                const TraceKernel trace(opts->build(), *r);
                const int d = trace.arity();
                if (points->size() % static_cast<std::size_t>(d) != 0)
                    throw CLI::ValidationError(
                        "--x", "coordinate count must be a multiple of " +
                                   std::to_string(d));
                json rows = json::array();
                for (std::size_t off = 0; off + d <= points->size();
                     off += static_cast<std::size_t>(d)) {
                    std::span<const double> x(points->data() + off,
                                              static_cast<std::size_t>(d));
                    json row;
                    row["x"] = std::vector<double>(x.begin(), x.end());
                    row["value"] = trace.analytic() ? trace.eval(x)
                                                    : trace.eval_quadrature(x);
                    if (trace.analytic())
                        row["quadrature"] = trace.eval_quadrature(x);
                    rows.push_back(row);
                }
                json doc;
                doc["r"] = *r;
                doc["arity"] = d;
                doc["alpha_r"] = trace.alpha();
                doc["analytic"] = trace.analytic();
                doc["points"] = rows;
                params = {{"r", *r}};
                emit(doc);
            };
        });
    }
    {
        auto* cmd = kernel_cmd->add_subcommand(
            "htnorm", "squared window norm of the shifted trace kernel");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto r = std::make_shared<int>(0);
        auto t = std::make_shared<double>(1.0);
        cmd->add_option("--r", *r, "number of integrated pairs");
        cmd->add_option("--t", *t, "time horizon");
        cmd->callback([&, opts, r, t] {
            command = "kernel htnorm";
            action = [&, opts, r, t] {
                const TraceKernel trace(opts->build(), *r);
                const L2Result res = trace.l2_norm_sq_h(*t);
                json doc;
                doc["r"] = *r;
                doc["t"] = *t;
                doc["norm_sq"] = res.value;
                doc["std_error"] = res.std_error;
                params = {{"r", *r}, {"t", *t}};
                emit(doc);
            };
        });
    }

    // ---- partitions -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("partitions",
                                       "set partitions of {1..k}");
        auto k = std::make_shared<int>(3);
        cmd->add_option("--k", *k, "ground set size")->required();
        cmd->callback([&, k] {
            command = "partitions";
            action = [&, k] {
                const auto all = enumerate_partitions(*k);
                json doc;
                doc["k"] = *k;
                doc["count"] = all.size();
                json list = json::array();
                for (const auto& p : all) list.push_back(p.to_string());
                doc["partitions"] = list;
                params = {{"k", *k}};
                emit(doc);
            };
        });
    }

    // ---- appell -----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "appell", "centered polynomial family of a noise law");
        auto law = std::make_shared<std::string>("gaussian");
        auto K = std::make_shared<int>(4);
        cmd->add_option("--moments", *law, "noise law");
        cmd->add_option("--K", *K, "highest order");
        cmd->callback([&, law, K] {
            command = "appell";
            action = [&, law, K] {
                const NoiseLaw nl = noise_law_from_string(*law);
                const MomentVector mv = MomentVector::of(nl, 2 * *K + 2);
                AppellFamily fam(mv, *K);
                json doc;
                doc["law"] = to_string(nl);
                doc["K"] = *K;
                json rows = json::array();
                for (int p = 0; p <= *K; ++p) {
                    json row;
                    row["p"] = p;
                    json coeffs = json::array();
                    for (int j = 0; j <= p; ++j)
                        coeffs.push_back(fam.coeff(p, j).str());
                    row["coefficients"] = coeffs;  // constant term first
                    rows.push_back(row);
                }
                doc["polynomials"] = rows;
                params = {{"moments", *law}, {"K", *K}};
                emit(doc);
            };
        });
    }

    // ---- terms ------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "terms", "off-diagonal decomposition terms for order k");
        auto k = std::make_shared<int>(2);
        auto law = std::make_shared<std::string>("gaussian");
        cmd->add_option("--k", *k, "order")->required();
        cmd->add_option("--noise", *law, "noise law");
        cmd->callback([&, k, law] {
            command = "terms";
            action = [&, k, law] {
                const NoiseLaw nl = noise_law_from_string(*law);
                const auto terms =
                    enumerate_terms(*k, MomentVector::of(nl, 2 * *k + 2));
                json doc;
                doc["k"] = *k;
                doc["law"] = to_string(nl);
                json rows = json::array();
                std::vector<long> per_r(static_cast<std::size_t>(*k / 2 + 1),
                                        0);
                for (const auto& t : terms) {
                    json row;
                    row["partition"] = t.partition.to_string();
                    row["j"] = t.j;
                    row["r"] = t.r;
                    row["coefficient"] = t.c.str();
                    row["regime"] =
                        t.regime == MemoryRegime::LongMemoryContributor
                            ? "long-memory"
                            : "short-memory";
                    rows.push_back(row);
                    if (t.regime == MemoryRegime::LongMemoryContributor)
                        ++per_r[static_cast<std::size_t>(t.r)];
                }
                doc["terms"] = rows;
                doc["long_memory_multiplicities"] = per_r;
                params = {{"k", *k}, {"noise", *law}};
                emit(doc);
            };
        });
    }

    // ---- simulate ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "simulate", "sample a path and write it as CSV");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto M = std::make_shared<int>(16);
        auto N = std::make_shared<int>(64);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto path_index = std::make_shared<std::uint64_t>(0);
        auto law = std::make_shared<std::string>("gaussian");
        cmd->add_option("--M", *M, "truncation horizon");
        cmd->add_option("--N", *N, "path length");
        cmd->add_option("--seed", *seed, "root seed");
        cmd->add_option("--path", *path_index, "path index");
        cmd->add_option("--noise", *law, "noise law");
        cmd->callback([&, opts, M, N, seed, path_index, law] {
            command = "simulate";
            action = [&, opts, M, N, seed, path_index, law] {
                const Kernel kernel = opts->build();
                const NoiseSpec noise = NoiseSpec::make(
                    noise_law_from_string(*law), kernel.arity());
                VolterraPath path;
                if (kernel.kind() == KernelKind::PowerSum ||
                    (kernel.kind() == KernelKind::Scale &&
                     kernel.children()[0].kind() == KernelKind::PowerSum)) {
                    path = simulate_powersum_path(
                        kernel.scale_factor(), kernel.alpha(), kernel.arity(),
                        *M, noise, *N, *seed, *path_index);
                } else {
                    path = simulate_path(
                        TruncatedKernel::from_kernel(kernel, *M), noise, *N,
                        *seed, *path_index);
                }
                std::string csv = "n,X\n";
                for (int n = 1; n <= *N; ++n)
                    csv += std::to_string(n) + "," +
                           num(path.X[static_cast<std::size_t>(n - 1)]) + "\n";
                write_text(out_path("path.csv"), csv);
                params = {{"M", *M},    {"N", *N},
                          {"seed", *seed}, {"path", *path_index},
                          {"noise", *law}, {"kernel", kernel_to_json(kernel)}};
                emit({{"written", out_path("path.csv")}, {"N", *N}});
            };
        });
    }

    // ---- mean -------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("mean", "exact mean of the process");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto M = std::make_shared<int>(16);
        auto law = std::make_shared<std::string>("gaussian");
        cmd->add_option("--M", *M, "truncation horizon");
        cmd->add_option("--noise", *law, "noise law");
        cmd->callback([&, opts, M, law] {
            command = "mean";
            action = [&, opts, M, law] {
                const Kernel kernel = opts->build();
                const NoiseSpec noise = NoiseSpec::make(
                    noise_law_from_string(*law), kernel.arity());
                const double mu = exact_mean(
                    TruncatedKernel::from_kernel(kernel, *M), noise);
                params = {{"M", *M}, {"noise", *law}};
                emit({{"mean", mu}, {"M", *M}, {"noise", *law}});
            };
        });
    }

    // ---- decompose-check --------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "decompose-check",
            "verify that the off-diagonal term paths sum to the centered path");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto M = std::make_shared<int>(6);
        auto N = std::make_shared<int>(32);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto law = std::make_shared<std::string>("gaussian");
        auto tol = std::make_shared<double>(1e-9);
        cmd->add_option("--M", *M, "truncation horizon");
        cmd->add_option("--N", *N, "path length");
        cmd->add_option("--seed", *seed, "root seed");
        cmd->add_option("--noise", *law, "noise law");
        cmd->add_option("--tol", *tol, "maximum relative pathwise error");
        cmd->callback([&, opts, M, N, seed, law, tol] {
            command = "decompose-check";
            action = [&, opts, M, N, seed, law, tol] {
                const Kernel kernel = opts->build();
                const TruncatedKernel table =
                    TruncatedKernel::from_kernel(kernel, *M).symmetrized();
                const NoiseSpec noise = NoiseSpec::make(
                    noise_law_from_string(*law), kernel.arity());
                const auto path = simulate_path(table, noise, *N, *seed);
                const auto terms =
                    enumerate_terms(kernel.arity(), noise.moments);
                const auto pieces =
                    decompose_path(table, path, terms, noise);
                const double mu = exact_mean(table, noise);
                double scale = 0.0, worst = 0.0;
                for (double x : path.X)
                    scale = std::max(scale, std::abs(x - mu));
                for (int n = 0; n < *N; ++n) {
                    double total = 0.0;
                    for (const auto& piece : pieces)
                        total += piece[static_cast<std::size_t>(n)];
                    worst = std::max(
                        worst,
                        std::abs(total -
                                 (path.X[static_cast<std::size_t>(n)] - mu)) /
                            std::max(scale, 1e-30));
                }
                params = {{"M", *M}, {"N", *N}, {"seed", *seed},
                          {"noise", *law}, {"tol", *tol}};
                emit({{"terms", terms.size()},
                      {"max_rel_error", worst},
                      {"tolerance", *tol},
                      {"passed", worst <= *tol}});
                if (worst > *tol) exit_code = kExitTolerance;
            };
        });
    }

    // ---- classify ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "classify", "memory regime from kernel structure");
        auto k = std::make_shared<int>(0);
        auto alpha = std::make_shared<double>(0.0);
        auto gamma = std::make_shared<std::vector<double>>();
        auto diag = std::make_shared<bool>(false);
        auto* k_opt = cmd->add_option("--k", *k, "order (homogeneous route)");
        cmd->add_option("--alpha", *alpha, "exponent (homogeneous route)");
        cmd->add_option("--gamma", *gamma, "power bounds route")
            ->delimiter(',');
        cmd->add_flag("--diagonal-included", *diag,
                      "power bounds cover the diagonal");
        cmd->callback([&, k, alpha, gamma, diag, k_opt] {
            command = "classify";
            action = [&, k, alpha, gamma, diag, k_opt] {
                const ClassificationResult res =
                    !gamma->empty()
                        ? classify_memory_power_bounds(*gamma, *diag)
                        : (k_opt->count()
                               ? classify_memory_ghkb(*k, *alpha)
                               : throw CLI::ValidationError(
                                     "classify",
                                     "need --k/--alpha or --gamma"));
                json doc;
                doc["regime"] = res.regime == Regime::LongMemory
                                    ? "long-memory"
                                    : res.regime == Regime::ShortMemory
                                          ? "short-memory"
                                          : "inconclusive";
                if (res.regime == Regime::LongMemory) doc["H"] = res.H;
                doc["basis"] = res.basis;
                params = {{"k", *k}, {"alpha", *alpha}, {"gamma", *gamma}};
                emit(doc);
            };
        });
    }

    // ---- acf --------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "acf", "empirical autocovariance across paths, written as CSV");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto M = std::make_shared<int>(16384);
        auto N = std::make_shared<int>(8192);
        auto paths = std::make_shared<int>(100);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto L = std::make_shared<int>(40);
        auto fit_lo = std::make_shared<int>(4);
        auto fit_hi = std::make_shared<int>(40);
        auto target = std::make_shared<double>(
            std::numeric_limits<double>::quiet_NaN());
        auto tol = std::make_shared<double>(0.1);
        cmd->add_option("--M", *M, "truncation horizon");
        cmd->add_option("--N", *N, "path length");
        cmd->add_option("--paths", *paths, "number of paths");
        cmd->add_option("--seed", *seed, "root seed");
        cmd->add_option("--lags", *L, "largest lag");
        cmd->add_option("--fit-lo", *fit_lo, "first lag of the fit window");
        cmd->add_option("--fit-hi", *fit_hi, "last lag of the fit window");
        cmd->add_option("--target-slope", *target,
                        "expected log-log slope (enables pass/fail)");
        cmd->add_option("--slope-tol", *tol, "allowed slope deviation");
        cmd->callback([&, opts, M, N, paths, seed, L, fit_lo, fit_hi, target,
                       tol] {
            command = "acf";
            action = [&, opts, M, N, paths, seed, L, fit_lo, fit_hi, target,
                      tol] {
                const Kernel kernel = opts->build();
                if (kernel.kind() != KernelKind::PowerSum)
                    throw CLI::ValidationError(
                        "acf", "only the powersum kernel has a fast path");
                const NoiseSpec noise =
                    NoiseSpec::make(NoiseLaw::Gaussian, kernel.arity());
                const double mu = exact_mean_powersum(
                    1.0, kernel.alpha(), kernel.arity(), *M, noise);
                std::vector<std::vector<double>> sample(
                    static_cast<std::size_t>(*paths));
                for (int p = 0; p < *paths; ++p) {
                    auto path = simulate_powersum_path(
                        1.0, kernel.alpha(), kernel.arity(), *M, noise, *N,
                        *seed, static_cast<std::uint64_t>(p), false);
                    for (auto& v : path.X) v -= mu;
                    sample[static_cast<std::size_t>(p)] = std::move(path.X);
                }
                const double theory_expo = 2.0 * kernel.hurst() - 2.0;
                const auto acf =
                    empirical_acf(sample, *L, *fit_lo, *fit_hi, theory_expo);
                std::string csv = "lag,gamma_hat,se,gamma_theory\n";
                for (std::size_t n = 0; n < acf.gamma_hat.size(); ++n)
                    csv += std::to_string(acf.lags[n]) + "," +
                           num(acf.gamma_hat[n]) + "," + num(acf.se[n]) + "," +
                           (acf.gamma_theory.empty()
                                ? ""
                                : num(acf.gamma_theory[n])) +
                           "\n";
                write_text(out_path("acf.csv"), csv);
                json doc;
                doc["written"] = out_path("acf.csv");
                doc["fit"] = slope_json(acf.fit);
                doc["theory_exponent"] = theory_expo;
                params = {{"M", *M}, {"N", *N}, {"paths", *paths},
                          {"seed", *seed}};
                if (!std::isnan(*target)) {
                    const bool pass =
                        acf.fit_valid &&
                        std::abs(acf.fit.slope - *target) <= *tol;
                    doc["passed"] = pass;
                    if (!pass) exit_code = kExitTolerance;
                }
                emit(doc);
            };
        });
    }

    // ---- varscale ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "varscale", "partial-sum variance across horizons, as CSV");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto M = std::make_shared<int>(131072);
        auto paths = std::make_shared<int>(200);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto lo = std::make_shared<int>(8);
        auto hi = std::make_shared<int>(14);
        auto target = std::make_shared<double>(
            std::numeric_limits<double>::quiet_NaN());
        auto tol = std::make_shared<double>(0.1);
        cmd->add_option("--M", *M, "truncation horizon");
        cmd->add_option("--paths", *paths, "number of paths");
        cmd->add_option("--seed", *seed, "root seed");
        cmd->add_option("--log2-n-lo", *lo, "smallest horizon exponent");
        cmd->add_option("--log2-n-hi", *hi, "largest horizon exponent");
        cmd->add_option("--target-slope", *target,
                        "expected log-log slope (enables pass/fail)");
        cmd->add_option("--slope-tol", *tol, "allowed slope deviation");
        cmd->callback([&, opts, M, paths, seed, lo, hi, target, tol] {
            command = "varscale";
            action = [&, opts, M, paths, seed, lo, hi, target, tol] {
                const Kernel kernel = opts->build();
                if (kernel.kind() != KernelKind::PowerSum)
                    throw CLI::ValidationError(
                        "varscale",
                        "only the powersum kernel has a fast path");
                const NoiseSpec noise =
                    NoiseSpec::make(NoiseLaw::Gaussian, kernel.arity());
                std::vector<int> N_list;
                for (int e = *lo; e <= *hi; ++e) N_list.push_back(1 << e);
                std::vector<std::vector<double>> S(
                    static_cast<std::size_t>(*paths));
                for (int p = 0; p < *paths; ++p)
                    S[static_cast<std::size_t>(p)] = powersum_partial_sums(
                        1.0, kernel.alpha(), kernel.arity(), *M, noise,
                        N_list, *seed, static_cast<std::uint64_t>(p));
                const auto vs = partial_sum_variance(S, N_list);
                std::string csv = "N,var,se\n";
                for (std::size_t i = 0; i < vs.N.size(); ++i)
                    csv += num(vs.N[i]) + "," + num(vs.var[i]) + "," +
                           num(vs.se[i]) + "\n";
                write_text(out_path("varscale.csv"), csv);
                json doc;
                doc["written"] = out_path("varscale.csv");
                doc["fit"] = slope_json(vs.fit);
                doc["fit_valid"] = vs.fit_valid;
                doc["ci_warning"] = vs.ci_warning;
                params = {{"M", *M}, {"paths", *paths}, {"seed", *seed}};
                if (!std::isnan(*target)) {
                    const bool pass = vs.fit_valid &&
                                      std::abs(vs.fit.slope - *target) <= *tol;
                    doc["passed"] = pass;
                    if (!pass) exit_code = kExitTolerance;
                }
                emit(doc);
            };
        });
    }

    // ---- hermite ----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "hermite", "simulate the multiple-integral limit components");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto r = std::make_shared<int>(0);
        auto t = std::make_shared<double>(1.0);
        auto draws = std::make_shared<int>(2000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto core_cells = std::make_shared<int>(512);
        auto core_width = std::make_shared<double>(33.0);
        auto total_width = std::make_shared<double>(1e5);
        auto growth = std::make_shared<double>(1.005);
        cmd->add_option("--r", *r, "number of integrated pairs");
        cmd->add_option("--t", *t, "time");
        cmd->add_option("--draws", *draws, "replications");
        cmd->add_option("--seed", *seed, "root seed");
        cmd->add_option("--grid-core-cells", *core_cells, "uniform core cells");
        cmd->add_option("--grid-core-width", *core_width, "uniform core width");
        cmd->add_option("--grid-total-width", *total_width, "window width");
        cmd->add_option("--grid-growth", *growth, "tail growth factor");
        cmd->callback([&, opts, r, t, draws, seed, core_cells, core_width,
                       total_width, growth] {
            command = "hermite";
            action = [&, opts, r, t, draws, seed, core_cells, core_width,
                      total_width, growth] {
                const TraceKernel trace(opts->build(), *r);
                const ChaosGrid grid = ChaosGrid::build(
                    *t, *core_width, *core_cells, *growth, *total_width);
                const auto z =
                    simulate_hermite(trace, *t, grid, *draws, *seed);
                std::string csv = "draw,value\n";
                for (std::size_t i = 0; i < z.size(); ++i)
                    csv += std::to_string(i) + "," + num(z[i]) + "\n";
                write_text(out_path("hermite.csv"), csv);
                const L2Result ref = trace.l2_norm_sq_h(*t);
                const double fact = [&] {
                    double f = 1.0;
                    for (int j = 2; j <= trace.arity(); ++j) f *= j;
                    return f;
                }();
                params = {{"r", *r}, {"t", *t}, {"draws", *draws},
                          {"seed", *seed}};
                emit({{"written", out_path("hermite.csv")},
                      {"draws", *draws},
                      {"variance", variance(z)},
                      {"reference_variance", fact * ref.value},
                      {"reference_se", fact * ref.std_error}});
            };
        });
    }

    // ---- nclt -------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "nclt", "normalized partial sums against the simulated limit");
        auto p = std::make_shared<NcltParams>();
        auto law = std::make_shared<std::string>("gaussian");
        cmd->add_option("--alpha", p->alpha, "exponent");
        cmd->add_option("--k", p->k, "order");
        cmd->add_option("--M", p->M, "truncation horizon");
        cmd->add_option("--N", p->N, "horizon");
        cmd->add_option("--paths", p->paths, "paths");
        cmd->add_option("--seed", p->seed, "root seed");
        cmd->add_option("--noise", *law, "noise law");
        cmd->add_option("--limit-draws", p->limit_draws, "limit replications");
        cmd->add_option("--grid-core-cells", p->grid_cells_core, "core cells");
        cmd->add_option("--grid-core-width", p->grid_core_width, "core width");
        cmd->add_option("--grid-total-width", p->grid_total_width,
                        "window width");
        cmd->add_option("--grid-growth", p->grid_tail_growth, "tail growth");
        cmd->callback([&, p, law] {
            command = "nclt";
            action = [&, p, law] {
                p->law = noise_law_from_string(*law);
                const NcltReport rep = nclt_compare(*p);
                json doc;
                doc["H"] = rep.H;
                doc["var_t1"] = rep.var_t1;
                doc["var_t1_se"] = rep.var_t1_se;
                doc["var_thalf"] = rep.var_thalf;
                doc["limit_var_quadrature"] = rep.limit_var_quad;
                doc["limit_var_quadrature_se"] = rep.limit_var_quad_se;
                doc["limit_var_mc"] = rep.limit_var_mc;
                doc["limit_var_mc_se"] = rep.limit_var_mc_se;
                doc["self_sim_ratio"] = rep.self_sim_ratio;
                doc["self_sim_expected"] = rep.self_sim_expected;
                doc["ks_statistic"] = rep.ks_t1.statistic;
                doc["ks_threshold_1pct"] = rep.ks_t1.threshold_1pct;
                doc["ks_rejected_1pct"] = rep.ks_t1.rejected_1pct;
                params = {{"alpha", p->alpha}, {"k", p->k}, {"M", p->M},
                          {"N", p->N}, {"paths", p->paths}, {"seed", p->seed}};
                write_text(out_path("nclt.json"), doc.dump(2) + "\n");
                emit(doc);
            };
        });
    }

    // ---- clt --------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "clt", "short-memory central limit comparison");
        auto p = std::make_shared<CltParams>();
        cmd->add_option("--gamma", p->gamma, "separable kernel exponents")
            ->delimiter(',');
        cmd->add_option("--M", p->M, "truncation horizon");
        cmd->add_option("--N", p->N, "horizon");
        cmd->add_option("--paths", p->paths, "paths");
        cmd->add_option("--seed", p->seed, "root seed");
        cmd->callback([&, p] {
            command = "clt";
            action = [&, p] {
                const CltReport rep = clt_compare(*p);
                json doc;
                doc["sigma2_paths"] = rep.sigma2_paths;
                doc["sigma2_paths_se"] = rep.sigma2_paths_se;
                doc["sigma2_acf"] = rep.sigma2_acf;
                doc["sigma2_split_a"] = rep.sigma2_split_a;
                doc["sigma2_split_b"] = rep.sigma2_split_b;
                doc["sigma2_split_joint_se"] = rep.sigma2_split_joint_se;
                doc["ad_statistic"] = rep.normality.a2_star;
                doc["ad_threshold_1pct"] = rep.normality.threshold_1pct;
                doc["ad_rejected_1pct"] = rep.normality.rejected_1pct;
                doc["sigma2_nonpositive"] = rep.sigma2_nonpositive;
                params = {{"gamma", p->gamma}, {"M", p->M}, {"N", p->N},
                          {"paths", p->paths}, {"seed", p->seed}};
                write_text(out_path("clt.json"), doc.dump(2) + "\n");
                emit(doc);
                if (rep.sigma2_nonpositive) exit_code = kExitTolerance;
            };
        });
    }

    // ---- hyper ------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "hyper", "moment-ratio diagnostic of the polynomial form");
        auto opts = std::make_shared<KernelOpts>();
        opts->attach(cmd);
        auto M = std::make_shared<int>(8);
        auto p = std::make_shared<double>(4.0);
        auto samples = std::make_shared<int>(40000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto law = std::make_shared<std::string>("gaussian");
        cmd->add_option("--M", *M, "truncation horizon");
        cmd->add_option("--p", *p, "moment order");
        cmd->add_option("--samples", *samples, "replications");
        cmd->add_option("--seed", *seed, "root seed");
        cmd->add_option("--noise", *law, "noise law");
        cmd->callback([&, opts, M, p, samples, seed, law] {
            command = "hyper";
            action = [&, opts, M, p, samples, seed, law] {
                const TruncatedKernel table =
                    TruncatedKernel::from_kernel(opts->build(), *M);
                const auto res = hypercontractivity_ratio(
                    table, noise_law_from_string(*law), *p, *samples, *seed);
                params = {{"M", *M}, {"p", *p}, {"samples", *samples},
                          {"seed", *seed}, {"noise", *law}};
                emit({{"ratio", res.ratio},
                      {"ci_lo", res.ci_lo},
                      {"ci_hi", res.ci_hi}});
            };
        });
    }

    // ---- verify -----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "verify", "run the acceptance suite against a tolerance manifest");
        auto manifest = std::make_shared<std::string>("config/tolerances.json");
        auto only = std::make_shared<std::vector<int>>();
        cmd->add_option("--manifest", *manifest, "tolerance manifest path");
        cmd->add_option("--only", *only, "restrict to these criteria")
            ->delimiter(',');
        cmd->callback([&, manifest, only] {
            command = "verify";
            action = [&, manifest, only] {
                const auto doc = load_manifest(*manifest);
                const auto summary = run_acceptance(doc, *only);
                for (const auto& r : summary.results)
                    std::printf("criterion %2d %-32s %s (%s) [%.1fs]\n", r.id,
                                r.name.c_str(), r.passed ? "PASS" : "FAIL",
                                r.detail.c_str(), r.seconds);
                params = {{"manifest", *manifest}};
                if (!summary.all_passed()) exit_code = kExitTolerance;
            };
        });
    }

    // parse, appending --config overrides to the active subcommand
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config") {
                const auto extra = config_args(args[i + 1]);
                args.insert(args.end(), extra.begin(), extra.end());
                break;
            }
        std::vector<const char*> cargs = {argv[0]};
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()),
                  const_cast<char**>(cargs.data()));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        action();
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        json diag;
        diag["error"] = e.what();
        std::fprintf(stderr, "%s\n", diag.dump(2).c_str());
        return kExitNumeric;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    try {
        write_run_manifest(command, params, wall);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "warning: %s\n", e.what());
    }
    return exit_code;
}
