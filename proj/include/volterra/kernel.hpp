#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volterra/quadrature.hpp"
#include "volterra/rng.hpp"

namespace volterra {

enum class KernelKind {
    PowerSum,      // (x_1 + ... + x_k)^alpha
    ProductPower,  // prod x_j^{gamma_j}
    RatioForm,     // prod x_j^{a_j} / (sum x_j)^b
    Scale,         // c * inner
    Sum,           // sum of inners sharing (k, alpha)
    Max,           // max of inners sharing (k, alpha)
    Min,           // min of inners sharing (k, alpha)
    Perturbed,     // inner * L, L(x) = 1 + c * ||x||_1^{-delta}
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

// Multiplicative perturbation L(x) = 1 + c * ||x||_1^{-delta}; bounded on the
// lattice and tending to 1, so the slowly-varying factor assumption holds by
// construction. c = 0 gives L identically 1.
struct Perturbation {
    double c = 0.0;
    double delta = 1.0;
};

// Immutable homogeneous kernel on the positive orthant. Structural
// invariants (positive RatioForm exponents, matching (k, alpha) for
// combinators) are enforced at construction; analytic admissibility (the
// alpha range and the simplex bound) is checked by validate_ghkb, which
// treats failures as data rather than errors.
class Kernel {
  public:
    static Kernel power_sum(int k, double alpha);
    static Kernel product_power(std::vector<double> gamma);
    static Kernel ratio_form(std::vector<double> a, double b);
    static Kernel scale(double c, Kernel inner);
    static Kernel sum_of(std::vector<Kernel> inners);
    static Kernel max_of(std::vector<Kernel> inners);
    static Kernel min_of(std::vector<Kernel> inners);
    static Kernel perturbed(Kernel inner, Perturbation pert);

    KernelKind kind() const { return kind_; }
    int arity() const { return k_; }
    double alpha() const { return alpha_; }
    double hurst() const { return alpha_ + 0.5 * k_ + 1.0; }

    double scale_factor() const { return scale_; }
    const std::vector<double>& exponents() const { return exponents_; }
    double ratio_b() const { return ratio_b_; }
    const Perturbation& perturbation() const { return pert_; }
    const std::vector<Kernel>& children() const { return children_; }

    // g(x); all coordinates must be strictly positive.
    double eval(std::span<const double> x) const;
    double eval(std::initializer_list<double> x) const {
        return eval(std::span<const double>(x.begin(), x.size()));
    }
    // g(x) with any Perturbed wrappers replaced by their base kernels.
    double eval_unperturbed(std::span<const double> x) const;

    bool is_symmetric() const;
    // Average of eval over all argument permutations; requires k <= 6.
    double eval_symmetrized(std::span<const double> x) const;

  private:
    Kernel() = default;

    KernelKind kind_ = KernelKind::PowerSum;
    int k_ = 1;
    double alpha_ = -1.0;
    double scale_ = 1.0;
    std::vector<double> exponents_;  // ProductPower gamma or RatioForm a
    double ratio_b_ = 0.0;
    Perturbation pert_;
    std::vector<Kernel> children_;
};

struct GhkbReport {
    bool valid = false;
    bool alpha_in_range = false;
    bool homogeneous = false;
    double homogeneity_max_rel_err = 0.0;
    bool bounded = false;
    double bound_constant = 0.0;  // empirical sup of |g| over the simplex
    std::vector<std::string> failures;
};

// Checks the admissibility conditions: alpha in (-(k+1)/2, -k/2),
// homogeneity g(lambda x) = lambda^alpha g(x) at random points, and the
// simplex bound |g(x)| <= C ||x||_1^alpha with the empirical constant
// obtained by grid maximization (including a boundary layer to catch
// kernels that blow up near the axes).
GhkbReport validate_ghkb(const Kernel& kernel, std::uint64_t seed = 20260826);

struct L2Result {
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic quadrature
};

// Partial pairing of a kernel: r coordinate pairs integrated out over the
// positive half-line, leaving an arity k-2r kernel with exponent alpha + r.
class TraceKernel {
  public:
    TraceKernel(Kernel base, int r, QuadratureConfig quad = {});

    const Kernel& base() const { return base_; }
    int r() const { return r_; }
    int arity() const { return arity_; }
    double alpha() const { return alpha_r_; }
    double hurst() const { return alpha_r_ + 0.5 * arity_ + 1.0; }
    bool analytic() const { return analytic_.has_value(); }

    // g_r(x) for x in the positive orthant of dimension k-2r.
    double eval(std::span<const double> x) const;
    double eval(std::initializer_list<double> x) const {
        return eval(std::span<const double>(x.begin(), x.size()));
    }
    // Quadrature evaluation even when a closed form exists.
    double eval_quadrature(std::span<const double> x) const;

    // h_t(y) = int_0^t g_r(s 1 - y) 1{s 1 > y} ds; y may have negative
    // coordinates.
    double eval_h_t(double t, std::span<const double> y) const;
    double eval_h_t(double t, std::initializer_list<double> y) const {
        return eval_h_t(t, std::span<const double>(y.begin(), y.size()));
    }

    // ||h~_t||^2 over R^{arity}; deterministic quadrature for arity 1 and 2,
    // quasi-random integration with a reported standard error for arity >= 3.
    L2Result l2_norm_sq_h(double t) const;

  private:
    struct AnalyticForm {
        double coeff;     // multiplier in coeff * (sum x)^expo
        double expo;      // alpha + r
    };

    double eval_analytic(std::span<const double> x) const;

    Kernel base_;
    int r_;
    int arity_;
    double alpha_r_;
    QuadratureConfig quad_;
    std::optional<AnalyticForm> analytic_;
};

}  // namespace volterra
