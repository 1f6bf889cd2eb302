#pragma once

#include <functional>
#include <stdexcept>

namespace volterra {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    // Half-line integrals are mapped to (0,1); integrand arguments beyond
    // this cutoff are treated as zero to sidestep overflow in the tail.
    double domain_cutoff = 1e12;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod (G7, K15) over [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureConfig& cfg = {});

// Integral over [0, infinity) via the map t = u / (1 - u).
QuadResult integrate_half_line(const std::function<double(double)>& f,
                               const QuadratureConfig& cfg = {});

// As above but throws QuadratureError when the estimate fails to converge.
double integrate_strict(const std::function<double(double)>& f, double a,
                        double b, const QuadratureConfig& cfg = {});
double integrate_half_line_strict(const std::function<double(double)>& f,
                                  const QuadratureConfig& cfg = {});

}  // namespace volterra
