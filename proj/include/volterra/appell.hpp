#pragma once

#include <vector>

#include "volterra/noise.hpp"
#include "volterra/rational.hpp"

namespace volterra {

// Monic polynomial family with A_p' = p A_{p-1} and E A_p(eps) = 0,
// determined by the moment sequence; coefficients are exact rationals.
class AppellFamily {
  public:
    AppellFamily(const MomentVector& moments, int max_order);

    int max_order() const { return static_cast<int>(coeffs_.size()) - 1; }
    // coefficient of x^j in A_p
    const Rational& coeff(int p, int j) const;
    const std::vector<Rational>& coeffs(int p) const;

    double eval(int p, double x) const;

  private:
    std::vector<std::vector<Rational>> coeffs_;
};

// Weights w_j = C(p, j) mu_{p-j} with x^p = sum_j w_j A_j(x) as a polynomial
// identity.
std::vector<Rational> power_expansion(int p, const MomentVector& moments);

}  // namespace volterra
