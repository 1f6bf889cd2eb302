#include "volterra/appell.hpp"

#include <stdexcept>

namespace volterra {

AppellFamily::AppellFamily(const MomentVector& moments, int max_order) {
    if (max_order < 0)
        throw std::invalid_argument("appell: max_order must be >= 0");
    if (moments.max_order() < max_order)
        throw std::invalid_argument(
            "appell: moments supplied only to order " +
            std::to_string(moments.max_order()));
    coeffs_.resize(static_cast<std::size_t>(max_order) + 1);
    coeffs_[0] = {Rational(1)};
    for (int p = 1; p <= max_order; ++p) {
        // integrate p * A_{p-1}; the constant term enforces E A_p(eps) = 0
        std::vector<Rational> c(static_cast<std::size_t>(p) + 1, Rational(0));
        const auto& prev = coeffs_[static_cast<std::size_t>(p - 1)];
        for (int j = 0; j < p; ++j)
            c[static_cast<std::size_t>(j + 1)] =
                Rational(p) * prev[static_cast<std::size_t>(j)] /
                Rational(j + 1);
        Rational centering(0);
        for (int j = 1; j <= p; ++j)
            centering += c[static_cast<std::size_t>(j)] * moments[j];
        c[0] = -centering;
        coeffs_[static_cast<std::size_t>(p)] = std::move(c);
    }
}

const Rational& AppellFamily::coeff(int p, int j) const {
    const auto& row = coeffs(p);
    if (j < 0 || j > p)
        throw std::out_of_range("appell coeff index out of range");
    return row[static_cast<std::size_t>(j)];
}

const std::vector<Rational>& AppellFamily::coeffs(int p) const {
    if (p < 0 || p > max_order())
        throw std::out_of_range("appell order out of range");
    return coeffs_[static_cast<std::size_t>(p)];
}

double AppellFamily::eval(int p, double x) const {
    const auto& row = coeffs(p);
    double v = 0.0;
    for (int j = p; j >= 0; --j)
        v = v * x + to_double(row[static_cast<std::size_t>(j)]);
    return v;
}

std::vector<Rational> power_expansion(int p, const MomentVector& moments) {
    if (p < 0) throw std::invalid_argument("power_expansion: p must be >= 0");
    std::vector<Rational> w(static_cast<std::size_t>(p) + 1);
    for (int j = 0; j <= p; ++j)
        w[static_cast<std::size_t>(j)] =
            Rational(binomial(static_cast<unsigned>(p),
                              static_cast<unsigned>(j))) *
            moments[p - j];
    return w;
}

}  // namespace volterra
