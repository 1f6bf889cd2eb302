#include "volterra/noise.hpp"

#include <cmath>

namespace volterra {

NoiseLaw noise_law_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseLaw::Gaussian;
    if (name == "rademacher") return NoiseLaw::Rademacher;
    if (name == "uniform") return NoiseLaw::CenteredUniform;
    if (name == "sexp") return NoiseLaw::ShiftedExponential;
    throw std::invalid_argument("unknown noise law: " + name);
}

std::string to_string(NoiseLaw law) {
    switch (law) {
        case NoiseLaw::Gaussian: return "gaussian";
        case NoiseLaw::Rademacher: return "rademacher";
        case NoiseLaw::CenteredUniform: return "uniform";
        case NoiseLaw::ShiftedExponential: return "sexp";
    }
    return "?";
}

Rational noise_moment(NoiseLaw law, int p) {
    if (p < 0) throw std::invalid_argument("noise_moment: p < 0");
    if (p == 0) return 1;
    switch (law) {
        case NoiseLaw::Gaussian: {
            if (p % 2 == 1) return 0;
            BigInt dfact = 1;  // (p-1)!!
            for (int i = p - 1; i >= 2; i -= 2) dfact *= i;
            return Rational(dfact);
        }
        case NoiseLaw::Rademacher:
            return (p % 2 == 0) ? 1 : 0;
        case NoiseLaw::CenteredUniform: {
            // E eps^{2m} = 3^m / (2m+1) on [-sqrt(3), sqrt(3)]
            if (p % 2 == 1) return 0;
            BigInt num = 1;
            for (int i = 0; i < p / 2; ++i) num *= 3;
            return Rational(num, p + 1);
        }
        case NoiseLaw::ShiftedExponential: {
            // E(E-1)^p = sum_j C(p,j) j! (-1)^{p-j}, the p-th subfactorial
            BigInt s = 0;
            for (int j = 0; j <= p; ++j) {
                BigInt term = binomial(static_cast<unsigned>(p),
                                       static_cast<unsigned>(j)) *
                              factorial(static_cast<unsigned>(j));
                if ((p - j) % 2 == 1)
                    s -= term;
                else
                    s += term;
            }
            return Rational(s);
        }
    }
    throw std::logic_error("unreachable");
}

double sample_noise_one(NoiseLaw law, RngStream& stream) {
    switch (law) {
        case NoiseLaw::Gaussian:
            return stream.next_gaussian();
        case NoiseLaw::Rademacher:
            return (stream.next_u64() & 1ull) ? 1.0 : -1.0;
        case NoiseLaw::CenteredUniform:
            return 3.4641016151377545870548926830117 *
                   (stream.next_uniform() - 0.5);
        case NoiseLaw::ShiftedExponential:
            return -std::log(stream.next_uniform()) - 1.0;
    }
    throw std::logic_error("unreachable");
}

void sample_noise(NoiseLaw law, RngStream& stream, std::span<double> out) {
    for (auto& x : out) x = sample_noise_one(law, stream);
}

MomentVector MomentVector::of(NoiseLaw law, int max_order) {
    std::vector<Rational> mu;
    mu.reserve(static_cast<std::size_t>(max_order) + 1);
    for (int p = 0; p <= max_order; ++p) mu.push_back(noise_moment(law, p));
    return MomentVector(std::move(mu));
}

}  // namespace volterra
