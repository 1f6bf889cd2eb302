#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "volterra/rational.hpp"
#include "volterra/rng.hpp"

namespace volterra {

enum class NoiseLaw {
    Gaussian,             // N(0,1)
    Rademacher,           // +/-1 with probability 1/2
    CenteredUniform,      // uniform on [-sqrt(3), sqrt(3)]
    ShiftedExponential,   // Exp(1) - 1
};

NoiseLaw noise_law_from_string(const std::string& name);
std::string to_string(NoiseLaw law);

// Exact p-th moment of the standardized law; defined for every p >= 0.
Rational noise_moment(NoiseLaw law, int p);

double sample_noise_one(NoiseLaw law, RngStream& stream);
void sample_noise(NoiseLaw law, RngStream& stream, std::span<double> out);

// mu_0..mu_K; moments beyond K are unavailable and asking for them throws,
// so a model whose moment requirements exceed what was supplied fails loudly.
class MomentVector {
  public:
    MomentVector() = default;
    explicit MomentVector(std::vector<Rational> mu) : mu_(std::move(mu)) {
        if (mu_.empty() || mu_[0] != 1)
            throw std::invalid_argument("MomentVector: mu_0 must be 1");
    }
    static MomentVector of(NoiseLaw law, int max_order);

    int max_order() const { return static_cast<int>(mu_.size()) - 1; }
    bool has(int p) const { return p >= 0 && p <= max_order(); }
    const Rational& operator[](int p) const {
        if (!has(p))
            throw std::out_of_range("moment mu_" + std::to_string(p) +
                                    " unavailable (supplied up to order " +
                                    std::to_string(max_order()) + ")");
        return mu_[static_cast<std::size_t>(p)];
    }
    bool standardized() const {
        return max_order() >= 2 && mu_[1] == 0 && mu_[2] == 1;
    }

  private:
    std::vector<Rational> mu_;
};

struct NoiseSpec {
    NoiseLaw law = NoiseLaw::Gaussian;
    MomentVector moments;

    static NoiseSpec make(NoiseLaw law, int k) {
        // moments to order 2k+2, as needed by variance/diagnostic formulas
        return NoiseSpec{law, MomentVector::of(law, 2 * k + 2)};
    }
};

}  // namespace volterra
