#include "volterra/rng.hpp"

#include <cmath>

namespace volterra {

// Box-Muller; the pair is consumed in a fixed order so a stream's gaussian
// sequence is bitwise reproducible.
double RngStream::next_gaussian() {
    if (have_cached_gaussian_) {
        have_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    cached_gaussian_ = rad * std::sin(ang);
    have_cached_gaussian_ = true;
    return rad * std::cos(ang);
}

void RngStream::fill_gaussian(std::span<double> out) {
    for (auto& x : out) x = next_gaussian();
}

}  // namespace volterra
