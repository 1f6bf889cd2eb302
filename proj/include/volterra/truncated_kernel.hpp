#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "volterra/kernel.hpp"

namespace volterra {

// Dense table a(i) on the lattice {1..M}^k, the simulable object.
class TruncatedKernel {
  public:
    static TruncatedKernel from_kernel(const Kernel& source, int M);
    static TruncatedKernel from_function(
        int k, int M, const std::function<double(std::span<const int>)>& f);

    int order() const { return k_; }
    int horizon() const { return M_; }
    bool symmetric() const { return symmetric_; }

    // a(i) for i in {1..M}^k
    double at(std::span<const int> i) const;
    double at(std::initializer_list<int> i) const {
        return at(std::span<const int>(i.begin(), i.size()));
    }
    const std::vector<double>& values() const { return values_; }

    // symmetrized table entry (average over index permutations)
    double at_symmetrized(std::span<const int> i) const;
    TruncatedKernel symmetrized() const;

    // sum of a(i)^2 over the whole table
    double sum_sq() const;

  private:
    TruncatedKernel() = default;
    void detect_symmetry();
    std::size_t flat_index(std::span<const int> i) const;

    int k_ = 1;
    int M_ = 1;
    bool symmetric_ = false;
    std::vector<double> values_;  // row-major, last index contiguous
};

}  // namespace volterra
