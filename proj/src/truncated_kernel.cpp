#include "volterra/truncated_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace volterra {

namespace {

constexpr double kMaxEntries = 1e8;

// odometer over {1..M}^k; returns false after the last index
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

}  // namespace

std::size_t TruncatedKernel::flat_index(std::span<const int> i) const {
    if (static_cast<int>(i.size()) != k_)
        throw std::invalid_argument("truncated kernel: index arity mismatch");
    std::size_t flat = 0;
    for (int j = 0; j < k_; ++j) {
        const int v = i[static_cast<std::size_t>(j)];
        if (v < 1 || v > M_)
            throw std::out_of_range("truncated kernel: index outside {1..M}");
        flat = flat * static_cast<std::size_t>(M_) +
               static_cast<std::size_t>(v - 1);
    }
    return flat;
}

TruncatedKernel TruncatedKernel::from_function(
    int k, int M, const std::function<double(std::span<const int>)>& f) {
    if (k < 1 || M < 1)
        throw std::invalid_argument("truncated kernel: need k >= 1, M >= 1");
    if (std::pow(static_cast<double>(M), k) > kMaxEntries)
        throw std::runtime_error(
            "truncated kernel: M^k exceeds the 1e8 entry budget; reduce M or k");
    TruncatedKernel out;
    out.k_ = k;
    out.M_ = M;
    std::size_t total = 1;
    for (int j = 0; j < k; ++j) total *= static_cast<std::size_t>(M);
    out.values_.resize(total);
    std::vector<int> idx(static_cast<std::size_t>(k), 1);
    std::size_t flat = 0;
    do {
        out.values_[flat++] = f(idx);
    } while (advance_odometer(idx, M));
    out.detect_symmetry();
    return out;
}

TruncatedKernel TruncatedKernel::from_kernel(const Kernel& source, int M) {
    std::vector<double> x(static_cast<std::size_t>(source.arity()));
    return from_function(source.arity(), M, [&](std::span<const int> i) {
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = static_cast<double>(i[j]);
        return source.eval(x);
    });
}

void TruncatedKernel::detect_symmetry() {
    if (k_ == 1) {
        symmetric_ = true;
        return;
    }
    std::vector<int> idx(static_cast<std::size_t>(k_), 1);
    std::vector<int> sorted(static_cast<std::size_t>(k_));
    do {
        std::copy(idx.begin(), idx.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        if (values_[flat_index(idx)] != values_[flat_index(sorted)]) {
            symmetric_ = false;
            return;
        }
    } while (advance_odometer(idx, M_));
    symmetric_ = true;
}

double TruncatedKernel::at(std::span<const int> i) const {
    return values_[flat_index(i)];
}

double TruncatedKernel::at_symmetrized(std::span<const int> i) const {
    if (symmetric_) return at(i);
    std::vector<int> perm(i.begin(), i.end());
    std::sort(perm.begin(), perm.end());
    double total = 0.0;
    long count = 0;
    do {
        total += at(perm);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / static_cast<double>(count);
}

TruncatedKernel TruncatedKernel::symmetrized() const {
    if (symmetric_) return *this;
    return from_function(k_, M_, [this](std::span<const int> i) {
        return at_symmetrized(i);
    });
}

double TruncatedKernel::sum_sq() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
}

}  // namespace volterra
