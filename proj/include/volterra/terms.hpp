#pragma once

#include <vector>

#include "volterra/noise.hpp"
#include "volterra/partitions.hpp"
#include "volterra/rational.hpp"
#include "volterra/truncated_kernel.hpp"

namespace volterra {

// c(p, j) = prod_t C(p_t, j_t) mu_{p_t - j_t}
Rational c_coeff(const std::vector<int>& p, const std::vector<int>& j,
                 const MomentVector& moments);

// d_{k,r} = k! / (2^r (k-2r)! r!)
Rational d_coeff(int k, int r);

enum class MemoryRegime { LongMemoryContributor, ShortMemoryContributor };

// One off-diagonal term X_pi^j of the decomposition.
struct TermIndex {
    Partition partition;
    std::vector<int> j;   // per-block centered-power order, 0 <= j_t <= p_t
    std::vector<int> T;   // 1-based block positions with j_t = 0
    int r = 0;            // |T|
    int m_minus_r = 0;    // blocks carrying a positive order
    MemoryRegime regime = MemoryRegime::ShortMemoryContributor;
    Rational c;           // c(p, j)

    int block_count() const { return partition.block_count(); }
};

// All admissible (pi, j) with j != 0, pruned of zero-coefficient terms;
// requires mu_1 = 0. Each term is tagged with its regime: m + r = k marks a
// long-memory contributor, m + r < k a short-memory one.
std::vector<TermIndex> enumerate_terms(int k, const MomentVector& moments);

// Sum of a_pi over the blocks listed in T (1-based), with all summed values
// distinct from each other and from every fixed value; `fixed` has one entry
// per block, entries at positions in T are ignored. T empty returns
// a_pi(fixed).
double s_prime_sum(const TruncatedKernel& a, const Partition& pi,
                   const std::vector<int>& T, const std::vector<int>& fixed);

}  // namespace volterra
