#include "volterra/terms.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace volterra {

Rational c_coeff(const std::vector<int>& p, const std::vector<int>& j,
                 const MomentVector& moments) {
    if (p.size() != j.size())
        throw std::invalid_argument("c_coeff: p and j length mismatch");
    Rational c(1);
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (j[t] < 0 || j[t] > p[t])
            throw std::invalid_argument("c_coeff: need 0 <= j_t <= p_t");
        c *= Rational(binomial(static_cast<unsigned>(p[t]),
                               static_cast<unsigned>(j[t]))) *
             moments[p[t] - j[t]];
    }
    return c;
}

Rational d_coeff(int k, int r) {
    if (r < 0 || 2 * r > k)
        throw std::invalid_argument("d_coeff: need 0 <= 2r <= k");
    BigInt denom = factorial(static_cast<unsigned>(k - 2 * r)) *
                   factorial(static_cast<unsigned>(r));
    for (int q = 0; q < r; ++q) denom *= 2;
    return Rational(factorial(static_cast<unsigned>(k)), denom);
}

std::vector<TermIndex> enumerate_terms(int k, const MomentVector& moments) {
    if (!(moments.max_order() >= 1 && moments[1] == 0))
        throw std::invalid_argument("enumerate_terms: requires mu_1 = 0");
    std::vector<TermIndex> out;
    for (const auto& pi : enumerate_partitions(k)) {
        const std::vector<int> p = pi.sizes();
        const int m = pi.block_count();
        std::vector<int> j(static_cast<std::size_t>(m), 0);
        const std::function<void(int)> recurse = [&](int t) {
            if (t == m) {
                if (std::all_of(j.begin(), j.end(),
                                [](int v) { return v == 0; }))
                    return;
                bool admissible = true;
                for (int q = 0; q < m; ++q)
                    if (j[static_cast<std::size_t>(q)] == 0 &&
                        p[static_cast<std::size_t>(q)] < 2)
                        admissible = false;
                if (!admissible) return;
                const Rational c = c_coeff(p, j, moments);
                if (c == 0) return;
                TermIndex term{pi, j, {}, 0, 0,
                               MemoryRegime::ShortMemoryContributor, c};
                for (int q = 0; q < m; ++q)
                    if (j[static_cast<std::size_t>(q)] == 0)
                        term.T.push_back(q + 1);
                term.r = static_cast<int>(term.T.size());
                term.m_minus_r = m - term.r;
                term.regime = (m + term.r == k)
                                  ? MemoryRegime::LongMemoryContributor
                                  : MemoryRegime::ShortMemoryContributor;
                out.push_back(std::move(term));
                return;
            }
            for (int v = 0; v <= p[static_cast<std::size_t>(t)]; ++v) {
                j[static_cast<std::size_t>(t)] = v;
                recurse(t + 1);
            }
            j[static_cast<std::size_t>(t)] = 0;
        };
        recurse(0);
    }
    return out;
}

double s_prime_sum(const TruncatedKernel& a, const Partition& pi,
                   const std::vector<int>& T, const std::vector<int>& fixed) {
    const int m = pi.block_count();
    const int k = pi.ground_size();
    if (a.order() != k)
        throw std::invalid_argument("s_prime_sum: kernel order mismatch");
    if (static_cast<int>(fixed.size()) != m)
        throw std::invalid_argument("s_prime_sum: need one value per block");
    for (int t : T)
        if (t < 1 || t > m)
            throw std::invalid_argument("s_prime_sum: T position out of range");

    std::vector<int> assigned = fixed;
    std::vector<int> lattice(static_cast<std::size_t>(k));
    const auto assemble_and_eval = [&]() {
        for (int e = 1; e <= k; ++e)
            lattice[static_cast<std::size_t>(e - 1)] =
                assigned[static_cast<std::size_t>(pi.block_of(e))];
        return a.at(lattice);
    };
    const std::function<double(std::size_t)> recurse =
        [&](std::size_t pos) -> double {
        if (pos == T.size()) return assemble_and_eval();
        const int t = T[pos] - 1;
        double total = 0.0;
        for (int v = 1; v <= a.horizon(); ++v) {
            bool clash = false;
            for (int q = 0; q < m && !clash; ++q) {
                if (q == t) continue;
                const bool q_in_T =
                    std::find(T.begin(), T.end(), q + 1) != T.end();
                const bool q_assigned =
                    !q_in_T ||
                    std::find(T.begin(), T.begin() +
                                             static_cast<std::ptrdiff_t>(pos),
                              q + 1) != T.begin() +
                                            static_cast<std::ptrdiff_t>(pos);
                if (q_assigned && assigned[static_cast<std::size_t>(q)] == v)
                    clash = true;
            }
            if (clash) continue;
            assigned[static_cast<std::size_t>(t)] = v;
            total += recurse(pos + 1);
        }
        return total;
    };
    return recurse(0);
}

}  // namespace volterra
