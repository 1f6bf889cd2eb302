#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "volterra/appell.hpp"
#include "volterra/partitions.hpp"
#include "volterra/terms.hpp"

using namespace volterra;

TEST_CASE("partition canonicalization and accessors") {
    const Partition p({{3, 1}, {2}});
    CHECK(p.to_string() == "{{1,3},{2}}");
    CHECK(p.ground_size() == 3);
    CHECK(p.block_count() == 2);
    CHECK(p.sizes() == std::vector<int>{2, 1});
    CHECK(p.block_of(1) == 0);
    CHECK(p.block_of(2) == 1);
    CHECK(p.block_of(3) == 0);
    CHECK(p == Partition({{1, 3}, {2}}));

    CHECK_THROWS_AS(Partition({{1, 1}, {2}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition({{1}, {3}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition({{0, 1}}), std::invalid_argument);
}

TEST_CASE("partition enumeration order and counts") {
    const auto p2 = enumerate_partitions(2);
    REQUIRE(p2.size() == 2);
    CHECK(p2[0] == Partition({{1}, {2}}));
    CHECK(p2[1] == Partition({{1, 2}}));

    const long bell[] = {1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
    for (int k = 1; k <= 10; ++k)
        CHECK(enumerate_partitions(k).size() ==
              static_cast<std::size_t>(bell[k - 1]));

    const auto p5 = enumerate_partitions(5);
    CHECK(std::find(p5.begin(), p5.end(),
                    Partition({{1, 5}, {2}, {3, 4}})) != p5.end());
    // every partition is distinct
    for (std::size_t i = 0; i + 1 < p5.size(); ++i)
        for (std::size_t j = i + 1; j < p5.size(); ++j)
            CHECK_FALSE(p5[i] == p5[j]);

    CHECK_THROWS_AS(enumerate_partitions(0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_partitions(11), std::invalid_argument);
}

TEST_CASE("centered polynomial families") {
    // general mu_1: A_1(x) = x - mu_1
    MomentVector shifted({Rational(1), Rational(1, 2), Rational(2)});
    AppellFamily f1(shifted, 1);
    CHECK(f1.coeff(1, 1) == Rational(1));
    CHECK(f1.coeff(1, 0) == Rational(-1, 2));

    // gaussian family matches the Hermite polynomials
    const MomentVector gauss = MomentVector::of(NoiseLaw::Gaussian, 8);
    AppellFamily hermite(gauss, 4);
    // A_3 = x^3 - 3x
    CHECK(hermite.coeff(3, 3) == Rational(1));
    CHECK(hermite.coeff(3, 2) == Rational(0));
    CHECK(hermite.coeff(3, 1) == Rational(-3));
    CHECK(hermite.coeff(3, 0) == Rational(0));
    // A_4 = x^4 - 6x^2 + 3
    CHECK(hermite.coeff(4, 4) == Rational(1));
    CHECK(hermite.coeff(4, 2) == Rational(-6));
    CHECK(hermite.coeff(4, 0) == Rational(3));
    CHECK(hermite.eval(4, 2.0) == doctest::Approx(16.0 - 24.0 + 3.0));
}

TEST_CASE("family identities hold exactly in rationals") {
    for (auto law : {NoiseLaw::Gaussian, NoiseLaw::CenteredUniform,
                     NoiseLaw::ShiftedExponential}) {
        const MomentVector mv = MomentVector::of(law, 12);
        AppellFamily fam(mv, 5);
        for (int p = 1; p <= 5; ++p) {
            // derivative: A_p' = p A_{p-1}
            for (int j = 1; j <= p; ++j)
                CHECK(fam.coeff(p, j) * j == fam.coeff(p - 1, j - 1) * p);
            // centering: E A_p(eps) = sum_j coeff(p, j) mu_j = 0
            Rational ex(0);
            for (int j = 0; j <= p; ++j) ex += fam.coeff(p, j) * mv[j];
            CHECK(ex == Rational(0));
            // reconstruction: x^p = sum_j w_j A_j(x) as polynomials
            const auto w = power_expansion(p, mv);
            for (int deg = 0; deg <= p; ++deg) {
                Rational coef(0);
                for (int j = deg; j <= p; ++j) coef += w[j] * fam.coeff(j, deg);
                CHECK(coef == (deg == p ? Rational(1) : Rational(0)));
            }
        }
    }
}

TEST_CASE("power expansion weights") {
    const MomentVector gauss = MomentVector::of(NoiseLaw::Gaussian, 8);
    const auto w2 = power_expansion(2, gauss);
    CHECK(w2 == std::vector<Rational>{Rational(1), Rational(0), Rational(1)});
    const auto w4 = power_expansion(4, gauss);
    CHECK(w4[0] == Rational(3));   // mu_4
    CHECK(w4[2] == Rational(6));   // C(4,2) mu_2
    CHECK(w4[4] == Rational(1));
}

TEST_CASE("block coefficient products") {
    const MomentVector gauss = MomentVector::of(NoiseLaw::Gaussian, 8);
    // c((2), (0)) = mu_2 = 1; c((2), (2)) = C(2,2) mu_0 = 1
    CHECK(c_coeff({2}, {0}, gauss) == Rational(1));
    CHECK(c_coeff({2}, {2}, gauss) == Rational(1));
    // c((3), (1)) = C(3,1) mu_2 = 3
    CHECK(c_coeff({3}, {1}, gauss) == Rational(3));
    // c((2,2), (0,2)) = mu_2 * C(2,2) mu_0 = 1
    CHECK(c_coeff({2, 2}, {0, 2}, gauss) == Rational(1));
    // odd leftover moment kills the gaussian coefficient
    CHECK(c_coeff({3}, {0}, gauss) == Rational(0));
    const MomentVector sexp = MomentVector::of(NoiseLaw::ShiftedExponential, 8);
    CHECK(c_coeff({3}, {0}, sexp) == Rational(2));  // mu_3
    CHECK_THROWS_AS(c_coeff({2}, {0, 1}, gauss), std::invalid_argument);
    CHECK_THROWS_AS(c_coeff({2}, {3}, gauss), std::invalid_argument);
}

TEST_CASE("pairing multiplicities") {
    CHECK(d_coeff(5, 0) == Rational(1));
    CHECK(d_coeff(5, 1) == Rational(10));
    CHECK(d_coeff(5, 2) == Rational(15));
    CHECK(d_coeff(4, 2) == Rational(3));
    CHECK(d_coeff(2, 1) == Rational(1));
    CHECK_THROWS_AS(d_coeff(3, 2), std::invalid_argument);

    // brute-force oracle: number of ways to choose r disjoint pairs from k
    for (int k = 1; k <= 8; ++k) {
        for (int r = 0; 2 * r <= k; ++r) {
            // count via recurrence p(k, r) = p(k-1, r) + (k-1) p(k-2, r-1)
            std::vector<std::vector<long>> p(
                static_cast<std::size_t>(k + 1),
                std::vector<long>(static_cast<std::size_t>(r + 1), 0));
            for (int kk = 0; kk <= k; ++kk) p[kk][0] = 1;
            for (int kk = 2; kk <= k; ++kk)
                for (int rr = 1; rr <= r; ++rr)
                    p[kk][rr] = p[kk - 1][rr] + (kk - 1) * p[kk - 2][rr - 1];
            CHECK(d_coeff(k, r) == Rational(p[k][r]));
        }
    }
}

TEST_CASE("term enumeration for the quadratic case") {
    const MomentVector gauss = MomentVector::of(NoiseLaw::Gaussian, 6);
    const auto terms = enumerate_terms(2, gauss);
    REQUIRE(terms.size() == 2);
    // {{1},{2}} with j = (1,1): the order-2 long-memory contributor
    CHECK(terms[0].partition == Partition({{1}, {2}}));
    CHECK(terms[0].j == std::vector<int>{1, 1});
    CHECK(terms[0].r == 0);
    CHECK(terms[0].regime == MemoryRegime::LongMemoryContributor);
    CHECK(terms[0].c == Rational(1));
    // {{1,2}} with j = (2): the diagonal's centered square
    CHECK(terms[1].partition == Partition({{1, 2}}));
    CHECK(terms[1].j == std::vector<int>{2});
    CHECK(terms[1].regime == MemoryRegime::ShortMemoryContributor);
    CHECK(terms[1].c == Rational(1));
}

TEST_CASE("long-memory contributor counts match the pairing multiplicities") {
    // for order k, the long-memory terms are exactly (pi, j) built from r
    // paired blocks with j_t = 0 and k - 2r singletons with j_t = 1, so the
    // count per r equals the number of pairings
    const MomentVector gauss = MomentVector::of(NoiseLaw::Gaussian, 12);
    const auto terms = enumerate_terms(5, gauss);
    std::vector<int> per_r(3, 0);
    for (const auto& t : terms)
        if (t.regime == MemoryRegime::LongMemoryContributor)
            ++per_r[static_cast<std::size_t>(t.r)];
    CHECK(per_r[0] == 1);
    CHECK(per_r[1] == 10);
    CHECK(per_r[2] == 15);

    // admissibility: every T block has size >= 2 and every term has j != 0
    for (const auto& t : terms) {
        const auto sizes = t.partition.sizes();
        for (int pos : t.T)
            CHECK(sizes[static_cast<std::size_t>(pos - 1)] >= 2);
        bool all_zero = true;
        for (int j : t.j)
            if (j != 0) all_zero = false;
        CHECK_FALSE(all_zero);
        CHECK(t.c != Rational(0));
        CHECK((t.regime == MemoryRegime::LongMemoryContributor) ==
              (t.m_minus_r + 2 * t.r == 5));
    }

    // a non-standardized moment vector is rejected
    CHECK_THROWS_AS(
        enumerate_terms(2, MomentVector({Rational(1), Rational(1)})),
        std::invalid_argument);
}

TEST_CASE("distinct-index block sums") {
    // a(i1, i2) = 1 on {1..3}^2
    const auto ones = TruncatedKernel::from_function(
        2, 3, [](std::span<const int>) { return 1.0; });
    const Partition two_blocks({{1}, {2}});
    // T empty: just the fixed entry
    CHECK(s_prime_sum(ones, two_blocks, {}, {2, 3}) == doctest::Approx(1.0));
    // sum over block 2 with block 1 fixed at 1: i2 in {2, 3}
    CHECK(s_prime_sum(ones, two_blocks, {2}, {1, 0}) == doctest::Approx(2.0));
    // both blocks free: 3 * 3 - 3 diagonal = 6
    CHECK(s_prime_sum(ones, two_blocks, {1, 2}, {0, 0}) == doctest::Approx(6.0));

    // against an independent nested loop with explicit clash checks
    const auto table = TruncatedKernel::from_function(
        2, 4, [](std::span<const int> i) {
            return 1.0 / (i[0] + 2.0 * i[1]);
        });
    double expect = 0.0;
    for (int i1 = 1; i1 <= 4; ++i1)
        for (int i2 = 1; i2 <= 4; ++i2)
            if (i1 != i2) expect += table.at({i1, i2});
    CHECK(s_prime_sum(table, two_blocks, {1, 2}, {0, 0}) ==
          doctest::Approx(expect).epsilon(1e-14));

    // three blocks, one fixed: inclusion-exclusion oracle
    const auto cube = TruncatedKernel::from_function(
        3, 3, [](std::span<const int> i) {
            return i[0] + 10.0 * i[1] + 100.0 * i[2];
        });
    const Partition three({{1}, {2}, {3}});
    double expect3 = 0.0;
    for (int i1 = 1; i1 <= 3; ++i1)
        for (int i3 = 1; i3 <= 3; ++i3)
            if (i1 != 2 && i3 != 2 && i1 != i3)
                expect3 += cube.at({i1, 2, i3});
    CHECK(s_prime_sum(cube, three, {1, 3}, {0, 2, 0}) ==
          doctest::Approx(expect3).epsilon(1e-14));
}
