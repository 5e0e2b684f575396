#include <gtest/gtest.h>

#include <complex>
#include <random>
#include <set>

#include "sievelab/eisenstein.hpp"

using namespace sievelab;

namespace {

EisensteinInt random_element(std::mt19937_64& rng, i64 range) {
    std::uniform_int_distribution<i64> d(-range, range);
    return {d(rng), d(rng)};
}

// Brute-force squarefree test: no prime of norm <= norm(z) has its square dividing z.
bool squarefree_by_scan(const EisensteinInt& z, const std::vector<EisensteinInt>& primes) {
    for (const auto& p : primes) {
        const EisensteinInt p2 = p * p;
        if (norm(p2) > norm(z)) break;
        if (divides(p2, z)) return false;
    }
    return true;
}

}  // namespace

TEST(RingOps, NormExamples) {
    EXPECT_EQ(norm(EisensteinInt{2, 1}), 3);
    EXPECT_EQ(norm(EisensteinInt{0, 0}), 0);
    EXPECT_EQ(conj(EisensteinInt(1, 1)) * EisensteinInt(1, 1), EisensteinInt(1, 0));
    EXPECT_EQ(norm(EisensteinInt{1, 1}), 1);
}

TEST(RingOps, NormIsMultiplicativeAndMatchesComplexModulus) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 2000; ++t) {
        EisensteinInt x = random_element(rng, 10000), y = random_element(rng, 10000);
        EXPECT_EQ(norm(x * y), norm(x) * norm(y));
        EXPECT_EQ(x * conj(x), EisensteinInt(norm(x), 0));
        const cd prod = x.to_complex() * y.to_complex();
        EXPECT_NEAR(std::abs(prod - (x * y).to_complex()), 0.0, 1e-6);
        EXPECT_EQ((x + y) - y, x);
    }
}

TEST(RingOps, OverflowSignalsRangeError) {
    // norm(2^k) = 2^(2k): 2^31 sits exactly on the 2^62 bound.
    const EisensteinInt edge{i64{1} << 31, 0};
    EXPECT_EQ(norm(edge), kMaxNorm);
    EXPECT_THROW(edge * EisensteinInt(2, 0), RangeError);
    EXPECT_THROW(norm(EisensteinInt(i64{1} << 32, 0)), RangeError);
    EXPECT_EQ(EisensteinInt(i64{1} << 15, 0) * EisensteinInt(i64{1} << 16, 0), EisensteinInt(i64{1} << 31, 0));
}

TEST(DivRem, Examples) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        EisensteinInt z = random_element(rng, 1000);
        if (z.is_zero()) continue;
        auto [q, r] = divrem(z, z);
        EXPECT_EQ(q, EisensteinInt(1, 0));
        EXPECT_TRUE(r.is_zero());
        auto [q0, r0] = divrem(EisensteinInt{0, 0}, z);
        EXPECT_TRUE(q0.is_zero());
        EXPECT_TRUE(r0.is_zero());
    }
    EXPECT_THROW(divrem(EisensteinInt{1, 0}, EisensteinInt{0, 0}), DomainError);
}

TEST(DivRem, FiveByTwoAgainstCandidateScan) {
    auto [q, r] = divrem(EisensteinInt{5, 0}, EisensteinInt{2, 0});
    EXPECT_EQ(q * EisensteinInt(2, 0) + r, EisensteinInt(5, 0));
    EXPECT_LT(norm(r), 4);
    // Some candidate within distance 1 of 5/2 must give a small remainder.
    int valid = 0;
    for (i64 a = 1; a <= 4; ++a)
        for (i64 b = -1; b <= 1; ++b)
            if (norm(EisensteinInt{5, 0} - EisensteinInt{a, b} * EisensteinInt{2, 0}) < 4) ++valid;
    EXPECT_GE(valid, 1);
}

TEST(DivRem, RemainderSmallerThanDivisor) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5000; ++t) {
        EisensteinInt x = random_element(rng, 1 << 20), y = random_element(rng, 2000);
        if (y.is_zero()) continue;
        auto [q, r] = divrem(x, y);
        EXPECT_EQ(q * y + r, x);
        EXPECT_LT(norm(r), norm(y));
    }
}

TEST(Gcd, DividesBothAndIsCanonical) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 1000; ++t) {
        EisensteinInt c = random_element(rng, 30);
        if (c.is_zero()) continue;
        EisensteinInt x = c * random_element(rng, 50), y = c * random_element(rng, 50);
        if (x.is_zero() && y.is_zero()) continue;
        EisensteinInt g = gcd(x, y);
        EXPECT_TRUE(divides(g, x));
        EXPECT_TRUE(divides(g, y));
        EXPECT_EQ(canonical_associate(g), g);
        // c divides both, so c divides g.
        EXPECT_TRUE(divides(c, g));
    }
    EXPECT_THROW(gcd(EisensteinInt{0, 0}, EisensteinInt{0, 0}), DomainError);
}

TEST(Primary, UniqueAssociateCongruentToTwo) {
    for (const auto& z : enumerate_by_norm(5000)) {
        if (divisible_by_lambda(z)) {
            EXPECT_THROW(primary_form(z), DomainError);
            continue;
        }
        int count = 0;
        for (const auto& u : kUnits)
            if (is_primary(z * u)) ++count;
        ASSERT_EQ(count, 1) << z;
        PrimaryForm pf = primary_form(z);
        EXPECT_TRUE(is_primary(pf.primary));
        EXPECT_TRUE(is_unit(pf.unit));
        EXPECT_EQ(pf.unit * pf.primary, z);
    }
}

TEST(Factor, ProductAndPrimality) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 2000; ++t) {
        EisensteinInt z = random_element(rng, 3000);
        if (z.is_zero()) continue;
        Factorization f = factor(z);
        EXPECT_EQ(f.product(), z) << z;
        EXPECT_TRUE(is_unit(f.unit));
        std::set<EisensteinInt> seen;
        for (const auto& [p, e] : f.factors) {
            EXPECT_TRUE(is_prime(p)) << p;
            EXPECT_GT(e, 0);
            EXPECT_EQ(canonical_associate(p), p);
            EXPECT_TRUE(seen.insert(p).second);
        }
    }
}

TEST(Factor, PrimesBelowHundredAreRecognized) {
    // Rational primes 2 mod 3 stay prime; 1 mod 3 split into conjugates of norm p; 3 ramifies.
    EXPECT_TRUE(is_prime(EisensteinInt{2, 0}));
    EXPECT_TRUE(is_prime(EisensteinInt{5, 0}));
    EXPECT_FALSE(is_prime(EisensteinInt{7, 0}));
    EXPECT_TRUE(is_prime(kLambda));
    EXPECT_FALSE(is_prime(EisensteinInt{3, 0}));
    EXPECT_EQ(factor(EisensteinInt{7, 0}).factors.size(), 2u);
    auto f3 = factor(EisensteinInt{3, 0});
    ASSERT_EQ(f3.factors.size(), 1u);
    EXPECT_EQ(f3.factors[0].first, kLambda);
    EXPECT_EQ(f3.factors[0].second, 2);
}

TEST(Squarefree, AgreesWithBruteForceScan) {
    std::vector<EisensteinInt> primes;
    for (const auto& z : enumerate_by_norm(2000, {.primary_only = true}))
        if (is_prime(z)) primes.push_back(z);
    for (const auto& z : enumerate_by_norm(2000))
        EXPECT_EQ(is_squarefree(z), squarefree_by_scan(z, primes)) << z;
}

TEST(Enumerate, CountsAndOrdering) {
    // Norm 1: the six units. Norm 3: the six associates of 1 - w.
    EXPECT_EQ(enumerate_by_norm(1).size(), 6u);
    EXPECT_EQ(enumerate_by_norm(3).size(), 12u);
    EXPECT_EQ(enumerate_by_norm(1, {.primary_only = true}).size(), 1u);
    auto all = enumerate_by_norm(500);
    for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LE(norm(all[i - 1]), norm(all[i]));
    // Brute-force count over a box.
    std::size_t brute = 0;
    for (i64 a = -40; a <= 40; ++a)
        for (i64 b = -40; b <= 40; ++b) {
            const i64 n = a * a - a * b + b * b;
            if (n >= 1 && n <= 500) ++brute;
        }
    EXPECT_EQ(all.size(), brute);
}
