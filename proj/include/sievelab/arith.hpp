#pragma once

// Rational-integer helpers shared by the Eisenstein and Hecke modules.

#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "sievelab/common.hpp"

namespace sievelab::arith {

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

inline u64 pollard_brent(u64 n, u64 seed) {
    if (n % 2 == 0) return 2;
    u64 y = splitmix64(seed) % (n - 1) + 1;
    u64 c = splitmix64(seed + 1) % (n - 1) + 1;
    const u64 m = 128;
    u64 g = 1, r = 1, q = 1, x = 0, ys = 0;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        while (k < r && g == 1) {
            ys = y;
            for (u64 i = 0; i < std::min(m, r - k); ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

inline void factor_into(u64 n, std::map<u64, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    u64 d = n;
    for (u64 seed = 1; d == n; ++seed) d = pollard_brent(n, seed);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace detail

/// Prime factorization as (prime, exponent) pairs in increasing prime order.
inline std::vector<std::pair<u64, int>> factor(u64 n) {
    if (n == 0) throw DomainError("factor(0)");
    std::map<u64, int> out;
    for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    }
    detail::factor_into(n, out);
    return {out.begin(), out.end()};
}

inline int mobius(u64 n) {
    int sign = 1;
    for (auto [p, e] : factor(n)) {
        if (e > 1) return 0;
        sign = -sign;
    }
    return sign;
}

inline std::vector<u64> divisors(u64 n) {
    std::vector<u64> ds{1};
    for (auto [p, e] : factor(n)) {
        const std::size_t base = ds.size();
        u64 pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

inline u64 num_divisors(u64 n) {
    u64 t = 1;
    for (auto [p, e] : factor(n)) t *= static_cast<u64>(e + 1);
    return t;
}

inline bool is_squarefree(u64 n) {
    for (auto [p, e] : factor(n))
        if (e > 1) return false;
    return true;
}

inline std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

/// squarefree[k] for 0 <= k <= limit (0 is marked non-squarefree).
inline std::vector<bool> squarefree_sieve(u64 limit) {
    std::vector<bool> sf(limit + 1, true);
    sf[0] = false;
    for (u64 p = 2; p * p <= limit; ++p) {
        bool prime = true;
        for (u64 q = 2; q * q <= p; ++q)
            if (p % q == 0) {
                prime = false;
                break;
            }
        if (!prime) continue;
        for (u64 j = p * p; j <= limit; j += p * p) sf[j] = false;
    }
    return sf;
}

/// Mobius function for 0..limit via a linear sieve (mu[0] = 0).
inline std::vector<int> mobius_table(u64 limit) {
    std::vector<int> mu(limit + 1, 1);
    std::vector<bool> composite(limit + 1, false);
    std::vector<u64> primes;
    mu[0] = 0;
    for (u64 i = 2; i <= limit; ++i) {
        if (!composite[i]) {
            primes.push_back(i);
            mu[i] = -1;
        }
        for (u64 p : primes) {
            if (i * p > limit) break;
            composite[i * p] = true;
            if (i % p == 0) {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    return mu;
}

/// floor(x^(1/3)) for 64-bit x, exact.
inline u64 icbrt(u64 x) {
    u64 r = static_cast<u64>(std::cbrt(static_cast<double>(x)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r * r > x) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) * (r + 1) <= x) ++r;
    return r;
}

inline u64 isqrt(u64 x) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(x)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > x) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= x) ++r;
    return r;
}

}  // namespace sievelab::arith
