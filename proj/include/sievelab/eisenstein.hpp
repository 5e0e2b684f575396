#pragma once

/**
 * @file eisenstein.hpp
 * @brief Exact arithmetic in the Eisenstein integers Z[w], w = exp(2 pi i / 3).
 *
 * Elements are stored in the basis {1, w}: a + b w with 64-bit coordinates.
 * Every constructed value is checked against kMaxNorm = 2^62; anything larger
 * raises RangeError instead of wrapping.
 *
 * Normalization conventions:
 *  - primary: z = 2 (mod 3), i.e. a = 2 (mod 3) and b = 0 (mod 3). Every z
 *    coprime to 3 has exactly one primary associate.
 *  - canonical associate: 1 for units, the primary associate for elements
 *    coprime to 3, and lambda^k * canonical(rest) for elements divisible by
 *    the ramified prime lambda = 1 - w.
 */

#include <algorithm>
#include <array>
#include <compare>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sievelab/arith.hpp"
#include "sievelab/common.hpp"

namespace sievelab {

inline constexpr i64 kMaxNorm = i64{1} << 62;

struct EisensteinInt {
    i64 a = 0;  ///< coefficient of 1
    i64 b = 0;  ///< coefficient of w

    constexpr EisensteinInt() = default;
    constexpr EisensteinInt(i64 a_, i64 b_ = 0) : a(a_), b(b_) {}

    constexpr bool is_zero() const { return a == 0 && b == 0; }
    friend constexpr bool operator==(const EisensteinInt&, const EisensteinInt&) = default;
    friend constexpr auto operator<=>(const EisensteinInt&, const EisensteinInt&) = default;

    std::string to_string() const {
        return "(" + std::to_string(a) + (b < 0 ? "" : "+") + std::to_string(b) + "w)";
    }
    friend std::ostream& operator<<(std::ostream& os, const EisensteinInt& z) {
        return os << z.to_string();
    }
    cd to_complex() const { return cd(static_cast<double>(a) - 0.5 * b, 0.8660254037844386 * b); }
};

namespace detail {

inline i128 norm_wide(i128 a, i128 b) { return a * a - a * b + b * b; }

inline EisensteinInt checked(i128 a, i128 b) {
    const i128 lim = (i128{1} << 63) - 1;
    if (a > lim || a < -lim || b > lim || b < -lim || norm_wide(a, b) > kMaxNorm)
        throw RangeError("Eisenstein integer norm exceeds 2^62");
    return {static_cast<i64>(a), static_cast<i64>(b)};
}

// floor(p / n) rounded to nearest, ties to even; n > 0.
inline i128 round_div(i128 p, i128 n) {
    i128 q = p / n;
    i128 r = p % n;
    if (r < 0) {
        q -= 1;
        r += n;
    }
    if (2 * r > n || (2 * r == n && (q & 1) != 0)) q += 1;
    return q;
}

inline int mod3(i64 x) { return static_cast<int>(((x % 3) + 3) % 3); }

}  // namespace detail

inline i64 norm(const EisensteinInt& z) {
    i128 n = detail::norm_wide(z.a, z.b);
    if (n > kMaxNorm) throw RangeError("Eisenstein integer norm exceeds 2^62");
    return static_cast<i64>(n);
}

inline EisensteinInt conj(const EisensteinInt& z) { return detail::checked(i128{z.a} - z.b, -i128{z.b}); }

inline EisensteinInt operator+(const EisensteinInt& x, const EisensteinInt& y) {
    return detail::checked(i128{x.a} + y.a, i128{x.b} + y.b);
}
inline EisensteinInt operator-(const EisensteinInt& x, const EisensteinInt& y) {
    return detail::checked(i128{x.a} - y.a, i128{x.b} - y.b);
}
inline EisensteinInt operator-(const EisensteinInt& x) { return detail::checked(-i128{x.a}, -i128{x.b}); }

// (a + bw)(c + dw) = (ac - bd) + (ad + bc - bd) w, using w^2 = -1 - w.
inline EisensteinInt operator*(const EisensteinInt& x, const EisensteinInt& y) {
    i128 na = detail::norm_wide(x.a, x.b), nb = detail::norm_wide(y.a, y.b);
    if (na != 0 && nb != 0 && na > kMaxNorm / nb) throw RangeError("product norm exceeds 2^62");
    const i128 a = x.a, b = x.b, c = y.a, d = y.b;
    return detail::checked(a * c - b * d, a * d + b * c - b * d);
}

inline constexpr EisensteinInt kOmega{0, 1};
inline constexpr EisensteinInt kOmega2{-1, -1};
inline constexpr EisensteinInt kLambda{1, -1};  // 1 - w, the prime above 3

/// The six units, in the order 1, -1, w, -w, w^2, -w^2.
inline constexpr std::array<EisensteinInt, 6> kUnits{
    EisensteinInt{1, 0}, EisensteinInt{-1, 0}, EisensteinInt{0, 1},
    EisensteinInt{0, -1}, EisensteinInt{-1, -1}, EisensteinInt{1, 1}};

inline bool is_unit(const EisensteinInt& z) {
    for (const auto& u : kUnits)
        if (z == u) return true;
    return false;
}

/// k with u = +-w^k; u must be a unit.
inline int unit_exponent(const EisensteinInt& u) {
    for (int i = 0; i < 6; ++i)
        if (kUnits[i] == u) return i / 2;
    throw DomainError("not a unit: " + u.to_string());
}

struct DivRem {
    EisensteinInt q;
    EisensteinInt r;
};

/// x = q*y + r with norm(r) < norm(y); quotient coordinates of x/y rounded to
/// nearest with ties to even.
inline DivRem divrem(const EisensteinInt& x, const EisensteinInt& y) {
    if (y.is_zero()) throw DomainError("Eisenstein division by zero");
    const i128 n = detail::norm_wide(y.a, y.b);
    // x * conj(y) computed in 128-bit; conj(y) = (y.a - y.b) - y.b w.
    const i128 a = x.a, b = x.b, c = i128{y.a} - y.b, d = -i128{y.b};
    const i128 pa = a * c - b * d;
    const i128 pb = a * d + b * c - b * d;
    EisensteinInt q = detail::checked(detail::round_div(pa, n), detail::round_div(pb, n));
    EisensteinInt r = x - q * y;
    return {q, r};
}

inline EisensteinInt mod(const EisensteinInt& x, const EisensteinInt& y) { return divrem(x, y).r; }

inline bool divides(const EisensteinInt& d, const EisensteinInt& x) {
    if (d.is_zero()) return x.is_zero();
    return mod(x, d).is_zero();
}

/// x / y when the division is exact.
inline EisensteinInt divexact(const EisensteinInt& x, const EisensteinInt& y) {
    auto [q, r] = divrem(x, y);
    if (!r.is_zero()) throw DomainError(y.to_string() + " does not divide " + x.to_string());
    return q;
}

inline bool divisible_by_lambda(const EisensteinInt& z) { return detail::mod3(z.a + z.b) == 0; }

// z / (1 - w) = z (2 + w) / 3.
inline EisensteinInt divide_by_lambda(const EisensteinInt& z) {
    const i128 a = z.a, b = z.b;
    return detail::checked((2 * a - b) / 3, (a + b) / 3);
}

inline bool is_primary(const EisensteinInt& z) { return detail::mod3(z.a) == 2 && detail::mod3(z.b) == 0; }

struct PrimaryForm {
    EisensteinInt unit;     ///< one of the six units
    EisensteinInt primary;  ///< the associate = 2 (mod 3)
};

/// z = unit * primary with primary = 2 (mod 3).
inline PrimaryForm primary_form(const EisensteinInt& z) {
    if (z.is_zero()) throw DomainError("primary_form of zero");
    if (divisible_by_lambda(z)) throw DomainError("ramified: " + z.to_string() + " is divisible by 1-w");
    for (const auto& u : kUnits) {
        EisensteinInt w = z * u;
        if (is_primary(w)) return {conj(u), w};  // u^{-1} = conj(u)
    }
    throw DomainError("no primary associate for " + z.to_string());  // unreachable for valid input
}

/// Splits off the lambda-adic part: z = lambda^k * rest with rest coprime to 3.
inline std::pair<int, EisensteinInt> strip_lambda(EisensteinInt z) {
    if (z.is_zero()) throw DomainError("strip_lambda of zero");
    int k = 0;
    while (divisible_by_lambda(z)) {
        z = divide_by_lambda(z);
        ++k;
    }
    return {k, z};
}

inline EisensteinInt lambda_power(int k) {
    EisensteinInt r{1, 0};
    for (int i = 0; i < k; ++i) r = r * kLambda;
    return r;
}

inline EisensteinInt canonical_associate(const EisensteinInt& z) {
    if (z.is_zero()) return z;
    auto [k, rest] = strip_lambda(z);
    EisensteinInt core = is_unit(rest) ? EisensteinInt{1, 0} : primary_form(rest).primary;
    return lambda_power(k) * core;
}

inline EisensteinInt gcd(EisensteinInt x, EisensteinInt y) {
    if (x.is_zero() && y.is_zero()) throw DomainError("gcd(0, 0)");
    while (!y.is_zero()) {
        EisensteinInt r = mod(x, y);
        x = y;
        y = r;
    }
    return canonical_associate(x);
}

inline bool coprime(const EisensteinInt& x, const EisensteinInt& y) { return is_unit(gcd(x, y)); }

struct Factorization {
    EisensteinInt unit{1, 0};
    std::vector<std::pair<EisensteinInt, int>> factors;  ///< (prime, exponent), sorted by (norm, a, b)

    EisensteinInt product() const {
        EisensteinInt r = unit;
        for (const auto& [p, e] : factors)
            for (int i = 0; i < e; ++i) r = r * p;
        return r;
    }
};

namespace detail {

// Primary prime of norm p for a rational prime p = 1 (mod 3): gcd(p, w - r)
// where r is a nontrivial cube root of unity mod p.
inline EisensteinInt split_prime(u64 p) {
    u64 r = 1;
    for (u64 g = 2; r == 1; ++g) r = arith::powmod(g, (p - 1) / 3, p);
    EisensteinInt pi = gcd(EisensteinInt{static_cast<i64>(p), 0}, EisensteinInt{-static_cast<i64>(r), 1});
    return pi;
}

}  // namespace detail

/// Complete factorization: unit times primary primes (lambda = 1 - w for the
/// ramified prime), built by factoring norm(z) over Z.
inline Factorization factor(const EisensteinInt& z) {
    if (z.is_zero()) throw DomainError("factor of zero");
    Factorization out;
    EisensteinInt rest = z;
    for (auto [p, e] : arith::factor(static_cast<u64>(norm(z)))) {
        if (p == 3) {
            int k = 0;
            while (divisible_by_lambda(rest)) {
                rest = divide_by_lambda(rest);
                ++k;
            }
            out.factors.emplace_back(kLambda, k);
        } else if (p % 3 == 2) {
            EisensteinInt q{static_cast<i64>(p), 0};
            for (int i = 0; i < e / 2; ++i) rest = divexact(rest, q);
            out.factors.emplace_back(q, e / 2);
        } else {
            EisensteinInt pi = detail::split_prime(p);
            for (const EisensteinInt& prime : {pi, conj(pi)}) {
                int k = 0;
                while (divides(prime, rest)) {
                    rest = divexact(rest, prime);
                    ++k;
                }
                if (k > 0) out.factors.emplace_back(prime, k);
            }
        }
    }
    if (!is_unit(rest)) throw DomainError("factorization left a non-unit cofactor " + rest.to_string());
    out.unit = rest;
    std::sort(out.factors.begin(), out.factors.end(), [](const auto& x, const auto& y) {
        return std::make_tuple(norm(x.first), x.first.a, x.first.b) <
               std::make_tuple(norm(y.first), y.first.a, y.first.b);
    });
    return out;
}

inline bool is_squarefree(const EisensteinInt& z) {
    if (z.is_zero()) return false;
    for (const auto& [p, e] : factor(z).factors)
        if (e > 1) return false;
    return true;
}

inline bool is_prime(const EisensteinInt& z) {
    if (z.is_zero()) return false;
    const u64 n = static_cast<u64>(norm(z));
    if (arith::is_prime(n)) return true;
    const u64 r = arith::isqrt(n);
    if (r * r != n || r % 3 != 2 || !arith::is_prime(r)) return false;
    return canonical_associate(z) == EisensteinInt{static_cast<i64>(r), 0};
}

struct EnumerateOptions {
    bool squarefree_only = false;
    bool primary_only = false;  ///< one canonical associate per class
    bool nonzero = true;
};

/// Elements with norm <= max_norm, ordered by (norm, a, b).
inline std::vector<EisensteinInt> enumerate_by_norm(i64 max_norm, EnumerateOptions opts = {}) {
    std::vector<EisensteinInt> out;
    if (max_norm < 0) return out;
    // norm = (a - b/2)^2 + 3 b^2 / 4
    const i64 bmax = static_cast<i64>(arith::isqrt(static_cast<u64>(4 * max_norm / 3))) + 1;
    for (i64 b = -bmax; b <= bmax; ++b) {
        const double rem = static_cast<double>(max_norm) - 0.75 * static_cast<double>(b) * b;
        if (rem < 0) continue;
        const double half = std::sqrt(rem) + 1.0;
        const i64 lo = static_cast<i64>(std::floor(0.5 * b - half));
        const i64 hi = static_cast<i64>(std::ceil(0.5 * b + half));
        for (i64 a = lo; a <= hi; ++a) {
            EisensteinInt z{a, b};
            const i64 n = norm(z);
            if (n > max_norm) continue;
            if (n == 0 && opts.nonzero) continue;
            if (opts.primary_only && n > 0 && canonical_associate(z) != z) continue;
            if (opts.squarefree_only && !is_squarefree(z)) continue;
            out.push_back(z);
        }
    }
    std::sort(out.begin(), out.end(), [](const EisensteinInt& x, const EisensteinInt& y) {
        return std::make_tuple(norm(x), x.a, x.b) < std::make_tuple(norm(y), y.a, y.b);
    });
    return out;
}

}  // namespace sievelab
