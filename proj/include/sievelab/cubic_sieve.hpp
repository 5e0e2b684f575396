#pragma once

/**
 * @file cubic_sieve.hpp
 * @brief Cubic residue symbols over Z[w] and the cubic large sieve matrices.
 *
 * Symbols are stored as exponents mod 3 of zeta = exp(2 pi i / 3) = w, so all
 * symbol arithmetic is exact. The symbol (m/n) is evaluated without factoring
 * n by a Euclidean loop: reduce m mod n, split the remainder into
 * lambda^k * unit * primary, apply the supplementary laws for lambda = 1 - w
 * and the units, then swap the primary pair by cubic reciprocity.
 *
 * Supplementary laws for primary n = a + b w, a = 3j - 1, b = 3k:
 *   (w / n)     = w^((N(n) - 1) / 3)
 *   (1 - w / n) = w^(2j)
 *   (-1 / n)    = 1
 *
 * Index sets: rows and columns use one representative per associate class
 * (the primary one, or 1 for the unit class) of squarefree elements coprime
 * to 3. The delta3 columns are triples (d, m, n) with d arbitrary, m and n
 * squarefree and coprime (the condition mu(mn) != 0).
 */

#include <bit>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sievelab/eisenstein.hpp"
#include "sievelab/sieve_matrix.hpp"

namespace sievelab {

struct CubicSymbolValue {
    std::optional<int> exponent;  ///< e in {0,1,2} meaning zeta^e; empty means 0

    static CubicSymbolValue zero() { return {}; }
    static CubicSymbolValue of(int e) { return {((e % 3) + 3) % 3}; }

    bool is_zero() const { return !exponent.has_value(); }

    cd to_complex() const {
        if (!exponent) return {0.0, 0.0};
        static const cd roots[3] = {cd(1.0, 0.0), cd(-0.5, 0.8660254037844386), cd(-0.5, -0.8660254037844386)};
        return roots[*exponent];
    }

    CubicSymbolValue conj() const { return exponent ? of(-*exponent) : zero(); }

    friend CubicSymbolValue operator*(const CubicSymbolValue& x, const CubicSymbolValue& y) {
        if (!x.exponent || !y.exponent) return zero();
        return of(*x.exponent + *y.exponent);
    }
    friend bool operator==(const CubicSymbolValue&, const CubicSymbolValue&) = default;

    std::string to_string() const { return exponent ? "z^" + std::to_string(*exponent) : "0"; }
};

/// m^((N(p)-1)/3) mod p compared against 1, w, w^2. Requires N(p) <= 2^31 so
/// that products of residues stay within the checked range.
inline CubicSymbolValue power_residue_oracle(const EisensteinInt& m, const EisensteinInt& p) {
    if (p.is_zero() || !is_prime(p)) throw DomainError("power_residue_oracle: modulus " + p.to_string() + " is not prime");
    if (divisible_by_lambda(p)) throw DomainError("ramified modulus " + p.to_string());
    const i64 np = norm(p);
    if (np > (i64{1} << 31)) throw RangeError("power_residue_oracle: modulus norm exceeds 2^31");
    EisensteinInt base = mod(m, p);
    if (base.is_zero()) return CubicSymbolValue::zero();
    EisensteinInt result{1, 0};
    u64 e = static_cast<u64>(np - 1) / 3;
    while (e) {
        if (e & 1) result = mod(result * base, p);
        base = mod(base * base, p);
        e >>= 1;
    }
    const EisensteinInt roots[3] = {EisensteinInt{1, 0}, kOmega, kOmega2};
    for (int k = 0; k < 3; ++k)
        if (divides(p, result - roots[k])) return CubicSymbolValue::of(k);
    throw NumericalError("power_residue_oracle: power is not a cube root of unity mod " + p.to_string(), 0.0);
}

namespace detail {

// Exponent of (1 - w / n) for primary n.
inline int lambda_law(const EisensteinInt& n) { return (2 * mod3((n.a + 1) / 3)) % 3; }

// Exponent of (u / n) for a unit u and primary n.
inline int unit_law(const EisensteinInt& u, const EisensteinInt& n) {
    return static_cast<int>((unit_exponent(u) * ((norm(n) - 1) / 3 % 3)) % 3);
}

}  // namespace detail

/// Jacobi-style cubic residue symbol (m/n) for n coprime to 3.
inline CubicSymbolValue cubic_symbol(EisensteinInt m, EisensteinInt n) {
    if (n.is_zero()) throw DomainError("cubic_symbol: zero modulus");
    if (divisible_by_lambda(n)) throw DomainError("ramified modulus " + n.to_string());
    int acc = 0;
    n = primary_form(n).primary;
    for (;;) {
        if (is_unit(n)) return CubicSymbolValue::of(acc);
        EisensteinInt r = mod(m, n);
        if (r.is_zero()) return CubicSymbolValue::zero();
        auto [k, rest] = strip_lambda(r);
        PrimaryForm pf = primary_form(rest);
        acc += k * detail::lambda_law(n) + detail::unit_law(pf.unit, n);
        // (pf.primary / n) = (n / pf.primary) by reciprocity.
        m = n;
        n = pf.primary;
    }
}

/// lambda_q(m, n) = (n/q) * conj((m/q)) as an exact exponent.
inline CubicSymbolValue lambda_q_symbol(const EisensteinInt& q, const EisensteinInt& m, const EisensteinInt& n) {
    return cubic_symbol(n, q) * cubic_symbol(m, q).conj();
}

inline cd lambda_q(const EisensteinInt& q, const EisensteinInt& m, const EisensteinInt& n) {
    return lambda_q_symbol(q, m, n).to_complex();
}

enum class CubicVariant { delta1, delta3 };

inline const char* to_string(CubicVariant v) { return v == CubicVariant::delta1 ? "delta1" : "delta3"; }

inline CubicVariant parse_cubic_variant(const std::string& s) {
    if (s == "delta1") return CubicVariant::delta1;
    if (s == "delta3") return CubicVariant::delta3;
    throw DomainError("unknown cubic sieve variant '" + s + "'");
}

struct CubicSieveConfig {
    i64 M = 1;
    i64 Q = 1;
    CubicVariant variant = CubicVariant::delta1;
    i64 max_cells = i64{16} << 20;  ///< rows * cols budget for dense construction

    void validate() const {
        if (M < 1) throw DomainError("CubicSieveConfig: M must be >= 1");
        if (Q < 1) throw DomainError("CubicSieveConfig: Q must be >= 1");
    }
};

/// Associate-class representatives of squarefree elements coprime to 3 with
/// norm <= limit, ordered by (norm, a, b). The unit class is represented by 1.
inline std::vector<EisensteinInt> cubic_index_set(i64 limit) {
    std::vector<EisensteinInt> out;
    for (const EisensteinInt& z : enumerate_by_norm(limit, {.squarefree_only = true, .primary_only = true}))
        if (!divisible_by_lambda(z)) out.push_back(z);
    return out;
}

namespace detail {

struct CubicColumn {
    EisensteinInt d{1, 0}, m{1, 0}, n{1, 0};
};

inline std::vector<CubicColumn> delta3_columns(i64 M) {
    std::vector<CubicColumn> cols;
    std::vector<EisensteinInt> ds;
    for (const EisensteinInt& z : enumerate_by_norm(static_cast<i64>(arith::icbrt(static_cast<u64>(M))),
                                                    {.primary_only = true}))
        if (!divisible_by_lambda(z)) ds.push_back(z);
    const std::vector<EisensteinInt> sf = cubic_index_set(M);
    for (const EisensteinInt& d : ds) {
        const i64 nd = norm(d);
        const i64 budget_d = M / (nd * nd * nd);
        for (const EisensteinInt& m : sf) {
            const i64 nm = norm(m);
            if (nm * nm > budget_d) break;
            const i64 budget_n = budget_d / (nm * nm);
            for (const EisensteinInt& n : sf) {
                if (norm(n) > budget_n) break;
                if (!coprime(m, n)) continue;
                cols.push_back({d, m, n});
            }
        }
    }
    return cols;
}

}  // namespace detail

/// Dense cubic large sieve matrix. delta1: entry (n/q); delta3: entry lambda_q(m, n)
/// in column (d, m, n).
inline SieveMatrix build_cubic_sieve_matrix(const CubicSieveConfig& cfg) {
    cfg.validate();
    const std::vector<EisensteinInt> rows = cubic_index_set(cfg.Q);
    SieveMatrix out;
    for (const auto& q : rows) out.row_labels.push_back(q.to_string());

    if (cfg.variant == CubicVariant::delta1) {
        const std::vector<EisensteinInt> cols = cubic_index_set(cfg.M);
        if (static_cast<double>(rows.size()) * static_cast<double>(cols.size()) > static_cast<double>(cfg.max_cells))
            throw CapacityError("cubic sieve matrix " + std::to_string(rows.size()) + "x" + std::to_string(cols.size()) +
                                " exceeds the cell budget (M=" + std::to_string(cfg.M) + ")");
        out.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
        for (const auto& n : cols) out.col_labels.push_back(n.to_string());
        parallel_for(rows.size(), [&](std::size_t i) {
            for (std::size_t j = 0; j < cols.size(); ++j)
                out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    cubic_symbol(cols[j], rows[i]).to_complex();
        });
    } else {
        const std::vector<detail::CubicColumn> cols = detail::delta3_columns(cfg.M);
        if (static_cast<double>(rows.size()) * static_cast<double>(cols.size()) > static_cast<double>(cfg.max_cells))
            throw CapacityError("cubic sieve matrix " + std::to_string(rows.size()) + "x" + std::to_string(cols.size()) +
                                " exceeds the cell budget (M=" + std::to_string(cfg.M) + ")");
        out.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
        for (const auto& c : cols)
            out.col_labels.push_back("(" + c.d.to_string() + "," + c.m.to_string() + "," + c.n.to_string() + ")");
        parallel_for(rows.size(), [&](std::size_t i) {
            for (std::size_t j = 0; j < cols.size(); ++j)
                out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    lambda_q(rows[i], cols[j].m, cols[j].n);
        });
    }
    out.row_weights = Eigen::VectorXd::Ones(out.entries.rows());
    return out;
}

/// Exact Gram matrix Phi Phi^* of the delta1 matrix, accumulated column by
/// column without storing Phi. counts[i*R + j][k] is the number of columns n
/// with chi_i(n) conj(chi_j(n)) = zeta^k.
struct CubicGram {
    std::vector<EisensteinInt> rows;
    i64 columns = 0;
    std::vector<std::array<i64, 3>> counts;

    Eigen::MatrixXcd matrix() const {
        const auto r = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXcd g(r, r);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < r; ++j) {
                const auto& c = counts[static_cast<std::size_t>(i * r + j)];
                cd v = static_cast<double>(c[0]);
                for (int k = 1; k < 3; ++k) v += static_cast<double>(c[k]) * CubicSymbolValue::of(k).to_complex();
                g(i, j) = v;
            }
        return g;
    }
};

namespace detail {

inline u64 gcd_u64(u64 x, u64 y) {
    while (y) {
        x %= y;
        std::swap(x, y);
    }
    return x;
}

}  // namespace detail

inline CubicGram cubic_delta1_gram(i64 M, i64 Q, unsigned workers = worker_count()) {
    if (M < 1 || Q < 1) throw DomainError("cubic_delta1_gram: M and Q must be >= 1");
    if (M > (i64{1} << 40)) throw CapacityError("cubic_delta1_gram: M above 2^40");
    CubicGram gram;
    gram.rows = cubic_index_set(Q);
    const std::size_t R = gram.rows.size();

    // Symbol of (x + y w) mod q depends only on (x mod N(q), y mod N(q)).
    std::vector<i64> nq(R);
    std::vector<std::vector<std::int8_t>> table(R);
    parallel_for(R, [&](std::size_t i) {
        const i64 n = norm(gram.rows[i]);
        nq[i] = n;
        table[i].resize(static_cast<std::size_t>(n * n));
        for (i64 x = 0; x < n; ++x)
            for (i64 y = 0; y < n; ++y) {
                CubicSymbolValue v = cubic_symbol(EisensteinInt{x, y}, gram.rows[i]);
                table[i][static_cast<std::size_t>(x * n + y)] = static_cast<std::int8_t>(v.exponent ? *v.exponent : -1);
            }
    });

    const std::vector<bool> sf = arith::squarefree_sieve(static_cast<u64>(M));
    const i64 bmax = static_cast<i64>(arith::isqrt(static_cast<u64>(4 * M / 3))) + 1;
    std::vector<i64> bs;
    for (i64 b = -bmax - (((-bmax) % 3) + 3) % 3; b <= bmax; b += 3) bs.push_back(b);

    constexpr std::size_t kChunkWords = 1024;
    constexpr std::size_t kChunk = kChunkWords * 64;
    const unsigned W = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(bs.size())));
    std::vector<std::vector<std::array<i64, 3>>> partial(W, std::vector<std::array<i64, 3>>(R * R, {0, 0, 0}));
    std::vector<i64> partial_cols(W, 0);

    parallel_for(
        W,
        [&](std::size_t w) {
            auto& counts = partial[w];
            // bits[(i * 3 + e) * kChunkWords + word]
            std::vector<u64> bits(R * 3 * kChunkWords, 0);
            std::size_t fill = 0;
            auto flush = [&]() {
                const std::size_t words = (fill + 63) / 64;
                for (std::size_t i = 0; i < R; ++i)
                    for (std::size_t j = i; j < R; ++j)
                        for (int e1 = 0; e1 < 3; ++e1) {
                            const u64* b1 = &bits[(i * 3 + e1) * kChunkWords];
                            for (int e2 = 0; e2 < 3; ++e2) {
                                const u64* b2 = &bits[(j * 3 + e2) * kChunkWords];
                                i64 c = 0;
                                for (std::size_t t = 0; t < words; ++t) c += std::popcount(b1[t] & b2[t]);
                                counts[i * R + j][((e1 - e2) % 3 + 3) % 3] += c;
                            }
                        }
                std::fill(bits.begin(), bits.end(), 0);
                fill = 0;
            };
            std::vector<i64> amod(R);
            for (std::size_t bi = w; bi < bs.size(); bi += W) {
                const i64 b = bs[bi];
                // a^2 - a b + b^2 <= M  <=>  |a - b/2| <= sqrt(M - 3 b^2 / 4)
                const double rem = static_cast<double>(M) - 0.75 * static_cast<double>(b) * static_cast<double>(b);
                if (rem < 0) continue;
                const double half = std::sqrt(rem) + 1.0;
                i64 a = static_cast<i64>(std::floor(0.5 * static_cast<double>(b) - half));
                a += ((2 - a) % 3 + 3) % 3;  // a = 2 mod 3
                const i64 ahi = static_cast<i64>(std::ceil(0.5 * static_cast<double>(b) + half));
                std::vector<std::size_t> boff(R);
                for (std::size_t i = 0; i < R; ++i) {
                    amod[i] = ((a % nq[i]) + nq[i]) % nq[i];
                    boff[i] = static_cast<std::size_t>(((b % nq[i]) + nq[i]) % nq[i]);
                }
                for (; a <= ahi; a += 3) {
                    const i64 n = a * a - a * b + b * b;
                    bool take = n >= 1 && n <= M;
                    if (take) {
                        const u64 g = detail::gcd_u64(static_cast<u64>(a < 0 ? -a : a), static_cast<u64>(b < 0 ? -b : b));
                        const u64 rest = static_cast<u64>(n) / (g * g);
                        take = sf[g] && sf[rest] && detail::gcd_u64(g, rest) == 1;
                    }
                    if (take) {
                        const std::size_t word = fill / 64;
                        const u64 bit = u64{1} << (fill % 64);
                        for (std::size_t i = 0; i < R; ++i) {
                            const std::int8_t e =
                                table[i][static_cast<std::size_t>(amod[i]) * static_cast<std::size_t>(nq[i]) + boff[i]];
                            if (e >= 0) bits[(i * 3 + static_cast<std::size_t>(e)) * kChunkWords + word] |= bit;
                        }
                        ++partial_cols[w];
                        if (++fill == kChunk) flush();
                    }
                    for (std::size_t i = 0; i < R; ++i) {
                        amod[i] += 3;
                        while (amod[i] >= nq[i]) amod[i] -= nq[i];
                    }
                }
            }
            if (fill > 0) flush();
        },
        W);

    gram.counts.assign(R * R, {0, 0, 0});
    for (unsigned w = 0; w < W; ++w) {
        gram.columns += partial_cols[w];
        for (std::size_t t = 0; t < R * R; ++t)
            for (int k = 0; k < 3; ++k) gram.counts[t][k] += partial[w][t][k];
    }
    // Lower triangle by conjugate symmetry.
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const auto& c = gram.counts[j * R + i];
            gram.counts[i * R + j] = {c[0], c[2], c[1]};
        }
    return gram;
}

/// Delta_1(M, Q) through the exact Gram matrix; only the row side is available.
inline NormReport cubic_delta1_norm(i64 M, i64 Q) { return norm_from_gram(cubic_delta1_gram(M, Q).matrix()); }

/// Row-major complex64 (float re, float im) dump at `path`, header at `path`.json.
inline void export_cubic_matrix(const SieveMatrix& m, const CubicSieveConfig& cfg, const std::string& path) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw Error("cannot open '" + path + "' for writing");
    const Eigen::MatrixXcd w = m.weighted();
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            const float pair[2] = {static_cast<float>(w(i, j).real()), static_cast<float>(w(i, j).imag())};
            bin.write(reinterpret_cast<const char*>(pair), sizeof pair);
        }
    if (!bin) throw Error("write failed for '" + path + "'");
    nlohmann::json header = {{"M", cfg.M},
                             {"Q", cfg.Q},
                             {"variant", to_string(cfg.variant)},
                             {"dims", {w.rows(), w.cols()}},
                             {"dtype", "complex64"},
                             {"order", "row_major"}};
    std::ofstream js(path + ".json");
    if (!js) throw Error("cannot open '" + path + ".json' for writing");
    js << header.dump(2) << '\n';
}

/// Reads a dump written by export_cubic_matrix back into a dense matrix.
inline Eigen::MatrixXcd read_exported_matrix(const std::string& path) {
    std::ifstream js(path + ".json");
    if (!js) throw Error("cannot open '" + path + ".json'");
    nlohmann::json header = nlohmann::json::parse(js);
    const auto rows = header.at("dims").at(0).get<Eigen::Index>();
    const auto cols = header.at("dims").at(1).get<Eigen::Index>();
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw Error("cannot open '" + path + "'");
    Eigen::MatrixXcd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            float pair[2];
            bin.read(reinterpret_cast<char*>(pair), sizeof pair);
            if (!bin) throw Error("truncated matrix dump '" + path + "'");
            out(i, j) = cd(pair[0], pair[1]);
        }
    return out;
}

}  // namespace sievelab
