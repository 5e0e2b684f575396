#pragma once

// Family norms Delta_1, Delta_2, Delta_3 over GL(3) families, the dyadic
// certificates relating them, and the exponent-chaining optimizer.
//
//   Delta_1(N): columns n with N <= n <= 2N,              entry lambda_F(1, n)
//   Delta_2(N): columns (m, n) with N <= m^2 n <= 2N,     entry lambda_F(m, n)
//   Delta_3(N): columns (d, m, n) with N <= d^3 m^2 n <= 2N, entry lambda_F(m, n)
//
// Rows are forms weighted by omega_F^{-1/2}. Since the column sets embed
// (m = 1, then d = 1), Delta_1 <= Delta_2 <= Delta_3.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "sievelab/gl3_hecke.hpp"
#include "sievelab/sieve_matrix.hpp"

namespace sievelab {

enum class DeltaKind { delta1, delta2, delta3 };

inline const char* to_string(DeltaKind k) {
    switch (k) {
        case DeltaKind::delta1: return "delta1";
        case DeltaKind::delta2: return "delta2";
        case DeltaKind::delta3: return "delta3";
    }
    return "?";
}

inline constexpr std::size_t kDefaultColumnBudget = std::size_t{1} << 20;

/// Eigenvalue tables for every member of a family, shared by all norms at a given scale.
class FamilyTables {
public:
    FamilyTables(const std::vector<GL3Form>& family, u64 limit) {
        if (family.empty()) throw DomainError("empty family");
        for (const auto& f : family) {
            if (!(f.omega > 0)) throw DomainError("omega_F must be positive for " + f.label);
            tables_.emplace_back(f, limit);
        }
    }
    std::size_t size() const { return tables_.size(); }
    u64 limit() const { return tables_.front().limit(); }
    const HeckeTable& operator[](std::size_t i) const { return tables_[i]; }

private:
    std::vector<HeckeTable> tables_;
};

struct DeltaColumn {
    u64 d = 1, m = 1, n = 1;
    friend bool operator==(const DeltaColumn&, const DeltaColumn&) = default;
};

/// Column index set for the given kind at scale N, ordered by (d, m, n).
inline std::vector<DeltaColumn> delta_columns(u64 N, DeltaKind kind, std::size_t budget = kDefaultColumnBudget) {
    if (N < 1) throw DomainError("N must be >= 1");
    std::vector<DeltaColumn> cols;
    auto push = [&](u64 d, u64 m, u64 n) {
        if (cols.size() >= budget)
            throw CapacityError("column count exceeds budget " + std::to_string(budget) + " at N=" + std::to_string(N));
        cols.push_back({d, m, n});
    };
    const u64 hi = 2 * N;
    if (kind == DeltaKind::delta1) {
        for (u64 n = N; n <= hi; ++n) push(1, 1, n);
        return cols;
    }
    const u64 dmax = kind == DeltaKind::delta3 ? arith::icbrt(hi) : 1;
    for (u64 d = 1; d <= dmax; ++d) {
        const u64 d3 = d * d * d;
        for (u64 m = 1; d3 * m * m <= hi; ++m) {
            const u64 k = d3 * m * m;
            const u64 nlo = (N + k - 1) / k, nhi = hi / k;
            for (u64 n = std::max<u64>(nlo, 1); n <= nhi; ++n) push(d, m, n);
        }
    }
    return cols;
}

inline std::string column_label(const DeltaColumn& c, DeltaKind kind) {
    switch (kind) {
        case DeltaKind::delta1: return std::to_string(c.n);
        case DeltaKind::delta2: return "(" + std::to_string(c.m) + "," + std::to_string(c.n) + ")";
        case DeltaKind::delta3:
            return "(" + std::to_string(c.d) + "," + std::to_string(c.m) + "," + std::to_string(c.n) + ")";
    }
    return "";
}

inline SieveMatrix build_delta_matrix(const FamilyTables& tables, u64 N, DeltaKind kind,
                                      std::size_t budget = kDefaultColumnBudget) {
    const auto cols = delta_columns(N, kind, budget);
    if (2 * N > tables.limit())
        throw CapacityError("eigenvalue tables cover indices up to " + std::to_string(tables.limit()) +
                            ", N=" + std::to_string(N) + " needs " + std::to_string(2 * N));
    SieveMatrix out;
    const auto R = static_cast<Eigen::Index>(tables.size());
    const auto C = static_cast<Eigen::Index>(cols.size());
    out.entries.resize(R, C);
    out.row_weights.resize(R);
    for (Eigen::Index i = 0; i < R; ++i) {
        const HeckeTable& t = tables[static_cast<std::size_t>(i)];
        out.row_labels.push_back(t.form().label);
        out.row_weights[i] = 1.0 / std::sqrt(t.form().omega);
        for (Eigen::Index j = 0; j < C; ++j) {
            const auto& c = cols[static_cast<std::size_t>(j)];
            out.entries(i, j) = t(c.m, c.n);
        }
    }
    for (const auto& c : cols) out.col_labels.push_back(column_label(c, kind));
    return out;
}

inline SieveMatrix build_delta_matrix(const std::vector<GL3Form>& family, u64 N, DeltaKind kind,
                                      std::size_t budget = kDefaultColumnBudget) {
    return build_delta_matrix(FamilyTables(family, 2 * N), N, kind, budget);
}

/// Memoized Delta_k(N) for one family. Every computed report is kept so the
/// duality gap of each matrix can be audited afterwards.
class DeltaCache {
public:
    DeltaCache(const std::vector<GL3Form>& family, u64 max_index, NormOptions opts = {})
        : tables_(family, max_index), opts_(opts) {}

    const NormReport& report(u64 N, DeltaKind kind) {
        const auto key = std::make_pair(N, kind);
        auto it = reports_.find(key);
        if (it != reports_.end()) return it->second;
        return reports_.emplace(key, operator_norm_sq(build_delta_matrix(tables_, N, kind), opts_)).first->second;
    }
    double operator()(u64 N, DeltaKind kind) { return report(N, kind).delta; }

    const FamilyTables& tables() const { return tables_; }
    const std::map<std::pair<u64, DeltaKind>, NormReport>& reports() const { return reports_; }
    double max_duality_gap() const {
        double g = 0.0;
        for (const auto& [k, r] : reports_) g = std::max(g, r.relative_gap());
        return g;
    }

private:
    FamilyTables tables_;
    NormOptions opts_;
    std::map<std::pair<u64, DeltaKind>, NormReport> reports_;
};

// ---------------------------------------------------------------------------
// Certificates

struct Certificate {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    double ratio() const { return lhs > 0 ? rhs / lhs : INFINITY; }
};

inline constexpr double kCertificateSlack = 1e-6;

/// Delta_3(N) <= sum_{R = 2^j <= 2N} (2 (N/R)^{1/3} + 1) Delta_2(R).
/// For fixed (m, n) with m^2 n in [R, 2R) the number of d with
/// N <= d^3 m^2 n <= 2N is at most (N/R)^{1/3} + 1.
inline Certificate certify_lemma4(DeltaCache& cache, u64 N) {
    Certificate c;
    c.lhs = cache(N, DeltaKind::delta3);
    for (u64 R = 1; R <= 2 * N; R *= 2)
        c.rhs += (2.0 * std::cbrt(static_cast<double>(N) / static_cast<double>(R)) + 1.0) * cache(R, DeltaKind::delta2);
    c.pass = c.lhs <= c.rhs * (1 + kCertificateSlack);
    return c;
}

struct DyadicBlock {
    u64 X = 0;  ///< dyadic block of the variable paired with Delta_1
    u64 Y = 0;  ///< dyadic block of d times the other variable
    double delta1 = 0.0;
    double pair_mass = 0.0;  ///< max_F sum over the block's pairs of |lambda_F|^2
    double bound = 0.0;      ///< delta1 * pair_mass
    double heuristic = 0.0;  ///< min(Y Delta_1(X), X Delta_1(Y))
};

struct Delta2Certificate : Certificate {
    u64 divisor_bound = 0;  ///< max tau(gcd(m, n)) over the Delta_2 columns
    std::vector<DyadicBlock> blocks;
};

enum class Delta2Variant {
    primary,  ///< Delta_1 acts on n', mass from |lambda_F(m', 1)|^2
    swapped   ///< Delta_1 acts on m' through lambda_F(m', 1) = conj lambda_F(1, m')
};

/// Delta_2(N) <= D * sum over dyadic blocks of Delta_1(X) * max_F sum_{pairs} |lambda_F|^2.
///
/// Writing lambda_F(m,n) = sum_{d | (m,n)} mu(d) lambda_F(m/d,1) lambda_F(1,n/d),
/// Cauchy's inequality costs D = max tau(gcd(m,n)); with m = d m', n = d n'
/// the variable n' (or m' in the swapped variant) is summed dyadically
/// against Delta_1 while the pair (d, m') (resp. (d, n')) contributes its
/// largest total |lambda|^2 over the family.
inline Delta2Certificate certify_lemma5(DeltaCache& cache, u64 N, Delta2Variant variant = Delta2Variant::primary) {
    const FamilyTables& tabs = cache.tables();
    if (variant == Delta2Variant::swapped)
        for (std::size_t i = 0; i < tabs.size(); ++i)
            if (!tabs[i].form().params.tempered())
                throw DomainError("swapped certificate needs tempered forms: " + tabs[i].form().label);

    Delta2Certificate c;
    c.lhs = cache(N, DeltaKind::delta2);
    for (const auto& col : delta_columns(N, DeltaKind::delta2))
        c.divisor_bound = std::max(c.divisor_bound, arith::num_divisors(std::gcd(col.m, col.n)));

    auto floor_pow2 = [](u64 x) {
        u64 r = 1;
        while (r * 2 <= x) r *= 2;
        return r;
    };
    // (X, Y) -> set of (d, other) pairs
    std::map<std::pair<u64, u64>, std::vector<std::pair<u64, u64>>> blocks;
    const u64 hi = 2 * N;
    for (u64 d = 1; d * d * d <= hi; ++d) {
        const u64 d3 = d * d * d;
        for (u64 mp = 1; d3 * mp * mp <= hi; ++mp) {
            const u64 k = d3 * mp * mp;
            for (u64 np = std::max<u64>((N + k - 1) / k, 1); np <= hi / k; ++np) {
                const bool prim = variant == Delta2Variant::primary;
                const u64 summed = prim ? np : mp;
                const u64 other = prim ? mp : np;
                auto& v = blocks[{floor_pow2(summed), floor_pow2(d * other)}];
                if (v.empty() || v.back() != std::make_pair(d, other)) v.emplace_back(d, other);
            }
        }
    }
    double total = 0.0;
    for (auto& [key, pairs] : blocks) {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        DyadicBlock b;
        b.X = key.first;
        b.Y = key.second;
        b.delta1 = cache(b.X, DeltaKind::delta1);
        for (std::size_t i = 0; i < tabs.size(); ++i) {
            double mass = 0.0;
            for (const auto& [d, other] : pairs)
                mass += std::norm(variant == Delta2Variant::primary ? tabs[i](other, 1) : tabs[i](1, other));
            b.pair_mass = std::max(b.pair_mass, mass);
        }
        b.bound = b.delta1 * b.pair_mass;
        b.heuristic = std::min(static_cast<double>(b.Y) * b.delta1,
                               static_cast<double>(b.X) * cache(b.Y, DeltaKind::delta1));
        total += b.bound;
        c.blocks.push_back(b);
    }
    c.rhs = static_cast<double>(c.divisor_bound) * total;
    c.pass = c.lhs <= c.rhs * (1 + kCertificateSlack);
    return c;
}

// ---------------------------------------------------------------------------
// Exponent chaining

struct ExponentChainResult {
    double value = 0.0;
    std::optional<std::pair<double, double>> argmax;  ///< (X, Y); empty when the region is empty
    double closed_form = 0.0;
    double inner_max = 0.0;
};

/// N + (N/T^3) * max_{X,Y >= 1, Y^2 X <= T^6/N} (T^6/(N X Y^2))^{1/3} min(Y(T^3 + T^2 X), X(T^3 + T^2 Y)),
/// maximized over a log-spaced grid of `grid` points per axis on [1, T^6/N].
inline ExponentChainResult exponent_chain(double T, double N, int grid = 200) {
    if (!(T >= 1.0) || !(N >= 1.0)) throw DomainError("exponent_chain: T and N must be >= 1");
    if (grid < 2) throw DomainError("exponent_chain: grid needs at least 2 points");
    ExponentChainResult r;
    const double T2 = T * T, T3 = T2 * T, T6 = T3 * T3;
    const double bound = T6 / N;
    r.closed_form = N + std::pow(T3 * N, 2.0 / 3.0) + T2 * T3;
    if (bound >= 1.0) {
        const double lb = std::log(bound);
        for (int i = 0; i < grid; ++i) {
            const double X = std::exp(lb * i / (grid - 1));
            for (int j = 0; j < grid; ++j) {
                const double Y = std::exp(lb * j / (grid - 1));
                if (Y * Y * X > bound * (1 + 1e-12)) continue;
                const double v = std::cbrt(bound / (X * Y * Y)) * std::min(Y * (T3 + T2 * X), X * (T3 + T2 * Y));
                if (v > r.inner_max) {
                    r.inner_max = v;
                    r.argmax = std::make_pair(X, Y);
                }
            }
        }
    }
    r.value = N + N / T3 * r.inner_max;
    return r;
}

struct ExponentShape {
    double kappa = 0.0;      ///< log_T N
    double fitted = 0.0;     ///< log_T of the optimized value
    double predicted = 0.0;  ///< max(5, kappa, 2 + 2 kappa / 3)
    double tolerance = 0.0;  ///< log 8 / log T
    bool pass = false;
};

/// Compares log_T(exponent_chain(T, T^kappa)) with the exponent of T^5 + N + T^2 N^{2/3}.
inline ExponentShape exponent_shape(double T, double kappa, int grid = 200) {
    ExponentShape s;
    s.kappa = kappa;
    const double lt = std::log(T);
    s.fitted = std::log(exponent_chain(T, std::exp(kappa * lt), grid).value) / lt;
    s.predicted = std::max({5.0, kappa, 2.0 + 2.0 * kappa / 3.0});
    s.tolerance = std::log(8.0) / lt;
    s.pass = std::abs(s.fitted - s.predicted) <= s.tolerance;
    return s;
}

/// Least-squares slope of log(delta) against log(size).
inline double exponent_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw DomainError("exponent_fit needs at least 3 points");
    double sx = 0, sy = 0;
    for (const auto& [size, delta] : points) {
        if (!(size > 0) || !(delta > 0)) throw DomainError("exponent_fit needs positive sizes and values");
        sx += std::log(size);
        sy += std::log(delta);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [size, delta] : points) {
        const double dx = std::log(size) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(delta) - my);
    }
    if (sxx <= 1e-300) throw DomainError("exponent_fit needs distinct sizes");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].first == points[j].first) throw DomainError("exponent_fit needs distinct sizes");
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Output

inline void write_norm_csv_header(std::ostream& out) { out << "size,delta,dual_delta,method,residual\n"; }

inline void write_norm_csv_row(std::ostream& out, double size, const NormReport& r) {
    char buf[256];
    if (r.dual_delta)
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%.17g\n", size, r.delta, *r.dual_delta,
                      to_string(r.method), r.residual);
    else
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,,%s,%.17g\n", size, r.delta, to_string(r.method), r.residual);
    out << buf;
}

}  // namespace sievelab
