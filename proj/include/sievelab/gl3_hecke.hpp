#pragma once

// GL(3) Hecke eigenvalue providers.
//
// A form is described by the elementary symmetric functions (e1, e2, e3) of
// its Satake parameters at each prime. Prime powers follow from
//     lambda(p^k, 1) = h_k(alpha),   lambda(1, p^k) = h_k(alpha^{-1}),
// with h_k the complete homogeneous symmetric polynomial, and the general
// coefficient from
//     lambda(m, n) = sum_{d | (m,n)} mu(d) lambda(m/d, 1) lambda(1, n/d).
//
// Providers:
//   satake_cusp_proxy    synthetic tempered parameters near height T with
//                        independent per-prime phases; a model, not an
//                        automorphic form.
//   eisenstein_from_gl2  minimal-parabolic Eisenstein series induced from a
//                        GL(2) form u_j with spectral parameter t.
//   external_table       coefficients read from an `m,n,re,im` CSV.
//
// omega_F is fixed to 1 for synthetic providers.

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sievelab/arith.hpp"
#include "sievelab/common.hpp"

namespace sievelab {

/// Prime data required by a provider is not available.
class MissingDataError : public Error {
public:
    using Error::Error;
};

struct SpectralParams {
    std::array<cd, 3> mu{};
    double T = 1.0;
    double V = 1.0;

    void validate() const {
        if (std::abs(mu[0] + mu[1] + mu[2]) > 1e-12) throw DomainError("Langlands parameters must sum to 0");
        if (!(T > 0) || !(V > 0)) throw DomainError("T and V must be positive");
    }
    bool tempered(double tol = 1e-12) const {
        for (const cd& m : mu)
            if (std::abs(m.real()) > tol) return false;
        return true;
    }
};

enum class Provider { satake_cusp_proxy, eisenstein_from_gl2, external_table };

inline const char* to_string(Provider p) {
    switch (p) {
        case Provider::satake_cusp_proxy: return "satake_cusp_proxy";
        case Provider::eisenstein_from_gl2: return "eisenstein_from_gl2";
        case Provider::external_table: return "external_table";
    }
    return "?";
}

using EigenvalueTable = std::map<std::pair<u64, u64>, cd>;

struct GL3Form {
    SpectralParams params;
    double omega = 1.0;
    Provider provider = Provider::satake_cusp_proxy;
    std::string label;
    /// (e1, e2, e3) of the Satake parameters at the prime p.
    std::function<std::array<cd, 3>(u64)> satake_esym;
    /// Coefficients for the external_table provider.
    std::shared_ptr<const EigenvalueTable> table;
};

namespace detail {

/// h_0..h_kmax for a parameter multiset with elementary symmetric functions e.
inline std::vector<cd> complete_homogeneous(const std::array<cd, 3>& e, int kmax) {
    std::vector<cd> h(static_cast<std::size_t>(kmax) + 1);
    h[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        cd v = e[0] * h[k - 1];
        if (k >= 2) v -= e[1] * h[k - 2];
        if (k >= 3) v += e[2] * h[k - 3];
        h[static_cast<std::size_t>(k)] = v;
    }
    return h;
}

inline std::array<cd, 3> inverse_esym(const std::array<cd, 3>& e) {
    if (std::abs(e[2]) == 0.0) throw DomainError("Satake parameters must be nonzero");
    return {e[1] / e[2], e[0] / e[2], 1.0 / e[2]};
}

inline std::array<cd, 3> esym_of(const std::array<cd, 3>& a) {
    return {a[0] + a[1] + a[2], a[0] * a[1] + a[0] * a[2] + a[1] * a[2], a[0] * a[1] * a[2]};
}

inline u64 prime_key(u64 seed, u64 p) { return hash_combine(seed, p); }

}  // namespace detail

/// Synthetic tempered form: mu = i(2T + d1, T + d2, -3T - d1 - d2) with
/// d1, d2 in [-V/200, V/200]; alpha_i(p) = p^{-mu_i theta_p}, theta_p in [0,1).
inline GL3Form satake_cusp_proxy(u64 seed, double T, double V) {
    if (!(T >= 1.0)) throw DomainError("satake_cusp_proxy: T must be >= 1");
    if (!(V > 0)) throw DomainError("satake_cusp_proxy: V must be positive");
    const double half = V / 200.0;
    const double d1 = (2.0 * unit_interval(hash_combine(seed, 1)) - 1.0) * half;
    const double d2 = (2.0 * unit_interval(hash_combine(seed, 2)) - 1.0) * half;
    const double t1 = 2.0 * T + d1, t2 = T + d2, t3 = -(t1 + t2);
    GL3Form f;
    f.params = {{cd(0, t1), cd(0, t2), cd(0, t3)}, T, V};
    f.provider = Provider::satake_cusp_proxy;
    f.label = "proxy:" + std::to_string(seed);
    const std::array<double, 3> t{t1, t2, t3};
    f.satake_esym = [seed, t](u64 p) {
        const double theta = unit_interval(detail::prime_key(seed, p));
        const double lp = std::log(static_cast<double>(p));
        std::array<cd, 3> a;
        for (int i = 0; i < 3; ++i) a[i] = std::polar(1.0, -t[i] * theta * lp);
        auto e = detail::esym_of(a);
        e[2] = 1.0;  // product is exactly 1 since t sums to 0
        return e;
    };
    return f;
}

/// A family of proxies with seeds derived from one root.
inline std::vector<GL3Form> proxy_family(u64 root_seed, std::size_t count, double T, double V) {
    std::vector<GL3Form> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(satake_cusp_proxy(hash_combine(derive_seed(root_seed, "proxy_family"), i), T, V));
    return out;
}

// ---------------------------------------------------------------------------
// GL(2) data and Eisenstein series

struct GL2FormData {
    double t_j = 0.0;
    std::map<u64, double> lambda_p;
    std::string source;

    double lambda_prime(u64 p) const {
        auto it = lambda_p.find(p);
        if (it == lambda_p.end())
            throw MissingDataError("GL(2) form t_j=" + std::to_string(t_j) + " has no eigenvalue at p=" +
                                   std::to_string(p));
        return it->second;
    }

    /// lambda_j(p^k) by lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1}).
    double lambda_prime_power(u64 p, int k) const {
        if (k == 0) return 1.0;
        const double lp = lambda_prime(p);
        double prev = 1.0, cur = lp;
        for (int i = 1; i < k; ++i) {
            const double next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }

    double lambda(u64 n) const {
        if (n == 0) throw DomainError("GL(2) eigenvalue at 0");
        double v = 1.0;
        for (auto [p, e] : arith::factor(n)) v *= lambda_prime_power(p, e);
        return v;
    }
};

/// Synthetic GL(2) data with lambda(p) = 2 cos(pi theta_p) for all primes up to max_prime.
inline GL2FormData synthetic_gl2_form(u64 seed, double t_j, u64 max_prime) {
    GL2FormData u;
    u.t_j = t_j;
    u.source = "synthetic:" + std::to_string(seed);
    for (u64 p : arith::primes_up_to(max_prime))
        u.lambda_p[p] = 2.0 * std::cos(kPi * unit_interval(detail::prime_key(seed, p)));
    return u;
}

/// lambda_E(1, n) = sum_{d1 d2 = n} lambda_j(d1) d1^{-it} d2^{2it}.
inline cd eisenstein_lambda(const GL2FormData& u, double t, u64 n) {
    if (n == 0) throw DomainError("eisenstein_lambda at 0");
    cd sum = 0.0;
    for (u64 d1 : arith::divisors(n)) {
        const u64 d2 = n / d1;
        sum += u.lambda(d1) * std::polar(1.0, -t * std::log(static_cast<double>(d1))) *
               std::polar(1.0, 2.0 * t * std::log(static_cast<double>(d2)));
    }
    return sum;
}

/// Eisenstein series induced from u with mu = (2it, -it + it_j, -it - it_j).
inline GL3Form eisenstein_form(const GL2FormData& u, double t) {
    GL3Form f;
    const double T = std::max({1.0, std::abs(2 * t), std::abs(t - u.t_j), std::abs(t + u.t_j)});
    f.params = {{cd(0, 2 * t), cd(0, -t + u.t_j), cd(0, -t - u.t_j)}, T, 1.0};
    f.provider = Provider::eisenstein_from_gl2;
    f.label = "eisenstein:" + std::to_string(u.t_j) + "@" + std::to_string(t);
    auto data = std::make_shared<const GL2FormData>(u);
    f.satake_esym = [data, t](u64 p) {
        const double lp = std::log(static_cast<double>(p));
        const double l = data->lambda_prime(p);
        const cd e1 = std::polar(1.0, -2 * t * lp) + l * std::polar(1.0, t * lp);
        const cd e2 = l * std::polar(1.0, -t * lp) + std::polar(1.0, 2 * t * lp);
        return std::array<cd, 3>{e1, e2, 1.0};
    };
    return f;
}

// ---------------------------------------------------------------------------
// Eigenvalues

inline constexpr u64 kMaxHeckeArgument = u64{1} << 40;
inline constexpr u64 kMaxHeckeTableLimit = u64{1} << 24;

namespace detail {

inline cd table_lookup(const GL3Form& f, u64 m, u64 n) {
    auto it = f.table->find({m, n});
    if (it == f.table->end())
        throw MissingDataError("external eigenvalue table has no entry (" + std::to_string(m) + "," +
                               std::to_string(n) + ")");
    return it->second;
}

inline cd prime_power_row(const GL3Form& f, u64 p, int k) {
    return complete_homogeneous(f.satake_esym(p), k)[static_cast<std::size_t>(k)];
}

inline cd prime_power_col(const GL3Form& f, u64 p, int k) {
    return complete_homogeneous(inverse_esym(f.satake_esym(p)), k)[static_cast<std::size_t>(k)];
}

}  // namespace detail

/// lambda_F(m, n), computed by factoring m and n.
inline cd hecke_eigenvalue(const GL3Form& f, u64 m, u64 n) {
    if (m == 0 || n == 0) throw DomainError("hecke_eigenvalue: arguments must be positive");
    if (m > kMaxHeckeArgument || n > kMaxHeckeArgument)
        throw CapacityError("hecke_eigenvalue: argument above 2^40");
    if (f.provider == Provider::external_table) return detail::table_lookup(f, m, n);
    auto row = [&](u64 x) {
        cd v = 1.0;
        for (auto [p, e] : arith::factor(x)) v *= detail::prime_power_row(f, p, e);
        return v;
    };
    auto col = [&](u64 x) {
        cd v = 1.0;
        for (auto [p, e] : arith::factor(x)) v *= detail::prime_power_col(f, p, e);
        return v;
    };
    const u64 g = std::gcd(m, n);
    cd sum = 0.0;
    for (u64 d : arith::divisors(g)) {
        const int mu = arith::mobius(d);
        if (mu != 0) sum += static_cast<double>(mu) * row(m / d) * col(n / d);
    }
    return sum;
}

/// Precomputed lambda(m,1), lambda(1,n) for m, n <= limit, with lambda(m,n)
/// assembled on demand. Read-only after construction.
class HeckeTable {
public:
    HeckeTable(GL3Form form, u64 limit) : form_(std::move(form)), limit_(limit) {
        if (limit_ < 1) throw DomainError("HeckeTable: limit must be >= 1");
        if (limit_ > kMaxHeckeTableLimit)
            throw CapacityError("HeckeTable: limit " + std::to_string(limit_) + " exceeds 2^24");
        build_sieve();
        if (form_.provider == Provider::external_table) return;
        row_.assign(limit_ + 1, cd(0.0));
        col_.assign(limit_ + 1, cd(0.0));
        row_[1] = col_[1] = 1.0;
        for (u64 p = 2; p <= limit_; ++p) {
            if (spf_[p] != p) continue;
            int kmax = 0;
            for (u64 q = p; q <= limit_; q *= p) {
                ++kmax;
                if (q > limit_ / p) break;
            }
            const auto e = form_.satake_esym(p);
            const auto hr = detail::complete_homogeneous(e, kmax);
            const auto hc = detail::complete_homogeneous(detail::inverse_esym(e), kmax);
            u64 q = 1;
            for (int k = 1; k <= kmax; ++k) {
                q *= p;
                row_[q] = hr[static_cast<std::size_t>(k)];
                col_[q] = hc[static_cast<std::size_t>(k)];
            }
        }
        for (u64 m = 2; m <= limit_; ++m) {
            const u64 p = spf_[m];
            u64 rest = m;
            while (rest % p == 0) rest /= p;
            if (rest == 1) continue;  // prime power, already set
            row_[m] = row_[m / rest] * row_[rest];
            col_[m] = col_[m / rest] * col_[rest];
        }
    }

    const GL3Form& form() const { return form_; }
    u64 limit() const { return limit_; }

    cd operator()(u64 m, u64 n) const {
        check(m);
        check(n);
        if (form_.provider == Provider::external_table) return detail::table_lookup(form_, m, n);
        if (m == 1) return col_[n];
        if (n == 1) return row_[m];
        const u64 g = std::gcd(m, n);
        cd sum = row_[m] * col_[n];
        if (g == 1) return sum;
        // squarefree divisors d > 1 of g
        std::vector<u64> primes;
        for (u64 x = g; x > 1;) {
            const u64 p = spf_[x];
            primes.push_back(p);
            while (x % p == 0) x /= p;
        }
        const std::size_t k = primes.size();
        for (u64 mask = 1; mask < (u64{1} << k); ++mask) {
            u64 d = 1;
            int sign = 1;
            for (std::size_t i = 0; i < k; ++i)
                if (mask >> i & 1) {
                    d *= primes[i];
                    sign = -sign;
                }
            sum += static_cast<double>(sign) * row_[m / d] * col_[n / d];
        }
        return sum;
    }

private:
    void check(u64 x) const {
        if (x == 0) throw DomainError("Hecke eigenvalue index must be positive");
        if (x > limit_)
            throw CapacityError("Hecke index " + std::to_string(x) + " exceeds table limit " + std::to_string(limit_));
    }

    void build_sieve() {
        spf_.assign(limit_ + 1, 0);
        for (u64 i = 2; i <= limit_; ++i) {
            if (spf_[i]) continue;
            for (u64 j = i; j <= limit_; j += i)
                if (!spf_[j]) spf_[j] = i;
        }
    }

    GL3Form form_;
    u64 limit_;
    std::vector<u64> spf_;
    std::vector<cd> row_, col_;
};

// ---------------------------------------------------------------------------
// Derived quantities

/// sum over d^3 m^2 n <= cutoff of lambda_F(m,n) conj(lambda_G(m,n)) (d^3 m^2 n)^{-s}.
inline cd rankin_selberg_partial(const GL3Form& F, const GL3Form& G, cd s, u64 cutoff) {
    if (cutoff < 1) throw DomainError("rankin_selberg_partial: cutoff must be >= 1");
    HeckeTable tf(F, cutoff), tg(G, cutoff);
    cd sum = 0.0;
    for (u64 d = 1; d * d * d <= cutoff; ++d) {
        const u64 r1 = cutoff / (d * d * d);
        for (u64 m = 1; m * m <= r1; ++m) {
            const u64 r2 = r1 / (m * m);
            for (u64 n = 1; n <= r2; ++n) {
                const double k = static_cast<double>(d * d * d * m * m * n);
                sum += tf(m, n) * std::conj(tg(m, n)) * std::exp(-s * std::log(k));
            }
        }
    }
    return sum;
}

struct ConvexityReport {
    double sum = 0.0;
    double ratio = 0.0;
};

/// sum_{m^2 n <= X} |lambda_F(m,n)|^2 and its ratio to X.
inline ConvexityReport convexity_report(const GL3Form& F, u64 X) {
    if (X < 1) throw DomainError("convexity_report: X must be >= 1");
    HeckeTable t(F, X);
    ConvexityReport r;
    for (u64 m = 1; m * m <= X; ++m)
        for (u64 n = 1; n <= X / (m * m); ++n) r.sum += std::norm(t(m, n));
    r.ratio = r.sum / static_cast<double>(X);
    return r;
}

struct EulerFactorCheck {
    cd direct;    ///< lambda(p) conj(lambda'(p)) p^{-s}
    cd factored;  ///< sum of first-order terms of the four L-factors
    double residual = 0.0;
};

/// Compares the p^{-s} coefficient of sum lambda_E(1,n) conj(lambda_E'(1,n)) n^{-s}
/// with the first-order terms of zeta(s-2it+2it') L(s+it+2it', u) L(s-2it-it', u')
/// L(s+it-it', u x u').
inline EulerFactorCheck euler_factor_check(const GL2FormData& u, const GL2FormData& u2, double t, double t2, u64 p,
                                           cd s) {
    if (!arith::is_prime(p)) throw DomainError("euler_factor_check: p must be prime");
    const cd ps = std::exp(-s * std::log(static_cast<double>(p)));
    const double lp = std::log(static_cast<double>(p));
    auto pit = [&](double x) { return std::polar(1.0, x * lp); };  // p^{ix}
    EulerFactorCheck c;
    c.direct = eisenstein_lambda(u, t, p) * std::conj(eisenstein_lambda(u2, t2, p)) * ps;
    const double l1 = u.lambda_prime(p), l2 = u2.lambda_prime(p);
    const cd zeta_term = pit(2 * t - 2 * t2);
    const cd u_term = l1 * pit(-t - 2 * t2);
    const cd u2_term = l2 * pit(2 * t + t2);
    const cd rs_term = l1 * l2 * pit(-t + t2);
    c.factored = (zeta_term + u_term + u2_term + rs_term) * ps;
    c.residual = std::abs(c.direct - c.factored);
    return c;
}

// ---------------------------------------------------------------------------
// Ingestion and export

struct GL2Ingest {
    std::vector<GL2FormData> forms;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, std::size_t line, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
    }
}

inline u64 parse_u64(const std::string& s, std::size_t line, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
    }
}

}  // namespace detail

/// Reads a `t_j,p,lambda` table. Rows sharing t_j form one GL(2) form, in
/// order of first appearance. A form must list every prime below its largest
/// prime; duplicate (t_j, p) rows keep the last value and add a warning.
inline GL2Ingest ingest_gl2_table(std::istream& in, const std::string& source = "<stream>") {
    GL2Ingest out;
    std::vector<std::size_t> last_line;  // per form, line of its largest prime
    std::map<double, std::size_t> index;
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = detail::trim(raw);
        if (s.empty() || s[0] == '#') continue;
        auto fields = detail::split_csv(s);
        if (!header_seen) {
            header_seen = true;
            if (fields == std::vector<std::string>{"t_j", "p", "lambda"}) continue;
            throw ParseError("expected header 't_j,p,lambda'", line);
        }
        if (fields.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line);
        const double t = detail::parse_double(fields[0], line, "t_j");
        const u64 p = detail::parse_u64(fields[1], line, "p");
        const double lam = detail::parse_double(fields[2], line, "lambda");
        if (p == 1) {
            if (lam != 1.0) throw ParseError("lambda(1) must be 1", line);
            continue;
        }
        if (!arith::is_prime(p)) throw ParseError("p=" + fields[1] + " is not prime", line);
        auto [it, inserted] = index.emplace(t, out.forms.size());
        if (inserted) {
            GL2FormData u;
            u.t_j = t;
            u.source = source;
            out.forms.push_back(u);
            last_line.push_back(line);
        }
        GL2FormData& u = out.forms[it->second];
        if (u.lambda_p.count(p))
            out.warnings.push_back("line " + std::to_string(line) + ": duplicate (t_j=" + fields[0] + ", p=" +
                                   fields[1] + "), keeping the later value");
        u.lambda_p[p] = lam;
        if (p == u.lambda_p.rbegin()->first) last_line[it->second] = line;
    }
    for (std::size_t i = 0; i < out.forms.size(); ++i) {
        const auto& u = out.forms[i];
        for (u64 p : arith::primes_up_to(u.lambda_p.rbegin()->first))
            if (!u.lambda_p.count(p))
                throw ParseError("form t_j=" + std::to_string(u.t_j) + " is missing prime " + std::to_string(p),
                                 last_line[i]);
    }
    return out;
}

inline GL2Ingest ingest_gl2_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open GL(2) table '" + path + "'");
    return ingest_gl2_table(in, path);
}

inline void write_gl2_table(const std::vector<GL2FormData>& forms, std::ostream& out) {
    out << "t_j,p,lambda\n";
    char buf[96];
    for (const auto& u : forms)
        for (const auto& [p, l] : u.lambda_p) {
            std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g\n", u.t_j, static_cast<unsigned long long>(p), l);
            out << buf;
        }
}

/// `m,n,re,im` rows for 1 <= m, n <= limit.
inline void export_eigenvalue_table(const GL3Form& f, u64 limit, std::ostream& out) {
    HeckeTable t(f, limit);
    out << "m,n,re,im\n";
    char buf[128];
    for (u64 m = 1; m <= limit; ++m)
        for (u64 n = 1; n <= limit; ++n) {
            const cd v = t(m, n);
            std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(m),
                          static_cast<unsigned long long>(n), v.real(), v.imag());
            out << buf;
        }
}

/// Form backed by an `m,n,re,im` table; params are carried over from the caller.
inline GL3Form load_eigenvalue_table(std::istream& in, SpectralParams params, std::string label = "table") {
    auto table = std::make_shared<EigenvalueTable>();
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = detail::trim(raw);
        if (s.empty() || s[0] == '#') continue;
        auto fields = detail::split_csv(s);
        if (!header_seen) {
            header_seen = true;
            if (fields == std::vector<std::string>{"m", "n", "re", "im"}) continue;
            throw ParseError("expected header 'm,n,re,im'", line);
        }
        if (fields.size() != 4) throw ParseError("expected 4 fields", line);
        const u64 m = detail::parse_u64(fields[0], line, "m");
        const u64 n = detail::parse_u64(fields[1], line, "n");
        if (m == 0 || n == 0) throw ParseError("indices must be positive", line);
        (*table)[{m, n}] = cd(detail::parse_double(fields[2], line, "re"), detail::parse_double(fields[3], line, "im"));
    }
    auto one = table->find({1, 1});
    if (one != table->end() && std::abs(one->second - cd(1.0)) > 1e-12)
        throw ParseError("lambda(1,1) must be 1", 0);
    GL3Form f;
    f.params = params;
    f.provider = Provider::external_table;
    f.label = std::move(label);
    f.table = std::move(table);
    return f;
}

}  // namespace sievelab
