#pragma once

// Archimedean toolkit: Gamma_R factors, the functional-equation ratio of
// Rankin-Selberg gamma factors, the Mellin transform of a smooth bump, the
// Fourier separation inequality, and the Stirling separator f(x).
//
// Logarithms of Gamma use the standard log-gamma branch: real on the positive
// axis and continued analytically elsewhere, so that
//     log_gamma(z + 1) = log_gamma(z) + log z
// holds exactly (the principal log of Gamma(z) would wrap by 2 pi i).

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "sievelab/common.hpp"
#include "sievelab/gl3_hecke.hpp"

namespace sievelab {

namespace detail {

// B_{2k} / (2k (2k - 1)) for k = 1..12.
inline constexpr std::array<double, 12> kStirling = {
    1.0 / 12.0,           -1.0 / 360.0,         1.0 / 1260.0,          -1.0 / 1680.0,
    1.0 / 1188.0,         -691.0 / 360360.0,    1.0 / 156.0,           -3617.0 / 122400.0,
    43867.0 / 244188.0,   -174611.0 / 125400.0, 77683.0 / 5796.0,      -236364091.0 / 1506960.0};

inline cd stirling_log_gamma(cd z) {
    const cd inv = 1.0 / z, inv2 = inv * inv;
    cd series = 0.0, pw = inv;
    for (double c : kStirling) {
        series += c * pw;
        pw *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * kPi) + series;
}

}  // namespace detail

/// log Gamma(z) on the standard branch; poles at non-positive integers.
inline cd log_gamma(cd z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw DomainError("log_gamma: pole at " + std::to_string(z.real()));
    cd shift = 0.0;
    // Upward recurrence until the Stirling series is accurate to double precision.
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return detail::stirling_log_gamma(z) - shift;
}

/// log Gamma_R(s) = -(s/2) log pi + log Gamma(s/2).
inline cd log_gamma_R(cd s) {
    if (s.imag() == 0.0 && s.real() <= 0.0 && std::fmod(s.real(), 2.0) == 0.0)
        throw DomainError("log_gamma_R: pole at s=" + std::to_string(s.real()));
    return -0.5 * s * std::log(kPi) + log_gamma(0.5 * s);
}

struct GammaRatioSample {
    cd s;
    SpectralParams muF, muG;
    cd log_ratio;         ///< log gamma(s, mu_G, mu_F) - log gamma(1 - s, mu_F, mu_G)
    double q_normalized;  ///< |Q^{1/2 - s} ratio| with Q = T^6, T from muF
};

/// Sum over i, j of log Gamma_R(s + mu_i(G) + conj mu_j(F)) - log Gamma_R(1 - s + mu_i(F) + conj mu_j(G)),
/// accumulated with i, then j ascending.
inline GammaRatioSample gamma_ratio(cd s, const SpectralParams& muF, const SpectralParams& muG) {
    GammaRatioSample out{s, muF, muG, 0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.log_ratio += log_gamma_R(s + muG.mu[i] + std::conj(muF.mu[j])) -
                             log_gamma_R(1.0 - s + muF.mu[i] + std::conj(muG.mu[j]));
    const double logQ = 6.0 * std::log(muF.T);
    out.q_normalized = std::exp(((0.5 - s) * logQ + out.log_ratio).real());
    return out;
}

inline void write_gamma_sweep_header(std::ostream& out) { out << "im_s,q_normalized,log_ratio_re,log_ratio_im\n"; }

inline void write_gamma_sweep_row(std::ostream& out, const GammaRatioSample& g) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.s.imag(), g.q_normalized, g.log_ratio.real(),
                  g.log_ratio.imag());
    out << buf;
}

// ---------------------------------------------------------------------------
// Smooth weight and its Mellin transform

namespace detail {

inline long double smooth_step(long double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    const long double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
    return a / (a + b);
}

}  // namespace detail

/// w(x) = C exp(-(u - c)^2 / (2 sigma^2)) beta(u), u = log x, c = log sqrt 2.
/// beta is a C-infinity cutoff equal to 1 for |u - c| <= plateau * sigma and
/// 0 beyond support * sigma; C makes w(1) = w(2) = 1, so w >= 1 on [1, 2].
struct BumpWeight {
    double sigma = 0.17;
    double plateau = 12.0;
    double support = 24.0;

    double center() const { return 0.5 * std::log(2.0); }
    double scale() const {
        const double h = 0.5 * std::log(2.0);
        return std::exp(h * h / (2 * sigma * sigma));
    }
    /// w vanishes outside [x_min, x_max].
    double x_min() const { return std::exp(center() - support * sigma); }
    double x_max() const { return std::exp(center() + support * sigma); }

    void validate() const {
        if (!(sigma > 0) || !(plateau > 0) || !(support > plateau)) throw DomainError("invalid BumpWeight");
    }

    /// w at u = log x.
    long double at_log(long double u) const {
        const long double c = center(), s = sigma;
        const long double r = std::fabs(u - c);
        if (r >= support * s) return 0;
        const long double beta = detail::smooth_step((support * s - r) / ((support - plateau) * s));
        return static_cast<long double>(scale()) * std::exp(-(u - c) * (u - c) / (2 * s * s)) * beta;
    }
    double operator()(double x) const { return x > 0 ? static_cast<double>(at_log(std::log(x))) : 0.0; }
};

/// w~(s) = int_0^inf w(x) x^{s-1} dx = int w(e^u) e^{u s} du, by a trapezoid
/// rule on the compact u-support doubled until successive values agree to tol.
inline cd mellin_weight(const BumpWeight& w, cd s, double tol = 1e-13) {
    w.validate();
    using ld = long double;
    using cld = std::complex<long double>;
    const ld a = w.center() - w.support * w.sigma, b = w.center() + w.support * w.sigma;
    const cld sl(s.real(), s.imag());
    auto g = [&](ld u) { return w.at_log(u) * std::exp(u * sl); };
    // The integrand vanishes to all orders at both ends, so the trapezoid
    // rule converges faster than any power of the step.
    std::size_t n = 64;
    ld h = (b - a) / n;
    cld sum = 0;
    for (std::size_t k = 1; k < n; ++k) sum += g(a + h * k);
    cld prev = sum * h;
    for (int level = 0; level < 20; ++level) {
        for (std::size_t k = 0; k < n; ++k) sum += g(a + h * (k + 0.5L));
        n *= 2;
        h /= 2;
        const cld cur = sum * h;
        if (std::abs(cur - prev) <= tol * std::max<ld>(1, std::abs(cur)) && level >= 2)
            return {static_cast<double>(cur.real()), static_cast<double>(cur.imag())};
        prev = cur;
    }
    throw NumericalError("mellin_weight did not converge", static_cast<double>(std::abs(prev)));
}

struct DecayFit {
    std::vector<double> im_s;
    std::vector<double> values;  ///< q_normalized(s) |w~(1 - s)|
    double exponent = 0.0;       ///< A in C (1 + |s|)^{-A}
    double constant = 0.0;       ///< constant_for(exponent)
    double re_s = 0.0;

    /// Smallest C with values <= C (1 + |s|)^{-A} at every sample.
    double constant_for(double A) const {
        double c = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            c = std::max(c, values[k] * std::pow(1 + std::abs(cd(re_s, im_s[k])), A));
        return c;
    }
};

/// Fits log(q_normalized(s) |w~(1-s)|) against log(1 + |s|) along Re(s) = re_s.
inline DecayFit gamma_decay_fit(const SpectralParams& muF, const SpectralParams& muG, const BumpWeight& w,
                                double re_s, const std::vector<double>& im_values) {
    if (im_values.size() < 3) throw DomainError("gamma_decay_fit needs at least 3 samples");
    DecayFit fit;
    fit.re_s = re_s;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double y : im_values) {
        const cd s(re_s, y);
        const double v = gamma_ratio(s, muF, muG).q_normalized * std::abs(mellin_weight(w, 1.0 - s));
        fit.im_s.push_back(y);
        fit.values.push_back(v);
        const double x = std::log(1 + std::abs(s)), ly = std::log(v);
        sx += x;
        sy += ly;
        sxx += x * x;
        sxy += x * ly;
    }
    const double n = static_cast<double>(im_values.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.exponent = -slope;
    fit.constant = fit.constant_for(fit.exponent);
    return fit;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
    const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b], started from `pieces` equal panels.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                               int pieces = 64, int max_depth = 20) {
    double total = 0.0;
    const double h = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) {
        const double lo = a + k * h, hi = lo + h, m = 0.5 * (lo + hi);
        const double flo = f(lo), fm = f(m), fhi = f(hi);
        const double whole = h / 6 * (flo + 4 * fm + fhi);
        total += detail::simpson_rec(f, lo, hi, flo, fm, fhi, whole, tol / pieces, max_depth);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Fourier separation

/// A Schwartz-like test function with optional exact second derivative.
struct SmoothFunction {
    std::function<double(double)> f;
    std::function<double(double)> f2;  ///< second derivative; finite differences when empty
    double window = 20.0;              ///< truncation [-window, window]
    std::string name;

    double second(double x) const {
        if (f2) return f2(x);
        const double h = 1e-3;
        return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    }
};

/// Five Schwartz-class test functions with closed-form second derivatives.
inline std::vector<SmoothFunction> standard_test_functions() {
    std::vector<SmoothFunction> out;
    out.push_back({[](double x) { return std::exp(-kPi * x * x); },
                   [](double x) { return (4 * kPi * kPi * x * x - 2 * kPi) * std::exp(-kPi * x * x); }, 20.0,
                   "gaussian_pi"});
    out.push_back({[](double x) { return std::exp(-x * x) * std::cos(3 * x); },
                   [](double x) {
                       return std::exp(-x * x) * ((4 * x * x - 11) * std::cos(3 * x) + 12 * x * std::sin(3 * x));
                   },
                   20.0, "gaussian_cos3"});
    out.push_back({[](double x) { return 1 / std::cosh(x); },
                   [](double x) {
                       const double sh = 1 / std::cosh(x);
                       return sh * (1 - 2 * sh * sh);
                   },
                   20.0, "sech"});
    out.push_back({[](double x) { return x * x * std::exp(-x * x); },
                   [](double x) { return (2 - 10 * x * x + 4 * x * x * x * x) * std::exp(-x * x); }, 20.0,
                   "x2_gaussian"});
    out.push_back({[](double x) { return std::exp(-x * x * x * x); },
                   [](double x) {
                       const double x2 = x * x;
                       return (16 * x2 * x2 * x2 - 12 * x2) * std::exp(-x2 * x2);
                   },
                   20.0, "quartic_exp"});
    return out;
}

struct FourierNorms {
    double f_l1 = 0.0;
    double f2_l1 = 0.0;
    double fhat_l1 = 0.0;
    double tail = 0.0;  ///< bound on the mass of |f| outside the window, from the endpoint values
};

namespace detail {

/// Half-width outside which |f| stays below 1e-18 on the truncation window.
inline double effective_radius(const SmoothFunction& fn) {
    const int steps = 4000;
    for (int k = steps; k > 0; --k) {
        const double x = fn.window * k / steps;
        if (std::abs(fn.f(x)) > 1e-18 || std::abs(fn.f(-x)) > 1e-18) return std::min(fn.window, x + fn.window / steps);
    }
    return fn.window / steps;
}

}  // namespace detail

/// hat f(y) = int f(x) e(-x y) dx on the truncation window.
inline cd fourier_transform(const SmoothFunction& fn, double y, double tol = 1e-10, double radius = -1.0) {
    const double w = radius > 0 ? radius : detail::effective_radius(fn);
    // At least eight initial panels per period so the first Simpson pass cannot alias.
    const int pieces = 32 + static_cast<int>(std::ceil(16.0 * w * std::abs(y)));
    const double re =
        adaptive_simpson([&](double x) { return fn.f(x) * std::cos(2 * kPi * x * y); }, -w, w, tol, pieces);
    const double im =
        adaptive_simpson([&](double x) { return -fn.f(x) * std::sin(2 * kPi * x * y); }, -w, w, tol, pieces);
    return {re, im};
}

/// ||f||_1, ||f''||_1 and, when requested, ||hat f||_1 by quadrature. The
/// outer integral for ||hat f||_1 stops where |hat f| has stayed below the
/// noise floor set by the truncation tail (at least 1e-13) for a unit stretch,
/// and never extends past y_window.
inline FourierNorms fourier_norms(const SmoothFunction& fn, bool with_hat = true, double y_window = 32.0,
                                  double tol = 1e-10) {
    FourierNorms r;
    const double w = fn.window;
    r.f_l1 = adaptive_simpson([&](double x) { return std::abs(fn.f(x)); }, -w, w, tol);
    r.f2_l1 = adaptive_simpson([&](double x) { return std::abs(fn.second(x)); }, -w, w, tol);
    r.tail = std::abs(fn.f(w)) + std::abs(fn.f(-w));
    if (!with_hat) return r;
    const double radius = detail::effective_radius(fn);
    auto hat = [&](double y) { return std::abs(fourier_transform(fn, y, tol * 1e-2, radius)); };
    const double floor = std::max(1e-13, r.tail);
    double Y = y_window;
    int quiet = 0;
    for (double y = 0.25; y <= y_window; y += 0.25) {
        quiet = (hat(y) < floor && hat(-y) < floor) ? quiet + 1 : 0;
        if (quiet == 4) {
            Y = y;
            break;
        }
    }
    r.fhat_l1 = adaptive_simpson(hat, -Y, Y, tol, 16 + static_cast<int>(8 * Y));
    return r;
}

struct SeparationResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double max_product = 0.0;  ///< max_y |sum b_m e(gamma_m y)| |sum conj(b_n) e(delta_n y)|
    FourierNorms norms;
    bool pass = false;
};

/// |sum_{m,n} b_m conj(b_n) f(gamma_m + delta_n)| against
/// (||f||_1 + ||f''||_1) max_y |sum_m b_m e(gamma_m y)| |sum_n conj(b_n) e(delta_n y)|.
inline SeparationResult separation_check(const SmoothFunction& fn, const std::vector<double>& gammas,
                                         const std::vector<double>& deltas, const std::vector<cd>& b,
                                         const FourierNorms* precomputed = nullptr) {
    if (gammas.size() != b.size() || deltas.size() != b.size())
        throw DomainError("separation_check: gammas, deltas and b must have equal length");
    SeparationResult r;
    cd lhs = 0.0;
    for (std::size_t m = 0; m < b.size(); ++m)
        for (std::size_t n = 0; n < b.size(); ++n) lhs += b[m] * std::conj(b[n]) * fn.f(gammas[m] + deltas[n]);
    r.lhs = std::abs(lhs);

    double fmax = 1.0;
    for (double g : gammas) fmax = std::max(fmax, std::abs(g));
    for (double d : deltas) fmax = std::max(fmax, std::abs(d));
    const double Y = 16.0, h = 1.0 / (64.0 * fmax);
    for (double y = -Y; y <= Y; y += h) {
        cd A = 0.0, B = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            A += b[k] * std::polar(1.0, 2 * kPi * gammas[k] * y);
            B += std::conj(b[k]) * std::polar(1.0, 2 * kPi * deltas[k] * y);
        }
        r.max_product = std::max(r.max_product, std::abs(A) * std::abs(B));
    }
    r.norms = precomputed ? *precomputed : fourier_norms(fn);
    r.rhs = (r.norms.f_l1 + r.norms.f2_l1) * r.max_product;
    r.pass = r.lhs <= r.rhs * (1 + 1e-6);
    return r;
}

// ---------------------------------------------------------------------------
// Stirling separator

/// f_ij(x) = [G(s + a + ix) / G(s + a)] [G(1 - s + a) / G(1 - s + a + ix)],
/// G = Gamma_R, a = mu_i(B) + conj mu_j(B), evaluated in log space.
inline cd stirling_separator(cd s, const SpectralParams& muB, int i, int j, double x) {
    if (i < 0 || i > 2 || j < 0 || j > 2) throw DomainError("stirling_separator: indices must be in {0,1,2}");
    if (!(std::abs(x) <= 2.01)) throw DomainError("stirling_separator: |x| must be at most 2");
    const cd a = muB.mu[i] + std::conj(muB.mu[j]);
    const cd ix(0.0, x);
    if (x == 0.0) return 1.0;
    return std::exp(log_gamma_R(s + a + ix) - log_gamma_R(s + a) + log_gamma_R(1.0 - s + a) -
                    log_gamma_R(1.0 - s + a + ix));
}

/// Central second difference of stirling_separator in x.
inline cd stirling_separator_d2(cd s, const SpectralParams& muB, int i, int j, double x, double h = 1e-3) {
    return (stirling_separator(s, muB, i, j, x + h) - 2.0 * stirling_separator(s, muB, i, j, x) +
            stirling_separator(s, muB, i, j, x - h)) /
           (h * h);
}

}  // namespace sievelab
