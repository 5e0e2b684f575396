#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sievelab/gl3_hecke.hpp"

using namespace sievelab;

namespace {

// h_k as an explicit sum of monomials a1^i a2^j a3^(k-i-j).
cd brute_h(const std::array<cd, 3>& a, int k) {
    cd s = 0.0;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; i + j <= k; ++j) s += std::pow(a[0], i) * std::pow(a[1], j) * std::pow(a[2], k - i - j);
    return s;
}

// Satake parameters of satake_cusp_proxy(seed, ...) at p, rebuilt from the definition.
std::array<cd, 3> proxy_alpha(const GL3Form& f, u64 seed, u64 p) {
    const double theta = unit_interval(hash_combine(seed, p));
    std::array<cd, 3> a;
    for (int i = 0; i < 3; ++i) a[i] = std::exp(-f.params.mu[i] * theta * std::log(static_cast<double>(p)));
    return a;
}

std::vector<GL3Form> all_providers() {
    std::vector<GL3Form> forms = proxy_family(7, 4, 100.0, 100.0);
    forms.push_back(eisenstein_form(synthetic_gl2_form(3, 9.53, 5000), 4.2));
    forms.push_back(eisenstein_form(synthetic_gl2_form(4, 12.17, 5000), -1.3));
    return forms;
}

}  // namespace

TEST(SpectralParams, Validation) {
    SpectralParams ok{{cd(0, 1), cd(0, 2), cd(0, -3)}, 1.0, 1.0};
    EXPECT_NO_THROW(ok.validate());
    EXPECT_TRUE(ok.tempered());
    SpectralParams bad{{cd(0, 1), cd(0, 2), cd(0, -2)}, 1.0, 1.0};
    EXPECT_THROW(bad.validate(), DomainError);
    SpectralParams nt{{cd(0.1, 1), cd(-0.1, 2), cd(0, -3)}, 1.0, 1.0};
    EXPECT_FALSE(nt.tempered());
}

TEST(Proxy, DeterministicTemperedAndBalanced) {
    GL3Form a = satake_cusp_proxy(42, 100.0, 200.0), b = satake_cusp_proxy(42, 100.0, 200.0);
    EXPECT_EQ(a.params.mu, b.params.mu);
    EXPECT_NO_THROW(a.params.validate());
    EXPECT_TRUE(a.params.tempered());
    EXPECT_NEAR(a.params.mu[0].imag(), 200.0, 1.0 + 1e-12);
    EXPECT_NEAR(a.params.mu[1].imag(), 100.0, 1.0 + 1e-12);
    for (u64 p : arith::primes_up_to(200)) {
        EXPECT_EQ(a.satake_esym(p), b.satake_esym(p));
        const auto alpha = proxy_alpha(a, 42, p);
        EXPECT_NEAR(std::abs(alpha[0] * alpha[1] * alpha[2]), 1.0, 1e-12);
        const auto e = a.satake_esym(p);
        EXPECT_NEAR(std::abs(e[0] - (alpha[0] + alpha[1] + alpha[2])), 0.0, 1e-12);
    }
    EXPECT_THROW(satake_cusp_proxy(1, 0.5, 1.0), DomainError);
}

TEST(Hecke, PrimePowersAreCompleteHomogeneous) {
    const u64 seed = 99;
    GL3Form f = satake_cusp_proxy(seed, 50.0, 100.0);
    HeckeTable t(f, 1 << 12);
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 13ULL})
        for (int k = 1; k <= 6; ++k) {
            u64 q = 1;
            for (int i = 0; i < k; ++i) q *= p;
            if (q > t.limit()) break;
            const auto a = proxy_alpha(f, seed, p);
            const std::array<cd, 3> inv{1.0 / a[0], 1.0 / a[1], 1.0 / a[2]};
            EXPECT_NEAR(std::abs(t(q, 1) - brute_h(a, k)), 0.0, 1e-10);
            EXPECT_NEAR(std::abs(t(1, q) - brute_h(inv, k)), 0.0, 1e-10);
        }
}

TEST(Hecke, Examples) {
    for (const auto& f : all_providers()) {
        HeckeTable t(f, 100);
        EXPECT_EQ(t(1, 1), cd(1.0));
        EXPECT_NEAR(std::abs(t(6, 1) - t(2, 1) * t(3, 1)), 0.0, 1e-12);
        for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL})
            EXPECT_NEAR(std::abs(t(p, 1) * t(1, p) - (t(p, p) + 1.0)), 0.0, 1e-12);
    }
}

TEST(Hecke, RelationResidualAllProviders) {
    for (const auto& f : all_providers()) {
        HeckeTable t(f, 60);
        double worst = 0.0;
        for (u64 m = 1; m <= 60; ++m)
            for (u64 n = 1; n <= 60; ++n) {
                cd rhs = 0.0;
                for (u64 d : arith::divisors(std::gcd(m, n))) rhs += t(m / d, n / d);
                worst = std::max(worst, std::abs(t(m, 1) * t(1, n) - rhs));
            }
        EXPECT_LE(worst, 1e-9) << f.label;
    }
}

TEST(Hecke, DualityForTemperedForms) {
    for (const auto& f : all_providers()) {
        ASSERT_TRUE(f.params.tempered());
        HeckeTable t(f, 60);
        for (u64 m = 1; m <= 60; ++m)
            for (u64 n = 1; n <= 60; ++n) EXPECT_NEAR(std::abs(t(m, n) - std::conj(t(n, m))), 0.0, 1e-10);
    }
}

TEST(Hecke, TableAgreesWithFactoringRoute) {
    std::mt19937_64 rng(5);
    for (const auto& f : all_providers()) {
        HeckeTable t(f, 5000);
        for (int i = 0; i < 300; ++i) {
            const u64 m = rng() % 5000 + 1, n = rng() % 5000 + 1;
            EXPECT_NEAR(std::abs(t(m, n) - hecke_eigenvalue(f, m, n)), 0.0, 1e-9);
        }
        EXPECT_NEAR(std::abs(t(360, 840) - hecke_eigenvalue(f, 360, 840)), 0.0, 1e-9);
    }
}

TEST(Hecke, CapacityAndDomain) {
    GL3Form f = satake_cusp_proxy(1, 10.0, 10.0);
    HeckeTable t(f, 50);
    EXPECT_THROW(t(51, 1), CapacityError);
    EXPECT_THROW(t(0, 1), DomainError);
    EXPECT_THROW(HeckeTable(f, kMaxHeckeTableLimit + 1), CapacityError);
    EXPECT_THROW(hecke_eigenvalue(f, kMaxHeckeArgument + 1, 1), CapacityError);
}

TEST(GL2, RecursionAndMultiplicativity) {
    GL2FormData u = synthetic_gl2_form(8, 10.0, 200);
    for (u64 p : arith::primes_up_to(50)) {
        EXPECT_DOUBLE_EQ(u.lambda(p * p), u.lambda(p) * u.lambda(p) - 1.0);
        EXPECT_LE(std::abs(u.lambda(p)), 2.0);
    }
    EXPECT_DOUBLE_EQ(u.lambda(1), 1.0);
    EXPECT_NEAR(u.lambda(15), u.lambda(3) * u.lambda(5), 1e-15);
    EXPECT_THROW(u.lambda(211), MissingDataError);
}

TEST(Eisenstein, DivisorSumExamples) {
    GL2FormData u = synthetic_gl2_form(9, 13.0, 500);
    const double t = 2.5;
    EXPECT_NEAR(std::abs(eisenstein_lambda(u, t, 1) - cd(1.0)), 0.0, 1e-15);
    for (u64 p : arith::primes_up_to(100)) {
        const double lp = std::log(static_cast<double>(p));
        const cd expect = u.lambda(p) * std::polar(1.0, -t * lp) + std::polar(1.0, 2 * t * lp);
        EXPECT_NEAR(std::abs(eisenstein_lambda(u, t, p) - expect), 0.0, 1e-12);
    }
    for (u64 n = 1; n <= 300; ++n) {
        double maxl = 1.0;
        for (u64 d : arith::divisors(n)) maxl = std::max(maxl, std::abs(u.lambda(d)));
        EXPECT_LE(std::abs(eisenstein_lambda(u, t, n)), static_cast<double>(arith::num_divisors(n)) * maxl + 1e-12);
    }
}

TEST(Eisenstein, ProviderMatchesDivisorSum) {
    GL2FormData u = synthetic_gl2_form(10, 11.3, 500);
    for (double t : {-3.0, 0.0, 0.7, 5.5}) {
        GL3Form f = eisenstein_form(u, t);
        EXPECT_NO_THROW(f.params.validate());
        HeckeTable tab(f, 400);
        for (u64 n = 1; n <= 400; ++n) EXPECT_NEAR(std::abs(tab(1, n) - eisenstein_lambda(u, t, n)), 0.0, 1e-10);
    }
}

TEST(RankinSelberg, PartialSums) {
    GL3Form f = satake_cusp_proxy(3, 40.0, 100.0), g = satake_cusp_proxy(4, 40.0, 100.0);
    EXPECT_NEAR(std::abs(rankin_selberg_partial(f, g, cd(2.0), 1) - cd(1.0)), 0.0, 1e-15);
    double prev = 0.0;
    for (u64 c : {1, 2, 5, 10, 50, 100, 500, 1000, 4000}) {
        const cd v = rankin_selberg_partial(f, f, cd(2.0), c);
        EXPECT_NEAR(v.imag(), 0.0, 1e-9);
        EXPECT_GE(v.real(), prev - 1e-12);
        prev = v.real();
    }
}

TEST(RankinSelberg, TailBoundedByTripleCount) {
    GL3Form f = satake_cusp_proxy(5, 40.0, 100.0), g = satake_cusp_proxy(6, 40.0, 100.0);
    const cd s(1.6, 3.0);
    for (u64 cutoff : {100ULL, 400ULL, 1500ULL}) {
        const cd diff = rankin_selberg_partial(f, g, s, 2 * cutoff) - rankin_selberg_partial(f, g, s, cutoff);
        HeckeTable tf(f, 2 * cutoff), tg(g, 2 * cutoff);
        double maxl = 0.0, bound = 0.0;
        std::vector<double> count(2 * cutoff + 1, 0.0);
        for (u64 d = 1; d * d * d <= 2 * cutoff; ++d)
            for (u64 m = 1; d * d * d * m * m <= 2 * cutoff; ++m)
                for (u64 n = 1; d * d * d * m * m * n <= 2 * cutoff; ++n) {
                    const u64 k = d * d * d * m * m * n;
                    if (k > cutoff) {
                        count[k] += 1;
                        maxl = std::max(maxl, std::abs(tf(m, n)) * std::abs(tg(m, n)));
                    }
                }
        for (u64 k = cutoff + 1; k <= 2 * cutoff; ++k) bound += count[k] * std::pow(static_cast<double>(k), -s.real());
        EXPECT_LE(std::abs(diff), bound * maxl * (1 + 1e-12));
    }
}

TEST(Convexity, BasicProperties) {
    GL3Form f = satake_cusp_proxy(11, 100.0, 100.0);
    auto r1 = convexity_report(f, 1);
    EXPECT_DOUBLE_EQ(r1.sum, 1.0);
    EXPECT_DOUBLE_EQ(r1.ratio, 1.0);
    double prev = 0.0;
    for (u64 X : {1, 10, 100, 1000, 3000}) {
        const auto r = convexity_report(f, X);
        EXPECT_GE(r.sum, prev);
        prev = r.sum;
    }
}

TEST(Convexity, FrozenPilotRatiosAtTenThousand) {
    // Pilot run on proxy_family(2024, 16, 100, 100) at X = 10^4. A proxy whose
    // Satake phases nearly align at a small prime carries a large ratio.
    double lo = INFINITY, hi = 0.0;
    const auto fam = proxy_family(2024, 16, 100.0, 100.0);
    for (const auto& f : fam) {
        const double r = convexity_report(f, 10000).ratio;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    EXPECT_GE(lo, 4.27);
    EXPECT_LE(hi, 2716.0);
    EXPECT_NEAR(convexity_report(fam[0], 10000).ratio, 4.275399, 1e-6);
    EXPECT_NEAR(convexity_report(fam[7], 10000).ratio, 2715.932102, 1e-6);
}

TEST(EulerFactor, FirstOrderIdentity) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ut(-20, 20);
    const auto primes = arith::primes_up_to(500);
    for (int i = 0; i < 50; ++i) {
        GL2FormData u = synthetic_gl2_form(rng(), 9 + ut(rng), 500), u2 = synthetic_gl2_form(rng(), 9 + ut(rng), 500);
        const u64 p = primes[rng() % primes.size()];
        const cd s(1.0 + std::abs(ut(rng)) / 10.0 + 0.01, ut(rng));
        EXPECT_LE(euler_factor_check(u, u2, ut(rng), ut(rng), p, s).residual, 1e-10);
    }
}

TEST(EulerFactor, DiagonalStructure) {
    GL2FormData u = synthetic_gl2_form(31, 14.0, 100);
    const double t = 3.3;
    for (u64 p : {2ULL, 3ULL, 7ULL, 97ULL}) {
        auto c = euler_factor_check(u, u, t, t, p, cd(1.0));
        const double l = u.lambda(p), lp = std::log(static_cast<double>(p));
        const cd expect = (l * l + l * (std::polar(1.0, -3 * t * lp) + std::polar(1.0, 3 * t * lp)) + 1.0) / double(p);
        EXPECT_NEAR(std::abs(c.direct - expect), 0.0, 1e-12);
        EXPECT_LE(c.residual, 1e-10);
    }
}

TEST(Ingest, EmptyFileGivesNoForms) {
    std::istringstream in("");
    EXPECT_TRUE(ingest_gl2_table(in).forms.empty());
    std::istringstream only_comments("# nothing here\n\n");
    EXPECT_TRUE(ingest_gl2_table(only_comments).forms.empty());
}

TEST(Ingest, FixtureRoundTrip) {
    auto res = ingest_gl2_table(std::string(SIEVELAB_TEST_DATA) + "/gl2_fixture.csv");
    ASSERT_EQ(res.forms.size(), 1u);
    EXPECT_DOUBLE_EQ(res.forms[0].t_j, 13.7797);
    EXPECT_DOUBLE_EQ(res.forms[0].lambda(2), 1.5493);
    EXPECT_DOUBLE_EQ(res.forms[0].lambda(1), 1.0);
    EXPECT_TRUE(res.warnings.empty());
}

TEST(Ingest, DuplicatesKeepLastWithWarning) {
    std::istringstream in("t_j,p,lambda\n5.0,2,0.5\n5.0,3,0.1\n5.0,2,-0.25\n");
    auto res = ingest_gl2_table(in);
    ASSERT_EQ(res.forms.size(), 1u);
    EXPECT_DOUBLE_EQ(res.forms[0].lambda(2), -0.25);
    ASSERT_EQ(res.warnings.size(), 1u);
    EXPECT_NE(res.warnings[0].find("line 4"), std::string::npos);
}

TEST(Ingest, MalformedRowsNameTheLine) {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            ingest_gl2_table(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("t_j,p,lambda\n1.0,2,0.3\n1.0,x,0.1\n"), 3u);
    EXPECT_EQ(line_of("t_j,p,lambda\n1.0,2\n"), 2u);
    EXPECT_EQ(line_of("t_j,p,lambda\n# c\n1.0,4,0.1\n"), 3u);
    EXPECT_EQ(line_of("t_j,p,lambda\n1.0,1,0.5\n"), 2u);
    EXPECT_EQ(line_of("p,t_j,lambda\n"), 1u);
    // Missing p = 3 below the largest prime 5.
    EXPECT_EQ(line_of("t_j,p,lambda\n2.0,2,0.1\n2.0,5,0.2\n"), 3u);
}

TEST(ExternalTable, ExportLoadRoundTrip) {
    GL3Form f = satake_cusp_proxy(77, 30.0, 100.0);
    std::stringstream buf;
    export_eigenvalue_table(f, 24, buf);
    GL3Form g = load_eigenvalue_table(buf, f.params, "roundtrip");
    HeckeTable tf(f, 24), tg(g, 24);
    for (u64 m = 1; m <= 24; ++m)
        for (u64 n = 1; n <= 24; ++n) EXPECT_NEAR(std::abs(tf(m, n) - tg(m, n)), 0.0, 1e-15);
    EXPECT_THROW(hecke_eigenvalue(g, 25, 1), MissingDataError);
}
