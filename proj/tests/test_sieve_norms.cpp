#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sievelab/sieve_norms.hpp"

using namespace sievelab;

namespace {

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cd(g(rng), g(rng));
    return m;
}

// Largest singular value squared, via the SVD as an independent route.
double svd_norm_sq(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    return s * s;
}

std::vector<GL3Form> family16() { return proxy_family(2024, 16, 100.0, 100.0); }

}  // namespace

TEST(OperatorNorm, Identity) {
    for (int k : {1, 5, 50}) {
        const NormReport r = operator_norm_sq(make_matrix(Eigen::MatrixXcd::Identity(k, k)));
        EXPECT_NEAR(r.delta, 1.0, 1e-14);
        EXPECT_NEAR(*r.dual_delta, 1.0, 1e-14);
    }
}

TEST(OperatorNorm, SingleRowIsSquaredLength) {
    std::mt19937_64 rng(1);
    for (int c : {1, 7, 300, 900}) {
        Eigen::MatrixXcd b = random_matrix(rng, 1, c);
        const NormReport r = operator_norm_sq(make_matrix(b));
        EXPECT_NEAR(r.delta, b.squaredNorm(), 1e-9 * b.squaredNorm());
        EXPECT_EQ(r.method, c <= 400 ? NormMethod::dense_eigen : NormMethod::power_iteration);
    }
}

TEST(OperatorNorm, PowerIterationMatchesDense) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXcd m = random_matrix(rng, 40, 160);
        const EigenEstimate p = power_iteration(m, GramSide::columns);
        ASSERT_TRUE(p.converged);
        const double dense = dense_top_eigenvalue(m.adjoint() * m).value;
        EXPECT_NEAR(p.value, dense, 1e-8 * dense);
        EXPECT_NEAR(dense, svd_norm_sq(m), 1e-10 * dense);
        NormOptions forced;
        forced.dense_threshold = 0;
        EXPECT_NEAR(operator_norm_sq(make_matrix(m), forced).delta, dense, 1e-8 * dense);
    }
}

TEST(OperatorNorm, NonConvergenceReportsResidual) {
    std::mt19937_64 rng(3);
    NormOptions o;
    o.dense_threshold = 0;
    o.max_iterations = 2;
    try {
        operator_norm_sq(make_matrix(random_matrix(rng, 30, 30)), o);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.last_residual(), 0.0);
    }
    EXPECT_THROW(operator_norm_sq(make_matrix(Eigen::MatrixXcd(0, 3))), DomainError);
}

TEST(OperatorNorm, Validation) {
    SieveMatrix m = make_matrix(Eigen::MatrixXcd::Identity(2, 2));
    m.row_weights[1] = 0.0;
    EXPECT_THROW(operator_norm_sq(m), DomainError);
    m.row_weights[1] = 1.0;
    m.entries(0, 1) = cd(NAN, 0);
    EXPECT_THROW(operator_norm_sq(m), DomainError);
}

TEST(OperatorNorm, RowPhaseInvariance) {
    std::mt19937_64 rng(4);
    Eigen::MatrixXcd m = random_matrix(rng, 12, 30);
    const double base = operator_norm_sq(make_matrix(m)).delta;
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= std::polar(1.0, u(rng));
    EXPECT_NEAR(operator_norm_sq(make_matrix(m)).delta, base, 1e-10 * base);
}

TEST(DualityGap, Examples) {
    std::mt19937_64 rng(5);
    Eigen::MatrixXcd a = random_matrix(rng, 20, 20);
    EXPECT_LE(duality_gap(make_matrix(a + a.adjoint())), 1e-12);
    EXPECT_EQ(duality_gap(make_matrix(Eigen::MatrixXcd::Zero(4, 9))), 0.0);
    double worst = 0.0;
    std::uniform_int_distribution<int> rd(1, 60), cd_(1, 240);
    for (int t = 0; t < 100; ++t) worst = std::max(worst, duality_gap(make_matrix(random_matrix(rng, rd(rng), cd_(rng)))));
    EXPECT_LE(worst, 1e-8);
}

TEST(DeltaColumns, Examples) {
    const auto c1 = delta_columns(1, DeltaKind::delta1);
    ASSERT_EQ(c1.size(), 2u);
    EXPECT_EQ(c1[0].n, 1u);
    EXPECT_EQ(c1[1].n, 2u);
    const auto c3 = delta_columns(8, DeltaKind::delta3);
    EXPECT_NE(std::find(c3.begin(), c3.end(), DeltaColumn{2, 1, 1}), c3.end());
    EXPECT_THROW(delta_columns(1000, DeltaKind::delta3, 10), CapacityError);
}

TEST(DeltaColumns, MatchBruteForceEnumeration) {
    for (u64 N : {1, 3, 8, 17, 64}) {
        for (DeltaKind kind : {DeltaKind::delta1, DeltaKind::delta2, DeltaKind::delta3}) {
            std::size_t brute = 0;
            for (u64 d = 1; d <= 2 * N; ++d)
                for (u64 m = 1; m <= 2 * N; ++m)
                    for (u64 n = 1; n <= 2 * N; ++n) {
                        if (kind != DeltaKind::delta3 && d != 1) continue;
                        if (kind == DeltaKind::delta1 && m != 1) continue;
                        const u64 k = d * d * d * m * m * n;
                        if (k >= N && k <= 2 * N) ++brute;
                    }
            EXPECT_EQ(delta_columns(N, kind).size(), brute) << N << " " << to_string(kind);
        }
    }
}

TEST(DeltaMatrix, EntriesAndWeights) {
    auto fam = proxy_family(9, 3, 50.0, 100.0);
    fam[1].omega = 4.0;
    SieveMatrix m = build_delta_matrix(fam, 8, DeltaKind::delta3);
    EXPECT_DOUBLE_EQ(m.row_weights[1], 0.5);
    const auto cols = delta_columns(8, DeltaKind::delta3);
    for (std::size_t j = 0; j < cols.size(); ++j)
        EXPECT_NEAR(std::abs(m.entries(2, static_cast<Eigen::Index>(j)) - hecke_eigenvalue(fam[2], cols[j].m, cols[j].n)),
                    0.0, 1e-10);
}

TEST(DeltaChain, MonotoneOnProxyFamily) {
    DeltaCache cache(family16(), 4 * 64);
    for (u64 N : {1, 2, 4, 8, 16, 32, 64}) {
        const double d1 = cache(N, DeltaKind::delta1), d2 = cache(N, DeltaKind::delta2), d3 = cache(N, DeltaKind::delta3);
        EXPECT_LE(d1, d2 * (1 + 1e-9)) << N;
        EXPECT_LE(d2, d3 * (1 + 1e-9)) << N;
    }
    EXPECT_LE(cache.max_duality_gap(), 1e-8);
}

TEST(Delta3ByDelta2, Certificates) {
    DeltaCache cache(family16(), 4 * 64);
    for (u64 N : {1, 2, 8, 64}) {
        const Certificate c = certify_lemma4(cache, N);
        EXPECT_TRUE(c.pass) << N << ": " << c.lhs << " vs " << c.rhs;
        EXPECT_GE(c.ratio(), 1.0);
    }
}

TEST(Delta2ByDelta1, CertificatesBothVariants) {
    DeltaCache cache(family16(), 4 * 64);
    for (u64 N : {1, 2, 8, 64}) {
        for (auto v : {Delta2Variant::primary, Delta2Variant::swapped}) {
            const Delta2Certificate c = certify_lemma5(cache, N, v);
            EXPECT_TRUE(c.pass) << N << ": " << c.lhs << " vs " << c.rhs;
            EXPECT_GE(c.ratio(), 1.0);
            EXPECT_GE(c.divisor_bound, 1u);
            EXPECT_FALSE(c.blocks.empty());
        }
    }
}

TEST(Delta2ByDelta1, DivisorBoundIsExactMaximum) {
    DeltaCache cache(family16(), 4 * 64);
    const auto c = certify_lemma5(cache, 64);
    u64 brute = 0;
    for (u64 m = 1; m * m <= 128; ++m)
        for (u64 n = 1; m * m * n <= 128; ++n)
            if (m * m * n >= 64) brute = std::max<u64>(brute, arith::divisors(std::gcd(m, n)).size());
    EXPECT_EQ(c.divisor_bound, brute);
}

TEST(ExponentChain, ClosedFormArithmetic) {
    const auto r = exponent_chain(10.0, 1e6);
    EXPECT_NEAR(r.closed_form, 1e6 + 1e6 + 1e5, 1e-6);
    ASSERT_TRUE(r.argmax.has_value());
    const auto [X, Y] = *r.argmax;
    EXPECT_LE(Y * Y * X, std::pow(10.0, 6) / 1e6 * (1 + 1e-9));
}

TEST(ExponentChain, WithinFactorEightOnGrid) {
    for (int i = 0; i < 20; ++i) {
        const double T = std::exp(std::log(10.0) + (std::log(100.0) - std::log(10.0)) * i / 19);
        for (int j = 0; j < 20; ++j) {
            const double N = std::pow(T, 3.0 + 4.0 * j / 19);
            const auto r = exponent_chain(T, N, 120);
            EXPECT_LE(r.value, 8 * r.closed_form);
            EXPECT_GE(r.value, r.closed_form / 8);
            if (r.argmax) EXPECT_LE(r.argmax->second * r.argmax->second * r.argmax->first, T * T * T * T * T * T / N * (1 + 1e-9));
        }
    }
}

TEST(ExponentChain, EmptyRegion) {
    const auto r = exponent_chain(2.0, 1000.0);
    EXPECT_FALSE(r.argmax.has_value());
    EXPECT_DOUBLE_EQ(r.value, 1000.0);
    EXPECT_THROW(exponent_chain(0.5, 10.0), DomainError);
}

TEST(ExponentChain, SymbolicShape) {
    for (double kappa : {3.0, 4.0, 4.5, 5.0, 6.0, 7.0}) {
        const ExponentShape s = exponent_shape(1e8, kappa);
        EXPECT_TRUE(s.pass) << kappa << ": " << s.fitted << " vs " << s.predicted;
    }
}

TEST(ExponentFit, Slopes) {
    std::vector<std::pair<double, double>> lin, twothirds;
    for (double x : {10.0, 100.0, 1000.0, 5000.0}) {
        lin.emplace_back(x, x);
        twothirds.emplace_back(x, std::pow(x, 2.0 / 3.0));
    }
    EXPECT_NEAR(exponent_fit(lin), 1.0, 1e-9);
    EXPECT_NEAR(exponent_fit(twothirds), 2.0 / 3.0, 1e-9);
    EXPECT_THROW(exponent_fit({{1, 1}, {2, 2}}), DomainError);
    EXPECT_THROW(exponent_fit({{1, 1}, {1, 2}, {1, 3}}), DomainError);
    EXPECT_THROW(exponent_fit({{1, 1}, {2, 0}, {3, 3}}), DomainError);
}

TEST(NormOutput, CsvAndJson) {
    NormReport r;
    r.delta = 2.5;
    r.dual_delta = 2.5;
    r.iterations = 3;
    std::ostringstream out;
    write_norm_csv_header(out);
    write_norm_csv_row(out, 10, r);
    EXPECT_EQ(out.str(), "size,delta,dual_delta,method,residual\n10,2.5,2.5,dense_eigen,0\n");
    EXPECT_EQ(r.to_json()["method"], "dense_eigen");
}
