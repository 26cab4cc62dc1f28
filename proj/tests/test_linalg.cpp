#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "endoforms/linalg.hpp"
#include "oracles.hpp"

using namespace endo;

TEST(SymEigen, DiagonalInputSortsAscending)
{
    const auto e = sym_eigen(Mat::diagonal(Vec{3.0, 1.0, 2.0}));
    ASSERT_EQ(e.values.size(), 3u);
    EXPECT_DOUBLE_EQ(e.values[0], 1.0);
    EXPECT_DOUBLE_EQ(e.values[1], 2.0);
    EXPECT_DOUBLE_EQ(e.values[2], 3.0);
    // eigenvectors are signed permutations of the basis
    EXPECT_DOUBLE_EQ(std::abs(e.vectors.vector(0)[1]), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(e.vectors.vector(1)[2]), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(e.vectors.vector(2)[0]), 1.0);
}

TEST(SymEigen, SwapMatrix)
{
    const auto e = sym_eigen(Mat{{0.0, 1.0}, {1.0, 0.0}});
    EXPECT_NEAR(e.values[0], -1.0, 1e-15);
    EXPECT_NEAR(e.values[1], 1.0, 1e-15);
    const Vec v0 = e.vectors.vector(0);
    const Vec v1 = e.vectors.vector(1);
    EXPECT_NEAR(std::abs(v0[0]), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(v0[0], -v0[1], 1e-15);
    EXPECT_NEAR(v1[0], v1[1], 1e-15);
}

TEST(SymEigen, ReconstructionProperty)
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const Mat q = oracle::symmetric_matrix(n, rng);
        const auto e = sym_eigen(q);
        const Mat p = e.vectors.matrix();
        const Mat rebuilt = oracle::mul(oracle::mul(p, Mat::diagonal(Vec(e.values))), oracle::transpose(p));
        EXPECT_LT(norm_fro(rebuilt - q) / norm_fro(q), 1e-10) << "trial " << trial;
        EXPECT_LT(norm_max(oracle::mul(oracle::transpose(p), p) - Mat::identity(n)), 1e-10);
        for (std::size_t i = 1; i < n; ++i) EXPECT_LE(e.values[i - 1], e.values[i]);
    }
}

TEST(SymEigen, RejectsNonFinite)
{
    Mat q = Mat::identity(2);
    q(0, 1) = q(1, 0) = std::nan("");
    EXPECT_THROW(sym_eigen(q), InputError);
}

TEST(RealSpectrum, PureRotationHasOnlyComplexPair)
{
    const auto s = real_spectrum(Mat{{0.0, -1.0}, {1.0, 0.0}});
    EXPECT_TRUE(s.real_eigs.empty());
    ASSERT_EQ(s.complex_pairs.size(), 1u);
    EXPECT_NEAR(s.complex_pairs[0].re, 0.0, 1e-14);
    EXPECT_NEAR(s.complex_pairs[0].im, 1.0, 1e-14);
}

TEST(RealSpectrum, Diagonal)
{
    const auto s = real_spectrum(Mat::diagonal(Vec{1.0, 2.0, 3.0}));
    ASSERT_EQ(s.real_eigs.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(s.real_eigs[i].value, i + 1.0, 1e-12);
        EXPECT_EQ(s.real_eigs[i].multiplicity, 1);
    }
}

TEST(RealSpectrum, CompanionWithDoubleRoot)
{
    // (x-1)^2 (x+2) = x^3 - 3x + 2
    const Mat c{{0.0, 0.0, -2.0}, {1.0, 0.0, 3.0}, {0.0, 1.0, 0.0}};
    const auto s = real_spectrum(c);
    ASSERT_EQ(s.real_eigs.size(), 2u);
    EXPECT_NEAR(s.real_eigs[0].value, -2.0, 1e-10);
    EXPECT_EQ(s.real_eigs[0].multiplicity, 1);
    EXPECT_NEAR(s.real_eigs[1].value, 1.0, 1e-7);
    EXPECT_EQ(s.real_eigs[1].multiplicity, 2);
}

TEST(RealSpectrum, MultiplicitiesSumAndRootsSatisfyPolynomial)
{
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const Mat a = oracle::uniform_matrix(n, rng);
        const auto s = real_spectrum(a);
        int total = 0;
        for (const auto& r : s.real_eigs) total += r.multiplicity;
        for (const auto& c : s.complex_pairs) total += 2 * c.multiplicity;
        EXPECT_EQ(total, static_cast<int>(n));
        const auto pm = oracle::subset_principal_minors(a);
        std::vector<double> coeffs{1.0};
        double cmax = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            coeffs.push_back(((k + 1) % 2 ? -1.0 : 1.0) * pm[k]);
            cmax = std::max(cmax, std::abs(coeffs.back()));
        }
        for (const auto& r : s.real_eigs) {
            double p = 0.0;
            for (double c : coeffs) p = p * r.value + c;
            EXPECT_LT(std::abs(p), 1e-8 * cmax) << "trial " << trial << " lambda " << r.value;
        }
    }
}

TEST(Nullspace, IdentityAndZero)
{
    EXPECT_TRUE(nullspace(Mat::identity(3)).empty());
    EXPECT_EQ(nullspace(Mat(3)).size(), 3u);
}

TEST(Nullspace, WorkedExampleShift)
{
    const Mat a{{3.0, 1.0, 0.0}, {0.0, 3.0, 0.0}, {0.0, 0.0, 1.0}};
    const Mat shifted = a - 3.0 * Mat::identity(3);
    const auto ns = nullspace(shifted);
    EXPECT_EQ(ns.size(), 3u - oracle::row_reduction_rank(shifted, 1e-12));
    ASSERT_EQ(ns.size(), 1u);
    EXPECT_LT(norm(shifted * ns[0]), 1e-12);
}

TEST(Nullspace, VectorsAreOrthonormalAndAnnihilated)
{
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 6;
        const std::size_t r = trial % n;
        // rank-r product of random factors
        Mat l(n, r == 0 ? 1 : r), rt(r == 0 ? 1 : r, n);
        if (r > 0) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < r; ++j) {
                    l(i, j) = oracle::uniform_vec(1, rng)[0];
                    rt(j, i) = oracle::uniform_vec(1, rng)[0];
                }
        }
        const Mat a = r == 0 ? Mat(n) : oracle::mul(l, rt);
        const auto ns = nullspace(a);
        EXPECT_EQ(ns.size(), n - oracle::row_reduction_rank(a, 1e-10));
        const double thr = ToleranceConfig{}.rank_threshold(a);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            EXPECT_LE(norm(a * ns[i]), std::max(thr, 1e-14));
            for (std::size_t j = 0; j < ns.size(); ++j)
                EXPECT_NEAR(dot(ns[i], ns[j]), i == j ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(PrincipalMinorSums, Identity)
{
    const auto pm = principal_minor_sums(Mat::identity(3));
    ASSERT_EQ(pm.size(), 3u);
    EXPECT_DOUBLE_EQ(pm[0], 3.0);
    EXPECT_DOUBLE_EQ(pm[1], 3.0);
    EXPECT_DOUBLE_EQ(pm[2], 1.0);
}

TEST(PrincipalMinorSums, TwoByTwo)
{
    const auto pm = principal_minor_sums(Mat{{1.0, 2.0}, {3.0, 4.0}});
    EXPECT_NEAR(pm[0], 5.0, 1e-14);
    EXPECT_NEAR(pm[1], -2.0, 1e-13);
}

TEST(PrincipalMinorSums, MatchesSubsetOracleAndCofactorDet)
{
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const Mat a = oracle::uniform_matrix(n, rng);
        const auto pm = principal_minor_sums(a);
        const auto ref = oracle::subset_principal_minors(a);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(pm[k], ref[k], 1e-11) << "k=" << k + 1;
        EXPECT_NEAR(pm[n - 1], oracle::cofactor_det(a), 1e-11);
    }
}

TEST(PrincipalMinorSums, BasisInvariance)
{
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 7;
        const Mat a = oracle::uniform_matrix(n, rng);
        const OrthoBasis p = random_orthogonal(n, rng);
        const auto x = principal_minor_sums(a);
        const auto y = principal_minor_sums(p.to_basis(a));
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_LE(std::abs(x[k] - y[k]), 1e-9 * std::max(1.0, std::abs(x[k])));
    }
}

TEST(RandomOrthogonal, OneByOne)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
        EXPECT_DOUBLE_EQ(std::abs(random_orthogonal(1, seed).matrix()(0, 0)), 1.0);
}

TEST(RandomOrthogonal, SeedSevenIsOrthogonal)
{
    const auto p = random_orthogonal(4, std::uint64_t{7});
    EXPECT_LT(norm_max(oracle::mul(oracle::transpose(p.matrix()), p.matrix()) - Mat::identity(4)), 1e-12);
    EXPECT_NEAR(std::abs(oracle::elimination_det(p.matrix())), 1.0, 1e-10);
}

TEST(RandomOrthogonal, Deterministic)
{
    EXPECT_EQ(random_orthogonal(5, std::uint64_t{42}).matrix(), random_orthogonal(5, std::uint64_t{42}).matrix());
}

TEST(OrthoBasis, RejectsNonOrthogonal)
{
    EXPECT_THROW(OrthoBasis::from_matrix(Mat{{1.0, 0.1}, {0.0, 1.0}}), InputError);
}

TEST(ToleranceConfig, RejectsNonPositive)
{
    ToleranceConfig t;
    t.rank_tol = 0.0;
    EXPECT_THROW(t.validate(), InputError);
}

TEST(Det, MatchesEliminationOracle)
{
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat a = oracle::uniform_matrix(1 + trial % 8, rng);
        const double ref = oracle::elimination_det(a);
        EXPECT_NEAR(det(a), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
}
