#include <gtest/gtest.h>

#include <random>

#include "endoforms/qforms.hpp"
#include "oracles.hpp"

using namespace endo;

namespace {

const Mat kA12{{1.0, 2.0}, {3.0, 4.0}};

// Rotation form evaluated straight from A(u).R_kl(u), no matrices involved.
double rotation_value(const Mat& a, PlanePair kl, const Vec& u)
{
    const Vec au = a * u;
    return au[kl.l] * u[kl.k] - au[kl.k] * u[kl.l];
}

} // namespace

TEST(ExpansionForm, PlanarExample)
{
    EXPECT_EQ(expansion_form(kA12).matrix(), (Mat{{1.0, 2.5}, {2.5, 4.0}}));
}

TEST(ExpansionForm, SymmetricAndSkew)
{
    const Mat s{{2.0, -1.0}, {-1.0, 5.0}};
    EXPECT_EQ(expansion_form(s).matrix(), s);
    EXPECT_EQ(expansion_form(Mat{{0.0, 3.0}, {-3.0, 0.0}}).matrix(), Mat(2));
}

TEST(RotationForm, PlanarExample)
{
    EXPECT_EQ(rotation_form(kA12, {0, 1}).matrix(), (Mat{{3.0, 1.5}, {1.5, -2.0}}));
}

TEST(RotationForm, IdentityHasNoRotation)
{
    for (std::size_t n = 2; n <= 6; ++n)
        for (const auto& q : rotation_forms(Mat::identity(n))) EXPECT_EQ(q.matrix(), Mat(n));
}

TEST(RotationForm, ThreeDimensionalLayouts)
{
    std::mt19937_64 rng(21);
    const Mat a = oracle::uniform_matrix(3, rng);
    auto A = [&](int i, int j) { return a(i - 1, j - 1); }; // A^i_j
    const Mat r12{{A(2, 1), 0.5 * (A(2, 2) - A(1, 1)), 0.5 * A(2, 3)},
                  {0.5 * (A(2, 2) - A(1, 1)), -A(1, 2), -0.5 * A(1, 3)},
                  {0.5 * A(2, 3), -0.5 * A(1, 3), 0.0}};
    const Mat r13{{A(3, 1), 0.5 * A(3, 2), 0.5 * (A(3, 3) - A(1, 1))},
                  {0.5 * A(3, 2), 0.0, -0.5 * A(1, 2)},
                  {0.5 * (A(3, 3) - A(1, 1)), -0.5 * A(1, 2), -A(1, 3)}};
    const Mat r23{{0.0, 0.5 * A(3, 1), -0.5 * A(2, 1)},
                  {0.5 * A(3, 1), A(3, 2), 0.5 * (A(3, 3) - A(2, 2))},
                  {-0.5 * A(2, 1), 0.5 * (A(3, 3) - A(2, 2)), -A(2, 3)}};
    const Mat ae{{A(1, 1), 0.5 * (A(1, 2) + A(2, 1)), 0.5 * (A(1, 3) + A(3, 1))},
                 {0.5 * (A(1, 2) + A(2, 1)), A(2, 2), 0.5 * (A(2, 3) + A(3, 2))},
                 {0.5 * (A(1, 3) + A(3, 1)), 0.5 * (A(2, 3) + A(3, 2)), A(3, 3)}};
    EXPECT_LT(norm_max(expansion_form(a).matrix() - ae), 1e-15);
    EXPECT_LT(norm_max(rotation_form(a, {0, 1}).matrix() - r12), 1e-15);
    EXPECT_LT(norm_max(rotation_form(a, {0, 2}).matrix() - r13), 1e-15);
    EXPECT_LT(norm_max(rotation_form(a, {1, 2}).matrix() - r23), 1e-15);
}

TEST(RotationForm, EvaluationFormula)
{
    std::mt19937_64 rng(22);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 2 + t % 7;
        const Mat a = oracle::uniform_matrix(n, rng);
        const Vec u = oracle::uniform_vec(n, rng);
        for (const auto& kl : plane_pairs(n))
            EXPECT_NEAR(evaluate(rotation_form(a, kl), u), rotation_value(a, kl, u), 1e-13);
    }
}

TEST(RotationForm, InvalidPair)
{
    EXPECT_THROW(rotation_form(kA12, {0, 2}), InputError);
}

TEST(Evaluate, Basics)
{
    const Vec u = normalized(Vec{1.0, 2.0, -2.0});
    EXPECT_NEAR(evaluate(QForm(Mat::identity(3)), u), 1.0, 1e-15);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(evaluate(QForm(Mat::diagonal(Vec{1.0, -1.0})), Vec{s, s}), 0.0, 1e-16);
    EXPECT_THROW(evaluate(QForm(Mat::identity(3)), Vec{1.0, 0.0}), InputError);
}

TEST(Evaluate, PlanarFormsAtFirstBasisVector)
{
    const Vec b1{1.0, 0.0};
    EXPECT_EQ(evaluate(expansion_form(kA12), b1), kA12(0, 0));
    EXPECT_EQ(evaluate(rotation_form(kA12, {0, 1}), b1), kA12(1, 0));
}

TEST(Polar, Properties)
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + t % 6;
        const QForm q(oracle::symmetric_matrix(n, rng));
        const Vec u = oracle::uniform_vec(n, rng), v = oracle::uniform_vec(n, rng);
        EXPECT_NEAR(polar(q, u, u), evaluate(q, u), 1e-15);
        EXPECT_NEAR(2.0 * polar(q, u, v), evaluate(q, u + v) - evaluate(q, u) - evaluate(q, v), 1e-12);
    }
    const QForm d(Mat::diagonal(Vec{1.0, -1.0, 0.0}));
    EXPECT_EQ(polar(d, Vec::unit(3, 0), Vec::unit(3, 2)), 0.0);
}

TEST(ZeroSubspaceExtend, Examples)
{
    const QForm q(Mat::diagonal(Vec{1.0, -1.0, 0.0}));
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<Vec> w{Vec{s, s, 0.0}};
    EXPECT_TRUE(zero_subspace_extend(q, w, Vec::unit(3, 2)));
    EXPECT_FALSE(zero_subspace_extend(q, w, Vec{s, -s, 0.0}));
}

TEST(ZeroSubspaceExtend, KernelAlwaysExtends)
{
    std::mt19937_64 rng(24);
    // Q = diag(a, -b, 0, 0): kernel spanned by b3, b4
    const QForm q(Mat::diagonal(Vec{2.0, -3.0, 0.0, 0.0}));
    const Vec z = normalized(Vec{std::sqrt(3.0), std::sqrt(2.0), 0.0, 0.0});
    for (int t = 0; t < 20; ++t) {
        Vec k(4);
        k[2] = oracle::uniform_vec(1, rng)[0];
        k[3] = oracle::uniform_vec(1, rng)[0];
        EXPECT_TRUE(zero_subspace_extend(q, {z}, k));
    }
}

TEST(ZeroSubspaceExtend, NamesOffendingVector)
{
    const QForm q(Mat::diagonal(Vec{1.0, -1.0, 0.0}));
    try {
        zero_subspace_extend(q, {Vec::unit(3, 2), Vec::unit(3, 0)}, Vec::unit(3, 2));
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("W[1]"), std::string::npos) << e.what();
    }
}

TEST(FormAverage, Values)
{
    EXPECT_DOUBLE_EQ(form_average(QForm(Mat::diagonal(Vec{1.0, 2.0, 3.0}))), 2.0);
    EXPECT_DOUBLE_EQ(form_average(QForm(Mat{{1.0, 4.0}, {4.0, -1.0}})), 0.0);
}

TEST(FormAverage, AttainedAtAllSignPatterns)
{
    std::mt19937_64 rng(25);
    for (std::size_t n = 1; n <= 6; ++n) {
        const Vec d = oracle::uniform_vec(n, rng);
        const QForm q(Mat::diagonal(d));
        const double avg = form_average(q);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            Vec u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = ((mask >> i) & 1u ? -1.0 : 1.0) / std::sqrt(double(n));
            EXPECT_NEAR(evaluate(q, u), avg, 1e-15);
        }
    }
}

TEST(FormExtremes, Diagonal)
{
    const auto e = form_extremes(QForm(Mat::diagonal(Vec{-1.0, 0.0, 2.0})));
    EXPECT_DOUBLE_EQ(e.min, -1.0);
    EXPECT_DOUBLE_EQ(e.max, 2.0);
    EXPECT_DOUBLE_EQ(std::abs(e.argmin[0]), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(e.argmax[2]), 1.0);
    const auto i = form_extremes(QForm(Mat::identity(4)));
    EXPECT_DOUBLE_EQ(i.min, 1.0);
    EXPECT_DOUBLE_EQ(i.max, 1.0);
}

TEST(FormExtremes, SamplingStaysInRange)
{
    std::mt19937_64 rng(26);
    const QForm q(oracle::symmetric_matrix(5, rng));
    const auto e = form_extremes(q);
    EXPECT_NEAR(evaluate(q, e.argmin), e.min, 1e-12);
    EXPECT_NEAR(evaluate(q, e.argmax), e.max, 1e-12);
    for (int t = 0; t < 10000; ++t) {
        const double v = evaluate(q, oracle::unit_vec(5, rng));
        EXPECT_GE(v, e.min - 1e-12);
        EXPECT_LE(v, e.max + 1e-12);
    }
}

TEST(Decompose, PlanarAtFirstBasisVector)
{
    const auto d = decompose(kA12, Vec{1.0, 0.0});
    EXPECT_DOUBLE_EQ(d.e, 1.0);
    EXPECT_DOUBLE_EQ(d.r[(PlanePair{0, 1})], 3.0);
    Vec rebuilt = d.e * Vec{1.0, 0.0} + d.r[(PlanePair{0, 1})] * apply_quasi_rotation(Vec{1.0, 0.0}, {0, 1});
    EXPECT_EQ(rebuilt, (Vec{1.0, 3.0}));
    EXPECT_LT(d.residual, 1e-15);
}

TEST(Decompose, EigenvectorOfSymmetric)
{
    const Mat a = Mat::diagonal(Vec{4.0, -1.0, 2.5});
    const auto d = decompose(a, Vec{0.0, 0.0, 3.0});
    EXPECT_DOUBLE_EQ(d.e, 2.5);
    for (double r : d.r.values()) EXPECT_EQ(r, 0.0);
}

TEST(Decompose, ExpansionEigenbasisDiagonal)
{
    // basis diagonalizing A^e: A = D + S
    const Mat a{{3.0, 0.4, -0.2}, {-0.4, 1.0, 0.7}, {0.2, -0.7, -2.0}};
    for (std::size_t p = 0; p < 3; ++p) {
        const auto d = decompose(a, Vec::unit(3, p));
        EXPECT_DOUBLE_EQ(d.e, a(p, p));
        for (const auto& pq : plane_pairs(3)) {
            if (pq.k != p) continue;
            EXPECT_NEAR(d.r[pq], 0.5 * trace(rotation_form(a, pq).matrix()), 1e-15);
        }
    }
}

TEST(Decompose, ResidualAndNormIdentityProperty)
{
    std::mt19937_64 rng(27);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + t % 7;
        const Mat a = oracle::uniform_matrix(n, rng);
        const Vec u = oracle::uniform_vec(n, rng);
        const auto d = decompose(a, u);
        Vec rebuilt = d.e * u;
        for (const auto& kl : plane_pairs(n)) rebuilt += d.r[kl] * apply_quasi_rotation(u, kl);
        EXPECT_LT(norm(oracle::mul(a, Mat::from_columns({u})).col(0) - rebuilt), 1e-10 * norm(a * u));
        const Vec uh = u / norm(u);
        const Vec au = a * uh;
        EXPECT_NEAR(dot(au, au), d.e * d.e + d.r.sum_squares(), 1e-10 * std::max(1.0, dot(au, au)));
    }
}

TEST(Decompose, ZeroVector)
{
    EXPECT_THROW(decompose(kA12, Vec(2)), InputError);
}

TEST(CommutatorForms, Parts)
{
    std::mt19937_64 rng(28);
    const Mat s = oracle::symmetric_matrix(4, rng);
    const Mat k = oracle::skew_matrix(4, rng);
    for (const auto& kl : plane_pairs(4)) {
        EXPECT_LT(norm_max(commutator_forms(s, kl).skew_part.matrix()), 1e-16);
        EXPECT_LT(norm_max(commutator_forms(k, kl).sym_part.matrix()), 1e-16);
    }
    const Mat a = oracle::uniform_matrix(4, rng);
    for (const auto& kl : plane_pairs(4)) {
        const auto c = commutator_forms(a, kl);
        EXPECT_LT(norm_max(c.sym_part.matrix() + c.skew_part.matrix() - rotation_form(a, kl).matrix()), 1e-12);
        EXPECT_LT(std::abs(trace(c.sym_part.matrix())), 1e-14);
    }
}

TEST(RotationFormChangeOfBasis, IdentityBasis)
{
    std::mt19937_64 rng(29);
    const Mat a = oracle::uniform_matrix(4, rng);
    for (const auto& pq : plane_pairs(4))
        EXPECT_LT(norm_max(rotation_form_change_of_basis(a, OrthoBasis::identity(4), pq).matrix() -
                           rotation_form(a, pq).matrix()),
                  1e-15);
}

TEST(RotationFormChangeOfBasis, MatchesDirectComputation)
{
    std::mt19937_64 rng(30);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + t % 5;
        const Mat a = oracle::uniform_matrix(n, rng);
        const Mat p = oracle::orthogonal(n, rng);
        const OrthoBasis b = OrthoBasis::from_matrix(p);
        const Mat in_new = oracle::mul(oracle::mul(oracle::transpose(p), a), p);
        for (const auto& pq : plane_pairs(n))
            EXPECT_LT(norm_max(rotation_form_change_of_basis(a, b, pq).matrix() - rotation_form(in_new, pq).matrix()),
                      1e-10);
    }
}

TEST(RotationFormChangeOfBasis, EigenvectorStaysCommonZero)
{
    std::mt19937_64 rng(31);
    const Mat a{{2.0, 1.0, 0.0}, {0.0, -1.0, 0.5}, {0.0, 0.0, 0.5}};
    const Vec u{1.0, 0.0, 0.0}; // A u = 2 u
    const Mat p = oracle::orthogonal(3, rng);
    const OrthoBasis b = OrthoBasis::from_matrix(p);
    const Vec ut = oracle::transpose(p) * u;
    for (const auto& pq : plane_pairs(3)) EXPECT_NEAR(evaluate(rotation_form_change_of_basis(a, b, pq), ut), 0.0, 1e-14);
}

TEST(RotationTraceSum, Invariance)
{
    std::mt19937_64 rng(32);
    const Mat s = oracle::symmetric_matrix(5, rng);
    EXPECT_LT(std::abs(rotation_trace_sum(s, random_orthogonal(5, rng))), 1e-14);
    const Mat a = oracle::uniform_matrix(5, rng);
    double upper = 0.0;
    const Mat k = skew_part(a);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) upper += k(i, j);
    EXPECT_NEAR(rotation_trace_sum(a), -2.0 * upper, 1e-14);
    // planar proper rotations leave the single trace unchanged
    const Mat p2 = oracle::uniform_matrix(2, rng);
    const double th = 0.7;
    const Mat rot{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
    EXPECT_NEAR(rotation_trace_sum(p2, OrthoBasis::from_matrix(rot)), rotation_trace_sum(p2), 1e-14);
}

TEST(RotationTraceSum, RandomBasisN5)
{
    std::mt19937_64 rng(36);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Mat m = oracle::uniform_matrix(5, rng);
        worst = std::max(worst, std::abs(rotation_trace_sum(m, random_orthogonal(5, rng)) - rotation_trace_sum(m)));
    }
    EXPECT_LE(worst, 1e-9) << "sum of rotation traces is -2 x (sum of upper entries of A^skew), "
                              "which an orthogonal change of basis does not preserve";
}

TEST(QFormProperties, TraceAndExpansionAgreement)
{
    std::mt19937_64 rng(33);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + t % 8;
        const Mat a = oracle::uniform_matrix(n, rng);
        EXPECT_EQ(trace(a), trace(expansion_form(a).matrix()));
        const Vec u = oracle::unit_vec(n, rng);
        EXPECT_NEAR(evaluate(expansion_form(a), u), dot(sym_part(a) * u, u), 1e-12);
        EXPECT_NEAR(evaluate(expansion_form(a), u), dot(a * u, u), 1e-12);
    }
}

TEST(QFormProperties, SkewFromRotationTraces)
{
    std::mt19937_64 rng(34);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + t % 7;
        const Mat a = oracle::uniform_matrix(n, rng);
        EXPECT_LT(norm_max(skew_from_rotation_traces(a) - skew_part(a)), 1e-12);
        for (const auto& kl : plane_pairs(n))
            EXPECT_NEAR(trace(rotation_form(a, kl).matrix()), -2.0 * skew_part(a)(kl.k, kl.l), 1e-14);
    }
}

TEST(QFormProperties, FormsLinearlyIndependent)
{
    std::mt19937_64 rng(35);
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto fam = form_family(oracle::uniform_matrix(n, rng));
        std::vector<Vec> flat;
        auto push = [&](const QForm& q) {
            const auto e = q.matrix().entries();
            flat.emplace_back(std::vector<double>(e.begin(), e.end()));
        };
        push(fam.ae);
        for (const auto& q : fam.ar) push(q);
        EXPECT_EQ(oracle::row_reduction_rank(Mat::from_columns(flat), 1e-10), flat.size()) << "n=" << n;
    }
}

TEST(QForm, RejectsAsymmetric)
{
    EXPECT_THROW(QForm(Mat{{1.0, 2.0}, {0.0, 1.0}}), InputError);
}
