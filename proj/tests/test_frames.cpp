#include <gtest/gtest.h>

#include "ncup/frames.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace ncup;
using ncup::testing::audit_algebras;
using ncup::testing::scalar_vector;

const AlgebraShape kC{1};
const AlgebraShape kM2{2};

ModularFrame e1_e1_e2(const AlgebraShape& s, double scale_first_two = 1.0) {
    const auto e1 = ModuleVector::basis(s, 2, 0);
    const auto e2 = ModuleVector::basis(s, 2, 1);
    return ModularFrame({Complex(scale_first_two) * e1, Complex(scale_first_two) * e1, e2});
}

double max_entry_distance(const ModuleVector& a, const ModuleVector& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, distance(a.entry(i), b.entry(i)));
    return worst;
}

double frame_distance(const ModularFrame& f, const ModularFrame& g) {
    double worst = 0;
    for (std::size_t n = 0; n < f.size(); ++n) worst = std::max(worst, max_entry_distance(f[n], g[n]));
    return worst;
}

TEST(ModularFrameTest, RejectsMixedModules) {
    EXPECT_THROW(ModularFrame({ModuleVector::basis(kC, 2, 0), ModuleVector::basis(kC, 3, 0)}), InputError);
    EXPECT_THROW(ModularFrame({ModuleVector::basis(kC, 2, 0), ModuleVector::basis(kM2, 2, 0)}), InputError);
    EXPECT_THROW(ModularFrame(std::vector<ModuleVector>{}), InputError);
}

TEST(AnalysisTest, StandardBasisGivesCoordinates) {
    Rng rng(31);
    for (const auto& s : audit_algebras()) {
        const auto x = random_vector(s, 3, rng);
        const auto a = analysis(standard_basis_frame(s, 3), x);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(distance(a[i], x.entry(i)), 1e-15);
    }
}

TEST(AnalysisTest, TwoPointFourier) {
    const auto a = analysis(fourier_frame(kC, 2), scalar_vector({1, 0}));
    // (1/sqrt 2) sum_j x_j e^{-i pi j k}
    EXPECT_NEAR(std::abs(a[0].block(0)(0, 0) - 1 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1].block(0)(0, 0) - 1 / std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(AnalysisTest, RedundantFrameRepeatsCoordinate) {
    Rng rng(32);
    const auto x = random_vector(kM2, 2, rng);
    const auto e1 = ModuleVector::basis(kM2, 2, 0);
    const auto a = analysis(ModularFrame({e1, e1}), x);
    EXPECT_EQ(a[0], x.entry(0));
    EXPECT_EQ(a[1], x.entry(0));
}

TEST(AnalysisTest, MismatchIsInputError) {
    EXPECT_THROW(analysis(standard_basis_frame(kC, 2), ModuleVector::basis(kC, 3, 0)), InputError);
    EXPECT_THROW(synthesis(standard_basis_frame(kC, 2), AnalysisCoefficients::delta(kC, 3, 0)), InputError);
}

TEST(SynthesisTest, ReconstructsUnderParsevalFrames) {
    Rng rng(33);
    for (const auto& s : audit_algebras()) {
        const auto f = random_parseval_frame(s, 3, 5, rng);
        const auto x = random_vector(s, 3, rng);
        EXPECT_LE(max_entry_distance(synthesis(f, analysis(f, x)), x), 1e-10) << s.to_string();
    }
}

TEST(SynthesisTest, DeltaPicksFrameVector) {
    Rng rng(34);
    const auto f = random_frame(AlgebraShape{1, 2}, 2, 4, rng);
    for (std::size_t n = 0; n < 4; ++n) {
        EXPECT_LE(max_entry_distance(synthesis(f, AnalysisCoefficients::delta(f.shape(), 4, n)), f[n]), 1e-15);
    }
}

TEST(SynthesisTest, AdjointOfAnalysis) {
    Rng rng(35);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 50; ++i) {
            const auto f = random_frame(s, 3, 5, rng);
            const auto x = random_vector(s, 3, rng);
            AnalysisCoefficients a;
            for (int n = 0; n < 5; ++n) a.coeffs.push_back(random_element(s, rng));
            const auto lhs = l2_inner_product(analysis(f, x), a);
            const auto rhs = inner_product(x, synthesis(f, a));
            EXPECT_LE(distance(lhs, rhs), 1e-10);

            // oracle: sum_n <x, tau_n> a_n^* computed on plain arrays
            const auto ox = oracle::from(x);
            oracle::Elem expected;
            for (const auto& b : ox[0]) expected.emplace_back(b.rows, b.cols);
            for (std::size_t n = 0; n < 5; ++n) {
                const auto c = oracle::inner_product(ox, oracle::from(f[n]));
                const auto an = oracle::from(a[n]);
                for (std::size_t k = 0; k < expected.size(); ++k)
                    expected[k] = oracle::add(expected[k], oracle::mul(c[k], oracle::adjoint(an[k])));
            }
            EXPECT_LE(oracle::max_abs_diff(expected, rhs), 1e-10);
        }
    }
}

TEST(FrameOperatorTest, Examples) {
    for (const auto& s : audit_algebras()) {
        EXPECT_LE((frame_operator(standard_basis_frame(s, 3)) - ModuleOperator::identity(s, 3)).norm(), 1e-15);
        const auto m = frame_operator(e1_e1_e2(s));
        EXPECT_EQ(m.entry(0, 0), AlgebraElement::scalar(s, 2.0));
        EXPECT_EQ(m.entry(1, 1), AlgebraElement::identity(s));
        EXPECT_EQ(m.entry(0, 1), AlgebraElement::zero(s));
    }
}

TEST(FrameOperatorTest, UnionOfScaledOrthonormalBases) {
    for (const auto& s : audit_algebras()) {
        std::vector<ModuleVector> v;
        for (const auto& f : {standard_basis_frame(s, 4), fourier_frame(s, 4)}) {
            for (const auto& t : f.vectors()) v.push_back(Complex(1 / std::sqrt(2.0)) * t);
        }
        EXPECT_LE(parseval_defect(ModularFrame(v)), 1e-14);
    }
}

TEST(FrameOperatorTest, MatchesDirectSummation) {
    Rng rng(36);
    for (const auto& s : audit_algebras()) {
        const auto f = random_frame(s, 3, 5, rng);
        const auto x = random_vector(s, 3, rng);
        auto direct = ModuleVector::zero(s, 3);
        for (const auto& t : f.vectors()) direct += inner_product(x, t) * t;
        EXPECT_LE(max_entry_distance(op_apply(frame_operator(f), x), direct), 1e-10);
        const auto m = frame_operator(f);
        EXPECT_TRUE(m.is_self_adjoint(1e-12));
    }
}

TEST(ParsevalTest, Examples) {
    EXPECT_TRUE(is_parseval(standard_basis_frame(kM2, 3)));
    EXPECT_FALSE(is_parseval(e1_e1_e2(kC)));
    EXPECT_TRUE(is_parseval(e1_e1_e2(kM2, 1 / std::sqrt(2.0))));
    EXPECT_THROW(is_parseval(e1_e1_e2(kC), -1), InputError);
}

// The operator test S = I and the defining identity <x,x> = sum <x,tau><tau,x>
// agree on Parseval and non-Parseval fixtures.
TEST(ParsevalTest, DefinitionEquivalence) {
    Rng rng(37);
    for (const auto& s : audit_algebras()) {
        const std::vector<ModularFrame> fixtures{random_parseval_frame(s, 3, 5, rng), random_frame(s, 3, 5, rng),
                                                 e1_e1_e2(s), e1_e1_e2(s, 1 / std::sqrt(2.0))};
        for (const auto& f : fixtures) {
            bool identity_holds = true;
            for (int i = 0; i < 20; ++i) {
                const auto x = random_vector(s, f.dim(), rng);
                auto sum = AlgebraElement::zero(s);
                for (const auto& c : analysis(f, x).coeffs) sum += mul_star(c, c);
                if (distance(inner_product(x, x), sum) > 1e-10 * (1 + inner_product(x, x).norm())) identity_holds = false;
            }
            EXPECT_EQ(identity_holds, is_parseval(f, 1e-10)) << s.to_string();
        }
    }
}

TEST(ParsevalizeTest, Examples) {
    for (const auto& s : audit_algebras()) {
        const auto f = standard_basis_frame(s, 3);
        EXPECT_LE(frame_distance(parsevalize(f), f), 1e-10);
        const auto g = parsevalize(e1_e1_e2(s));
        EXPECT_LE(frame_distance(g, e1_e1_e2(s, 1 / std::sqrt(2.0))), 1e-12);
    }
    const auto two = parsevalize(ModularFrame({scalar_vector({2})}));
    EXPECT_NEAR(std::abs(two[0].entry(0).block(0)(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(ParsevalizeTest, RejectsNonSpanningFamilies) {
    Rng rng(38);
    EXPECT_THROW(parsevalize(random_frame(kM2, 3, 2, rng)), NotAFrameError);
    const auto e1 = ModuleVector::basis(kC, 2, 0);
    EXPECT_THROW(parsevalize(ModularFrame({e1, e1})), NotAFrameError);
}

TEST(ParsevalizeTest, RandomFramesAndIdempotence) {
    Rng rng(39);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 50; ++i) {
            const auto f = random_frame(s, 3, 3 + i % 4, rng);
            const auto g = parsevalize(f);
            EXPECT_LE(parseval_defect(g), 1e-8);
            EXPECT_LE(frame_distance(parsevalize(g), g), 1e-8);
        }
    }
}

TEST(CoherenceTest, Examples) {
    for (std::size_t d : {2u, 3u, 4u}) {
        EXPECT_NEAR(coherence(standard_basis_frame(kC, d), standard_basis_frame(kC, d)), 1.0, 1e-15);
    }
    EXPECT_NEAR(coherence(standard_basis_frame(kC, 4), fourier_frame(kC, 4)), 0.5, 1e-15);
    const auto unit = ModularFrame({ModuleVector::basis(kM2, 1, 0)});
    EXPECT_NEAR(coherence(unit, unit), 1.0, 1e-15);
    EXPECT_THROW(coherence(standard_basis_frame(kC, 2), standard_basis_frame(kC, 3)), InputError);
}

TEST(CoherenceTest, SymmetricAndBoundedForParsevalFrames) {
    Rng rng(40);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 30; ++i) {
            const auto f = random_parseval_frame(s, 3, 4, rng);
            const auto g = random_parseval_frame(s, 3, 6, rng);
            EXPECT_NEAR(coherence(f, g), coherence(g, f), 1e-13);
            EXPECT_LE(coherence(f, g), 1 + 1e-10);
        }
    }
}

TEST(SparsityTest, Examples) {
    const auto std4 = standard_basis_frame(kC, 4);
    const auto a = analysis(std4, ModuleVector::basis(kC, 4, 0));
    EXPECT_EQ(sparsity(a), 1u);
    EXPECT_EQ(support(a), (std::vector<std::size_t>{0}));
    EXPECT_EQ(sparsity(analysis(std4, scalar_vector({1, 0, 1, 0}))), 2u);

    AnalysisCoefficients c{{AlgebraElement::identity(kC), AlgebraElement::scalar(kC, 1e-12), AlgebraElement::zero(kC)}};
    EXPECT_EQ(sparsity(c, 1e-8), 1u);
    AnalysisCoefficients zeros{std::vector<AlgebraElement>(3, AlgebraElement::zero(kM2))};
    EXPECT_EQ(sparsity(zeros), 0u);
    EXPECT_THROW(sparsity(c, -1), InputError);
}

TEST(SparsityTest, ScaleInvariant) {
    Rng rng(41);
    const auto f = random_parseval_frame(kM2, 2, 4, rng);
    const auto x = Complex(0, 1) * ModuleVector::basis(kM2, 2, 0);
    const auto base = sparsity(analysis(f, x));
    for (Complex c : {Complex(1e-6), Complex(3, -4), Complex(1e6)}) EXPECT_EQ(sparsity(analysis(f, c * x)), base);
}

TEST(FramePropertyTest, AnalysisIsIsometricForParsevalFrames) {
    Rng rng(42);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 100; ++i) {
            const auto f = random_parseval_frame(s, 3, 5, rng);
            const auto x = random_vector(s, 3, rng);
            EXPECT_LE(std::abs(l2_norm(analysis(f, x)) - module_norm(x)), 1e-10);
        }
    }
}

// Analysis coefficients match plain-array inner products.
TEST(FlatteningOracleTest, AnalysisCoefficients) {
    Rng rng(43);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 50; ++i) {
            const auto f = random_frame(s, 3, 4, rng);
            const auto x = random_vector(s, 3, rng);
            const auto a = analysis(f, x);
            for (std::size_t n = 0; n < f.size(); ++n) {
                EXPECT_LE(oracle::max_abs_diff(oracle::inner_product(oracle::from(x), oracle::from(f[n])), a[n]), 1e-12);
            }
        }
    }
}

}  // namespace
