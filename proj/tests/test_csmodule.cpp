#include <gtest/gtest.h>

#include "ncup/csmodule.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace ncup;
using ncup::testing::audit_algebras;
using ncup::testing::matrix;

const AlgebraShape kC{1};
const AlgebraShape kM2{2};

ModuleVector nil_and_identity() {
    return ModuleVector(kM2, {matrix({{0, 1}, {0, 0}}), AlgebraElement::identity(kM2)});
}

template <class R>
ModuleOperator random_operator(const AlgebraShape& s, std::size_t d, R& rng, std::vector<AlgebraElement>* entries = nullptr) {
    std::vector<AlgebraElement> e;
    for (std::size_t i = 0; i < d * d; ++i) e.push_back(random_element(s, rng));
    if (entries) *entries = e;
    return ModuleOperator::from_entries(s, d, e);
}

TEST(InnerProductTest, StandardBasis) {
    for (const auto& s : audit_algebras()) {
        const auto e1 = ModuleVector::basis(s, 2, 0);
        const auto e2 = ModuleVector::basis(s, 2, 1);
        EXPECT_EQ(inner_product(e1, e1), AlgebraElement::identity(s));
        EXPECT_EQ(inner_product(e1, e2), AlgebraElement::zero(s));
    }
}

TEST(InnerProductTest, MatrixValuedExample) {
    const auto x = nil_and_identity();
    const auto expected = matrix({{2, 0}, {0, 1}});
    // hand expansion: [[0,1],[0,0]] [[0,0],[1,0]] + I = diag(1,0) + I
    EXPECT_LE(distance(inner_product(x, x), expected), 1e-15);
    EXPECT_LE(oracle::max_abs_diff(oracle::inner_product(oracle::from(x), oracle::from(x)), expected), 1e-15);
}

TEST(InnerProductTest, MismatchIsInputError) {
    EXPECT_THROW(inner_product(ModuleVector::basis(kC, 2, 0), ModuleVector::basis(kC, 3, 0)), InputError);
    EXPECT_THROW(inner_product(ModuleVector::basis(kC, 2, 0), ModuleVector::basis(kM2, 2, 0)), InputError);
}

TEST(ModuleNormTest, Examples) {
    const auto e1 = ModuleVector::basis(kM2, 3, 0);
    EXPECT_NEAR(module_norm(e1), 1.0, 1e-15);
    EXPECT_NEAR(module_norm(2.0 * e1), 2.0, 1e-15);
    EXPECT_NEAR(module_norm(nil_and_identity()), std::sqrt(2.0), 1e-14);
}

TEST(CauchySchwarzTest, EqualityAndZeroCases) {
    for (const auto& s : audit_algebras()) {
        const auto e1 = ModuleVector::basis(s, 2, 0);
        EXPECT_NEAR(cauchy_schwarz_gap(e1, e1), 0.0, 1e-15);
        EXPECT_NEAR(cauchy_schwarz_gap(e1, ModuleVector::zero(s, 2)), 0.0, 1e-15);
    }
}

TEST(CauchySchwarzTest, RandomMatrixValuedAgreesWithOracle) {
    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        const auto x = random_vector(kM2, 3, rng);
        const auto y = random_vector(kM2, 3, rng);
        const double gap = cauchy_schwarz_gap(x, y);
        EXPECT_GE(gap, -1e-10);

        const auto ox = oracle::from(x);
        const auto oy = oracle::from(y);
        const auto xx = oracle::inner_product(ox, ox);
        const auto yy = oracle::inner_product(oy, oy);
        const auto xy = oracle::inner_product(ox, oy);
        const double scale = oracle::norm(yy);
        oracle::Mat diff = xx[0];
        const oracle::Mat cross = oracle::mul(xy[0], oracle::adjoint(xy[0]));
        for (std::size_t k = 0; k < diff.a.size(); ++k) diff.a[k] = scale * xx[0].a[k] - cross.a[k];
        const double expected = oracle::hermitian_eigenvalues(diff).front();
        EXPECT_GE(expected, -1e-10);
        EXPECT_NEAR(gap, expected, 1e-10 * (1 + scale));
    }
}

TEST(CauchySchwarzTest, RandomPairsEveryAlgebra) {
    Rng rng(22);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 1000; ++i) {
            const auto x = random_vector(s, 3, rng);
            const auto y = random_vector(s, 3, rng);
            ASSERT_GE(cauchy_schwarz_gap(x, y), -1e-10) << s.to_string();
        }
    }
}

TEST(InnerProductPropertyTest, Axioms) {
    Rng rng(23);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 100; ++i) {
            const auto x = random_vector(s, 3, rng);
            const auto y = random_vector(s, 3, rng);
            const auto z = random_vector(s, 3, rng);
            const auto a = random_element(s, rng);
            EXPECT_LE(distance(inner_product(x + y, z), inner_product(x, z) + inner_product(y, z)), 1e-10);
            EXPECT_LE(distance(inner_product(a * x, y), a * inner_product(x, y)), 1e-10);
            EXPECT_LE(distance(inner_product(x, y), star(inner_product(y, x))), 1e-10);
            EXPECT_TRUE(is_positive(inner_product(x, x), 1e-10));
        }
    }
}

TEST(InnerProductPropertyTest, Definiteness) {
    for (const auto& s : audit_algebras()) {
        auto x = ModuleVector::zero(s, 3);
        EXPECT_TRUE(is_zero(inner_product(x, x), 1e-12));
        x.entry(1) = 1e-7 * AlgebraElement::identity(s);
        // ||<x,x>|| = 1e-14 passes the 1e-12 test, so every entry must be below 1e-6
        ASSERT_TRUE(is_zero(inner_product(x, x), 1e-12));
        for (const auto& e : x.entries()) EXPECT_LE(e.norm(), 1e-6);
        x.entry(2) = 1e-3 * AlgebraElement::identity(s);
        EXPECT_FALSE(is_zero(inner_product(x, x), 1e-12));
    }
}

TEST(ModuleOperatorTest, IdentityAndScalar) {
    Rng rng(24);
    for (const auto& s : audit_algebras()) {
        const auto x = random_vector(s, 3, rng);
        const auto y = op_apply(ModuleOperator::identity(s, 3), x);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(y.entry(i), x.entry(i));
        const auto x1 = random_vector(s, 1, rng);
        const auto two = ModuleOperator::from_entries(s, 1, {AlgebraElement::scalar(s, 2.0)});
        EXPECT_LE(distance(op_apply(two, x1).entry(0), x1.entry(0) * Complex(2.0)), 1e-15);
    }
}

TEST(ModuleOperatorTest, EntriesRoundTripThroughFlattening) {
    Rng rng(25);
    std::vector<AlgebraElement> entries;
    const auto m = random_operator(AlgebraShape{1, 2}, 3, rng, &entries);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.entry(i, j), entries[i * 3 + j]);
}

TEST(ModuleOperatorTest, AdjointIdentityAgainstOracle) {
    Rng rng(26);
    const AlgebraShape s{1, 2};
    for (int i = 0; i < 50; ++i) {
        std::vector<AlgebraElement> entries;
        const auto m = random_operator(s, 3, rng, &entries);
        const auto x = random_vector(s, 3, rng);
        const auto y = random_vector(s, 3, rng);
        const auto lhs = inner_product(op_apply(m, x), y);
        const auto rhs = inner_product(x, op_apply(op_adjoint(m), y));
        EXPECT_LE(distance(lhs, rhs), 1e-10);

        // oracle: adjoint as the starred transpose of the entry matrix
        std::vector<oracle::Elem> om, om_adj(9);
        for (const auto& e : entries) om.push_back(oracle::from(e));
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c)
                for (const auto& b : om[c * 3 + r]) om_adj[r * 3 + c].push_back(oracle::adjoint(b));
        const auto olhs = oracle::inner_product(oracle::apply(om, oracle::from(x)), oracle::from(y));
        const auto orhs = oracle::inner_product(oracle::from(x), oracle::apply(om_adj, oracle::from(y)));
        EXPECT_LE(oracle::max_abs_diff(olhs, lhs), 1e-10);
        EXPECT_LE(oracle::max_abs_diff(orhs, rhs), 1e-10);
    }
}

TEST(ModuleOperatorTest, LeftLinearity) {
    Rng rng(27);
    for (const auto& s : audit_algebras()) {
        const auto m = random_operator(s, 2, rng);
        const auto x = random_vector(s, 2, rng);
        const auto a = random_element(s, rng);
        const auto lhs = op_apply(m, a * x);
        const auto rhs = a * op_apply(m, x);
        for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(distance(lhs.entry(i), rhs.entry(i)), 1e-10);
    }
}

TEST(ModuleOperatorTest, MismatchIsInputError) {
    const auto m = ModuleOperator::identity(kC, 2);
    EXPECT_THROW(op_apply(m, ModuleVector::basis(kC, 3, 0)), InputError);
    EXPECT_THROW(op_apply(m, ModuleVector::basis(kM2, 2, 0)), InputError);
    EXPECT_THROW(ModuleOperator::from_entries(kC, 2, {AlgebraElement::identity(kC)}), InputError);
}

TEST(InvSqrtTest, Examples) {
    for (const auto& s : audit_algebras()) {
        EXPECT_LE((op_inv_sqrt(ModuleOperator::identity(s, 2)) - ModuleOperator::identity(s, 2)).norm(), 1e-14);
    }
    const auto four = ModuleOperator::from_entries(kC, 1, {AlgebraElement::scalar(kC, 4.0)});
    EXPECT_NEAR(std::abs(op_inv_sqrt(four).entry(0, 0).block(0)(0, 0) - 0.5), 0.0, 1e-15);

    const auto diag = ModuleOperator::from_entries(kM2, 1, {matrix({{4, 0}, {0, 9}})});
    EXPECT_LE(distance(op_inv_sqrt(diag).entry(0, 0), matrix({{0.5, 0}, {0, 1.0 / 3.0}})), 1e-15);
}

TEST(InvSqrtTest, RandomPositiveOperators) {
    Rng rng(28);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 20; ++i) {
            const auto b = random_operator(s, 3, rng);
            const auto m = b.adjoint() * b + ModuleOperator::scalar(s, 3, 0.1);
            const auto p = op_inv_sqrt(m);
            EXPECT_LE((p * p * m - ModuleOperator::identity(s, 3)).norm(), 1e-8) << s.to_string();
        }
    }
}

TEST(InvSqrtTest, SingularAndNonSelfAdjoint) {
    const auto singular = ModuleOperator::from_entries(kM2, 1, {matrix({{1, 0}, {0, 0}})});
    EXPECT_THROW(op_inv_sqrt(singular), SingularOperatorError);
    const auto tiny = ModuleOperator::from_entries(kM2, 1, {matrix({{1, 0}, {0, 1e-12}})});
    EXPECT_THROW(op_inv_sqrt(tiny), SingularOperatorError);
    const auto skew = ModuleOperator::from_entries(kM2, 1, {matrix({{1, 1}, {0, 1}})});
    EXPECT_THROW(op_inv_sqrt(skew), PreconditionError);
}

// Inner products and operator actions match direct computation on the
// flattened complex arrays.
TEST(FlatteningOracleTest, InnerProductsAndOperators) {
    Rng rng(29);
    for (const auto& s : audit_algebras()) {
        for (int i = 0; i < 50; ++i) {
            std::vector<AlgebraElement> entries;
            const auto m = random_operator(s, 3, rng, &entries);
            const auto x = random_vector(s, 3, rng);
            const auto y = random_vector(s, 3, rng);
            EXPECT_LE(oracle::max_abs_diff(oracle::inner_product(oracle::from(x), oracle::from(y)), inner_product(x, y)), 1e-12);
            std::vector<oracle::Elem> om;
            for (const auto& e : entries) om.push_back(oracle::from(e));
            const auto expected = oracle::apply(om, oracle::from(x));
            const auto got = op_apply(m, x);
            for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(oracle::max_abs_diff(expected[j], got.entry(j)), 1e-12);
        }
    }
}

}  // namespace
