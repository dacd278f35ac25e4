#include <gtest/gtest.h>

#include <random>

#include "deformlab/ncalg.hpp"

using namespace deformlab;

namespace {

// Word from letters x, y, z (or a, b, c).
Word w(const std::string& s)
{
    Word out;
    for (char ch : s)
        out.push_back(ch >= 'x' ? ch - 'x' : ch - 'a');
    return out;
}

SmashElement m(const std::string& s, ParamPoly c = ParamPoly(1)) { return SmashElement::monomial(w(s), std::move(c)); }

ParamPoly hbar() { return ParamPoly::variable("hbar"); }

Presentation weyl()
{
    auto p = Presentation::free_algebra(2);
    p.relations = {m("yx") - m("xy") - SmashElement(hbar())};
    p.parameters = p.deformation = {symbol("hbar")};
    return p;
}

Presentation commutative(std::size_t d)
{
    auto p = Presentation::free_algebra(d);
    const std::string letters = "xyz";
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            p.relations.push_back(m(std::string{letters[j], letters[i]}) - m(std::string{letters[i], letters[j]}));
    return p;
}

Presentation torsion_example()
{
    auto p = weyl();
    p.relations.push_back(m("x"));
    return p;
}

Presentation von_dyck(int p, int q, int r)
{
    auto P = Presentation::free_algebra(2);
    P.letters = {"a", "b"};
    auto power = [](const std::string& s, int k) {
        std::string out;
        for (int i = 0; i < k; ++i)
            out += s;
        return out;
    };
    P.relations = {m(power("a", p)) - SmashElement(1), m(power("b", q)) - SmashElement(1),
                   m(power("ab", r)) - SmashElement(1)};
    return P;
}

std::size_t binom(std::size_t n, std::size_t k)
{
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

// Quotient dimension through the linear-algebra path only.
std::size_t dim_by_elimination(const Presentation& P, std::size_t n)
{
    detail::ColumnIndex cols(P.group.order(), P.v_dim, n);
    const auto prof = detail::span_profile(P.group, P.v_dim, P.relations, cols, RankMode::symbolic());
    return cols.count_upto(n) - prof.pivots_from[n];
}

} // namespace

TEST(FilteredDim, Examples)
{
    EXPECT_EQ(filtered_dim(Presentation::free_algebra(2), 3), 15u);
    EXPECT_EQ(filtered_dim(weyl(), 3, {RankMode::symbolic()}), 10u);
    EXPECT_EQ(filtered_dim(commutative(2), 3), 10u);
}

TEST(FilteredDim, CommutativeMatchesBinomial)
{
    for (std::size_t d = 1; d <= 3; ++d)
        for (std::size_t n = 0; n <= 5; ++n)
            EXPECT_EQ(filtered_dim(commutative(d), n), binom(n + d, d)) << "d=" << d << " n=" << n;
}

TEST(FilteredDim, NonDecreasingInDegree)
{
    for (const auto& P : {weyl(), commutative(2), commutative(3), torsion_example()}) {
        const auto dims = filtered_dims(P, 5);
        for (std::size_t n = 1; n < dims.size(); ++n)
            EXPECT_LE(dims[n - 1], dims[n]);
    }
}

TEST(FilteredDim, AddingARelationNeverIncreasesDimension)
{
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> coef(-3, 3), len(0, 2), letter(0, 1);
    auto random_relation = [&]() {
        SmashElement r;
        while (r.is_zero() || r.degree() == 0)
            for (int t = 0; t < 3; ++t) {
                Word word;
                for (int k = len(rng); k > 0; --k)
                    word.push_back(letter(rng));
                r.add(0, word, ParamPoly(coef(rng)));
            }
        return r;
    };
    for (int trial = 0; trial < 20; ++trial) {
        auto P = Presentation::free_algebra(2);
        P.relations = {random_relation()};
        auto Q = P;
        Q.relations.push_back(random_relation());
        for (std::size_t n = 0; n <= 3; ++n)
            EXPECT_GE(filtered_dim(P, n), filtered_dim(Q, n));
    }
}

TEST(FilteredDim, UnionFindAgreesWithElimination)
{
    for (const auto& P : {von_dyck(2, 3, 3), von_dyck(2, 2, 3), commutative(2)})
        for (std::size_t n = 0; n <= 5; ++n)
            EXPECT_EQ(filtered_dim(P, n), dim_by_elimination(P, n)) << "n=" << n;
}

TEST(FilteredDim, SmashProductWithSignGroup)
{
    auto P = commutative(2);
    P.group = generate_group({-CycMatrix::identity(2)});
    for (std::size_t n = 0; n <= 4; ++n)
        EXPECT_EQ(filtered_dim(P, n), 2 * binom(n + 2, 2));
}

TEST(FilteredDim, SymbolicAndSpecializedAgree)
{
    for (std::size_t n = 0; n <= 4; ++n) {
        EXPECT_EQ(filtered_dim(weyl(), n, {RankMode::symbolic()}), filtered_dim(weyl(), n, {RankMode::specialize(3)}));
        EXPECT_EQ(filtered_dim(torsion_example(), n, {RankMode::symbolic()}),
                  filtered_dim(torsion_example(), n, {RankMode::specialize(3)}));
    }
}

TEST(Flatness, WeylIsFlatUpToSix)
{
    for (std::size_t n = 0; n <= 6; ++n) {
        const auto v = flat_at_degree(weyl(), n);
        EXPECT_TRUE(v.flat) << n;
        EXPECT_EQ(v.generic_dim, binom(n + 2, 2));
    }
}

TEST(Flatness, TorsionExampleIsNotFlatAtDegreeTwo)
{
    const auto v = flat_at_degree(torsion_example(), 2);
    EXPECT_FALSE(v.flat);
    EXPECT_EQ(v.special_dim, 3u);
    EXPECT_EQ(v.generic_dim, 2u);
    EXPECT_LE(v.generic_dim, v.special_dim);
    // with room for the placement y*hbar the generic quotient vanishes
    DimOptions wide;
    wide.slack = 2;
    EXPECT_EQ(filtered_dim(torsion_example(), 2, wide), 0u);
}

TEST(Flatness, UnusedDeformationParameter)
{
    auto P = commutative(2);
    P.deformation = {symbol("hbar")};
    const auto v = flat_at_degree(P, 4);
    EXPECT_TRUE(v.flat);
    EXPECT_EQ(v.generic_dim, 15u);
    EXPECT_EQ(v.special_dim, 15u);
    EXPECT_THROW(flat_at_degree(commutative(2), 2), std::invalid_argument);
}

TEST(Flatness, GenericNeverExceedsSpecial)
{
    for (const auto& P : {weyl(), torsion_example()})
        for (std::size_t n = 0; n <= 4; ++n) {
            const auto v = flat_at_degree(P, n);
            EXPECT_LE(v.generic_dim, v.special_dim);
        }
}

TEST(Torsion, WitnessIsOneAtDegreeZero)
{
    const auto t = torsion_witness(torsion_example(), 3);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->degree, 0u);
    EXPECT_EQ(t->element, SmashElement(1));
    EXPECT_EQ(torsion_example().render(t->element), "1");
}

TEST(Torsion, NoneForFlatOrFreePresentations)
{
    EXPECT_FALSE(torsion_witness(weyl(), 4));
    auto free = Presentation::free_algebra(2);
    free.deformation = {symbol("hbar")};
    EXPECT_FALSE(torsion_witness(free, 3));
}

TEST(Torsion, HigherDegreeWitness)
{
    // hbar*x = 0 forces x into the torsion
    auto P = Presentation::free_algebra(2);
    P.relations = {m("x", hbar())};
    P.deformation = {symbol("hbar")};
    const auto t = torsion_witness(P, 2);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->degree, 1u);
    EXPECT_EQ(P.render(t->element), "x");
}

TEST(StabilizedOrder, Examples)
{
    auto P = Presentation::free_algebra(1);
    P.letters = {"a"};
    P.relations = {m("aa") - SmashElement(1)};
    EXPECT_EQ(stabilized_group_order(P, 10), 2u);
    EXPECT_EQ(stabilized_group_order(von_dyck(2, 3, 3), 30), 12u);
    EXPECT_FALSE(stabilized_group_order(von_dyck(2, 3, 7), 12));
}

TEST(StabilizedOrder, MatchesClosedFormForSphericalTriples)
{
    EXPECT_EQ(stabilized_group_order(von_dyck(2, 3, 4), 30), 24u);
    EXPECT_EQ(stabilized_group_order(von_dyck(2, 3, 5), 30), 60u);
    for (int n = 2; n <= 5; ++n)
        EXPECT_EQ(stabilized_group_order(von_dyck(2, 2, n), 30), static_cast<std::size_t>(2 * n));
}

TEST(StabilizedOrder, TruncatedFallbackForMonoids)
{
    // a^2 = a has no inverse for a: idempotent monoid {1, a}
    auto P = Presentation::free_algebra(1);
    P.letters = {"a"};
    P.relations = {m("aa") - m("a")};
    EXPECT_EQ(stabilized_group_order(P, 6), 2u);
}

TEST(StabilizedOrder, RejectsParameters)
{
    EXPECT_THROW(stabilized_group_order(weyl(), 3), std::invalid_argument);
}

TEST(MonoidQuotient, SymmetricGroupOnThreeLetters)
{
    const auto P = von_dyck(2, 2, 3);
    const auto order = stabilized_group_order(P, 20);
    ASSERT_EQ(order, 6u);
    const auto q = monoid_quotient(P);
    EXPECT_EQ(q.representatives.size(), 6u);
    for (const auto& perm : q.right) {
        std::set<std::size_t> image(perm.begin(), perm.end());
        EXPECT_EQ(image.size(), 6u);
    }
}

TEST(SmashElement, Rendering)
{
    const auto P = weyl();
    EXPECT_EQ(P.render(P.relations[0]), "-xy + yx - hbar");
    EXPECT_EQ(P.render(m("x", ParamPoly(2)) + SmashElement(Rational(1, 3))), "2*x + 1/3");
}
