#include <gtest/gtest.h>

#include <random>

#include "deformlab/sra.hpp"

using namespace deformlab;

namespace {

SympAction plane(const std::vector<CycMatrix>& gens) { return SympAction::standard(generate_group(gens)); }

SympAction trivial_plane() { return SympAction::standard(trivial_group(2)); }
SympAction sign_plane() { return plane({-CycMatrix::identity(2)}); }
SympAction cyclic_plane(int n) { return plane({cyclic_sl2_generator(n)}); }

// S2 acting on h + h* with h = C
SympAction s2_plane() { return plane({symplectic_double(CycMatrix{{-1}})}); }

// two Darboux blocks (x1, y1, x2, y2); s = diag(-1, -1, 1, 1)
SympForm darboux4()
{
    CycMatrix w(4, 4);
    w(0, 1) = w(2, 3) = 1;
    w(1, 0) = w(3, 2) = -1;
    return SympForm(w);
}

CycMatrix half_sign() { return CycMatrix{{-1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}; }

struct Case {
    std::string name;
    SympAction act;
    std::size_t expected;
};

std::vector<Case> corpus()
{
    std::vector<Case> c{{"trivial", trivial_plane(), 1}, {"sign", sign_plane(), 2}, {"s2", s2_plane(), 2},
                        {"quaternion", plane(quaternion_generators()), 5}};
    for (int n = 2; n <= 6; ++n)
        c.push_back({"cyclic" + std::to_string(n), cyclic_plane(n), static_cast<std::size_t>(n)});
    return c;
}

ParamPoly var(const char* s) { return ParamPoly::variable(s); }

std::size_t index_of(const FiniteGroup& G, const CycMatrix& m) { return *G.find(m); }

} // namespace

TEST(OmegaS, Examples)
{
    const auto w = SympForm::standard(2);
    EXPECT_EQ(omega_s(-CycMatrix::identity(2), w), w.matrix());
    EXPECT_EQ(omega_s(cyclic_sl2_generator(3), w), w.matrix());
    CycMatrix expected(4, 4);
    expected(0, 1) = 1;
    expected(1, 0) = -1;
    EXPECT_EQ(omega_s(half_sign(), darboux4()), expected);
}

TEST(OmegaS, RankTwoAndVanishesOnFixedSpace)
{
    for (const auto& c : corpus())
        for (const auto& cls : symplectic_reflection_classes(c.act.group, c.act.form))
            for (auto g : cls) {
                const auto& m = c.act.group.matrix(g);
                const auto ws = omega_s(m, c.act.form);
                EXPECT_EQ(rank(ws), 2u);
                for (const auto& v : nullspace(CycMatrix::identity(m.rows()) - m))
                    EXPECT_TRUE(mat_vec(ws, v) == std::vector<Cyclotomic>(v.size(), Cyclotomic(0)));
            }
    const auto ws = omega_s(half_sign(), darboux4());
    EXPECT_EQ(rank(ws), 2u);
}

TEST(OmegaS, Errors)
{
    EXPECT_THROW(omega_s(CycMatrix::identity(2), SympForm::standard(2)), not_a_symplectic_reflection);
    EXPECT_THROW(omega_s(CycMatrix{{2, 0}, {0, 1}}, SympForm::standard(2)), not_symplectic);
    EXPECT_THROW(omega_s(-CycMatrix::identity(4), SympForm::standard(4)), not_a_symplectic_reflection);
}

TEST(ClassifyKappa, Examples)
{
    EXPECT_EQ(classify_kappa(trivial_plane()).dimension, 1u);
    EXPECT_EQ(classify_kappa(sign_plane()).dimension, 2u);
    EXPECT_EQ(classify_kappa(cyclic_plane(3)).dimension, 3u);
}

TEST(ClassifyKappa, DimensionIsOnePlusReflectionClasses)
{
    for (const auto& c : corpus()) {
        const auto k = classify_kappa(c.act);
        EXPECT_EQ(k.dimension, c.expected) << c.name;
        EXPECT_EQ(k.dimension, 1 + symplectic_reflection_classes(c.act.group, c.act.form).size()) << c.name;
        EXPECT_EQ(k.identity_dim, 1u) << c.name;
    }
}

TEST(ClassifyKappa, ReportsLargerInvariantFormSpace)
{
    // here the invariant skew forms are spanned by both blocks separately
    const SympAction act(generate_group({half_sign()}), darboux4());
    const auto k = classify_kappa(act);
    EXPECT_EQ(k.identity_dim, 2u);
    EXPECT_EQ(k.dimension, 3u);
}

TEST(ClassifyKappa, BasisIsEquivariantAndSkew)
{
    for (const auto& c : corpus())
        for (const auto& kappa : classify_kappa(c.act).basis()) {
            EXPECT_TRUE(kappa.is_skew()) << c.name;
            EXPECT_TRUE(kappa.is_equivariant(c.act.group)) << c.name;
        }
}

TEST(BuildSra, TrivialGroupIsWeyl)
{
    // [x, y] = hbar, i.e. yx - xy + hbar: the Weyl relation with hbar -> -hbar
    const auto P = build_sra(trivial_plane(), var("hbar"), std::vector<ParamPoly>{});
    ASSERT_EQ(P.relations.size(), 1u);
    EXPECT_EQ(P.render(P.relations[0]), "xy - yx - hbar");
    for (std::size_t n = 0; n <= 4; ++n)
        EXPECT_EQ(filtered_dim(P, n, {RankMode::symbolic()}), (n + 1) * (n + 2) / 2);
}

TEST(BuildSra, SignGroupRelation)
{
    const auto act = sign_plane();
    const auto P = build_sra(act, var("t"), std::vector<ParamPoly>{var("c")});
    ASSERT_EQ(P.relations.size(), 1u);
    const auto s = index_of(act.group, -CycMatrix::identity(2));
    SmashElement expected = SmashElement::monomial({0, 1}) - SmashElement::monomial({1, 0}) - SmashElement(var("t"));
    expected.add(s, {}, ParamPoly(2) * var("c"));
    EXPECT_EQ(P.relations[0], expected);
}

TEST(BuildSra, ZeroParametersGiveSmashWithSymmetricAlgebra)
{
    const auto act = cyclic_plane(3);
    const auto P = build_sra(act, ParamPoly(), std::vector<ParamPoly>{ParamPoly(), ParamPoly()});
    ASSERT_EQ(P.relations.size(), 1u);
    EXPECT_EQ(P.relations[0], SmashElement::monomial({0, 1}) - SmashElement::monomial({1, 0}));
    for (std::size_t n = 0; n <= 3; ++n)
        EXPECT_EQ(filtered_dim(P, n), 3 * (n + 1) * (n + 2) / 2);
}

TEST(BuildSra, RelationCount)
{
    const SympAction act(generate_group({half_sign()}), darboux4());
    const auto P = build_sra(act);
    EXPECT_EQ(P.relations.size(), 6u); // m(2m - 1) with m = 2
    for (const auto& r : P.relations)
        EXPECT_EQ(r.degree(), 2u);
}

TEST(BuildSra, RejectsNonInvariantC)
{
    const auto act = plane(quaternion_generators());
    const auto classes = symplectic_reflection_classes(act.group, act.form);
    // put c on one member of a two-element class only
    const auto& cls = *std::find_if(classes.begin(), classes.end(), [](const auto& c) { return c.size() > 1; });
    std::map<std::size_t, ParamPoly> c{{cls[0], ParamPoly(1)}};
    EXPECT_THROW(build_sra(act, ParamPoly(1), c), c_not_class_invariant);
    c[cls[1]] = ParamPoly(1);
    EXPECT_NO_THROW(build_sra(act, ParamPoly(1), c));
}

TEST(Pbw, SignGroupSymbolicIsFlat)
{
    const auto act = sign_plane();
    const auto v = pbw_check(act, sra_kappa(act, var("t"), std::vector<ParamPoly>{var("c")}), 3);
    ASSERT_EQ(v.size(), 4u);
    EXPECT_TRUE(v[3].flat);
    EXPECT_EQ(v[3].generic_dim, 20u);
    EXPECT_EQ(v[3].special_dim, 20u);
}

TEST(Pbw, ClassifiedBasisIsFlat)
{
    for (const auto& c : corpus())
        for (const auto& kappa : classify_kappa(c.act).basis())
            for (const auto& v : pbw_check(c.act, kappa, 3))
                EXPECT_TRUE(v.flat) << c.name << " n=" << v.degree;
}

TEST(Pbw, SymmetricIdentityFormIsNotFlat)
{
    const auto act = sign_plane();
    KappaMap k;
    k.by_class_rep.emplace(0, PolyMatrix{{ParamPoly(1), var("c")}, {ParamPoly(0), ParamPoly(0)}});
    EXPECT_FALSE(pbw_check(act, k, 3)[3].flat);
}

TEST(Pbw, RandomInadmissibleFail)
{
    const auto act = sign_plane();
    const auto cls = classify_kappa(act);
    const auto base = sra_kappa(act, var("t"), std::vector<ParamPoly>{var("c")});
    std::mt19937_64 rng(20);
    for (int trial = 0; trial < 5; ++trial) {
        const auto k = base + random_inadmissible_perturbation(act, cls, rng);
        EXPECT_TRUE(k.is_equivariant(act.group));
        EXPECT_FALSE(pbw_check(act, k, 3)[3].flat) << trial;
    }
}

TEST(Pbw, WeylFlatUpToSix)
{
    const auto act = trivial_plane();
    KappaMap k;
    k.by_class_rep.emplace(0, detail::scaled(convert<ParamPoly>(act.form.matrix()), var("t")));
    for (const auto& v : pbw_check(act, k, 6))
        EXPECT_TRUE(v.flat) << v.degree;
}

TEST(Pbw, DegreeTwoIsAutomatic)
{
    for (const auto& c : corpus()) {
        const auto P = build_sra(c.act);
        const std::size_t d = c.act.dim();
        EXPECT_EQ(filtered_dim(P, 2), c.act.group.order() * (d + 1) * (d + 2) / 2) << c.name;
    }
}

TEST(Pbw, RequiresDegreeThree)
{
    EXPECT_THROW(pbw_check(sign_plane(), KappaMap{}, 2), std::invalid_argument);
}

TEST(Pbw, SkewFormFailingJacobiIsNotFlat)
{
    // kappa_s = c * omega on the fixed block is equivariant and skew but not a multiple of omega_s
    const SympAction act(generate_group({half_sign()}), darboux4());
    const auto s = index_of(act.group, half_sign());
    KappaMap k;
    k.by_class_rep.emplace(0, detail::scaled(convert<ParamPoly>(act.form.matrix()), var("t")));
    PolyMatrix fixed_block(4, 4);
    fixed_block(2, 3) = var("c");
    fixed_block(3, 2) = -var("c");
    k.by_class_rep.emplace(s, fixed_block);
    ASSERT_TRUE(k.is_skew());
    ASSERT_TRUE(k.is_equivariant(act.group));
    EXPECT_FALSE(is_admissible(classify_kappa(act), k));
    EXPECT_FALSE(pbw_check(act, k, 3)[3].flat);

    KappaMap good;
    good.by_class_rep.emplace(0, k.by_class_rep.at(0));
    good.by_class_rep.emplace(s, detail::scaled(convert<ParamPoly>(omega_s(half_sign(), act.form)), var("c")));
    EXPECT_TRUE(pbw_check(act, good, 3)[3].flat);
}
