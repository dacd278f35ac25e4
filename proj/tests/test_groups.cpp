#include <gtest/gtest.h>

#include <set>

#include "deformlab/groups.hpp"

using namespace deformlab;

namespace {

CycMatrix minus_identity(std::size_t d) { return -CycMatrix::identity(d); }

struct Named {
    std::string name;
    FiniteGroup group;
};

std::vector<Named> corpus()
{
    std::vector<Named> c;
    c.push_back({"trivial", trivial_group(2)});
    c.push_back({"pm_identity", generate_group({minus_identity(2)})});
    c.push_back({"cyclic3_sl2", generate_group({cyclic_sl2_generator(3)})});
    c.push_back({"cyclic5_sl2", generate_group({cyclic_sl2_generator(5)})});
    c.push_back({"quaternion", generate_group(quaternion_generators())});
    c.push_back({"swap", generate_group({swap_matrix()})});
    c.push_back({"dihedral8", generate_group(dihedral8_generators())});
    c.push_back({"cyclic4_line", generate_group({cyclic_line_generator(4)})});
    c.push_back({"s3_doubled", generate_group({symplectic_double(CycMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}),
                                               symplectic_double(CycMatrix{{1, 0, 0}, {0, 0, 1}, {0, 1, 0}})})});
    return c;
}

} // namespace

TEST(GenerateGroup, Examples)
{
    EXPECT_EQ(generate_group({minus_identity(2)}).order(), 2u);
    EXPECT_EQ(generate_group({cyclic_sl2_generator(3)}).order(), 3u);
    EXPECT_THROW(generate_group({rotation(7)}, 5), order_bound_exceeded);
    EXPECT_EQ(generate_group({rotation(7)}).order(), 7u);
}

TEST(GenerateGroup, KnownOrders)
{
    EXPECT_EQ(generate_group(quaternion_generators()).order(), 8u);
    EXPECT_EQ(generate_group(dihedral8_generators()).order(), 8u);
    EXPECT_EQ(generate_group({cyclic_sl2_generator(12)}).order(), 12u);
}

TEST(GenerateGroup, RejectsSingularGenerator)
{
    EXPECT_THROW(generate_group({CycMatrix{{1, 0}, {0, 0}}}), division_by_zero);
    EXPECT_THROW(generate_group({CycMatrix{{1, 0}, {0, 1}}, CycMatrix{{1}}}), dimension_mismatch);
}

TEST(GenerateGroup, LeftMultiplicationPermutesElements)
{
    for (const auto& [name, G] : corpus()) {
        for (std::size_t a = 0; a < G.order(); ++a) {
            std::set<std::size_t> image;
            for (std::size_t b = 0; b < G.order(); ++b) {
                image.insert(G.mult(a, b));
                ASSERT_EQ(G.matrix(a) * G.matrix(b), G.matrix(G.mult(a, b))) << name;
            }
            EXPECT_EQ(image.size(), G.order()) << name;
            EXPECT_EQ(G.mult(a, G.inverse(a)), G.identity()) << name;
            EXPECT_EQ(G.mult(G.identity(), a), a) << name;
        }
    }
}

TEST(ConjugacyClasses, Examples)
{
    EXPECT_EQ(conjugacy_classes(trivial_group(2)).size(), 1u);
    for (int n : {2, 3, 4, 6})
        EXPECT_EQ(conjugacy_classes(generate_group({cyclic_sl2_generator(n)})).size(), static_cast<std::size_t>(n));
    EXPECT_EQ(conjugacy_classes(generate_group(quaternion_generators())).size(), 5u);
}

TEST(ConjugacyClasses, PartitionAndClassFunction)
{
    for (const auto& [name, G] : corpus()) {
        std::size_t total = 0;
        for (const auto& c : conjugacy_classes(G)) {
            total += c.size();
            const auto r = fixed_rank(G.matrix(c.front()));
            for (auto x : c)
                EXPECT_EQ(fixed_rank(G.matrix(x)), r) << name;
        }
        EXPECT_EQ(total, G.order()) << name;
    }
}

TEST(FixedRank, Examples)
{
    EXPECT_EQ(fixed_rank(CycMatrix::identity(2)), 0u);
    EXPECT_EQ(fixed_rank(minus_identity(2)), 2u);
    EXPECT_EQ(fixed_rank(swap_matrix()), 1u);
}

TEST(SymplecticReflections, Examples)
{
    const auto omega = SympForm::standard(2);
    EXPECT_EQ(symplectic_reflection_classes(generate_group({minus_identity(2)}), omega).size(), 1u);
    EXPECT_EQ(symplectic_reflection_classes(trivial_group(2), omega).size(), 0u);
    EXPECT_EQ(symplectic_reflection_classes(generate_group({cyclic_sl2_generator(3)}), omega).size(), 2u);
}

TEST(SymplecticReflections, RejectsNonSymplecticAction)
{
    const auto G = generate_group({CycMatrix{{-1, 0}, {0, 1}}});
    EXPECT_THROW(symplectic_reflection_classes(G, SympForm::standard(2)), not_symplectic);
    EXPECT_THROW(SympForm(CycMatrix{{1, 0}, {0, 1}}), not_symplectic);
    EXPECT_THROW(SympForm(CycMatrix{{0, 0}, {0, 0}}), not_symplectic);
}

TEST(SymplecticReflections, CountMatchesDegreeTwoCohomology)
{
    for (const auto& [name, G] : corpus()) {
        if (G.dim() % 2 != 0)
            continue;
        const auto omega = SympForm::standard(G.dim());
        bool symplectic = true;
        for (const auto& e : G.elements())
            symplectic = symplectic && omega.preserved_by(e.matrix);
        if (!symplectic)
            continue;
        EXPECT_EQ(symplectic_reflection_classes(G, omega).size(), orbifold_cohomology_dims(G)[2]) << name;
    }
}

TEST(ReflectionData, Examples)
{
    const auto s2 = reflection_data(generate_group({swap_matrix()}));
    ASSERT_EQ(s2.size(), 1u);
    EXPECT_EQ(s2[0].hyperplane_form, (std::vector<Cyclotomic>{1, -1}));
    EXPECT_EQ(s2[0].stabilizer_order, 2u);

    EXPECT_TRUE(reflection_data(trivial_group(2)).empty());

    const auto d8 = reflection_data(generate_group(dihedral8_generators()));
    EXPECT_EQ(d8.size(), 4u);
    std::set<std::size_t> orbits;
    for (const auto& r : d8) {
        orbits.insert(r.orbit);
        EXPECT_EQ(r.stabilizer_order, 2u);
    }
    EXPECT_EQ(orbits.size(), 2u);
}

TEST(ReflectionData, CyclicLineHasOneHyperplane)
{
    const auto data = reflection_data(generate_group({cyclic_line_generator(4)}));
    ASSERT_EQ(data.size(), 1u);
    EXPECT_EQ(data[0].stabilizer_order, 4u);
}

TEST(ReflectionData, StabilizerFixesHyperplanePointwise)
{
    for (const auto& [name, G] : corpus()) {
        for (const auto& r : reflection_data(G)) {
            // basis of ker(alpha)
            CycMatrix a(1, G.dim());
            for (std::size_t j = 0; j < G.dim(); ++j)
                a(0, j) = r.hyperplane_form[j];
            for (auto h : r.stabilizer) {
                const auto m = G.matrix(h) - CycMatrix::identity(G.dim());
                for (const auto& v : nullspace(a))
                    for (const auto& x : mat_vec(m, v))
                        EXPECT_TRUE(x.is_zero()) << name;
            }
            // cyclic: some element generates the stabilizer
            bool cyclic = false;
            for (auto h : r.stabilizer)
                cyclic = cyclic || G.element_order(h) == r.stabilizer_order;
            EXPECT_TRUE(cyclic) << name;
        }
    }
}

TEST(OrbifoldCohomology, Examples)
{
    EXPECT_EQ(orbifold_cohomology_dims(generate_group({minus_identity(2)})), (std::vector<std::size_t>{1, 0, 1}));
    EXPECT_EQ(orbifold_cohomology_dims(trivial_group(4)), (std::vector<std::size_t>{1, 0, 0, 0, 0}));
    EXPECT_EQ(orbifold_cohomology_dims(generate_group({cyclic_sl2_generator(3)})), (std::vector<std::size_t>{1, 0, 2}));
    // S3 on C^3 + dual: identity, transpositions (rank 2), 3-cycles (rank 4)
    EXPECT_EQ(orbifold_cohomology_dims(corpus().back().group), (std::vector<std::size_t>{1, 0, 1, 0, 1, 0, 0}));
}
