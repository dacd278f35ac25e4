#include <gtest/gtest.h>

#include <random>

#include "deformlab/hochschild.hpp"

using namespace deformlab;

namespace {

using Vec = StructConstAlgebra::Vec;

StructConstAlgebra field() { return StructConstAlgebra({{{Cyclotomic(1)}}}, Vec{1}); }

StructConstAlgebra dual_numbers() { return StructConstAlgebra::truncated_polynomial(2); }

// Q[x,y]/(x,y)^2 with basis 1, x, y
StructConstAlgebra square_zero_plane()
{
    std::vector<std::vector<Vec>> m(3, std::vector<Vec>(3, Vec(3, Cyclotomic(0))));
    m[0][0][0] = m[0][1][1] = m[1][0][1] = m[0][2][2] = m[2][0][2] = 1;
    return StructConstAlgebra(std::move(m), Vec{1, 0, 0});
}

// upper triangular 2x2 matrices, basis E11, E12, E22
StructConstAlgebra upper_triangular()
{
    std::vector<std::vector<Vec>> m(3, std::vector<Vec>(3, Vec(3, Cyclotomic(0))));
    m[0][0][0] = 1; // E11 E11
    m[0][1][1] = 1; // E11 E12
    m[1][2][1] = 1; // E12 E22
    m[2][2][2] = 1; // E22 E22
    return StructConstAlgebra(std::move(m), Vec{1, 0, 1});
}

// Q x Q x Q
StructConstAlgebra diagonal3()
{
    std::vector<std::vector<Vec>> m(3, std::vector<Vec>(3, Vec(3, Cyclotomic(0))));
    for (int i = 0; i < 3; ++i)
        m[i][i][i] = 1;
    return StructConstAlgebra(std::move(m), Vec{1, 1, 1});
}

// Q[x]/(x^2) x Q
StructConstAlgebra dual_times_field()
{
    std::vector<std::vector<Vec>> m(3, std::vector<Vec>(3, Vec(3, Cyclotomic(0))));
    m[0][0][0] = m[0][1][1] = m[1][0][1] = 1;
    m[2][2][2] = 1;
    return StructConstAlgebra(std::move(m), Vec{1, 0, 1});
}

CycMatrix random_invertible(std::mt19937& rng, std::size_t d)
{
    std::uniform_int_distribution<int> c(-2, 2);
    for (;;) {
        CycMatrix P(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                P(i, j) = c(rng);
        if (rank(P) == d)
            return P;
    }
}

Cochain random_cochain(std::mt19937& rng, std::size_t arity, std::size_t d)
{
    std::uniform_int_distribution<int> c(-3, 3);
    Cochain f(arity, d);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = c(rng);
    return f;
}

// the random 3-dimensional corpus: fixed algebras under seeded changes of basis
std::vector<StructConstAlgebra> random_algebras(std::uint32_t seed)
{
    std::mt19937 rng(seed);
    std::vector<StructConstAlgebra> out;
    for (const auto& A : {diagonal3(), StructConstAlgebra::truncated_polynomial(3), dual_times_field(),
                          upper_triangular(), square_zero_plane()})
        out.push_back(A.change_basis(random_invertible(rng, 3)));
    return out;
}

} // namespace

TEST(Algebra, RejectsNonAssociativeConstants)
{
    std::vector<std::vector<Vec>> m(2, std::vector<Vec>(2, Vec(2, Cyclotomic(0))));
    m[0][0][0] = m[0][1][1] = m[1][0][1] = 1;
    m[1][1][1] = 1; // x^2 = x
    EXPECT_NO_THROW(StructConstAlgebra(m, Vec{1, 0}));
    m[1][1][0] = 1; // x^2 = 1 + x is still associative (commutative, one generator)
    EXPECT_NO_THROW(StructConstAlgebra(m, Vec{1, 0}));
    std::vector<std::vector<Vec>> bad(2, std::vector<Vec>(2, Vec(2, Cyclotomic(0))));
    bad[0][0][1] = 1; // e0 e0 = e1 and nothing else
    bad[1][0][0] = 1; // e1 e0 = e0
    EXPECT_THROW(StructConstAlgebra{bad}, std::invalid_argument);
    EXPECT_THROW(StructConstAlgebra(m, Vec{0, 1}), std::invalid_argument);
}

TEST(Differential, ZeroCochainInCommutativeAlgebra)
{
    const auto A = StructConstAlgebra::truncated_polynomial(3);
    Cochain m(0, 3);
    m[1] = 2;
    m[2] = -1;
    EXPECT_TRUE(differential(m, A).is_zero());
}

TEST(Differential, IdentityGivesMultiplication)
{
    const auto A = dual_numbers();
    Cochain id(1, 2);
    id.at(0, 0) = id.at(1, 1) = 1;
    const auto df = differential(id, A);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                EXPECT_EQ(df.at(df.index({i, j}), k), A.product(i, j)[k]);
}

TEST(Differential, SquaresToZeroOnRandomAlgebras)
{
    std::mt19937 rng(11);
    for (const auto& A : random_algebras(3))
        for (std::size_t arity = 0; arity <= 3; ++arity)
            for (int t = 0; t < 2; ++t) {
                const auto f = random_cochain(rng, arity, A.dim());
                EXPECT_TRUE(differential(differential(f, A), A).is_zero()) << "arity " << arity;
            }
}

TEST(Differential, DimensionMismatch)
{
    EXPECT_THROW(differential(Cochain(1, 3), dual_numbers()), dimension_mismatch);
}

TEST(Cohomology, Examples)
{
    EXPECT_EQ(cohomology_dims(field(), 3), (std::vector<std::size_t>{1, 0, 0, 0}));
    EXPECT_EQ(cohomology_dims(dual_numbers(), 3), (std::vector<std::size_t>{2, 1, 1, 1}));
    EXPECT_EQ(cohomology_dims(StructConstAlgebra::cyclic_group_algebra(2), 3),
              (std::vector<std::size_t>{2, 0, 0, 0}));
}

TEST(Cohomology, ZeroDegreeIsCenter)
{
    for (const auto& A : random_algebras(5))
        EXPECT_EQ(cohomology_dims(A, 1)[0], center_dim(A));
    EXPECT_EQ(center_dim(upper_triangular()), 1u);
    EXPECT_EQ(cohomology_dims(upper_triangular(), 2), (std::vector<std::size_t>{1, 0, 0}));
}

TEST(Cohomology, InvariantUnderChangeOfBasis)
{
    std::mt19937 rng(2);
    const auto A = dual_times_field();
    EXPECT_EQ(cohomology_dims(A, 2), cohomology_dims(A.change_basis(random_invertible(rng, 3)), 2));
}

TEST(Cohomology, SizeBudget)
{
    // 3^10 * 3 entries in arity 10 is over the default 65536
    EXPECT_THROW(cohomology_dims(diagonal3(), 9), size_budget_exceeded);
}

TEST(Deformation, ZeroCocycleGivesZeroSeries)
{
    const auto r = solve_deformation(dual_numbers(), Cochain(2, 2), 4);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.series.order, 4u);
    for (const auto& mu : r.series.maps)
        EXPECT_TRUE(mu.is_zero());
}

TEST(Deformation, DualNumbersToOrderFour)
{
    const auto A = dual_numbers();
    Cochain mu1(2, 2);
    mu1.at(mu1.index({1, 1}), 0) = 1; // mu1(x, x) = 1
    const auto r = solve_deformation(A, mu1, 4);
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.series.maps.size(), 4u);
    for (std::size_t k = 1; k <= 4; ++k)
        EXPECT_TRUE(associativity_residual(A, r.series.maps, k).is_zero()) << k;
    // Q[x]/(x^2 - hbar) needs nothing past first order
    for (std::size_t k = 2; k <= 4; ++k)
        EXPECT_TRUE(r.series.maps[k - 1].is_zero()) << k;
}

TEST(Deformation, TruncatedProductIsAssociative)
{
    // multiply with hbar-polynomial coefficients and compare (ab)c with a(bc)
    // modulo hbar^{N+1}, without going through the residual formula
    const auto A = dual_numbers();
    Cochain mu1(2, 2);
    mu1.at(mu1.index({1, 1}), 0) = 1;
    const std::size_t N = 4;
    const auto r = solve_deformation(A, mu1, N);
    ASSERT_TRUE(r.ok());
    const auto h = symbol("hbar");
    const auto H = ParamPoly::variable(h);
    using PVec = std::vector<ParamPoly>;
    auto star = [&](const PVec& a, const PVec& b) {
        PVec out(2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                const auto ab = a[i] * b[j];
                if (ab.is_zero())
                    continue;
                for (std::size_t k = 0; k < 2; ++k) {
                    ParamPoly c(A.product(i, j)[k]);
                    ParamPoly hp(1);
                    for (const auto& mu : r.series.maps) {
                        hp = hp * H;
                        c += hp * ParamPoly(mu.at(mu.index({i, j}), k));
                    }
                    out[k] += ab * c;
                }
            }
        return out;
    };
    auto truncate = [&](const ParamPoly& p) {
        ParamPoly out;
        for (const auto& [mono, c] : p.terms())
            if (mono.exponent(h) <= N)
                out += ParamPoly::from_term(mono, c);
        return out;
    };
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                PVec a(2), b(2), c(2);
                a[i] = b[j] = c[k] = ParamPoly(1);
                const auto left = star(star(a, b), c), right = star(a, star(b, c));
                for (std::size_t m = 0; m < 2; ++m)
                    EXPECT_EQ(truncate(left[m]), truncate(right[m]));
            }
}

TEST(Deformation, SemisimpleAlgebraAlwaysSucceeds)
{
    const auto A = StructConstAlgebra::cyclic_group_algebra(2);
    std::mt19937 rng(8);
    for (int t = 0; t < 3; ++t) {
        // every 2-cocycle is a coboundary here; build one as df
        const auto mu1 = differential(random_cochain(rng, 1, 2), A);
        const auto r = solve_deformation(A, mu1, 3);
        EXPECT_TRUE(r.ok());
        for (std::size_t k = 1; k <= 3; ++k)
            EXPECT_TRUE(associativity_residual(A, r.series.maps, k).is_zero());
    }
    EXPECT_EQ(cohomology_dims(A, 2)[2], 0u);
}

TEST(Deformation, RejectsNonCocycle)
{
    Cochain mu1(2, 2);
    mu1.at(mu1.index({0, 1}), 0) = 1; // mu1(1, x) = 1, so dmu1(1, 1, x) = -1
    EXPECT_THROW(solve_deformation(dual_numbers(), mu1, 2), not_a_cocycle);
}

TEST(Deformation, ObstructedAtOrderTwo)
{
    // x*y = hbar x: (x*y)*y - x*(y*y) = hbar^2 x cannot be absorbed
    const auto A = square_zero_plane();
    Cochain mu1(2, 3);
    mu1.at(mu1.index({1, 2}), 1) = 1;
    const auto r = solve_deformation(A, mu1, 3);
    ASSERT_FALSE(r.ok());
    const auto& obs = *r.obstruction;
    EXPECT_EQ(obs.order, 2u);
    EXPECT_FALSE(obs.vanishes);
    EXPECT_TRUE(differential(obs.cocycle, A).is_zero());
    EXPECT_EQ(obs.cocycle.at(obs.cocycle.index({1, 2, 2}), 1), Cyclotomic(1));
    EXPECT_EQ(obs.class_coords.size(), cohomology_dims(A, 3)[3]);
    EXPECT_EQ(r.series.order, 1u);
}

TEST(Deformation, CoboundaryShiftAgreesAtOrderTwo)
{
    std::mt19937 rng(4);
    const auto A = square_zero_plane();
    const auto Z = nullspace(differential_matrix(A, 2));
    std::uniform_int_distribution<int> c(-1, 1);
    int obstructed = 0;
    for (int t = 0; t < 10; ++t) {
        Cochain mu1(2, 3);
        for (const auto& z : Z) {
            const Cyclotomic k(c(rng));
            for (std::size_t i = 0; i < mu1.size(); ++i)
                mu1[i] += k * z[i];
        }
        const auto shifted = mu1 + differential(random_cochain(rng, 1, 3), A);
        const auto a = solve_deformation(A, mu1, 2);
        const auto b = solve_deformation(A, shifted, 2);
        EXPECT_EQ(a.ok(), b.ok()) << t;
        obstructed += !a.ok();
    }
    EXPECT_GT(obstructed, 0);
}

TEST(Poisson, Examples)
{
    const auto x = symbol("x"), y = symbol("y"), z = symbol("z");
    const auto X = ParamPoly::variable(x), Y = ParamPoly::variable(y), Z = ParamPoly::variable(z);
    EXPECT_TRUE(poisson_check({x, y}, {{ParamPoly(), ParamPoly(1)}, {ParamPoly(-1), ParamPoly()}}).ok);

    auto table = [&](const ParamPoly& xy, const ParamPoly& yz, const ParamPoly& zx) {
        return std::vector<std::vector<ParamPoly>>{{ParamPoly(), xy, -zx}, {-xy, ParamPoly(), yz}, {zx, -yz, ParamPoly()}};
    };
    EXPECT_TRUE(poisson_check({x, y, z}, table(Z, X, Y)).ok);

    const auto bad = poisson_check({x, y, z}, table(Z, X, X));
    EXPECT_FALSE(bad.ok);
    EXPECT_EQ(bad.triple, (std::array<std::size_t, 3>{0, 1, 2}));
    // {x,{y,z}} + {y,{z,x}} + {z,{x,y}} = 0 + {y,x} + 0 = -z
    EXPECT_EQ(bad.residual, -Z);
}

TEST(Poisson, QuadraticBracketsAndValidation)
{
    const auto x = symbol("x"), y = symbol("y");
    const auto X = ParamPoly::variable(x), Y = ParamPoly::variable(y);
    // any bracket in two variables satisfies Jacobi
    EXPECT_TRUE(poisson_check({x, y}, {{ParamPoly(), X * Y}, {-(X * Y), ParamPoly()}}).ok);
    EXPECT_THROW(poisson_check({x, y}, {{ParamPoly(), X}, {X, ParamPoly()}}), std::invalid_argument);
    EXPECT_THROW(poisson_check({x, y}, {{ParamPoly(1), X}, {-X, ParamPoly()}}), std::invalid_argument);
}
