#include <random>

#include <gtest/gtest.h>

#include "biharm/solvers.hpp"
#include "error_code.hpp"

namespace biharm {
namespace {

// 1D Dirichlet Laplacian, SPD.
SparseMatrix laplacian_1d(Index n)
{
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i + 1 < n) {
            t.push_back({i, i + 1, -1.0});
            t.push_back({i + 1, i, -1.0});
        }
    }
    return SparseMatrix::from_triplets(n, n, t);
}

// [[A, B^T], [B, 0]]: symmetric indefinite with a full-rank constraint block.
SparseMatrix saddle(Index n, Index m)
{
    std::vector<Triplet> t = laplacian_1d(n).triplets();
    for (Index k = 0; k < m; ++k) {
        t.push_back({n + k, 2 * k, 1.0});
        t.push_back({2 * k, n + k, 1.0});
        t.push_back({n + k, 2 * k + 1, -0.5});
        t.push_back({2 * k + 1, n + k, -0.5});
    }
    return SparseMatrix::from_triplets(n + m, n + m, t);
}

Vector random_vector(Index n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        v[i] = d(rng);
    }
    return v;
}

TEST(Solvers, DenseOracleSolvesSmallSystem)
{
    DenseMatrix a(3, 3);
    a << 0, 2, 1, 1, 1, 1, 4, 0, -1;
    const Vector x_true(Vector::LinSpaced(3, 1.0, 3.0));
    const Vector x = dense_solve_oracle(a, a * x_true);
    EXPECT_LT((x - x_true).norm(), 1e-14);
}

TEST(Solvers, DenseOracleRejectsSingular)
{
    DenseMatrix a(2, 2);
    a << 1, 2, 2, 4;
    EXPECT_EQ(testing::code_of([&] { (void)dense_solve_oracle(a, Vector::Ones(2)); }), ErrorCode::kSingular);
}

TEST(Solvers, ConjugateGradientMatchesOracle)
{
    const SparseMatrix a = laplacian_1d(200);
    const Vector b = random_vector(200, 1);
    const Solved s = solve_spd(a, b, 1e-12);
    EXPECT_EQ(s.report.method, SolveMethod::kConjugateGradient);
    EXPECT_LE(s.report.relative_residual, 1e-12);
    EXPECT_NEAR(s.report.relative_residual, relative_residual(a, s.x, b), 1e-15);
    const Vector ref = dense_solve_oracle(a.to_dense(), b);
    EXPECT_LT((s.x - ref).norm() / ref.norm(), 1e-9);
}

TEST(Solvers, ConjugateGradientOnSemidefiniteConsistentSystem)
{
    // Neumann 1D Laplacian: kernel = constants; rhs has zero mean.
    std::vector<Triplet> t = laplacian_1d(50).triplets();
    t.push_back({0, 0, -1.0});
    t.push_back({49, 49, -1.0});
    const SparseMatrix a = SparseMatrix::from_triplets(50, 50, t);
    Vector b = random_vector(50, 2);
    b.array() -= b.mean();
    const Solved s = solve_spd(a, b, 1e-10);
    EXPECT_LE(relative_residual(a, s.x, b), 1e-10);
}

TEST(Solvers, ZeroRhsGivesZero)
{
    const Solved s = solve_spd(laplacian_1d(10), Vector::Zero(10));
    EXPECT_EQ(s.x.norm(), 0.0);
    EXPECT_EQ(s.report.relative_residual, 0.0);
}

TEST(Solvers, ConjugateGradientReportsNonConvergence)
{
    // Inconsistent system: b outside the range of a singular matrix.
    const SparseMatrix a = SparseMatrix::diagonal(Vector::LinSpaced(4, 0.0, 3.0));
    EXPECT_EQ(testing::code_of([&] { (void)solve_spd(a, Vector::Ones(4)); }), ErrorCode::kNotConverged);
}

TEST(Solvers, MinresMatchesOracleOnSaddle)
{
    const SparseMatrix a = saddle(60, 20);
    const Vector b = random_vector(80, 3);
    const Solved s = solve_minres(a, b, 1e-11);
    EXPECT_EQ(s.report.method, SolveMethod::kMinres);
    EXPECT_LE(relative_residual(a, s.x, b), 1e-11);
    const Vector ref = dense_solve_oracle(a.to_dense(), b);
    EXPECT_LT((s.x - ref).norm() / ref.norm(), 1e-7);
}

TEST(Solvers, SparseLuMatchesOracleAndReusesFactorization)
{
    const SparseMatrix a = saddle(40, 15);
    const SymmetricIndefiniteSolver solver(a);
    for (unsigned seed : {4u, 5u, 6u}) {
        const Vector b = random_vector(55, seed);
        const Solved s = solver.solve(b);
        EXPECT_EQ(s.report.method, SolveMethod::kSparseLU);
        EXPECT_LE(s.report.relative_residual, 1e-10);
        const Vector ref = dense_solve_oracle(a.to_dense(), b);
        EXPECT_LT((s.x - ref).norm() / ref.norm(), 1e-10);
    }
}

TEST(Solvers, SparseLuRejectsSingular)
{
    const SparseMatrix a = SparseMatrix::diagonal(Vector::LinSpaced(4, 0.0, 3.0));
    EXPECT_EQ(testing::code_of([&] { SymmetricIndefiniteSolver s(a); }), ErrorCode::kSingular);
}

TEST(Solvers, BackendsAgree)
{
    const SparseMatrix a = saddle(30, 10);
    const Vector b = random_vector(40, 8);
    const Vector lu = solve_symmetric_indefinite(a, b, 1e-11, IndefiniteBackend::kSparseLU).x;
    const Vector mr = solve_symmetric_indefinite(a, b, 1e-11, IndefiniteBackend::kMinres).x;
    EXPECT_LT((lu - mr).norm() / lu.norm(), 1e-8);
}

} // namespace
} // namespace biharm
