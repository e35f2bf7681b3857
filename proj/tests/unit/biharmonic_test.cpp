#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "biharm/biharmonic.hpp"
#include "corpus.hpp"
#include "error_code.hpp"

namespace biharm {
namespace {

double rel_diff(const Vector& a, const Vector& b)
{
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

NodalField smooth_load(const TriMesh& mesh)
{
    return interpolate(mesh, [](const Point3& p) { return 1.0 + p.x() - 0.5 * p.y() * p.z() + p.z() * p.z(); });
}

// Dense reference for the closed problem: the same two bordered solves,
// done by partial-pivot LU.
std::pair<Vector, Vector> dense_closed_reference(const TriMesh& mesh, const NodalField& f)
{
    const SparseMatrix s = assemble_stiffness(mesh);
    const SparseMatrix m = assemble_mass(mesh);
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    const DenseMatrix bordered = assemble_bordered_poisson(s, m).to_dense();
    const Vector w = m.row_sums();
    const Vector f0 = f.values.array() - w.dot(f.values) / w.sum();
    Vector rhs = Vector::Zero(n + 1);
    rhs.head(n) = spmv(m, f0);
    const Vector u2 = dense_solve_oracle(bordered, rhs).head(n);
    rhs.head(n) = spmv(m, u2);
    const Vector u1 = dense_solve_oracle(bordered, rhs).head(n);
    return {u1, u2};
}

TEST(Biharmonic, SaddleSystemIsSymmetricWithExpectedBlocks)
{
    const TriMesh mesh = gen_cap_mesh(1.0, 3);
    const SaddleSystem sys = assemble_saddle_system(mesh, smooth_load(mesh));
    const auto ni = static_cast<Index>(sys.partition.num_interior());
    const auto n = static_cast<Index>(mesh.num_vertices());
    ASSERT_EQ(sys.matrix.rows(), ni + n);
    EXPECT_TRUE(sys.matrix.is_symmetric(0.0));
    const DenseMatrix a = sys.matrix.to_dense();
    EXPECT_EQ(a.topLeftCorner(ni, ni).norm(), 0.0);
    EXPECT_LT((a.bottomRightCorner(n, n) + assemble_mass(mesh).to_dense()).norm(), 1e-15);
    const SparseMatrix s = assemble_stiffness(mesh);
    const std::vector<Index> all = [&] {
        std::vector<Index> v(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
        return v;
    }();
    EXPECT_LT((a.topRightCorner(ni, n) - s.submatrix(sys.partition.interior, all).to_dense()).norm(), 1e-15);
}

TEST(Biharmonic, OracleEquivalenceOnSmallCorpus)
{
    int checked = 0;
    for (const auto& [name, mesh] : testing::small_corpus()) {
        const NodalField f = smooth_load(mesh);
        if (mesh.is_closed()) {
            if (mesh.num_vertices() + 1 > 300) continue;
            const MixedSolution sol = solve_mixed_closed(mesh, f);
            const auto [u1, u2] = dense_closed_reference(mesh, f);
            EXPECT_LE(rel_diff(sol.u1.values, u1), 1e-8) << name;
            EXPECT_LE(rel_diff(sol.u2.values, u2), 1e-8) << name;
        } else {
            const SaddleSystem sys = assemble_saddle_system(mesh, f);
            if (sys.matrix.rows() > 300 || sys.partition.num_interior() == 0) continue;
            const Vector ref = dense_solve_oracle(sys.matrix.to_dense(), sys.rhs);
            const auto ni = static_cast<Eigen::Index>(sys.partition.num_interior());
            for (IndefiniteBackend backend : {IndefiniteBackend::kSparseLU, IndefiniteBackend::kMinres}) {
                const MixedSolution sol = solve_mixed_dirichlet(mesh, f, 1e-12, backend);
                EXPECT_LE(rel_diff(sys.partition.restrict_to_interior(sol.u1.values), ref.head(ni)), 1e-8) << name;
                EXPECT_LE(rel_diff(sol.u2.values, ref.tail(ref.size() - ni)), 1e-8) << name;
            }
        }
        ++checked;
    }
    EXPECT_GE(checked, 8);
}

TEST(Biharmonic, ResidualsAreReportedAndSmall)
{
    const TriMesh mesh = gen_cap_mesh(1.0, 8);
    const MixedSolution sol = solve_mixed_dirichlet(mesh, smooth_load(mesh));
    EXPECT_LE(sol.first_equation_residual, 1e-10);
    EXPECT_LE(sol.second_equation_residual, 1e-10);
    EXPECT_LE(sol.solve_report.relative_residual, 1e-10);
    EXPECT_EQ(sol.mass_mode, MassMode::kConsistent);
    for (Index b : mesh.boundary_vertices()) {
        EXPECT_EQ(sol.u1.values[b], 0.0);
    }
}

TEST(Biharmonic, DiscreteLaplacianOfU1IsU2)
{
    const TriMesh mesh = gen_schwarz_lantern(12, 6);
    const MixedSolution sol = solve_mixed_dirichlet(mesh, smooth_load(mesh));
    const NodalField lap = discrete_laplacian(mesh, sol.u1, 1e-12);
    EXPECT_LE(rel_diff(lap.values, sol.u2.values), 1e-8);
}

TEST(Biharmonic, LanternCentreApproachesExactValue)
{
    // u = (z^2 - a^2)^2 with f = 24, so u(z = 0) = a^4 = 1 for H = 2.
    double previous = 1.0;
    for (int n : {8, 16, 32}) {
        const TriMesh mesh = gen_schwarz_lantern(2 * n, n);
        const NodalField f(Vector::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), 24.0));
        const MixedSolution sol = solve_mixed_dirichlet(mesh, f);
        double centre = 0.0;
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
            if (std::abs(mesh.vertices()[v].z()) < 1e-12) {
                centre = std::max(centre, sol.u1.values[static_cast<Eigen::Index>(v)]);
            }
        }
        const double err = std::abs(centre - 1.0);
        EXPECT_LT(err, previous) << n;
        previous = err;
    }
    EXPECT_LT(previous, 0.01);
}

TEST(Biharmonic, LumpedSchurMatchesItsOwnDenseSystem)
{
    const TriMesh mesh = gen_cap_mesh(1.0, 4);
    const NodalField f = smooth_load(mesh);
    const LumpedSchurSystem sys = assemble_lumped_schur_system(mesh, f);
    EXPECT_TRUE(sys.matrix.is_symmetric(1e-14 * sys.matrix.frobenius_norm()));
    const MixedSolution sol = solve_mixed_lumped_schur(mesh, f, 1e-12);
    EXPECT_EQ(sol.mass_mode, MassMode::kLumped);
    const Vector ref = dense_solve_oracle(sys.matrix.to_dense(), sys.rhs);
    EXPECT_LE(rel_diff(sys.partition.restrict_to_interior(sol.u1.values), ref), 1e-8);
    // u2 is the lumped discrete Laplacian of u1.
    const Vector lumped = assemble_mass(mesh, MassMode::kLumped).diagonal_entries();
    const Vector su1 = spmv(assemble_stiffness(mesh), sol.u1.values);
    EXPECT_LE(rel_diff(lumped.cwiseProduct(sol.u2.values), su1), 1e-8);
}

TEST(Biharmonic, LumpedAndConsistentAgreeUnderRefinement)
{
    double previous = std::numeric_limits<double>::infinity();
    for (int rings : {4, 8, 16}) {
        const TriMesh mesh = gen_cap_mesh(1.0, rings);
        const NodalField f = smooth_load(mesh);
        const Vector a = solve_mixed_dirichlet(mesh, f).u1.values;
        const Vector b = solve_mixed_lumped_schur(mesh, f).u1.values;
        const double d = rel_diff(b, a);
        EXPECT_LT(d, previous);
        previous = d;
    }
}

TEST(Biharmonic, LumpedSchurMeetsToleranceOnFineMesh)
{
    // 12k vertices: Jacobi CG on the Schur complement stalls above 1e-10.
    const TriMesh mesh = gen_cap_mesh(std::numbers::pi / 3.0, 64);
    const NodalField f = smooth_load(mesh);
    const MixedSolution sol = solve_mixed_lumped_schur(mesh, f, 1e-10);
    EXPECT_EQ(sol.mass_mode, MassMode::kLumped);
    EXPECT_LE(sol.solve_report.relative_residual, 1e-10);
    EXPECT_LE(sol.first_equation_residual, 1e-9);
    EXPECT_LE(sol.second_equation_residual, 1e-9);
    EXPECT_LE(rel_diff(sol.u1.values, solve_mixed_dirichlet(mesh, f).u1.values), 1e-2);
}

TEST(Biharmonic, ClosedSolutionHasZeroMeanAndReportsRemovedMean)
{
    const TriMesh mesh = gen_icosphere(2);
    const NodalField f = interpolate(mesh, [](const Point3& p) { return 3.0 + p.z(); });
    const MixedSolution sol = solve_mixed_closed(mesh, f);
    const Vector w = assemble_mass(mesh).row_sums();
    EXPECT_NEAR(sol.removed_mean, 3.0, 1e-12);
    EXPECT_NEAR(w.dot(sol.u1.values), 0.0, 1e-12);
    EXPECT_NEAR(w.dot(sol.u2.values), 0.0, 1e-12);
    EXPECT_LE(sol.first_equation_residual, 1e-10);
    EXPECT_LE(sol.second_equation_residual, 1e-10);
}

TEST(Biharmonic, ClosedConstantLoadGivesZero)
{
    const TriMesh mesh = testing::tetrahedron();
    const MixedSolution sol = solve_mixed_closed(mesh, NodalField(Vector::Ones(4)));
    EXPECT_LE(sol.u1.values.norm(), 1e-14);
    EXPECT_NEAR(sol.removed_mean, 1.0, 1e-15);
}

TEST(Biharmonic, RejectsWrongTopologyAndSizes)
{
    const TriMesh closed = gen_icosphere(0);
    const TriMesh open = gen_cap_mesh(1.0, 3);
    const NodalField fc(Vector::Ones(static_cast<Eigen::Index>(closed.num_vertices())));
    const NodalField fo(Vector::Ones(static_cast<Eigen::Index>(open.num_vertices())));
    EXPECT_EQ(testing::code_of([&] { (void)solve_mixed_dirichlet(closed, fc); }), ErrorCode::kNoBoundary);
    EXPECT_EQ(testing::code_of([&] { (void)solve_mixed_lumped_schur(closed, fc); }), ErrorCode::kNoBoundary);
    EXPECT_EQ(testing::code_of([&] { (void)solve_mixed_closed(open, fo); }), ErrorCode::kHasBoundary);
    EXPECT_EQ(testing::code_of([&] { (void)solve_mixed_dirichlet(open, fc); }), ErrorCode::kDimensionMismatch);
}

} // namespace
} // namespace biharm
