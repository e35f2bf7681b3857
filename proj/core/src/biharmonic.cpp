#include "biharm/biharmonic.hpp"

#include <limits>

#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

namespace {

// Large saddle systems lose a digit or so in the LU; accept 1e-9 there.
constexpr std::size_t kLargeSystemDofs = 100000;
constexpr double kLargeSystemTolerance = 1e-9;

double effective_tolerance(double tol, std::size_t dofs)
{
    return dofs > kLargeSystemDofs ? std::max(tol, kLargeSystemTolerance) : tol;
}

double safe_norm(const Vector& v)
{
    return std::max(v.norm(), std::numeric_limits<double>::min());
}

void check_field(const TriMesh& mesh, const NodalField& f)
{
    if (f.size() != mesh.num_vertices()) {
        raise(ErrorCode::kDimensionMismatch,
              fmt::format("rhs has {} values, mesh has {} vertices", f.size(), mesh.num_vertices()));
    }
}

std::vector<Index> all_vertices(const TriMesh& mesh)
{
    std::vector<Index> ids(mesh.num_vertices());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = static_cast<Index>(i);
    }
    return ids;
}

} // namespace

SaddleSystem assemble_saddle_system(const TriMesh& mesh, const NodalField& f)
{
    check_field(mesh, f);
    SaddleSystem sys;
    sys.partition = partition_dofs(mesh);
    const auto all = all_vertices(mesh);
    const auto n_interior = static_cast<Index>(sys.partition.num_interior());
    const auto n = static_cast<Index>(mesh.num_vertices());

    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const SparseMatrix mass = assemble_mass(mesh, MassMode::kConsistent);
    const SparseMatrix coupling = stiffness.submatrix(sys.partition.interior, all);
    const SparseMatrix zero = SparseMatrix::from_triplets(n_interior, n_interior, {});
    SparseMatrix neg_mass = SparseMatrix::from_triplets(n, n, [&] {
        auto t = mass.triplets();
        for (auto& e : t) {
            e.value = -e.value;
        }
        return t;
    }());

    sys.matrix = block_matrix(zero, coupling, coupling.transpose(), neg_mass);
    sys.rhs = Vector::Zero(n_interior + n);
    sys.rhs.head(n_interior) = spmv(mass.submatrix(sys.partition.interior, all), f.values);
    return sys;
}

MixedSolution solve_mixed_dirichlet(const TriMesh& mesh, const NodalField& f, double tol, IndefiniteBackend backend)
{
    if (mesh.is_closed()) {
        raise(ErrorCode::kNoBoundary, "mesh has no boundary; use the closed-surface solver");
    }
    const SaddleSystem sys = assemble_saddle_system(mesh, f);
    const auto n_interior = static_cast<Index>(sys.partition.num_interior());
    const auto n = static_cast<Index>(mesh.num_vertices());
    const double effective_tol = effective_tolerance(tol, static_cast<std::size_t>(sys.matrix.rows()));

    const Solved solved = solve_symmetric_indefinite(sys.matrix, sys.rhs, effective_tol, backend);

    MixedSolution out;
    out.mass_mode = MassMode::kConsistent;
    out.solve_report = solved.report;
    out.u1 = NodalField(sys.partition.extend_by_zero(solved.x.head(n_interior)));
    out.u2 = NodalField(solved.x.tail(n));

    // Re-check both block equations independently of the solver's own report.
    const Vector residual = spmv(sys.matrix, solved.x) - sys.rhs;
    const double scale = safe_norm(sys.rhs);
    out.first_equation_residual = residual.head(n_interior).norm() / scale;
    out.second_equation_residual = residual.tail(n).norm() / scale;
    if (!(out.first_equation_residual <= effective_tol && out.second_equation_residual <= effective_tol)) {
        raise(ErrorCode::kNotConverged, fmt::format("mixed residuals {:.3e} / {:.3e} above tol {:.1e}",
                                                    out.first_equation_residual, out.second_equation_residual,
                                                    effective_tol));
    }
    return out;
}

SparseMatrix assemble_bordered_poisson(const SparseMatrix& stiffness, const SparseMatrix& mass)
{
    const Index n = stiffness.rows();
    const Vector weights = mass.row_sums();
    auto t = stiffness.triplets();
    for (Index i = 0; i < n; ++i) {
        t.push_back({i, n, weights[i]});
        t.push_back({n, i, weights[i]});
    }
    return SparseMatrix::from_triplets(n + 1, n + 1, t);
}

MixedSolution solve_mixed_closed(const TriMesh& mesh, const NodalField& f, double tol, MassMode mass_mode)
{
    if (!mesh.is_closed()) {
        raise(ErrorCode::kHasBoundary, "mesh has a boundary; use the clamped solver");
    }
    check_field(mesh, f);
    const auto n = static_cast<Index>(mesh.num_vertices());
    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const SparseMatrix mass = assemble_mass(mesh, mass_mode);
    const Vector weights = mass.row_sums();
    const double effective_tol = effective_tolerance(tol, static_cast<std::size_t>(n + 1));

    MixedSolution out;
    out.mass_mode = mass_mode;
    out.removed_mean = weights.dot(f.values) / weights.sum();
    const Vector f_projected = f.values.array() - out.removed_mean;

    const SymmetricIndefiniteSolver solver(assemble_bordered_poisson(stiffness, mass));
    const auto solve_zero_mean = [&](const Vector& load) {
        Vector rhs = Vector::Zero(n + 1);
        rhs.head(n) = load;
        return solver.solve(rhs, effective_tol);
    };

    const Vector load2 = spmv(mass, f_projected);
    const Solved second = solve_zero_mean(load2);
    out.u2 = NodalField(second.x.head(n));
    const Vector load1 = spmv(mass, out.u2.values);
    const Solved first = solve_zero_mean(load1);
    out.u1 = NodalField(first.x.head(n));

    out.solve_report.method = SolveMethod::kSparseLU;
    out.solve_report.iterations = second.report.iterations + first.report.iterations;
    out.solve_report.relative_residual = std::max(second.report.relative_residual, first.report.relative_residual);

    out.first_equation_residual = (spmv(stiffness, out.u2.values) - load2).norm() / safe_norm(load2);
    out.second_equation_residual = (spmv(stiffness, out.u1.values) - load1).norm() / safe_norm(load1);
    if (!(out.first_equation_residual <= effective_tol && out.second_equation_residual <= effective_tol)) {
        raise(ErrorCode::kNotConverged, fmt::format("closed-surface residuals {:.3e} / {:.3e} above tol {:.1e}",
                                                    out.first_equation_residual, out.second_equation_residual,
                                                    effective_tol));
    }
    return out;
}

LumpedSchurSystem assemble_lumped_schur_system(const TriMesh& mesh, const NodalField& f)
{
    check_field(mesh, f);
    LumpedSchurSystem sys;
    sys.partition = partition_dofs(mesh);
    const auto all = all_vertices(mesh);
    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const Vector lumped = assemble_mass(mesh, MassMode::kLumped).diagonal_entries();

    const SparseMatrix coupling = stiffness.submatrix(sys.partition.interior, all);
    const SparseMatrix scaled = multiply(coupling, SparseMatrix::diagonal(lumped.cwiseInverse()));
    sys.matrix = multiply(scaled, coupling.transpose());
    sys.rhs = sys.partition.restrict_to_interior(lumped.cwiseProduct(f.values));
    return sys;
}

MixedSolution solve_mixed_lumped_schur(const TriMesh& mesh, const NodalField& f, double tol)
{
    if (mesh.is_closed()) {
        raise(ErrorCode::kNoBoundary, "mesh has no boundary; use the closed-surface solver");
    }
    const LumpedSchurSystem sys = assemble_lumped_schur_system(mesh, f);
    const auto all = all_vertices(mesh);
    const SparseMatrix stiffness = assemble_stiffness(mesh);
    const Vector lumped = assemble_mass(mesh, MassMode::kLumped).diagonal_entries();
    const SparseMatrix coupling_t = stiffness.submatrix(all, sys.partition.interior);

    // The Schur complement is conditioned like a bilaplacian, so on fine meshes
    // its residual cannot reach tol in double precision. The equivalent lumped
    // saddle system, whose elimination is exactly this one, is solved instead.
    Solved solved;
    try {
        solved = solve_spd(sys.matrix, sys.rhs, tol);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotConverged) {
            throw;
        }
        const auto ni = static_cast<Index>(sys.partition.num_interior());
        const auto n = static_cast<Index>(mesh.num_vertices());
        const SparseMatrix coupling = stiffness.submatrix(sys.partition.interior, all);
        const SparseMatrix saddle = block_matrix(SparseMatrix::from_triplets(ni, ni, {}), coupling, coupling_t,
                                                 SparseMatrix::diagonal(-lumped));
        Vector rhs = Vector::Zero(ni + n);
        rhs.head(ni) = sys.rhs;
        solved = solve_symmetric_indefinite(saddle, rhs, tol, IndefiniteBackend::kSparseLU);
        solved.x.conservativeResize(ni);
    }

    MixedSolution out;
    out.mass_mode = MassMode::kLumped;
    out.solve_report = solved.report;
    out.u1 = NodalField(sys.partition.extend_by_zero(solved.x));
    out.u2 = NodalField(spmv(coupling_t, solved.x).cwiseQuotient(lumped));

    const SparseMatrix coupling = stiffness.submatrix(sys.partition.interior, all);
    const double scale = safe_norm(sys.rhs);
    out.first_equation_residual = (spmv(coupling, out.u2.values) - sys.rhs).norm() / scale;
    out.second_equation_residual = (spmv(coupling_t, solved.x) - lumped.cwiseProduct(out.u2.values)).norm() / scale;
    return out;
}

} // namespace biharm
