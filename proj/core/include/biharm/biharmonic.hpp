#pragma once

#include "biharm/fem.hpp"
#include "biharm/mesh.hpp"
#include "biharm/solvers.hpp"
#include "biharm/sparse.hpp"

namespace biharm {

/// Discrete mixed solution: u1 approximates u (zero on the boundary), u2
/// approximates its Laplacian.
struct MixedSolution {
    NodalField u1;
    NodalField u2;
    SolveReport solve_report;
    MassMode mass_mode = MassMode::kConsistent;
    /// Relative residuals of the two variational equations, recomputed by
    /// explicit products after the solve.
    double first_equation_residual = 0.0;
    double second_equation_residual = 0.0;
    /// Closed meshes only: M-weighted mean subtracted from f.
    double removed_mean = 0.0;
};

/// Saddle-point system of the clamped problem,
///
///     [ 0   B ] [u1]   [ M_I f ]
///     [ B^T -M ] [u2] = [   0   ],   B = S[interior, :],
///
/// with u1 on interior dofs and u2 on all vertices.
struct SaddleSystem {
    SparseMatrix matrix;
    Vector rhs;
    DofPartition partition;
};

SaddleSystem assemble_saddle_system(const TriMesh& mesh, const NodalField& f);

/// Clamped problem (u = du/dn = 0) on a mesh with boundary.
///
/// The Dirichlet condition comes from eliminating boundary dofs of u1. The
/// Neumann condition is never imposed explicitly: it is carried by testing the
/// second equation against every hat function, boundary ones included.
///
/// Throws kNoBoundary for closed meshes and kNotConverged from the solver.
MixedSolution solve_mixed_dirichlet(const TriMesh& mesh, const NodalField& f, double tol = kDefaultTolerance,
                                    IndefiniteBackend backend = IndefiniteBackend::kSparseLU);

/// Bordered Poisson matrix [[S, M 1], [(M 1)^T, 0]] used for zero-mean solves.
SparseMatrix assemble_bordered_poisson(const SparseMatrix& stiffness, const SparseMatrix& mass);

/// Closed surface: two Poisson solves S u2 = M f and S u1 = M u2, each with
/// the M-weighted mean pinned to zero by a Lagrange multiplier. f is first
/// projected to zero mean; the removed mean is reported.
///
/// Throws kHasBoundary for meshes with boundary.
MixedSolution solve_mixed_closed(const TriMesh& mesh, const NodalField& f, double tol = kDefaultTolerance,
                                 MassMode mass_mode = MassMode::kConsistent);

/// Lumped-mass elimination: u1 solves B M_L^-1 B^T u1 = (M_L f)_I with
/// conjugate gradients, then u2 = M_L^-1 B^T u1.
MixedSolution solve_mixed_lumped_schur(const TriMesh& mesh, const NodalField& f, double tol = kDefaultTolerance);

/// The SPD system solved by solve_mixed_lumped_schur, exposed for checking.
struct LumpedSchurSystem {
    SparseMatrix matrix;
    Vector rhs;
    DofPartition partition;
};

LumpedSchurSystem assemble_lumped_schur_system(const TriMesh& mesh, const NodalField& f);

} // namespace biharm
