#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "biharm/mesh.hpp"
#include "biharm/solvers.hpp"
#include "biharm/sparse.hpp"

namespace biharm {

enum class MassMode {
    kConsistent,
    kLumped,
};

std::string_view to_string(MassMode mode);

/// Split of mesh vertices into free (interior) and constrained (boundary)
/// degrees of freedom. Both lists are sorted.
struct DofPartition {
    std::vector<Index> interior;
    std::vector<Index> boundary;
    /// Vertex id -> position in `interior`, or -1 for boundary vertices.
    std::vector<Index> full_to_interior;

    [[nodiscard]] std::size_t num_interior() const { return interior.size(); }

    /// Restriction of a full-length vector to the interior entries.
    [[nodiscard]] Vector restrict_to_interior(const Vector& full) const;
    /// Interior values placed into a full-length vector, zero on the boundary.
    [[nodiscard]] Vector extend_by_zero(const Vector& interior_values) const;
};

/// Piecewise-linear field given by its vertex values.
struct NodalField {
    Vector values;
    /// Vertex count of the mesh the field was sampled on.
    std::size_t mesh_vertices = 0;

    NodalField() = default;
    explicit NodalField(Vector v)
        : values(std::move(v))
        , mesh_vertices(static_cast<std::size_t>(values.size()))
    {
    }

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

using ScalarFunction = std::function<double(const Point3&)>;

/// P1 stiffness (cotangent) matrix: S_ij = -(cot a_ij + cot b_ij) / 2.
///
/// Triangle contributions are accumulated in face order, so the result is
/// bit-reproducible.
SparseMatrix assemble_stiffness(const TriMesh& mesh);

/// P1 mass matrix, exact (consistent) or row-sum lumped.
SparseMatrix assemble_mass(const TriMesh& mesh, MassMode mode = MassMode::kConsistent);

DofPartition partition_dofs(const TriMesh& mesh);

NodalField interpolate(const TriMesh& mesh, const ScalarFunction& fn);

/// Gradient of the linear interpolant of `u` on one triangle. Lies in the
/// triangle's plane.
Point3 p1_gradient(const TriMesh& mesh, const NodalField& u, Index face_index);

/// Discrete Laplacian: solves M v = S u for v on all vertices.
///
/// When the mesh has boundary, `u` must vanish on boundary vertices (it is
/// treated as an element of the zero-trace space). On closed meshes any field
/// is accepted. Throws kNotConverged from the mass solve.
NodalField discrete_laplacian(const TriMesh& mesh, const NodalField& u, double tol = kDefaultTolerance);

/// Same operator with prebuilt matrices.
NodalField discrete_laplacian(const SparseMatrix& stiffness, const SparseMatrix& mass, const NodalField& u,
                              double tol = kDefaultTolerance);

} // namespace biharm
