#include "biharm/fem.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

std::string_view to_string(MassMode mode)
{
    return mode == MassMode::kConsistent ? "consistent" : "lumped";
}

Vector DofPartition::restrict_to_interior(const Vector& full) const
{
    if (static_cast<std::size_t>(full.size()) != full_to_interior.size()) {
        raise(ErrorCode::kDimensionMismatch, "restrict_to_interior: length differs from vertex count");
    }
    Vector out(static_cast<Index>(interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i) {
        out[static_cast<Index>(i)] = full[interior[i]];
    }
    return out;
}

Vector DofPartition::extend_by_zero(const Vector& interior_values) const
{
    if (static_cast<std::size_t>(interior_values.size()) != interior.size()) {
        raise(ErrorCode::kDimensionMismatch, "extend_by_zero: length differs from interior count");
    }
    Vector out = Vector::Zero(static_cast<Index>(full_to_interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i) {
        out[interior[i]] = interior_values[static_cast<Index>(i)];
    }
    return out;
}

SparseMatrix assemble_stiffness(const TriMesh& mesh)
{
    std::vector<Triplet> t;
    t.reserve(9 * mesh.num_faces());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.faces()[f];
        const auto& g = mesh.geometry(static_cast<Index>(f));
        for (int corner = 0; corner < 3; ++corner) {
            // The cotangent at a corner weights the opposite edge (j, k).
            const Index j = face[static_cast<std::size_t>((corner + 1) % 3)];
            const Index k = face[static_cast<std::size_t>((corner + 2) % 3)];
            const double w = 0.5 * g.corner_cotangents[static_cast<std::size_t>(corner)];
            t.push_back({j, k, -w});
            t.push_back({k, j, -w});
            t.push_back({j, j, w});
            t.push_back({k, k, w});
        }
    }
    const auto n = static_cast<Index>(mesh.num_vertices());
    return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix assemble_mass(const TriMesh& mesh, MassMode mode)
{
    std::vector<Triplet> t;
    t.reserve((mode == MassMode::kConsistent ? 9 : 3) * mesh.num_faces());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.faces()[f];
        const double area = mesh.geometry(static_cast<Index>(f)).area;
        for (int a = 0; a < 3; ++a) {
            const Index i = face[static_cast<std::size_t>(a)];
            if (mode == MassMode::kLumped) {
                t.push_back({i, i, area / 3.0});
                continue;
            }
            for (int b = 0; b < 3; ++b) {
                const Index j = face[static_cast<std::size_t>(b)];
                t.push_back({i, j, a == b ? area / 6.0 : area / 12.0});
            }
        }
    }
    const auto n = static_cast<Index>(mesh.num_vertices());
    return SparseMatrix::from_triplets(n, n, t);
}

DofPartition partition_dofs(const TriMesh& mesh)
{
    DofPartition p;
    p.full_to_interior.assign(mesh.num_vertices(), -1);
    for (Index v = 0; v < static_cast<Index>(mesh.num_vertices()); ++v) {
        if (mesh.is_boundary_vertex(v)) {
            p.boundary.push_back(v);
        } else {
            p.full_to_interior[static_cast<std::size_t>(v)] = static_cast<Index>(p.interior.size());
            p.interior.push_back(v);
        }
    }
    return p;
}

NodalField interpolate(const TriMesh& mesh, const ScalarFunction& fn)
{
    Vector v(static_cast<Index>(mesh.num_vertices()));
    for (Index i = 0; i < v.size(); ++i) {
        v[i] = fn(mesh.vertex(i));
    }
    return NodalField(std::move(v));
}

Point3 p1_gradient(const TriMesh& mesh, const NodalField& u, Index face_index)
{
    if (u.size() != mesh.num_vertices()) {
        raise(ErrorCode::kDimensionMismatch, "p1_gradient: field length differs from vertex count");
    }
    const Face& face = mesh.face(face_index);
    const auto& g = triangle_geometry(mesh, face_index);
    Point3 grad = Point3::Zero();
    for (int a = 0; a < 3; ++a) {
        const Index i = face[static_cast<std::size_t>(a)];
        const Point3& pj = mesh.vertex(face[static_cast<std::size_t>((a + 1) % 3)]);
        const Point3& pk = mesh.vertex(face[static_cast<std::size_t>((a + 2) % 3)]);
        // Hat function gradient: rotate the opposite edge by 90 degrees in-plane.
        grad += u.values[i] * g.unit_normal.cross(pk - pj) / (2.0 * g.area);
    }
    return grad;
}

NodalField discrete_laplacian(const SparseMatrix& stiffness, const SparseMatrix& mass, const NodalField& u,
                              double tol)
{
    const Vector rhs = spmv(stiffness, u.values);
    return NodalField(solve_spd(mass, rhs, tol).x);
}

NodalField discrete_laplacian(const TriMesh& mesh, const NodalField& u, double tol)
{
    const auto partition = partition_dofs(mesh);
    NodalField full = u;
    if (u.size() == partition.num_interior() && u.size() != mesh.num_vertices()) {
        full = NodalField(partition.extend_by_zero(u.values));
    } else if (u.size() != mesh.num_vertices()) {
        raise(ErrorCode::kDimensionMismatch,
              fmt::format("discrete_laplacian: field has {} values, mesh has {} vertices ({} interior)", u.size(),
                          mesh.num_vertices(), partition.num_interior()));
    }
    for (Index b : partition.boundary) {
        if (full.values[b] != 0.0) {
            raise(ErrorCode::kInvalidInput,
                  fmt::format("discrete_laplacian: field is nonzero ({}) at boundary vertex {}", full.values[b], b));
        }
    }
    return discrete_laplacian(assemble_stiffness(mesh), assemble_mass(mesh, MassMode::kConsistent), full, tol);
}

} // namespace biharm
