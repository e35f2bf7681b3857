#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace biharm {

using Index = std::int32_t;
using Point3 = Eigen::Vector3d;
using Face = std::array<Index, 3>;
using Edge = std::pair<Index, Index>;

/// Per-triangle quantities used by assembly and mesh-quality analysis.
///
/// Corner i is the corner at local vertex i; edge_lengths[i] is the length of
/// the edge opposite corner i.
struct TriangleGeometry {
    double area = 0.0;
    std::array<double, 3> edge_lengths{};
    std::array<double, 3> corner_cotangents{};
    double inradius = 0.0;
    double circumradius = 0.0;
    Point3 unit_normal = Point3::Zero();

    [[nodiscard]] double longest_edge() const;
};

/// Indexed triangle surface mesh. Immutable once built; construct through
/// build_mesh so the manifold and orientation invariants are checked.
class TriMesh {
public:
    [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
    [[nodiscard]] std::size_t num_faces() const { return faces_.size(); }

    [[nodiscard]] const std::vector<Point3>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
    [[nodiscard]] const Point3& vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }
    [[nodiscard]] const Face& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }

    /// Unique undirected edges, each stored with the smaller index first.
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }

    /// Sorted indices of vertices incident to at least one boundary edge.
    [[nodiscard]] const std::vector<Index>& boundary_vertices() const { return boundary_vertices_; }

    /// Boundary edges, oriented as they appear in their single incident face.
    [[nodiscard]] const std::vector<Edge>& boundary_edges() const { return boundary_edges_; }

    [[nodiscard]] bool is_closed() const { return boundary_edges_.empty(); }
    [[nodiscard]] bool is_boundary_vertex(Index v) const
    {
        return on_boundary_[static_cast<std::size_t>(v)] != 0;
    }

    [[nodiscard]] const TriangleGeometry& geometry(Index f) const
    {
        return geometry_[static_cast<std::size_t>(f)];
    }

    [[nodiscard]] double total_area() const;

private:
    friend TriMesh build_mesh(std::vector<Point3> vertices, std::vector<Face> faces);

    std::vector<Point3> vertices_;
    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    std::vector<Edge> boundary_edges_;
    std::vector<Index> boundary_vertices_;
    std::vector<std::uint8_t> on_boundary_;
    std::vector<TriangleGeometry> geometry_;
};

/// Validates the input and builds adjacency/boundary data.
///
/// Throws Error with kDegenerateFace, kNonManifoldEdge,
/// kInconsistentOrientation or kInvalidInput.
TriMesh build_mesh(std::vector<Point3> vertices, std::vector<Face> faces);

/// Geometry of a single triangle from its corner positions.
TriangleGeometry compute_triangle_geometry(const Point3& a, const Point3& b, const Point3& c);

const TriangleGeometry& triangle_geometry(const TriMesh& mesh, Index face_index);

/// Mesh parameter h: longest edge over the whole mesh.
double max_edge_length(const TriMesh& mesh);

/// Copy of the mesh with every vertex mapped through `map`; re-validated.
template <typename Map>
TriMesh transformed(const TriMesh& mesh, Map&& map)
{
    std::vector<Point3> moved;
    moved.reserve(mesh.num_vertices());
    for (const auto& p : mesh.vertices()) {
        moved.push_back(map(p));
    }
    return build_mesh(std::move(moved), mesh.faces());
}

// OBJ subset: `v x y z` and triangular `f i j k` records, 1-based indices.
TriMesh read_obj(const std::filesystem::path& path);
void write_obj(const TriMesh& mesh, const std::filesystem::path& path);

} // namespace biharm
