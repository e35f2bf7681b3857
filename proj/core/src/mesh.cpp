#include "biharm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

namespace {

// Faces with area below this fraction of (longest edge)^2 are rejected.
constexpr double kDegenerateAreaRatio = 1e-14;

struct HalfEdge {
    Index lo;
    Index hi;
    Index from;
    Index to;
    Index face;
};

} // namespace

double TriangleGeometry::longest_edge() const
{
    return std::max({edge_lengths[0], edge_lengths[1], edge_lengths[2]});
}

double TriMesh::total_area() const
{
    double sum = 0.0;
    for (const auto& g : geometry_) {
        sum += g.area;
    }
    return sum;
}

TriangleGeometry compute_triangle_geometry(const Point3& a, const Point3& b, const Point3& c)
{
    TriangleGeometry g;
    const Point3 ab = b - a;
    const Point3 ac = c - a;
    const Point3 bc = c - b;
    const Point3 cross = ab.cross(ac);
    const double twice_area = cross.norm();

    g.area = 0.5 * twice_area;
    g.edge_lengths = {bc.norm(), ac.norm(), ab.norm()};
    if (twice_area > 0.0) {
        g.unit_normal = cross / twice_area;
        // cot(angle) = (u.v) / |u x v| for the two edge vectors leaving the corner.
        g.corner_cotangents = {
            ab.dot(ac) / twice_area,
            (-ab).dot(bc) / twice_area,
            (-ac).dot(-bc) / twice_area,
        };
        const double perimeter = g.edge_lengths[0] + g.edge_lengths[1] + g.edge_lengths[2];
        g.inradius = twice_area / perimeter;
        g.circumradius = g.edge_lengths[0] * g.edge_lengths[1] * g.edge_lengths[2] / (2.0 * twice_area);
    }
    return g;
}

TriMesh build_mesh(std::vector<Point3> vertices, std::vector<Face> faces)
{
    if (vertices.empty() || faces.empty()) {
        raise(ErrorCode::kInvalidInput, "mesh needs at least one vertex and one face");
    }
    const auto nv = static_cast<Index>(vertices.size());

    TriMesh mesh;
    mesh.geometry_.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        for (Index v : t) {
            if (v < 0 || v >= nv) {
                raise(ErrorCode::kInvalidInput, fmt::format("face {} references vertex {} (have {})", f, v, nv));
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            raise(ErrorCode::kDegenerateFace, fmt::format("face {} repeats a vertex", f));
        }
        auto g = compute_triangle_geometry(vertices[static_cast<std::size_t>(t[0])],
                                           vertices[static_cast<std::size_t>(t[1])],
                                           vertices[static_cast<std::size_t>(t[2])]);
        const double longest = g.longest_edge();
        if (!(g.area >= kDegenerateAreaRatio * longest * longest) || g.area <= 0.0) {
            raise(ErrorCode::kDegenerateFace, fmt::format("face {} has area {}", f, g.area));
        }
        mesh.geometry_.push_back(g);
    }

    std::vector<HalfEdge> half_edges;
    half_edges.reserve(3 * faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        for (int k = 0; k < 3; ++k) {
            const Index from = t[static_cast<std::size_t>(k)];
            const Index to = t[static_cast<std::size_t>((k + 1) % 3)];
            half_edges.push_back({std::min(from, to), std::max(from, to), from, to, static_cast<Index>(f)});
        }
    }
    std::sort(half_edges.begin(), half_edges.end(), [](const HalfEdge& x, const HalfEdge& y) {
        return std::tie(x.lo, x.hi, x.face) < std::tie(y.lo, y.hi, y.face);
    });

    mesh.on_boundary_.assign(vertices.size(), 0);
    for (std::size_t i = 0; i < half_edges.size();) {
        std::size_t j = i + 1;
        while (j < half_edges.size() && half_edges[j].lo == half_edges[i].lo && half_edges[j].hi == half_edges[i].hi) {
            ++j;
        }
        const auto& first = half_edges[i];
        const std::size_t count = j - i;
        if (count > 2) {
            raise(ErrorCode::kNonManifoldEdge,
                  fmt::format("edge ({}, {}) has {} incident faces", first.lo, first.hi, count));
        }
        if (count == 2 && half_edges[i + 1].from == first.from) {
            raise(ErrorCode::kInconsistentOrientation,
                  fmt::format("faces {} and {} traverse edge ({}, {}) in the same direction", first.face,
                              half_edges[i + 1].face, first.from, first.to));
        }
        mesh.edges_.emplace_back(first.lo, first.hi);
        if (count == 1) {
            mesh.boundary_edges_.emplace_back(first.from, first.to);
            mesh.on_boundary_[static_cast<std::size_t>(first.from)] = 1;
            mesh.on_boundary_[static_cast<std::size_t>(first.to)] = 1;
        }
        i = j;
    }
    for (Index v = 0; v < nv; ++v) {
        if (mesh.on_boundary_[static_cast<std::size_t>(v)] != 0) {
            mesh.boundary_vertices_.push_back(v);
        }
    }

    mesh.vertices_ = std::move(vertices);
    mesh.faces_ = std::move(faces);
    return mesh;
}

const TriangleGeometry& triangle_geometry(const TriMesh& mesh, Index face_index)
{
    if (face_index < 0 || static_cast<std::size_t>(face_index) >= mesh.num_faces()) {
        raise(ErrorCode::kInvalidInput, fmt::format("face index {} out of range", face_index));
    }
    return mesh.geometry(face_index);
}

double max_edge_length(const TriMesh& mesh)
{
    double h = 0.0;
    for (const auto& [a, b] : mesh.edges()) {
        h = std::max(h, (mesh.vertex(a) - mesh.vertex(b)).norm());
    }
    return h;
}

} // namespace biharm
