#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "biharm/error.hpp"
#include "biharm/surfaces.hpp"

namespace biharm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Point3 on_sphere(double radius, double theta, double phi)
{
    return {radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi),
            radius * std::cos(theta)};
}

// Triangulates the strip between two closed vertex loops that circle the
// same axis, inner loop first. Vertices are merged by angular position
// (fractions of a full turn, increasing), producing na + nb triangles
// oriented counterclockwise when seen from the side the loops wind around.
void zip_rings(const std::vector<Index>& inner, const std::vector<double>& inner_turns,
               const std::vector<Index>& outer, const std::vector<double>& outer_turns, std::vector<Face>& faces)
{
    const std::size_t na = inner.size();
    const std::size_t nb = outer.size();
    const auto turn = [](const std::vector<double>& turns, std::size_t i) {
        const std::size_t n = turns.size();
        return turns[i % n] + static_cast<double>(i / n);
    };
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < na || ib < nb) {
        const bool advance_inner = ib == nb || (ia < na && turn(inner_turns, ia + 1) < turn(outer_turns, ib + 1));
        if (advance_inner) {
            faces.push_back({inner[ia % na], outer[ib % nb], inner[(ia + 1) % na]});
            ++ia;
        } else {
            faces.push_back({inner[ia % na], outer[ib % nb], outer[(ib + 1) % nb]});
            ++ib;
        }
    }
}

} // namespace

TriMesh gen_cap_mesh(double theta0, int rings, double radius)
{
    if (rings < 2) {
        raise(ErrorCode::kTooFewRings, fmt::format("cap mesh needs at least 2 rings (got {})", rings));
    }
    if (!(theta0 > 0.0 && theta0 < std::numbers::pi)) {
        raise(ErrorCode::kInvalidAngle, fmt::format("cap angle must lie in (0, pi) (got {})", theta0));
    }
    const double dtheta = theta0 / rings;

    std::vector<Point3> vertices{Point3(0.0, 0.0, radius)};
    std::vector<Face> faces;
    std::vector<Index> prev{0};
    std::vector<double> prev_turns{0.0};
    for (int k = 1; k <= rings; ++k) {
        const double theta = k == rings ? theta0 : k * dtheta;
        const int count = std::max(6, static_cast<int>(std::lround(kTwoPi * std::sin(theta) / dtheta)));
        const double offset = 0.5 * (k % 2);
        std::vector<Index> ring;
        std::vector<double> turns;
        for (int j = 0; j < count; ++j) {
            const double t = (j + offset) / count;
            ring.push_back(static_cast<Index>(vertices.size()));
            turns.push_back(t);
            vertices.push_back(on_sphere(radius, theta, kTwoPi * t));
        }
        if (k == 1) {
            for (int j = 0; j < count; ++j) {
                faces.push_back({0, ring[static_cast<std::size_t>(j)], ring[static_cast<std::size_t>((j + 1) % count)]});
            }
        } else {
            zip_rings(prev, prev_turns, ring, turns, faces);
        }
        prev = std::move(ring);
        prev_turns = std::move(turns);
    }
    return build_mesh(std::move(vertices), std::move(faces));
}

TriMesh gen_icosphere(int subdivisions, double radius)
{
    if (subdivisions < 0) {
        raise(ErrorCode::kInvalidInput, fmt::format("subdivisions must be >= 0 (got {})", subdivisions));
    }
    if (!(radius > 0.0)) {
        raise(ErrorCode::kInvalidDimension, fmt::format("sphere radius must be positive (got {})", radius));
    }
    const double phi = std::numbers::phi;
    std::vector<Point3> vertices{
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    std::vector<Face> faces{
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (auto& v : vertices) {
        v = radius * v.normalized();
    }

    for (int level = 0; level < subdivisions; ++level) {
        std::map<Edge, Index> midpoints;
        const auto midpoint = [&](Index a, Index b) {
            const Edge key{std::min(a, b), std::max(a, b)};
            const auto [it, inserted] = midpoints.try_emplace(key, static_cast<Index>(vertices.size()));
            if (inserted) {
                const Point3 m = 0.5 * (vertices[static_cast<std::size_t>(a)] + vertices[static_cast<std::size_t>(b)]);
                vertices.push_back(radius * m.normalized());
            }
            return it->second;
        };
        std::vector<Face> refined;
        refined.reserve(4 * faces.size());
        for (const auto& [a, b, c] : faces) {
            const Index ab = midpoint(a, b);
            const Index bc = midpoint(b, c);
            const Index ca = midpoint(c, a);
            refined.push_back({a, ab, ca});
            refined.push_back({b, bc, ab});
            refined.push_back({c, ca, bc});
            refined.push_back({ab, bc, ca});
        }
        faces = std::move(refined);
    }
    return build_mesh(std::move(vertices), std::move(faces));
}

TriMesh gen_schwarz_lantern(int m, int n, double radius, double height)
{
    if (m < 3 || n < 2) {
        raise(ErrorCode::kInvalidCounts, fmt::format("lantern needs m >= 3 and n >= 2 (got m={}, n={})", m, n));
    }
    if (!(radius > 0.0) || !(height > 0.0)) {
        raise(ErrorCode::kInvalidDimension, fmt::format("lantern needs R, H > 0 (got {}, {})", radius, height));
    }
    std::vector<Point3> vertices;
    vertices.reserve(static_cast<std::size_t>((n + 1) * m));
    for (int i = 0; i <= n; ++i) {
        const double z = -0.5 * height + height * i / n;
        const double offset = 0.5 * (i % 2);
        for (int j = 0; j < m; ++j) {
            const double angle = kTwoPi * (j + offset) / m;
            vertices.emplace_back(radius * std::cos(angle), radius * std::sin(angle), z);
        }
    }
    const auto id = [m](int ring, int j) { return static_cast<Index>(ring * m + (j % m)); };

    std::vector<Face> faces;
    faces.reserve(static_cast<std::size_t>(2 * m * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i % 2 == 0) {
                // Upper ring is shifted half a step forward.
                faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
                faces.push_back({id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)});
            } else {
                // Lower ring is shifted half a step forward.
                faces.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
                faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            }
        }
    }
    return build_mesh(std::move(vertices), std::move(faces));
}

} // namespace biharm
