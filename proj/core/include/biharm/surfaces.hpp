#pragma once

#include <functional>
#include <string>
#include <vector>

#include "biharm/mesh.hpp"

namespace biharm {

enum class SurfaceKind {
    kSphere,
    kCap,
    kCylinder,
};

std::string_view to_string(SurfaceKind kind);

using SurfaceScalar = std::function<double(const Point3&)>;
using SurfaceVector = std::function<Point3(const Point3&)>;

/// Analytic reference surface together with a manufactured solution of the
/// clamped (or zero-mean) biharmonic problem on it.
///
/// The Laplacian is the positive semidefinite one (Delta = -div grad). The
/// exact fields are extended constantly along surface normals, so they may be
/// evaluated at any point within reach; that makes them u o Phi when sampled
/// on a mesh.
///
/// Frames: spheres and caps are centered at the origin, caps are centered on
/// the +z pole. Cylinders use the z axis with z in [-H/2, H/2].
struct SurfaceCase {
    SurfaceKind kind = SurfaceKind::kSphere;
    double radius = 1.0;
    double theta0 = 0.0;  // cap opening angle
    double height = 0.0;  // cylinder length
    int degree = 0;       // sphere harmonic degree l
    int order = 0;        // sphere harmonic order m
    bool has_boundary = false;

    SurfaceScalar exact_u;
    SurfaceVector exact_grad_u;
    SurfaceScalar exact_lap_u;
    SurfaceScalar exact_f;

    /// Throws kOutsideReach at the sphere center or on the cylinder axis.
    [[nodiscard]] Point3 closest_point(const Point3& p) const;
    /// Unit outward normal at closest_point(p).
    [[nodiscard]] Point3 normal_at(const Point3& p) const;

    [[nodiscard]] std::string describe() const;
};

Point3 closest_point(const SurfaceCase& surface, const Point3& p);

/// Spherical cap theta <= theta0 with u = (cos(theta) - cos(theta0))^2.
/// Throws kInvalidAngle unless 0 < theta0 < pi, kInvalidDimension for R <= 0.
SurfaceCase cap_case(double radius, double theta0);

/// Open cylinder with u = (z^2 - a^2)^2, a = H/2, so f = 24.
/// Throws kInvalidDimension.
SurfaceCase cylinder_case(double radius, double height);

/// Closed sphere with f = Y_l^m and u = R^4 Y / (l(l+1))^2.
/// Throws kInvalidDegree unless l >= 1 and |m| <= l.
SurfaceCase sphere_case(double radius, int degree, int order);

/// Real spherical harmonic P_l^|m|(z) cos(m phi) (m >= 0) or
/// P_l^|m|(z) sin(|m| phi) (m < 0), without normalization or Condon-Shortley
/// phase, so that Y_2^0 = (3z^2 - 1)/2. Evaluated at unit vectors.
double spherical_harmonic(int degree, int order, const Point3& unit);

/// Ambient gradient of the polynomial extension of spherical_harmonic.
/// Projecting it onto the tangent plane gives the surface gradient on the
/// unit sphere.
Point3 spherical_harmonic_gradient(int degree, int order, const Point3& unit);

// Mesh generators. Every generated vertex lies on the analytic surface.

/// Concentric-ring cap triangulation: a pole vertex plus `rings` rings at
/// equal polar spacing, the last one on the boundary circle. Ring k has about
/// 2 pi sin(theta_k) / dtheta vertices. Throws kTooFewRings for rings < 2.
TriMesh gen_cap_mesh(double theta0, int rings, double radius = 1.0);

/// Icosahedron with `subdivisions` rounds of 1-to-4 splitting, vertices
/// projected onto the sphere of the given radius.
TriMesh gen_icosphere(int subdivisions, double radius = 1.0);

/// Classical Schwarz lantern: n + 1 rings of m vertices on the cylinder,
/// alternate rings rotated by pi / m, 2m triangles per band.
/// Throws kInvalidCounts unless m >= 3 and n >= 2.
TriMesh gen_schwarz_lantern(int m, int n, double radius = 1.0, double height = 2.0);

enum class LanternCoupling {
    kLinear,    // m = 2n
    kQuadratic, // m = n^2
};

std::string_view to_string(LanternCoupling coupling);
int lantern_equator_count(LanternCoupling coupling, int n);

/// One surface case refined through a list of generator parameters:
/// ring counts (cap), subdivision levels (sphere), or axial counts n (lantern).
struct RefinementFamily {
    SurfaceCase surface;
    std::vector<int> levels;
    LanternCoupling coupling = LanternCoupling::kLinear;

    [[nodiscard]] TriMesh mesh(std::size_t level_index) const;
};

} // namespace biharm
