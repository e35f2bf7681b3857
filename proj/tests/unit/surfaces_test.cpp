#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "biharm/analysis.hpp"
#include "biharm/surfaces.hpp"
#include "error_code.hpp"
#include "fd_oracle.hpp"

namespace biharm {
namespace {

using testing::code_of;
constexpr double kPi = std::numbers::pi;

using testing::fd_gradient;
using testing::fd_laplacian;

std::vector<Point3> cap_samples(double radius, double theta_max, int count, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> t(0.05, theta_max), p(0.0, 2.0 * kPi);
    std::vector<Point3> out;
    for (int i = 0; i < count; ++i) {
        const double th = t(rng), ph = p(rng);
        out.emplace_back(radius * std::sin(th) * std::cos(ph), radius * std::sin(th) * std::sin(ph),
                         radius * std::cos(th));
    }
    return out;
}

std::vector<Point3> cylinder_samples(double radius, double z_max, int count, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> z(-z_max, z_max), p(0.0, 2.0 * kPi);
    std::vector<Point3> out;
    for (int i = 0; i < count; ++i) {
        const double ph = p(rng);
        out.emplace_back(radius * std::cos(ph), radius * std::sin(ph), z(rng));
    }
    return out;
}

struct OracleCase {
    SurfaceCase surface;
    std::vector<Point3> samples;
};

std::vector<OracleCase> oracle_cases()
{
    return {
        {cap_case(1.0, kPi / 3.0), cap_samples(1.0, kPi / 3.0 - 0.05, 100, 1)},
        {cap_case(2.0, 2.0), cap_samples(2.0, 1.9, 100, 2)},
        {cylinder_case(1.0, 2.0), cylinder_samples(1.0, 0.9, 100, 3)},
        {cylinder_case(0.7, 3.0), cylinder_samples(0.7, 1.4, 100, 4)},
        {sphere_case(1.0, 2, 0), cap_samples(1.0, kPi - 0.05, 100, 5)},
        {sphere_case(1.5, 3, -2), cap_samples(1.5, kPi - 0.05, 100, 6)},
    };
}

TEST(ManufacturedSolutions, LaplacianMatchesFiniteDifferences)
{
    for (const auto& c : oracle_cases()) {
        double worst = 0.0;
        for (const Point3& x : c.samples) {
            worst = std::max(worst, std::abs(fd_laplacian(c.surface.exact_u, x, 1e-2) - c.surface.exact_lap_u(x)));
        }
        EXPECT_LE(worst, 1e-6) << c.surface.describe();
    }
}

TEST(ManufacturedSolutions, RightHandSideMatchesFiniteDifferences)
{
    for (const auto& c : oracle_cases()) {
        double worst = 0.0;
        for (const Point3& x : c.samples) {
            worst = std::max(worst, std::abs(fd_laplacian(c.surface.exact_lap_u, x, 1e-2) - c.surface.exact_f(x)));
        }
        EXPECT_LE(worst, 1e-4) << c.surface.describe();
    }
}

TEST(ManufacturedSolutions, GradientMatchesFiniteDifferences)
{
    for (const auto& c : oracle_cases()) {
        for (const Point3& x : c.samples) {
            EXPECT_LE((fd_gradient(c.surface.exact_u, x, 1e-3) - c.surface.exact_grad_u(x)).norm(), 1e-7)
                << c.surface.describe();
        }
    }
}

TEST(ManufacturedSolutions, ClampedOnCapBoundary)
{
    const SurfaceCase cap = cap_case(1.3, 1.1);
    for (int k = 0; k < 100; ++k) {
        const double ph = 2.0 * kPi * k / 100.0;
        const Point3 x = 1.3 * Point3(std::sin(1.1) * std::cos(ph), std::sin(1.1) * std::sin(ph), std::cos(1.1));
        EXPECT_NEAR(cap.exact_u(x), 0.0, 1e-10);
        EXPECT_LE(cap.exact_grad_u(x).norm(), 1e-10);
    }
}

TEST(ManufacturedSolutions, ClampedOnCylinderEnds)
{
    const SurfaceCase cyl = cylinder_case(1.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const double ph = 2.0 * kPi * k / 100.0;
        const Point3 x(std::cos(ph), std::sin(ph), k % 2 == 0 ? 1.0 : -1.0);
        EXPECT_NEAR(cyl.exact_u(x), 0.0, 1e-10);
        EXPECT_LE(cyl.exact_grad_u(x).norm(), 1e-10);
    }
    EXPECT_DOUBLE_EQ(cyl.exact_u(Point3(1, 0, 0)), 1.0);
    EXPECT_DOUBLE_EQ(cyl.exact_f(Point3(0, 1, 0.3)), 24.0);
}

TEST(ManufacturedSolutions, FieldsAreConstantAlongNormals)
{
    const SurfaceCase cap = cap_case(1.0, 1.0);
    const Point3 x = Point3(0.3, 0.2, 0.9).normalized();
    EXPECT_NEAR(cap.exact_u(1.1 * x), cap.exact_u(x), 1e-15);
    const SurfaceCase cyl = cylinder_case(1.0, 2.0);
    EXPECT_NEAR(cyl.exact_lap_u(Point3(0.9, 0.0, 0.4)), cyl.exact_lap_u(Point3(1.0, 0.0, 0.4)), 1e-15);
}

TEST(SphericalHarmonics, KnownValuesAndEigenRelation)
{
    const Point3 x = Point3(0.2, -0.5, 0.7).normalized();
    EXPECT_NEAR(spherical_harmonic(2, 0, x), 0.5 * (3.0 * x.z() * x.z() - 1.0), 1e-15);
    EXPECT_NEAR(spherical_harmonic(1, 1, x), x.x(), 1e-15);
    EXPECT_NEAR(spherical_harmonic(1, -1, x), x.y(), 1e-15);
    for (int l = 1; l <= 4; ++l) {
        for (int m = -l; m <= l; ++m) {
            const SurfaceScalar y = [l, m](const Point3& p) { return spherical_harmonic(l, m, p.normalized()); };
            EXPECT_NEAR(fd_laplacian(y, x, 1e-2), l * (l + 1) * y(x), 1e-6 * (1.0 + std::abs(l * (l + 1) * y(x)))) << l << "," << m;
            const Point3 g = spherical_harmonic_gradient(l, m, x);
            const Point3 tangential = g - g.dot(x) * x;
            EXPECT_LE((fd_gradient(y, x, 1e-3) - tangential).norm(), 1e-7) << l << "," << m;
        }
    }
}

TEST(Surfaces, ClosestPointsAndNormals)
{
    const SurfaceCase s = sphere_case(2.0, 1, 0);
    EXPECT_LT((s.closest_point(Point3(0, 3, 4)) - Point3(0, 1.2, 1.6)).norm(), 1e-15);
    EXPECT_LT((s.normal_at(Point3(0, 3, 4)) - Point3(0, 0.6, 0.8)).norm(), 1e-15);
    EXPECT_EQ(code_of([&] { (void)s.closest_point(Point3::Zero()); }), ErrorCode::kOutsideReach);

    const SurfaceCase c = cylinder_case(1.0, 2.0);
    EXPECT_LT((c.closest_point(Point3(0, 2, 0.5)) - Point3(0, 1, 0.5)).norm(), 1e-15);
    EXPECT_LT((c.normal_at(Point3(3, 0, 0.5)) - Point3(1, 0, 0)).norm(), 1e-15);
    EXPECT_EQ(code_of([&] { (void)c.closest_point(Point3(0, 0, 0.2)); }), ErrorCode::kOutsideReach);
}

TEST(Surfaces, CaseValidation)
{
    EXPECT_EQ(code_of([] { (void)cap_case(1.0, 0.0); }), ErrorCode::kInvalidAngle);
    EXPECT_EQ(code_of([] { (void)cap_case(1.0, kPi); }), ErrorCode::kInvalidAngle);
    EXPECT_EQ(code_of([] { (void)cap_case(-1.0, 1.0); }), ErrorCode::kInvalidDimension);
    EXPECT_EQ(code_of([] { (void)cylinder_case(1.0, 0.0); }), ErrorCode::kInvalidDimension);
    EXPECT_EQ(code_of([] { (void)sphere_case(1.0, 0, 0); }), ErrorCode::kInvalidDegree);
    EXPECT_EQ(code_of([] { (void)sphere_case(1.0, 2, 3); }), ErrorCode::kInvalidDegree);
}

TEST(Generators, CapVerticesOnSurfaceAndBoundaryOnCircle)
{
    const double theta0 = kPi / 3.0;
    for (int rings : {2, 5, 16}) {
        const TriMesh m = gen_cap_mesh(theta0, rings, 1.5);
        EXPECT_FALSE(m.is_closed());
        for (const Point3& p : m.vertices()) {
            EXPECT_NEAR(p.norm(), 1.5, 1e-14);
        }
        for (Index b : m.boundary_vertices()) {
            EXPECT_NEAR(std::acos(m.vertex(b).z() / 1.5), theta0, 1e-12);
        }
        // A disc: V - E + F = 1.
        EXPECT_EQ(static_cast<long>(m.num_vertices()) - static_cast<long>(m.edges().size()) +
                      static_cast<long>(m.num_faces()),
                  1);
        // Inscribed, so the area falls short by O(h^2).
        const double deficit = 2.0 * kPi * 1.5 * 1.5 * (1.0 - std::cos(theta0)) - m.total_area();
        EXPECT_GT(deficit, 0.0);
        EXPECT_LT(deficit, 3.0 / (rings * rings));
    }
    EXPECT_EQ(code_of([] { (void)gen_cap_mesh(1.0, 1); }), ErrorCode::kTooFewRings);
}

TEST(Generators, CapIsShapeRegularUnderRefinement)
{
    for (int rings : {8, 16, 32, 64}) {
        const auto q = certify_quality(gen_cap_mesh(kPi / 3.0, rings), cap_case(1.0, kPi / 3.0));
        EXPECT_GE(q.kappa_min, 0.1) << rings;
    }
}

TEST(Generators, IcosphereCounts)
{
    for (int k = 0; k <= 3; ++k) {
        const TriMesh m = gen_icosphere(k, 2.0);
        const auto four_k = static_cast<std::size_t>(1) << (2 * k);
        EXPECT_EQ(m.num_vertices(), 10 * four_k + 2);
        EXPECT_EQ(m.num_faces(), 20 * four_k);
        EXPECT_TRUE(m.is_closed());
        for (const Point3& p : m.vertices()) {
            EXPECT_NEAR(p.norm(), 2.0, 1e-14);
        }
    }
}

TEST(Generators, IcosphereIsOutwardOriented)
{
    const TriMesh m = gen_icosphere(2);
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const Face& face = m.faces()[f];
        const Point3 centroid = (m.vertex(face[0]) + m.vertex(face[1]) + m.vertex(face[2])) / 3.0;
        EXPECT_GT(m.geometry(static_cast<Index>(f)).unit_normal.dot(centroid), 0.0);
    }
}

TEST(Generators, LanternStructure)
{
    const int m = 7, n = 4;
    const TriMesh mesh = gen_schwarz_lantern(m, n, 1.2, 3.0);
    EXPECT_EQ(mesh.num_vertices(), static_cast<std::size_t>(m * (n + 1)));
    EXPECT_EQ(mesh.num_faces(), static_cast<std::size_t>(2 * m * n));
    EXPECT_EQ(mesh.boundary_vertices().size(), static_cast<std::size_t>(2 * m));
    for (const Point3& p : mesh.vertices()) {
        EXPECT_NEAR(std::hypot(p.x(), p.y()), 1.2, 1e-14);
        EXPECT_LE(std::abs(p.z()), 1.5 + 1e-14);
    }
    for (Index b : mesh.boundary_vertices()) {
        EXPECT_NEAR(std::abs(mesh.vertex(b).z()), 1.5, 1e-14);
    }
    EXPECT_EQ(code_of([] { (void)gen_schwarz_lantern(2, 4); }), ErrorCode::kInvalidCounts);
    EXPECT_EQ(code_of([] { (void)gen_schwarz_lantern(6, 1); }), ErrorCode::kInvalidCounts);
}

TEST(Generators, LanternCouplings)
{
    EXPECT_EQ(lantern_equator_count(LanternCoupling::kLinear, 8), 16);
    EXPECT_EQ(lantern_equator_count(LanternCoupling::kQuadratic, 11), 121);
}

// A lantern face leans away from the axis by t = atan(n (1 - cos(pi/m)) R / H)
// and spans pi/m of azimuth on either side of its mid-plane, so the worst
// angle, reached at the base vertices, is acos(cos t cos(pi/m)).
TEST(Generators, LanternNormalDeviationClosedForm)
{
    const SurfaceCase cyl = cylinder_case(1.0, 2.0);
    for (auto [m, n] : {std::pair{16, 8}, std::pair{121, 11}, std::pair{8, 64}}) {
        const auto q = certify_quality(gen_schwarz_lantern(m, n), cyl);
        const double tilt = std::atan(n * (1.0 - std::cos(kPi / m)) / 2.0);
        EXPECT_NEAR(q.max_normal_angle, std::acos(std::cos(tilt) * std::cos(kPi / m)), 1e-9) << m << "x" << n;
    }
}

TEST(Generators, LanternNormalsDependOnCoupling)
{
    const SurfaceCase cyl = cylinder_case(1.0, 2.0);
    std::vector<double> quadratic, inverse;
    for (int k : {4, 6, 8, 11}) {
        quadratic.push_back(certify_quality(gen_schwarz_lantern(k * k, k), cyl).max_normal_angle);
        inverse.push_back(certify_quality(gen_schwarz_lantern(k, k * k), cyl).max_normal_angle);
    }
    for (std::size_t i = 1; i < quadratic.size(); ++i) {
        EXPECT_LT(quadratic[i], quadratic[i - 1]);
        EXPECT_GT(inverse[i], 1.0);
    }
}

} // namespace
} // namespace biharm
