#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "biharm/error.hpp"
#include "biharm/mesh.hpp"
#include "corpus.hpp"
#include "error_code.hpp"

namespace biharm {
namespace {

using testing::code_of;

TEST(Mesh, SingleTriangleGeometry)
{
    const TriMesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const auto& g = m.geometry(0);
    EXPECT_DOUBLE_EQ(g.area, 0.5);
    EXPECT_NEAR(g.corner_cotangents[0], 0.0, 1e-15);
    EXPECT_NEAR(g.corner_cotangents[1], 1.0, 1e-15);
    EXPECT_NEAR(g.corner_cotangents[2], 1.0, 1e-15);
    EXPECT_NEAR(g.edge_lengths[0], std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.circumradius, std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(g.inradius, (2.0 - std::sqrt(2.0)) / 2.0, 1e-15);
    EXPECT_NEAR(g.unit_normal.z(), 1.0, 1e-15);
    EXPECT_EQ(m.edges().size(), 3u);
    EXPECT_EQ(m.boundary_vertices().size(), 3u);
    EXPECT_FALSE(m.is_closed());
}

TEST(Mesh, EquilateralRadii)
{
    const auto g = compute_triangle_geometry({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0});
    EXPECT_NEAR(g.inradius / g.longest_edge(), 1.0 / (2.0 * std::sqrt(3.0)), 1e-14);
    EXPECT_NEAR(g.circumradius / g.longest_edge(), 1.0 / std::sqrt(3.0), 1e-14);
}

TEST(Mesh, ClosedMeshesHaveEulerCharacteristicTwo)
{
    for (const TriMesh& m : {testing::tetrahedron(), gen_icosphere(0), gen_icosphere(2)}) {
        EXPECT_TRUE(m.is_closed());
        const auto chi = static_cast<long>(m.num_vertices()) - static_cast<long>(m.edges().size()) +
                         static_cast<long>(m.num_faces());
        EXPECT_EQ(chi, 2);
        EXPECT_TRUE(m.boundary_vertices().empty());
    }
}

TEST(Mesh, BoundaryOfGrid)
{
    const TriMesh m = testing::flat_grid(3, 2);
    EXPECT_EQ(m.boundary_vertices().size(), 10u);
    EXPECT_EQ(m.boundary_edges().size(), 10u);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
    // Boundary edges follow face orientation: the loop turns counter-clockwise.
    double signed_area = 0.0;
    for (const auto& [a, b] : m.boundary_edges()) {
        const Point3& p = m.vertex(a);
        const Point3& q = m.vertex(b);
        signed_area += 0.5 * (p.x() * q.y() - q.x() * p.y());
    }
    EXPECT_NEAR(signed_area, 1.0, 1e-14);
}

TEST(Mesh, EdgesAreUniqueAndOrdered)
{
    const TriMesh m = gen_icosphere(1);
    EXPECT_EQ(m.edges().size(), 120u);
    for (std::size_t i = 0; i < m.edges().size(); ++i) {
        EXPECT_LT(m.edges()[i].first, m.edges()[i].second);
        if (i > 0) {
            EXPECT_LT(m.edges()[i - 1], m.edges()[i]);
        }
    }
}

TEST(Mesh, RejectsBadInput)
{
    EXPECT_EQ(code_of([] { (void)build_mesh({}, {}); }), ErrorCode::kInvalidInput);
    EXPECT_EQ(code_of([] { (void)build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 3}}); }),
              ErrorCode::kInvalidInput);
    EXPECT_EQ(code_of([] { (void)build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 1}}); }),
              ErrorCode::kDegenerateFace);
    EXPECT_EQ(code_of([] { (void)build_mesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}); }),
              ErrorCode::kDegenerateFace);
}

TEST(Mesh, RejectsNonManifoldEdge)
{
    // Three triangles share the edge 0-1.
    const std::vector<Point3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}};
    EXPECT_EQ(code_of([&] { (void)build_mesh(v, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}); }), ErrorCode::kNonManifoldEdge);
}

TEST(Mesh, RejectsFlippedNeighbour)
{
    const std::vector<Point3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    EXPECT_EQ(code_of([&] { (void)build_mesh(v, {{0, 1, 2}, {1, 2, 3}}); }), ErrorCode::kInconsistentOrientation);
    EXPECT_NO_THROW((void)build_mesh(v, {{0, 1, 2}, {2, 1, 3}}));
}

TEST(Mesh, MaxEdgeLength)
{
    EXPECT_NEAR(max_edge_length(testing::flat_grid(4, 4)), std::sqrt(2.0) / 4.0, 1e-15);
}

TEST(Mesh, TransformedKeepsConnectivity)
{
    const TriMesh m = gen_icosphere(1);
    const TriMesh t = transformed(m, [](const Point3& p) { return Point3(2.0 * p); });
    EXPECT_EQ(t.faces(), m.faces());
    EXPECT_NEAR(t.total_area(), 4.0 * m.total_area(), 1e-12);
}

class ObjFiles : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = std::filesystem::temp_directory_path() /
               ("biharm_obj_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::filesystem::path dir_;
};

TEST_F(ObjFiles, RoundTripIsExact)
{
    const TriMesh m = gen_cap_mesh(1.0, 4);
    write_obj(m, dir_ / "cap.obj");
    const TriMesh back = read_obj(dir_ / "cap.obj");
    ASSERT_EQ(back.num_vertices(), m.num_vertices());
    EXPECT_EQ(back.faces(), m.faces());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
        EXPECT_EQ(back.vertices()[i], m.vertices()[i]);
    }
}

TEST_F(ObjFiles, ReadsSlashedFaceTokens)
{
    std::ofstream(dir_ / "t.obj") << "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2//1 3/3\n";
    const TriMesh m = read_obj(dir_ / "t.obj");
    EXPECT_EQ(m.num_faces(), 1u);
}

TEST_F(ObjFiles, RejectsQuadsAndMissingFiles)
{
    std::ofstream(dir_ / "q.obj") << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
    EXPECT_EQ(code_of([&] { (void)read_obj(dir_ / "q.obj"); }), ErrorCode::kIo);
    try {
        (void)read_obj(dir_ / "missing.obj");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kIo);
        EXPECT_NE(std::string(e.what()).find("missing.obj"), std::string::npos);
    }
}

} // namespace
} // namespace biharm
