#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <string>

#include "porocontact/mesh.hpp"

using namespace porocontact;

namespace {

const SideTags kTags{BoundaryTag::Gamma1, BoundaryTag::Gamma3, BoundaryTag::Gamma2, BoundaryTag::Gamma2};

std::map<BoundaryTag, int> count_tags(const Mesh& mesh)
{
    std::map<BoundaryTag, int> out;
    for (const auto& e : mesh.edges())
        if (e.is_boundary()) ++out[*e.tag];
    return out;
}

}  // namespace

TEST(RectMesh, SmallestSquareHasTwoTrianglesAndFourTaggedEdges)
{
    const Mesh mesh = build_rect_mesh(1, 1, {}, kTags);
    EXPECT_EQ(mesh.num_triangles(), 2);
    EXPECT_EQ(mesh.num_vertices(), 4);
    EXPECT_EQ(mesh.boundary_edges().size(), 4u);
    EXPECT_EQ(mesh.num_edges(), 5);
    const auto tags = count_tags(mesh);
    EXPECT_EQ(tags.at(BoundaryTag::Gamma1), 1);
    EXPECT_EQ(tags.at(BoundaryTag::Gamma3), 1);
    EXPECT_EQ(tags.at(BoundaryTag::Gamma2), 2);
    for (const auto& e : mesh.edges()) {
        if (!e.is_boundary() || *e.tag != BoundaryTag::Gamma1) continue;
        const Point mid = 0.5 * (mesh.vertices()[e.vertices[0]] + mesh.vertices()[e.vertices[1]]);
        EXPECT_NEAR(mid.x(), 0.0, 1e-15);
    }
}

TEST(RectMesh, TwoByTwoCounts)
{
    const Mesh mesh = build_rect_mesh(2, 2, {}, kTags);
    EXPECT_EQ(mesh.num_triangles(), 8);
    EXPECT_EQ(mesh.boundary_edges().size(), 8u);
    EXPECT_EQ(mesh.num_edges(), 16);
}

TEST(RectMesh, AreasPartitionTheDomain)
{
    for (auto [nx, ny] : {std::pair{1, 1}, {3, 5}, {16, 16}, {7, 2}}) {
        const Mesh mesh = build_rect_mesh(nx, ny, {-1.0, 0.5, 2.0, 1.75}, kTags);
        const double expected = 3.0 * 1.25;
        EXPECT_NEAR(mesh.total_area(), expected, 1e-14 * expected);
        for (int t = 0; t < mesh.num_triangles(); ++t) EXPECT_GT(mesh.area(t), 0.0);
    }
}

TEST(RectMesh, TopologicalInvariants)
{
    const Mesh mesh = build_rect_mesh(4, 3, {}, kTags);
    int boundary = 0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges()[e];
        EXPECT_NEAR(edge.normal.norm(), 1.0, 1e-14);
        const Point a = mesh.vertices()[edge.vertices[0]];
        const Point b = mesh.vertices()[edge.vertices[1]];
        const Point mid = 0.5 * (a + b);
        EXPECT_NEAR(edge.normal.dot(b - a), 0.0, 1e-14);
        EXPECT_GT(edge.normal.dot(mid - mesh.centroid(edge.cells[0])), 0.0);
        if (edge.is_boundary()) {
            ++boundary;
            EXPECT_TRUE(edge.tag.has_value());
        } else {
            EXPECT_LT(edge.cells[0], edge.cells[1]);
            EXPECT_LT(edge.normal.dot(mid - mesh.centroid(edge.cells[1])), 0.0);
            // The two neighbours traverse the shared edge in opposite directions.
            auto direction = [&](int t) {
                const auto& tri = mesh.triangles()[t];
                for (int i = 0; i < 3; ++i)
                    if (tri[i] == edge.vertices[0] && tri[(i + 1) % 3] == edge.vertices[1]) return 1;
                return -1;
            };
            EXPECT_EQ(direction(edge.cells[0]), -direction(edge.cells[1]));
        }
    }
    const auto tags = count_tags(mesh);
    int tagged = 0;
    for (const auto& [tag, n] : tags) tagged += n;
    EXPECT_EQ(tagged, boundary);
    EXPECT_EQ(static_cast<int>(mesh.boundary_edges().size()), boundary);
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i) {
            const auto& e = mesh.edges()[mesh.triangle_edge(t, i)];
            const int v = mesh.triangles()[t][i];
            EXPECT_TRUE(e.vertices[0] != v && e.vertices[1] != v);
        }
}

TEST(RectMesh, RejectsInvalidArguments)
{
    EXPECT_THROW(build_rect_mesh(0, 1, {}, kTags), MeshError);
    EXPECT_THROW(build_rect_mesh(1, 1, {0, 0, 0, 1}, kTags), MeshError);
    const SideTags no_clamp{BoundaryTag::Gamma2, BoundaryTag::Gamma3, BoundaryTag::Gamma2, BoundaryTag::Gamma2};
    EXPECT_THROW(build_rect_mesh(2, 2, {}, no_clamp), MeshError);
}

TEST(MeshIo, RoundTripReproducesTheMesh)
{
    const Mesh mesh = build_rect_mesh(1, 1, {}, kTags);
    const std::string text = write_mesh(mesh);
    const Mesh back = read_mesh(text);
    EXPECT_EQ(back.vertices(), mesh.vertices());
    EXPECT_EQ(back.triangles(), mesh.triangles());
    ASSERT_EQ(back.boundary_edges().size(), mesh.boundary_edges().size());
    for (std::size_t i = 0; i < mesh.boundary_edges().size(); ++i) {
        EXPECT_EQ(back.boundary_edges()[i].vertices, mesh.boundary_edges()[i].vertices);
        EXPECT_EQ(back.boundary_edges()[i].tag, mesh.boundary_edges()[i].tag);
    }
    EXPECT_EQ(write_mesh(back), text);
}

TEST(MeshIo, MissingBoundaryTagIsAParseError)
{
    const std::string text =
        "poromesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 2\n0 1 2\n0 2 3\n"
        "boundary 3\n0 1 GAMMA2\n1 2 GAMMA3\n2 3 GAMMA2\n";
    EXPECT_THROW(read_mesh(text), MeshError);
    const std::string no_tag_token =
        "poromesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 2\n0 1 2\n0 2 3\n"
        "boundary 4\n0 1 GAMMA2\n1 2 GAMMA3\n2 3 GAMMA2\n3 0\n";
    EXPECT_THROW(read_mesh(no_tag_token), MeshError);
}

TEST(MeshIo, ClockwiseTriangleIsReorientedWithAWarning)
{
    const std::string text =
        "poromesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 2\n0 2 1\n0 2 3\n"
        "boundary 4\n0 1 GAMMA2\n1 2 GAMMA3\n2 3 GAMMA2\n3 0 GAMMA1\n";
    const Mesh mesh = read_mesh(text);
    ASSERT_EQ(mesh.warnings().size(), 1u);
    EXPECT_NE(mesh.warnings()[0].find("triangle 0"), std::string::npos);
    for (int t = 0; t < mesh.num_triangles(); ++t) EXPECT_NEAR(mesh.area(t), 0.5, 1e-15);
}

TEST(MeshIo, MalformedInputsAreRejected)
{
    EXPECT_THROW(read_mesh("poromesh 2\n"), MeshError);
    EXPECT_THROW(read_mesh("poromesh 1\nvertices 2\n0 0\n"), MeshError);
    const std::string degenerate =
        "poromesh 1\nvertices 3\n0 0\n1 0\n2 0\ntriangles 1\n0 1 2\n"
        "boundary 3\n0 1 GAMMA1\n1 2 GAMMA2\n2 0 GAMMA2\n";
    EXPECT_THROW(read_mesh(degenerate), MeshError);
    const std::string bad_tag =
        "poromesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\n"
        "boundary 3\n0 1 GAMMA1\n1 2 GAMMA7\n2 0 GAMMA2\n";
    EXPECT_THROW(read_mesh(bad_tag), MeshError);
    const std::string out_of_range =
        "poromesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 5\n"
        "boundary 3\n0 1 GAMMA1\n1 2 GAMMA2\n2 0 GAMMA2\n";
    EXPECT_THROW(read_mesh(out_of_range), MeshError);
}

TEST(BoundaryTags, ParseAndPrint)
{
    for (auto tag : {BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3})
        EXPECT_EQ(parse_boundary_tag(to_string(tag)), tag);
    EXPECT_FALSE(parse_boundary_tag("GAMMA4").has_value());
}

TEST(Mesh, TaggedVertices)
{
    const Mesh mesh = build_rect_mesh(3, 2, {}, kTags);
    const auto left = mesh.tagged_vertices(BoundaryTag::Gamma1);
    EXPECT_EQ(left.size(), 3u);
    for (int v : left) EXPECT_NEAR(mesh.vertices()[v].x(), 0.0, 1e-15);
}
