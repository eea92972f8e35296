#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace porocontact {

using Point = Eigen::Vector2d;

/// Boundary segment tags: GAMMA1 is clamped, GAMMA2 carries a traction,
/// GAMMA3 is the frictionless contact segment.
enum class BoundaryTag { Gamma1, Gamma2, Gamma3 };

std::string_view to_string(BoundaryTag tag);
std::optional<BoundaryTag> parse_boundary_tag(std::string_view text);

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BoundaryEdge {
    std::array<int, 2> vertices;
    BoundaryTag tag;
};

/// Unique edge of the triangulation. `cells[0]` is the lower-index adjacent
/// triangle and `normal` is outward with respect to it, so for interior edges
/// the normal points from the lower to the higher triangle index.
struct Edge {
    std::array<int, 2> vertices;
    std::array<int, 2> cells{-1, -1};
    Point normal = Point::Zero();
    double length = 0.0;
    std::optional<BoundaryTag> tag;

    bool is_boundary() const { return cells[1] < 0; }
};

/// Conforming triangulation of a polygonal domain. Immutable once built; the
/// constructor reorients clockwise triangles (recording a warning) and
/// rejects anything that violates the topological invariants.
class Mesh {
public:
    Mesh(std::vector<Point> vertices,
         std::vector<std::array<int, 3>> triangles,
         std::vector<BoundaryEdge> boundary);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    /// Global edge index of the edge opposite local vertex i of triangle t.
    int triangle_edge(int t, int i) const { return triangle_edges_[t][i]; }
    const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }

    std::array<Point, 3> triangle_points(int t) const;
    double area(int t) const { return areas_[t]; }
    Point centroid(int t) const;
    double total_area() const;

    /// Vertices lying on at least one boundary edge with the given tag.
    std::vector<int> tagged_vertices(BoundaryTag tag) const;

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<double> areas_;
    std::vector<std::string> warnings_;
};

struct RectExtents {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

struct SideTags {
    BoundaryTag left = BoundaryTag::Gamma1;
    BoundaryTag right = BoundaryTag::Gamma2;
    BoundaryTag bottom = BoundaryTag::Gamma2;
    BoundaryTag top = BoundaryTag::Gamma2;
};

/// Structured right-split triangulation of a rectangle: every cell is cut
/// along its lower-left to upper-right diagonal, giving 2*nx*ny triangles.
Mesh build_rect_mesh(int nx, int ny, const RectExtents& extents, const SideTags& tags);

/// Parses the "poromesh 1" plain-text format.
Mesh read_mesh(std::string_view text);
std::string write_mesh(const Mesh& mesh);

}  // namespace porocontact
