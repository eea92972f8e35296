#include "porocontact/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <type_traits>

namespace porocontact {

std::string_view to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::Gamma1: return "GAMMA1";
    case BoundaryTag::Gamma2: return "GAMMA2";
    case BoundaryTag::Gamma3: return "GAMMA3";
    }
    return "?";
}

std::optional<BoundaryTag> parse_boundary_tag(std::string_view text)
{
    if (text == "GAMMA1") return BoundaryTag::Gamma1;
    if (text == "GAMMA2") return BoundaryTag::Gamma2;
    if (text == "GAMMA3") return BoundaryTag::Gamma3;
    return std::nullopt;
}

namespace {

double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

Mesh::Mesh(std::vector<Point> vertices,
           std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary)
    : vertices_(std::move(vertices))
    , triangles_(std::move(triangles))
    , boundary_(std::move(boundary))
{
    const int nv = num_vertices();
    if (triangles_.empty()) throw MeshError("mesh has no triangles");

    double extent = 0.0;
    for (const auto& v : vertices_) extent = std::max(extent, v.cwiseAbs().maxCoeff());
    const double area_floor = 1e-14 * std::max(extent * extent, 1e-300);

    areas_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        auto& tri = triangles_[t];
        for (int v : tri) {
            if (v < 0 || v >= nv)
                throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(v) + " out of range");
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
        double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        if (std::abs(a) <= area_floor)
            throw MeshError("positive-area invariant violated: triangle " + std::to_string(t) +
                            " is degenerate");
        if (a < 0.0) {
            std::swap(tri[1], tri[2]);
            a = -a;
            warnings_.push_back("triangle " + std::to_string(t) +
                                " was clockwise and has been reoriented");
        }
        areas_[t] = a;
    }

    // Unique edges in order of first appearance.
    std::map<std::pair<int, int>, int> index;
    triangle_edges_.resize(triangles_.size());
    for (int t = 0; t < num_triangles(); ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            const int a = tri[(i + 1) % 3];
            const int b = tri[(i + 2) % 3];
            auto [it, inserted] = index.try_emplace(edge_key(a, b), num_edges());
            if (inserted) {
                Edge e;
                e.vertices = {a, b};
                e.cells = {t, -1};
                const Point tangent = vertices_[b] - vertices_[a];
                e.length = tangent.norm();
                e.normal = Point(tangent.y(), -tangent.x()) / e.length;
                edges_.push_back(e);
            } else {
                Edge& e = edges_[it->second];
                if (e.cells[1] >= 0)
                    throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") is shared by more than two triangles");
                if (e.vertices[0] != b || e.vertices[1] != a)
                    throw MeshError("interior edge (" + std::to_string(a) + "," +
                                    std::to_string(b) +
                                    ") is traversed in the same direction by both triangles");
                e.cells[1] = t;
            }
            triangle_edges_[t][i] = it->second;
        }
    }

    std::vector<char> seen(edges_.size(), 0);
    for (std::size_t b = 0; b < boundary_.size(); ++b) {
        const auto& be = boundary_[b];
        auto it = index.find(edge_key(be.vertices[0], be.vertices[1]));
        if (it == index.end())
            throw MeshError("boundary entry " + std::to_string(b) + " is not an edge of the mesh");
        Edge& e = edges_[it->second];
        if (!e.is_boundary())
            throw MeshError("boundary entry " + std::to_string(b) +
                            " refers to an interior edge (belongs to two triangles)");
        if (seen[it->second])
            throw MeshError("tag partition invariant violated: boundary edge listed twice");
        seen[it->second] = 1;
        e.tag = be.tag;
    }
    bool has_gamma1 = false;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].is_boundary() && !seen[e])
            throw MeshError("tag partition invariant violated: boundary edge (" +
                            std::to_string(edges_[e].vertices[0]) + "," +
                            std::to_string(edges_[e].vertices[1]) + ") carries no tag");
        if (edges_[e].tag == BoundaryTag::Gamma1) has_gamma1 = true;
    }
    if (!has_gamma1) throw MeshError("GAMMA1 must be nonempty");
}

std::array<Point, 3> Mesh::triangle_points(int t) const
{
    const auto& tri = triangles_[t];
    return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

Point Mesh::centroid(int t) const
{
    const auto p = triangle_points(t);
    return (p[0] + p[1] + p[2]) / 3.0;
}

double Mesh::total_area() const
{
    double s = 0.0;
    for (double a : areas_) s += a;
    return s;
}

std::vector<int> Mesh::tagged_vertices(BoundaryTag tag) const
{
    std::vector<int> out;
    for (const auto& be : boundary_) {
        if (be.tag != tag) continue;
        out.push_back(be.vertices[0]);
        out.push_back(be.vertices[1]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Mesh build_rect_mesh(int nx, int ny, const RectExtents& extents, const SideTags& tags)
{
    if (nx < 1 || ny < 1) throw MeshError("nx and ny must be at least 1");
    if (!(extents.x1 > extents.x0) || !(extents.y1 > extents.y0))
        throw MeshError("degenerate rectangle extents");
    if (tags.left != BoundaryTag::Gamma1 && tags.right != BoundaryTag::Gamma1 &&
        tags.bottom != BoundaryTag::Gamma1 && tags.top != BoundaryTag::Gamma1)
        throw MeshError("GAMMA1 must be nonempty: tag at least one side GAMMA1");

    const double hx = (extents.x1 - extents.x0) / nx;
    const double hy = (extents.y1 - extents.y0) / ny;
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

    std::vector<Point> vertices;
    vertices.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x = i == nx ? extents.x1 : extents.x0 + i * hx;
            const double y = j == ny ? extents.y1 : extents.y0 + j * hy;
            vertices.emplace_back(x, y);
        }
    }
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    std::vector<BoundaryEdge> boundary;
    for (int i = 0; i < nx; ++i) boundary.push_back({{id(i, 0), id(i + 1, 0)}, tags.bottom});
    for (int j = 0; j < ny; ++j) boundary.push_back({{id(nx, j), id(nx, j + 1)}, tags.right});
    for (int i = nx; i > 0; --i) boundary.push_back({{id(i, ny), id(i - 1, ny)}, tags.top});
    for (int j = ny; j > 0; --j) boundary.push_back({{id(0, j), id(0, j - 1)}, tags.left});
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

namespace {

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    // Next non-blank line split into tokens; empty when the input is exhausted.
    std::vector<std::string_view> next()
    {
        while (pos_ < text_.size()) {
            const auto end = std::min(text_.find('\n', pos_), text_.size());
            std::string_view line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_no_;
            std::vector<std::string_view> tokens;
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
                if (j > i) tokens.push_back(line.substr(i, j - i));
                i = j;
            }
            if (!tokens.empty()) return tokens;
        }
        return {};
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw MeshError("mesh parse error at line " + std::to_string(line_no_) + ": " + what);
    }

    template <class T>
    T number(std::string_view token) const
    {
        T value{};
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || p != token.data() + token.size())
            fail("expected a number, got '" + std::string(token) + "'");
        return value;
    }

    int section(std::string_view keyword)
    {
        auto tok = next();
        if (tok.size() != 2 || tok[0] != keyword)
            fail("expected '" + std::string(keyword) + " <count>'");
        const int count = number<int>(tok[1]);
        if (count < 0) fail("negative count");
        return count;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

}  // namespace

Mesh read_mesh(std::string_view text)
{
    LineReader in(text);
    auto header = in.next();
    if (header.size() != 2 || header[0] != "poromesh" || header[1] != "1")
        in.fail("expected header 'poromesh 1'");

    std::vector<Point> vertices(in.section("vertices"));
    for (auto& v : vertices) {
        auto tok = in.next();
        if (tok.size() != 2) in.fail("vertex line must be 'x y'");
        v = Point(in.number<double>(tok[0]), in.number<double>(tok[1]));
    }
    std::vector<std::array<int, 3>> triangles(in.section("triangles"));
    for (auto& t : triangles) {
        auto tok = in.next();
        if (tok.size() != 3) in.fail("triangle line must be 'i j k'");
        for (int c = 0; c < 3; ++c) t[c] = in.number<int>(tok[c]);
    }
    std::vector<BoundaryEdge> boundary(in.section("boundary"));
    for (auto& b : boundary) {
        auto tok = in.next();
        if (tok.size() != 3) in.fail("boundary line must be 'i j TAG'");
        b.vertices = {in.number<int>(tok[0]), in.number<int>(tok[1])};
        auto tag = parse_boundary_tag(tok[2]);
        if (!tag) in.fail("unknown boundary tag '" + std::string(tok[2]) + "'");
        b.tag = *tag;
    }
    if (!in.next().empty()) in.fail("trailing content after boundary section");
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

std::string write_mesh(const Mesh& mesh)
{
    std::ostringstream out;
    char buf[64];
    out << "poromesh 1\n";
    out << "vertices " << mesh.num_vertices() << '\n';
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
        out << buf;
    }
    out << "triangles " << mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "boundary " << mesh.boundary_edges().size() << '\n';
    for (const auto& b : mesh.boundary_edges())
        out << b.vertices[0] << ' ' << b.vertices[1] << ' ' << to_string(b.tag) << '\n';
    return out.str();
}

}  // namespace porocontact
