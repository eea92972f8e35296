#include "porocontact/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porocontact {

int DofMap::num_essential() const
{
    return static_cast<int>(std::count(essential.begin(), essential.end(), 1));
}

DofMaps make_dofmaps(const Mesh& mesh, std::span<const BoundaryTag> drained_tags)
{
    DofMaps maps{
        {SpaceKind::Displacement, 2 * mesh.num_vertices(), {}},
        {SpaceKind::Pressure, mesh.num_triangles(), {}},
        {SpaceKind::Flux, mesh.num_edges(), {}},
    };
    maps.displacement.essential.assign(maps.displacement.size, 0);
    maps.pressure.essential.assign(maps.pressure.size, 0);
    maps.flux.essential.assign(maps.flux.size, 0);

    for (int v : mesh.tagged_vertices(BoundaryTag::Gamma1)) {
        maps.displacement.essential[displacement_dof(v, 0)] = 1;
        maps.displacement.essential[displacement_dof(v, 1)] = 1;
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges()[e];
        if (!edge.is_boundary()) continue;
        const bool drained =
            std::find(drained_tags.begin(), drained_tags.end(), *edge.tag) != drained_tags.end();
        if (!drained) maps.flux.essential[e] = 1;
    }
    return maps;
}

const QuadratureRule& triangle_rule_degree2()
{
    static const QuadratureRule rule{
        {Eigen::Vector3d(0.5, 0.5, 0.0), Eigen::Vector3d(0.0, 0.5, 0.5),
         Eigen::Vector3d(0.5, 0.0, 0.5)},
        {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
        2};
    return rule;
}

const QuadratureRule& triangle_rule_degree4()
{
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.degree = 4;
        const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1;
        const double w1 = 0.223381589678011 / 2.0;
        const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2;
        const double w2 = 0.109951743655322 / 2.0;
        for (auto [a, b, w] : {std::tuple{a1, b1, w1}, std::tuple{a2, b2, w2}}) {
            r.points.emplace_back(b, a, a);
            r.points.emplace_back(a, b, a);
            r.points.emplace_back(a, a, b);
            r.weights.insert(r.weights.end(), {w, w, w});
        }
        return r;
    }();
    return rule;
}

const EdgeRule& edge_rule_gauss2()
{
    static const EdgeRule rule{
        {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)}, {0.5, 0.5}};
    return rule;
}

double triangle_area(const TriangleGeometry& tri)
{
    const Point d1 = tri[1] - tri[0];
    const Point d2 = tri[2] - tri[0];
    return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

Point map_to_physical(const TriangleGeometry& tri, const Eigen::Vector3d& bary)
{
    return bary[0] * tri[0] + bary[1] * tri[1] + bary[2] * tri[2];
}

std::array<Point, 3> local_p1_gradients(const TriangleGeometry& tri)
{
    const double area = triangle_area(tri);
    if (!(area > 0.0)) throw std::invalid_argument("degenerate or clockwise triangle");
    std::array<Point, 3> grads;
    for (int i = 0; i < 3; ++i) {
        // Gradient of lambda_i is the inward normal of the opposite edge
        // scaled by |e_i| / (2|T|).
        const Point& a = tri[(i + 1) % 3];
        const Point& b = tri[(i + 2) % 3];
        grads[i] = Point(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
    }
    return grads;
}

Rt0LocalBasis::Rt0LocalBasis(const TriangleGeometry& tri, const std::array<double, 3>& signs)
    : tri_(tri), signs_(signs), area_(triangle_area(tri))
{
    if (!(area_ > 0.0)) throw std::invalid_argument("degenerate or clockwise triangle");
}

Rt0LocalBasis local_rt0_basis(const TriangleGeometry& tri, const std::array<double, 3>& signs)
{
    return Rt0LocalBasis(tri, signs);
}

std::array<double, 3> rt0_signs(const Mesh& mesh, int t)
{
    std::array<double, 3> s;
    for (int i = 0; i < 3; ++i) s[i] = mesh.edges()[mesh.triangle_edge(t, i)].cells[0] == t ? 1.0 : -1.0;
    return s;
}

Eigen::VectorXd cell_divergence(const Mesh& mesh, const Eigen::VectorXd& u)
{
    Eigen::VectorXd div(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto grads = local_p1_gradients(mesh.triangle_points(t));
        const auto& tri = mesh.triangles()[t];
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            d += grads[i].x() * u[displacement_dof(tri[i], 0)] +
                 grads[i].y() * u[displacement_dof(tri[i], 1)];
        div[t] = d;
    }
    return div;
}

namespace {

Eigen::Matrix2d p1_gradient(const Mesh& mesh, const Eigen::VectorXd& u, int t)
{
    const auto grads = local_p1_gradients(mesh.triangle_points(t));
    const auto& tri = mesh.triangles()[t];
    Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 3; ++i) {
        const Point ui(u[displacement_dof(tri[i], 0)], u[displacement_dof(tri[i], 1)]);
        grad_u += ui * grads[i].transpose();
    }
    return grad_u;
}

}  // namespace

Eigen::VectorXd cell_strain_squared(const Mesh& mesh, const Eigen::VectorXd& u)
{
    Eigen::VectorXd out(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::Matrix2d g = p1_gradient(mesh, u, t);
        out[t] = (0.5 * (g + g.transpose())).squaredNorm();
    }
    return out;
}

Eigen::VectorXd cell_gradient_squared(const Mesh& mesh, const Eigen::VectorXd& u)
{
    Eigen::VectorXd out(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) out[t] = p1_gradient(mesh, u, t).squaredNorm();
    return out;
}

double p0_l2_norm(const Mesh& mesh, const Eigen::VectorXd& cell_values)
{
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) s += mesh.area(t) * cell_values[t] * cell_values[t];
    return std::sqrt(s);
}

Point evaluate_rt0(const Mesh& mesh, const Eigen::VectorXd& z, int t, const Point& x)
{
    const Rt0LocalBasis basis(mesh.triangle_points(t), rt0_signs(mesh, t));
    Point w = Point::Zero();
    for (int i = 0; i < 3; ++i) w += z[mesh.triangle_edge(t, i)] * basis.value(i, x);
    return w;
}

}  // namespace porocontact
