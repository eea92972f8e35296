#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "porocontact/mesh.hpp"

namespace porocontact {

enum class SpaceKind { Displacement, Pressure, Flux };

/// Degree-of-freedom layout for one discrete space. Displacement dofs are
/// interleaved per vertex (2v, 2v+1); pressure dofs are triangle indices;
/// flux dofs are global edge indices.
struct DofMap {
    SpaceKind kind;
    int size = 0;
    std::vector<char> essential;  // 1 where the dof is fixed to zero

    int num_essential() const;
    bool is_essential(int dof) const { return essential[dof] != 0; }
};

struct DofMaps {
    DofMap displacement;
    DofMap pressure;
    DofMap flux;
};

/// Builds the three dof maps. Displacement dofs at GAMMA1 vertices and flux
/// dofs on every boundary edge are essential-zero, except flux dofs on edges
/// whose tag appears in `drained_tags` (there the pressure is zero weakly).
DofMaps make_dofmaps(const Mesh& mesh, std::span<const BoundaryTag> drained_tags = {});

inline int displacement_dof(int vertex, int component) { return 2 * vertex + component; }

struct QuadratureRule {
    std::vector<Eigen::Vector3d> points;  // barycentric
    std::vector<double> weights;          // sum to the reference area 1/2
    int degree = 0;
};

/// Three-point edge-midpoint rule, exact for quadratics.
const QuadratureRule& triangle_rule_degree2();
/// Six-point Dunavant rule, exact to degree 4. Used for error norms.
const QuadratureRule& triangle_rule_degree4();

/// Two-point Gauss rule on [0,1]: parameters and weights summing to 1.
struct EdgeRule {
    std::array<double, 2> points;
    std::array<double, 2> weights;
};
const EdgeRule& edge_rule_gauss2();

using TriangleGeometry = std::array<Point, 3>;

double triangle_area(const TriangleGeometry& tri);
Point map_to_physical(const TriangleGeometry& tri, const Eigen::Vector3d& bary);

/// Constant gradients of the three P1 hat functions.
std::array<Point, 3> local_p1_gradients(const TriangleGeometry& tri);

/// Lowest-order Raviart-Thomas basis on one triangle. Function i belongs to
/// the edge opposite vertex i and is sign_i * (x - P_i) / (2|T|): its flux
/// through its own edge along the global normal is exactly 1, its flux
/// through the other two edges is 0, and its divergence is sign_i / |T|.
class Rt0LocalBasis {
public:
    Rt0LocalBasis(const TriangleGeometry& tri, const std::array<double, 3>& signs);

    Point value(int i, const Point& x) const
    {
        return signs_[i] * (x - tri_[i]) / (2.0 * area_);
    }
    double divergence(int i) const { return signs_[i] / area_; }
    double area() const { return area_; }
    const TriangleGeometry& geometry() const { return tri_; }

private:
    TriangleGeometry tri_;
    std::array<double, 3> signs_;
    double area_;
};

Rt0LocalBasis local_rt0_basis(const TriangleGeometry& tri, const std::array<double, 3>& signs);

/// Orientation signs of the three local edges of triangle t: +1 when the
/// global edge normal is outward from t.
std::array<double, 3> rt0_signs(const Mesh& mesh, int t);

/// Per-triangle helpers for piecewise fields.
Eigen::VectorXd cell_divergence(const Mesh& mesh, const Eigen::VectorXd& u);
/// Per-triangle epsilon(u):epsilon(u) (Frobenius), constant for P1.
Eigen::VectorXd cell_strain_squared(const Mesh& mesh, const Eigen::VectorXd& u);
/// Per-triangle grad(u):grad(u), constant for P1.
Eigen::VectorXd cell_gradient_squared(const Mesh& mesh, const Eigen::VectorXd& u);
/// sqrt(sum |T| v_T^2) for a piecewise-constant field.
double p0_l2_norm(const Mesh& mesh, const Eigen::VectorXd& cell_values);

/// RT0 field value inside triangle t at x.
Point evaluate_rt0(const Mesh& mesh, const Eigen::VectorXd& z, int t, const Point& x);
/// Exact interpolation into RT0 by edge-flux integration of a vector field.
template <class Field>
Eigen::VectorXd interpolate_rt0(const Mesh& mesh, Field&& w)
{
    const auto& rule = edge_rule_gauss2();
    Eigen::VectorXd z(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges()[e];
        const Point a = mesh.vertices()[edge.vertices[0]];
        const Point b = mesh.vertices()[edge.vertices[1]];
        double flux = 0.0;
        for (int q = 0; q < 2; ++q) {
            const Point x = a + rule.points[q] * (b - a);
            flux += rule.weights[q] * edge.length * Point(w(x)).dot(edge.normal);
        }
        z[e] = flux;
    }
    return z;
}

}  // namespace porocontact
