#include "porocontact/assembly.hpp"

#include <cmath>
#include <string>

namespace porocontact {

using Triplet = Eigen::Triplet<double>;

void MaterialParams::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ParameterError(std::string("invalid material parameter: ") + what);
    };
    require(lambda > 0.0, "lambda must be > 0");
    require(G > 0.0, "G must be > 0");
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require(M > 0.0, "M must be > 0");
    require(c_f >= 0.0, "c_f must be >= 0");
    require(phi0 >= 0.0 && phi0 < 1.0, "phi0 must lie in [0, 1)");
    require(mu_f > 0.0, "mu_f must be > 0");
    require(std::abs(K(0, 1) - K(1, 0)) <= 1e-14 * K.cwiseAbs().maxCoeff(), "K must be symmetric");
    require(K(0, 0) > 0.0 && K.determinant() > 0.0, "K must be positive definite");
    if (alpha > 0.0)
        require(stabilization() > 0.0, "stab_L must be > 0");
    else
        require(stabilization() >= 0.0, "stab_L must be >= 0");
}

SparseMatrix assemble_elasticity(const Mesh& mesh, const DofMaps& dofs, const MaterialParams& params)
{
    std::vector<Triplet> trips;
    trips.reserve(36 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = local_p1_gradients(mesh.triangle_points(t));
        const double area = mesh.area(t);
        const auto& tri = mesh.triangles()[t];
        for (int i = 0; i < 3; ++i) {
            for (int a = 0; a < 2; ++a) {
                for (int j = 0; j < 3; ++j) {
                    for (int b = 0; b < 2; ++b) {
                        const double eps_eps =
                            0.5 * ((a == b ? g[i].dot(g[j]) : 0.0) + g[i][b] * g[j][a]);
                        const double value =
                            area * (2.0 * params.G * eps_eps + params.lambda * g[i][a] * g[j][b]);
                        trips.emplace_back(displacement_dof(tri[i], a), displacement_dof(tri[j], b), value);
                    }
                }
            }
        }
    }
    SparseMatrix A(dofs.displacement.size, dofs.displacement.size);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

SparseMatrix assemble_coupling(const Mesh& mesh, const DofMaps& dofs, double alpha)
{
    std::vector<Triplet> trips;
    if (alpha != 0.0) {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto g = local_p1_gradients(mesh.triangle_points(t));
            const auto& tri = mesh.triangles()[t];
            for (int i = 0; i < 3; ++i)
                for (int a = 0; a < 2; ++a)
                    trips.emplace_back(displacement_dof(tri[i], a), t, alpha * mesh.area(t) * g[i][a]);
        }
    }
    SparseMatrix B(dofs.displacement.size, dofs.pressure.size);
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

SparseMatrix assemble_rt0_mass(const Mesh& mesh, const DofMaps& dofs, const Eigen::Matrix2d& K)
{
    const Eigen::Matrix2d Kinv = K.inverse();
    const auto& rule = triangle_rule_degree2();
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto geom = mesh.triangle_points(t);
        const Rt0LocalBasis basis(geom, rt0_signs(mesh, t));
        Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Point x = map_to_physical(geom, rule.points[q]);
            const double w = rule.weights[q] * 2.0 * basis.area();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    local(i, j) += w * basis.value(i, x).dot(Kinv * basis.value(j, x));
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(mesh.triangle_edge(t, i), mesh.triangle_edge(t, j), local(i, j));
    }
    SparseMatrix Mz(dofs.flux.size, dofs.flux.size);
    Mz.setFromTriplets(trips.begin(), trips.end());
    return Mz;
}

SparseMatrix assemble_div(const Mesh& mesh, const DofMaps& dofs)
{
    std::vector<Triplet> trips;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto s = rt0_signs(mesh, t);
        for (int i = 0; i < 3; ++i) trips.emplace_back(t, mesh.triangle_edge(t, i), s[i]);
    }
    SparseMatrix D(dofs.pressure.size, dofs.flux.size);
    D.setFromTriplets(trips.begin(), trips.end());
    return D;
}

SparseMatrix assemble_displacement_mass(const Mesh& mesh, const DofMaps& dofs)
{
    std::vector<Triplet> trips;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const double area = mesh.area(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int a = 0; a < 2; ++a)
                    trips.emplace_back(displacement_dof(tri[i], a), displacement_dof(tri[j], a),
                                       area * (i == j ? 2.0 : 1.0) / 12.0);
    }
    SparseMatrix Mu(dofs.displacement.size, dofs.displacement.size);
    Mu.setFromTriplets(trips.begin(), trips.end());
    return Mu;
}

LoadVectors assemble_loads(const Mesh& mesh, const DofMaps& dofs, const Loads& loads,
                           const MaterialParams& params, double time)
{
    LoadVectors out{Vector::Zero(dofs.displacement.size), Vector::Zero(dofs.pressure.size),
                    Vector::Zero(dofs.flux.size)};
    const auto& rule = triangle_rule_degree2();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto geom = mesh.triangle_points(t);
        const auto& tri = mesh.triangles()[t];
        const double area = mesh.area(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Point x = map_to_physical(geom, rule.points[q]);
            const double w = rule.weights[q] * 2.0 * area;
            if (loads.f0) {
                const Point f = loads.f0(x, time);
                for (int i = 0; i < 3; ++i)
                    for (int a = 0; a < 2; ++a)
                        out.F[displacement_dof(tri[i], a)] += w * f[a] * rule.points[q][i];
            }
            if (loads.q) out.Qv[t] += w * loads.q(x, time);
        }
        if (params.eta && params.rho_f_r * params.g_grav != 0.0) {
            const auto g = local_p1_gradients(geom);
            Point grad_eta = Point::Zero();
            for (int i = 0; i < 3; ++i) grad_eta += params.eta(geom[i]) * g[i];
            const auto s = rt0_signs(mesh, t);
            const Point c = mesh.centroid(t);
            // integral over T of phi_i = s_i (c - P_i) / 2
            for (int i = 0; i < 3; ++i)
                out.Gz[mesh.triangle_edge(t, i)] +=
                    params.rho_f_r * params.g_grav * grad_eta.dot(s[i] * (c - geom[i]) / 2.0);
        }
    }
    if (loads.f2) {
        const auto& rule1d = edge_rule_gauss2();
        for (const auto& be : mesh.boundary_edges()) {
            if (be.tag != BoundaryTag::Gamma2) continue;
            const Point a = mesh.vertices()[be.vertices[0]];
            const Point b = mesh.vertices()[be.vertices[1]];
            const double len = (b - a).norm();
            for (int q = 0; q < 2; ++q) {
                const double s = rule1d.points[q];
                const Point f = loads.f2(a + s * (b - a), time);
                const double w = rule1d.weights[q] * len;
                for (int c = 0; c < 2; ++c) {
                    out.F[displacement_dof(be.vertices[0], c)] += w * f[c] * (1.0 - s);
                    out.F[displacement_dof(be.vertices[1], c)] += w * f[c] * s;
                }
            }
        }
    }
    return out;
}

SparseMatrix eliminate_essential(const SparseMatrix& A, const std::vector<char>& essential)
{
    std::vector<Triplet> trips;
    trips.reserve(A.nonZeros());
    for (int col = 0; col < A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
            if (essential[it.row()] || essential[it.col()]) continue;
            trips.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (std::size_t i = 0; i < essential.size(); ++i)
        if (essential[i]) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    SparseMatrix out(A.rows(), A.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

void zero_essential(Vector& v, const std::vector<char>& essential)
{
    for (std::size_t i = 0; i < essential.size(); ++i)
        if (essential[i]) v[static_cast<Eigen::Index>(i)] = 0.0;
}

Discretization::Discretization(Mesh mesh_in, MaterialParams params_in, std::vector<BoundaryTag> drained)
    : mesh(std::move(mesh_in))
    , params(std::move(params_in))
    , drained_tags(std::move(drained))
    , dofs(make_dofmaps(mesh, drained_tags))
{
    params.validate();
    A = assemble_elasticity(mesh, dofs, params);
    B = assemble_coupling(mesh, dofs, params.alpha);
    Mz = assemble_rt0_mass(mesh, dofs, params.K);
    Mz_plain = assemble_rt0_mass(mesh, dofs, Eigen::Matrix2d::Identity());
    D = assemble_div(mesh, dofs);
    Mu = assemble_displacement_mass(mesh, dofs);
    cell_areas.resize(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) cell_areas[t] = mesh.area(t);
}

}  // namespace porocontact
