#include <gtest/gtest.h>

#include <random>

#include "porocontact/flow.hpp"
#include "problems.hpp"

using namespace porocontact;
using namespace porocontact::testing;

namespace {

const SideTags kClosed{BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma2, BoundaryTag::Gamma2};

double local_divergence(const Mesh& mesh, int cell, const Vector& u)
{
    const auto& tri = mesh.triangles()[cell];
    const Point& a = mesh.vertices()[tri[0]];
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices()[tri[1]] - a;
    J.col(1) = mesh.vertices()[tri[2]] - a;
    const Eigen::Matrix2d Jinv_t = J.inverse().transpose();
    const Point ref_grads[3] = {Point(-1.0, -1.0), Point(1.0, 0.0), Point(0.0, 1.0)};
    double div = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Point g = Jinv_t * ref_grads[i];
        div += g.x() * u[2 * tri[i]] + g.y() * u[2 * tri[i] + 1];
    }
    return div;
}

/// Integral over the cell of (x - P) . K^{-1} (x - P) / (2|T|)^2, P the vertex
/// opposite the edge, by the edge-midpoint rule (exact for quadratics).
double rt0_self_mass(const Mesh& mesh, int cell, int edge, const Eigen::Matrix2d& Kinv)
{
    const auto& tri = mesh.triangles()[cell];
    const auto& ev = mesh.edges()[edge].vertices;
    int opposite = -1;
    for (int v : tri)
        if (v != ev[0] && v != ev[1]) opposite = v;
    const Point P = mesh.vertices()[opposite];
    const Point a = mesh.vertices()[tri[0]], b = mesh.vertices()[tri[1]], c = mesh.vertices()[tri[2]];
    const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    double sum = 0.0;
    for (const Point& m : {Point(0.5 * (a + b)), Point(0.5 * (b + c)), Point(0.5 * (c + a))}) {
        const Point d = m - P;
        sum += d.dot(Kinv * d);
    }
    return sum * area / 3.0 / (4.0 * area * area);
}

Vector random_vector(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = r(rng);
    return v;
}

LoadVectors loads_for(const Discretization& disc, const Loads& loads, double t = 0.0)
{
    return assemble_loads(disc.mesh, disc.dofs, loads, disc.params, t);
}

}  // namespace

TEST(FlowStep, MatchesHandBuiltSystemOnTwoTriangles)
{
    MaterialParams params = make_params(2.0, 0.7, 3.0, 0.1);
    params.mu_f = 2.0;
    params.K << 2.0, 0.3, 0.3, 0.5;
    const Discretization disc(build_rect_mesh(1, 1, {0.0, 0.0, 2.0, 1.0}, kClosed), params);
    ASSERT_EQ(disc.mesh.num_triangles(), 2);
    int interior = -1;
    for (int e = 0; e < disc.mesh.num_edges(); ++e)
        if (!disc.mesh.edges()[e].is_boundary()) interior = e;
    ASSERT_GE(interior, 0);

    const double dt = 0.3, L = 0.4, q = 1.5;
    std::mt19937_64 rng(21);
    const Vector p_old = random_vector(2, rng), p_iter = random_vector(2, rng);
    const Vector u_old = random_vector(disc.dofs.displacement.size, rng);
    const Vector u_iter = random_vector(disc.dofs.displacement.size, rng);
    Loads loads;
    loads.q = [q](const Point&, double) { return q; };
    const FlowSolver solver(disc, dt, L);
    const FlowResult r = solver.step({p_old, u_old}, {p_iter, u_iter}, loads_for(disc, loads));

    const Eigen::Matrix2d Kinv = params.K.inverse();
    const Edge& edge = disc.mesh.edges()[interior];
    const double m = rt0_self_mass(disc.mesh, 0, interior, Kinv) + rt0_self_mass(disc.mesh, 1, interior, Kinv);
    double d[2];
    d[edge.cells[0]] = 1.0;
    d[edge.cells[1]] = -1.0;
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    S(0, 0) = m;
    for (int c = 0; c < 2; ++c) {
        const double area = disc.mesh.area(c);
        const double storage = area * (1.0 / params.M + params.c_f * params.phi0 + L);
        S(0, 1 + c) = -d[c];
        S(1 + c, 0) = dt / params.mu_f * d[c];
        S(1 + c, 1 + c) = storage;
        const double coupling = params.alpha * area *
                                (local_divergence(disc.mesh, c, u_iter) - local_divergence(disc.mesh, c, u_old));
        rhs[1 + c] = storage * p_old[c] + L * area * (p_iter[c] - p_old[c]) - coupling + dt * q * area;
    }
    const Eigen::Vector3d x = S.fullPivLu().solve(rhs);

    EXPECT_NEAR(r.z[interior], x[0], 1e-13);
    EXPECT_NEAR(r.p[0], x[1], 1e-13);
    EXPECT_NEAR(r.p[1], x[2], 1e-13);
    for (int e = 0; e < disc.mesh.num_edges(); ++e)
        if (e != interior) EXPECT_EQ(r.z[e], 0.0);
}

TEST(FlowStep, ZeroDataGivesZero)
{
    const Discretization disc = make_disc(4, make_params(1.0, 1.0, 1.0, 0.0), kClosed);
    const Vector p = Vector::Zero(disc.mesh.num_triangles());
    const Vector u = Vector::Zero(disc.dofs.displacement.size);
    const FlowResult r = FlowSolver(disc, 0.1, 1.0).step({p, u}, {p, u}, loads_for(disc, {}));
    EXPECT_EQ(r.p.lpNorm<Eigen::Infinity>(), 0.0);
    EXPECT_EQ(r.z.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(FlowStep, ZeroAlphaIgnoresDisplacement)
{
    const Discretization disc = make_disc(4, make_params(1.0, 0.0, 1.0, 0.0), kClosed);
    std::mt19937_64 rng(22);
    const Vector p_old = random_vector(disc.mesh.num_triangles(), rng);
    const Vector u0 = Vector::Zero(disc.dofs.displacement.size);
    const Vector u1 = random_vector(disc.dofs.displacement.size, rng);
    Loads loads;
    loads.q = [](const Point& x, double) { return x.x() - x.y(); };
    const FlowSolver solver(disc, 0.1, 0.0);
    const LoadVectors lv = loads_for(disc, loads);
    const FlowResult a = solver.step({p_old, u0}, {p_old, u0}, lv);
    const FlowResult b = solver.step({p_old, u0}, {p_old, u1}, lv);
    EXPECT_EQ((a.p - b.p).lpNorm<Eigen::Infinity>(), 0.0);
    EXPECT_EQ((a.z - b.z).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(FlowStep, UniformSourceInClosedDomain)
{
    const MaterialParams params = make_params(2.0, 1.0, 1.0, 0.2);
    const Discretization disc = make_disc(5, params, kClosed);
    const double dt = 0.25, L = 0.3, q = 2.0;
    Loads loads;
    loads.q = [q](const Point&, double) { return q; };
    const Vector p = Vector::Zero(disc.mesh.num_triangles());
    const Vector u = Vector::Zero(disc.dofs.displacement.size);
    const FlowResult r = FlowSolver(disc, dt, L).step({p, u}, {p, u}, loads_for(disc, loads));
    const double expected = dt * q / (params.storage() + L);
    EXPECT_LE((r.p - Vector::Constant(p.size(), expected)).lpNorm<Eigen::Infinity>(), 1e-13);
    EXPECT_LE(r.z.lpNorm<Eigen::Infinity>(), 1e-13);
}

TEST(FlowStep, CellResidualVanishes)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(6, make_params(1.0, 0.8, 2.0, 0.05), cp.tags);
    std::mt19937_64 rng(23);
    const Vector p_old = random_vector(disc.mesh.num_triangles(), rng);
    const Vector p_iter = random_vector(disc.mesh.num_triangles(), rng);
    const Vector u_old = random_vector(disc.dofs.displacement.size, rng);
    const Vector u_iter = random_vector(disc.dofs.displacement.size, rng);
    const LoadVectors lv = loads_for(disc, cp.loads, 0.1);
    const FlowSolver solver(disc, 0.1, 0.5);
    const FlowResult r = solver.step({p_old, u_old}, {p_iter, u_iter}, lv);
    const Vector res = solver.mass_balance_residual(r, {p_old, u_old}, {p_iter, u_iter}, lv);
    EXPECT_LE(res.lpNorm<Eigen::Infinity>(), 1e-12);
    const FlowResult d = flow_step(disc, {p_old, u_old}, {p_iter, u_iter}, lv, 0.1);
    const Vector checked = check_local_mass_balance(disc, d, {p_old, u_old}, {p_iter, u_iter}, lv, 0.1);
    EXPECT_LE(checked.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(FlowStep, CellResidualDetectsPerturbation)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(4, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    const Vector p0 = Vector::Zero(disc.mesh.num_triangles());
    const Vector u0 = Vector::Zero(disc.dofs.displacement.size);
    const LoadVectors lv = loads_for(disc, cp.loads, 0.1);
    const double dt = 0.1, L = 0.5;
    const FlowSolver solver(disc, dt, L);
    FlowResult r = solver.step({p0, u0}, {p0, u0}, lv);
    const Vector before = solver.mass_balance_residual(r, {p0, u0}, {p0, u0}, lv);
    const int cell = 3;
    const double eps = 1e-3;
    r.p[cell] += eps;
    const Vector after = solver.mass_balance_residual(r, {p0, u0}, {p0, u0}, lv);
    for (int c = 0; c < after.size(); ++c)
        if (c != cell) EXPECT_NEAR(after[c], before[c], 1e-15);
    const double expected = disc.cell_areas[cell] * (disc.params.storage() + L) * eps / dt;
    EXPECT_NEAR(std::abs(after[cell] - before[cell]), expected, 1e-9 * expected);
}

TEST(FlowStep, GlobalBalanceInClosedDomain)
{
    const MaterialParams params = make_params(1.0, 0.9, 2.0, 0.1);
    const Discretization disc = make_disc(6, params, kClosed);
    std::mt19937_64 rng(24);
    const Vector p_old = random_vector(disc.mesh.num_triangles(), rng);
    const Vector p_iter = random_vector(disc.mesh.num_triangles(), rng);
    const Vector u_old = random_vector(disc.dofs.displacement.size, rng);
    const Vector u_iter = random_vector(disc.dofs.displacement.size, rng);
    Loads loads;
    loads.q = [](const Point& x, double) { return 1.0 + x.x() * x.y(); };
    const LoadVectors lv = loads_for(disc, loads);
    const double dt = 0.2, L = 0.7;
    const FlowSolver solver(disc, dt, L);
    const FlowResult r = solver.step({p_old, u_old}, {p_iter, u_iter}, lv);
    const Vector& area = disc.cell_areas;
    double stored = 0.0, rhs = dt * lv.Qv.sum();
    for (int c = 0; c < area.size(); ++c) {
        stored += area[c] * (params.storage() + L) * (r.p[c] - p_old[c]);
        rhs += L * area[c] * (p_iter[c] - p_old[c]);
        rhs -= params.alpha * area[c] *
               (local_divergence(disc.mesh, c, u_iter) - local_divergence(disc.mesh, c, u_old));
    }
    EXPECT_NEAR(stored, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST(FlowStep, StabilizationDampsThePressureUpdate)
{
    const Discretization disc = make_disc(4, make_params(1.0, 1.0, 1.0, 0.0), kClosed);
    Loads loads;
    loads.q = [](const Point& x, double) { return 1.0 + x.x(); };
    const LoadVectors lv = loads_for(disc, loads);
    const Vector p = Vector::Zero(disc.mesh.num_triangles());
    const Vector u = Vector::Zero(disc.dofs.displacement.size);
    double previous = std::numeric_limits<double>::infinity();
    for (double L : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        const FlowResult r = FlowSolver(disc, 0.1, L).step({p, u}, {p, u}, lv);
        const double size = p0_l2_norm(disc.mesh, r.p);
        EXPECT_LT(size, previous);
        previous = size;
    }
}

TEST(FlowStep, DrainedSideLowersPressure)
{
    const SideTags tags{BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma2, BoundaryTag::Gamma3};
    const MaterialParams params = make_params(1.0, 1.0, 1.0, 0.0);
    const Discretization closed = make_disc(4, params, tags);
    const Discretization drained(build_rect_mesh(4, 4, {}, tags), params, {BoundaryTag::Gamma3});
    EXPECT_LT(drained.dofs.flux.num_essential(), closed.dofs.flux.num_essential());
    Loads loads;
    loads.q = [](const Point&, double) { return 1.0; };
    const Vector p = Vector::Zero(closed.mesh.num_triangles());
    const Vector u = Vector::Zero(closed.dofs.displacement.size);
    const FlowResult a = FlowSolver(closed, 0.5, 0.0).step({p, u}, {p, u}, loads_for(closed, loads));
    const FlowResult b = FlowSolver(drained, 0.5, 0.0).step({p, u}, {p, u}, loads_for(drained, loads));
    EXPECT_LT(b.p.sum(), a.p.sum());
    EXPECT_GT(b.z.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FlowSolverSetup, RejectsNonPositiveStep)
{
    const Discretization disc = make_disc(2, make_params(1.0, 1.0, 1.0, 0.0), kClosed);
    EXPECT_THROW(FlowSolver(disc, 0.0, 1.0), FlowError);
    EXPECT_THROW(FlowSolver(disc, -1.0, 1.0), FlowError);
}
