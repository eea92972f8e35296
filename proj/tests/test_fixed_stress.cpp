#include <gtest/gtest.h>

#include <random>

#include "porocontact/fixed_stress.hpp"
#include "problems.hpp"

using namespace porocontact;
using namespace porocontact::testing;

namespace {

/// Per-cell divergence from the P1 shape gradients, computed from the vertex
/// coordinates alone.
double local_divergence(const Mesh& mesh, int cell, const Vector& u)
{
    const auto& tri = mesh.triangles()[cell];
    const Point& a = mesh.vertices()[tri[0]];
    const Point& b = mesh.vertices()[tri[1]];
    const Point& c = mesh.vertices()[tri[2]];
    Eigen::Matrix2d J;
    J.col(0) = b - a;
    J.col(1) = c - a;
    const Eigen::Matrix2d Jinv_t = J.inverse().transpose();
    const Point ref_grads[3] = {Point(-1.0, -1.0), Point(1.0, 0.0), Point(0.0, 1.0)};
    double div = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Point g = Jinv_t * ref_grads[i];
        div += g.x() * u[2 * tri[i]] + g.y() * u[2 * tri[i] + 1];
    }
    return div;
}

double max_abs(const Vector& v)
{
    return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
}

}  // namespace

TEST(Beta, UnitParameters)
{
    const MaterialParams p = make_params(1.0, 1.0, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(beta(p), 2.0);
    EXPECT_DOUBLE_EQ(contraction_bound(p), 0.25);
}

TEST(Beta, MixedParameters)
{
    const MaterialParams p = make_params(10.0, 0.8, 2.0, 0.01);
    EXPECT_NEAR(beta(p), 0.671875, 1e-15);
    EXPECT_NEAR(contraction_bound(p), 1.0 / (1.34375 * 1.34375), 1e-15);
    EXPECT_NEAR(contraction_bound(p), 0.5538128718, 1e-10);
}

TEST(Beta, Limits)
{
    EXPECT_NEAR(beta(make_params(1e12, 1.0, 4.0, 0.0)), 0.25, 1e-11);
    EXPECT_LT(contraction_bound(make_params(1.0, 1e-4, 1.0, 0.0)), 1e-15);
    for (double M : {0.1, 1.0, 100.0})
        for (double lambda : {0.5, 1.0, 50.0}) {
            const double b = contraction_bound(make_params(M, 1.0, lambda, 0.0));
            EXPECT_GT(b, 0.0);
            EXPECT_LT(b, 1.0);
        }
}

TEST(Beta, UndefinedForZeroAlpha)
{
    EXPECT_THROW(beta(make_params(1.0, 0.0, 1.0, 0.0)), ParameterError);
    EXPECT_THROW(contraction_bound(make_params(1.0, 0.0, 1.0, 0.0)), ParameterError);
}

TEST(SigmaV, NoIncrementKeepsPrevious)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(3, make_params(1.0, 0.7, 2.0, 0.0), cp.tags);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    State prev = zero_state(disc);
    for (int i = 0; i < prev.p.size(); ++i) prev.p[i] = r(rng);
    for (int i = 0; i < prev.sigma_v.size(); ++i) prev.sigma_v[i] = r(rng);
    const Vector s = update_sigma_v(disc, prev.u, prev.p, prev);
    EXPECT_LE(max_abs(s - prev.sigma_v), 0.0);
}

TEST(SigmaV, ConstantPressureShift)
{
    const ContactProblem cp = contact_problem();
    const double alpha = 0.7, c = 0.3;
    const Discretization disc = make_disc(4, make_params(1.0, alpha, 2.0, 0.0), cp.tags);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    const State prev = zero_state(disc);
    Vector u(disc.dofs.displacement.size);
    for (int i = 0; i < u.size(); ++i) u[i] = r(rng);
    Vector p(disc.mesh.num_triangles());
    for (int i = 0; i < p.size(); ++i) p[i] = r(rng);
    const Vector shifted = p + Vector::Constant(p.size(), c);
    const Vector d = update_sigma_v(disc, u, shifted, prev) - update_sigma_v(disc, u, p, prev);
    EXPECT_LE(max_abs(d - Vector::Constant(d.size(), -alpha * c)), 1e-14);
}

TEST(SigmaV, MatchesPerCellOracle)
{
    const ContactProblem cp = contact_problem();
    const MaterialParams params = make_params(2.0, 0.6, 3.0, 0.0);
    const Discretization disc(build_rect_mesh(3, 2, {0.0, 0.0, 2.0, 1.0}, cp.tags), params);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    State prev = zero_state(disc);
    const int nu = disc.dofs.displacement.size, nc = disc.mesh.num_triangles();
    Vector u(nu), p(nc);
    for (int i = 0; i < nu; ++i) {
        prev.u[i] = r(rng);
        u[i] = r(rng);
    }
    for (int i = 0; i < nc; ++i) {
        prev.p[i] = r(rng);
        prev.sigma_v[i] = r(rng);
        p[i] = r(rng);
    }
    const Vector s = update_sigma_v(disc, u, p, prev);
    for (int c = 0; c < nc; ++c) {
        const double expected = prev.sigma_v[c] +
                                params.lambda * (local_divergence(disc.mesh, c, u) -
                                                 local_divergence(disc.mesh, c, prev.u)) -
                                params.alpha * (p[c] - prev.p[c]);
        EXPECT_NEAR(s[c], expected, 1e-13) << "cell " << c;
    }
}

TEST(InitialState, AbsoluteConvention)
{
    const ContactProblem cp = contact_problem();
    const MaterialParams params = make_params(1.0, 0.5, 2.0, 0.0);
    const Discretization disc = make_disc(2, params, cp.tags);
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    Vector u0(disc.dofs.displacement.size), p0(disc.mesh.num_triangles());
    for (int i = 0; i < u0.size(); ++i) u0[i] = r(rng);
    for (int i = 0; i < p0.size(); ++i) p0[i] = r(rng);
    const State s = initial_state(disc, u0, p0);
    for (int c = 0; c < p0.size(); ++c)
        EXPECT_NEAR(s.sigma_v[c], params.lambda * local_divergence(disc.mesh, c, u0) - params.alpha * p0[c], 1e-13);
    EXPECT_EQ(s.z.size(), disc.dofs.flux.size);
    EXPECT_EQ(max_abs(s.z), 0.0);
}

TEST(TimeStep, ContractsAtTheGuaranteedRate)
{
    const ContactProblem cp = contact_problem();
    for (const auto& params :
         {make_params(1.0, 1.0, 1.0, 0.0), make_params(10.0, 0.8, 2.0, 0.01), make_params(0.1, 1.0, 5.0, 0.0)}) {
        const Discretization disc = make_disc(8, params, cp.tags);
        const TimeStepResult r = solve_time_step(disc, cp.loads, zero_state(disc), cp.dt);
        ASSERT_TRUE(r.report.converged);
        EXPECT_GT(r.contact.active_count(), 0);
        const double bound = contraction_bound(params);
        int checked = 0;
        for (const auto& row : r.report.rows) {
            EXPECT_EQ(row.k, 1);
            EXPECT_LE(row.dsigma_identity_error, 1e-13);
            if (row.n < 2) {
                EXPECT_TRUE(std::isnan(row.ratio));
                continue;
            }
            EXPECT_DOUBLE_EQ(row.bound, bound);
            EXPECT_LE(row.ratio, bound + 1e-8);
            EXPECT_LE(row.composite_lhs, row.composite_rhs * (1.0 + 1e-8));
            ++checked;
        }
        EXPECT_GE(checked, 3);
    }
}

TEST(TimeStep, ConvergedStateIsAFixedPoint)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(6, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    FixedStressOptions opts;
    opts.tol = 1e-13;
    const State prev = zero_state(disc);
    const TimeStepResult r = solve_time_step(disc, cp.loads, prev, cp.dt, opts);
    ASSERT_TRUE(r.report.converged);
    const CoupledIterate again = coupled_iterate(disc, cp.loads, prev, r.state, cp.dt, opts);
    const double scale = std::max(p0_l2_norm(disc.mesh, r.state.sigma_v), 1.0);
    EXPECT_LE(again.row.norm_dsigma, 1e-11 * scale);
    EXPECT_LE(again.row.norm_adp, 1e-11 * scale);
    EXPECT_LE(max_abs(again.next.u - r.state.u), 1e-11 * std::max(max_abs(r.state.u), 1.0));
    EXPECT_EQ(again.contact.active_count(), r.contact.active_count());
}

TEST(TimeStep, ZeroAlphaDecouples)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(6, make_params(1.0, 0.0, 1.0, 0.0), cp.tags);
    const TimeStepResult r = solve_time_step(disc, cp.loads, zero_state(disc), cp.dt);
    ASSERT_TRUE(r.report.converged);
    EXPECT_LE(r.report.rows.size(), 2u);
    for (const auto& row : r.report.rows) EXPECT_TRUE(std::isnan(row.bound));
}

TEST(TimeStep, UnderStabilizedFailsOrStopsContracting)
{
    const ContactProblem cp = contact_problem();
    MaterialParams params = make_params(10.0, 1.0, 1.0, 0.0);
    params.stab_L = 0.1 * params.alpha * params.alpha / (2.0 * params.lambda);
    const Discretization disc = make_disc(8, params, cp.tags);
    FixedStressOptions opts;
    opts.max_iters = 200;
    const double bound = contraction_bound(params);
    try {
        const TimeStepResult r = solve_time_step(disc, cp.loads, zero_state(disc), cp.dt, opts);
        double worst = 0.0;
        for (const auto& row : r.report.rows)
            if (!std::isnan(row.ratio)) worst = std::max(worst, row.ratio);
        EXPECT_GT(worst, bound);
    } catch (const FixedStressError& e) {
        EXPECT_FALSE(e.report.converged);
        EXPECT_FALSE(e.report.rows.empty());
        EXPECT_FALSE(e.report.stopping_reason.empty());
    }
}

TEST(TimeStep, RejectsNonPositiveTolerance)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(2, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    FixedStressOptions opts;
    opts.tol = 0.0;
    EXPECT_THROW(solve_time_step(disc, cp.loads, zero_state(disc), cp.dt, opts), ParameterError);
}

TEST(Simulation, ZeroDataStaysZero)
{
    const ContactProblem cp = contact_problem();
    Loads none;
    none.gap = [](const Point&, double) { return 0.0; };
    const Discretization disc = make_disc(4, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    SimulationSettings settings;
    settings.dt = 0.25;
    settings.T = 1.0;
    const SimulationResult r = run_simulation(disc, none, settings);
    ASSERT_FALSE(r.failure);
    ASSERT_EQ(r.states.size(), 5u);
    for (const auto& s : r.states) {
        EXPECT_EQ(max_abs(s.u), 0.0);
        EXPECT_EQ(max_abs(s.p), 0.0);
        EXPECT_EQ(max_abs(s.z), 0.0);
        EXPECT_EQ(max_abs(s.sigma_v), 0.0);
    }
    EXPECT_NEAR(r.states.back().time, 1.0, 1e-14);
}

TEST(Simulation, FirstStepEqualsSingleStepSolve)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(6, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    SimulationSettings settings;
    settings.dt = cp.dt;
    settings.T = cp.dt;
    const SimulationResult r = run_simulation(disc, cp.loads, settings);
    ASSERT_FALSE(r.failure);
    ASSERT_EQ(r.states.size(), 2u);
    const TimeStepResult single = solve_time_step(disc, cp.loads, zero_state(disc), cp.dt);
    EXPECT_EQ(max_abs(r.states[1].u - single.state.u), 0.0);
    EXPECT_EQ(max_abs(r.states[1].p - single.state.p), 0.0);
    EXPECT_EQ(max_abs(r.states[1].z - single.state.z), 0.0);
    EXPECT_EQ(r.reports[0].rows.size(), single.report.rows.size());
}

TEST(Simulation, TimeStepRefinementIsConsistent)
{
    const ContactProblem cp = free_problem();
    const Discretization disc = make_disc(6, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    auto final_pressure = [&](double dt) {
        SimulationSettings settings;
        settings.dt = dt;
        settings.T = 0.4;
        const SimulationResult r = run_simulation(disc, cp.loads, settings);
        EXPECT_FALSE(r.failure);
        return r.states.back().p;
    };
    const Vector p1 = final_pressure(0.2), p2 = final_pressure(0.1), p4 = final_pressure(0.05);
    const double d_coarse = max_abs(p1 - p2), d_fine = max_abs(p2 - p4);
    EXPECT_GT(d_coarse, 0.0);
    EXPECT_LT(d_fine, d_coarse);
}

TEST(Simulation, RejectsBadTimeWindow)
{
    const ContactProblem cp = contact_problem();
    const Discretization disc = make_disc(2, make_params(1.0, 1.0, 1.0, 0.0), cp.tags);
    SimulationSettings settings;
    settings.dt = 0.5;
    settings.T = 0.1;
    EXPECT_THROW(run_simulation(disc, cp.loads, settings), ParameterError);
    EXPECT_EQ(num_time_steps(0.1, 1.0), 10);
}
