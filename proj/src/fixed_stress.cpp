#include "porocontact/fixed_stress.hpp"

#include <cmath>

namespace porocontact {

State initial_state(const Discretization& disc, const Vector& u0, const Vector& p0, double time)
{
    State s;
    s.u = u0;
    s.p = p0;
    s.z = Vector::Zero(disc.dofs.flux.size);
    s.sigma_v = disc.params.lambda * cell_divergence(disc.mesh, u0) - disc.params.alpha * p0;
    s.time = time;
    return s;
}

State zero_state(const Discretization& disc, double time)
{
    return initial_state(disc, Vector::Zero(disc.dofs.displacement.size),
                         Vector::Zero(disc.dofs.pressure.size), time);
}

double beta(const MaterialParams& params)
{
    if (params.alpha <= 0.0) throw ParameterError("beta is undefined for alpha = 0");
    const double a2 = params.alpha * params.alpha;
    return 1.0 / (params.M * a2) + params.c_f * params.phi0 / a2 + 1.0 / params.lambda;
}

double contraction_bound(const MaterialParams& params)
{
    const double lb = params.lambda * beta(params);
    return 1.0 / (lb * lb);
}

Vector update_sigma_v(const Discretization& disc, const Vector& u, const Vector& p,
                      const State& prev_time)
{
    return prev_time.sigma_v + disc.params.lambda * cell_divergence(disc.mesh, u - prev_time.u) -
           disc.params.alpha * (p - prev_time.p);
}

FixedStressStep::FixedStressStep(const Discretization& disc, const Loads& loads, double dt,
                                 double time_new, const FixedStressOptions& options)
    : disc_(disc)
    , dt_(dt)
    , time_(time_new)
    , loads_(assemble_loads(disc.mesh, disc.dofs, loads, disc.params, time_new))
    , flow_(disc, dt, disc.params.stabilization())
    , contact_(disc.A, disc.dofs.displacement.essential,
               build_constraints(disc.mesh, disc.dofs, loads.gap, time_new), options.contact)
{}

CoupledIterate FixedStressStep::iterate(const State& prev_time, const State& current,
                                        const ActiveSet* active_guess) const
{
    const auto& params = disc_.params;
    const FlowLevel old_level{prev_time.p, prev_time.u};
    const FlowLevel iter_level{current.p, current.u};
    FlowResult flow = flow_.step(old_level, iter_level, loads_);

    CoupledIterate out;
    out.mass_residual = flow_.mass_balance_residual(flow, old_level, iter_level, loads_);
    {
        const Vector terms = flow_.storage_diagonal().cwiseProduct(flow.p).cwiseAbs() +
                             (dt_ / params.mu_f) * (disc_.D * flow.z).cwiseAbs();
        const double scale =
            std::max({terms.cwiseAbs().maxCoeff() / dt_, loads_.Qv.cwiseAbs().maxCoeff(),
                      flow_.storage_diagonal().cwiseProduct(prev_time.p).cwiseAbs().maxCoeff() / dt_,
                      std::numeric_limits<double>::min()});
        out.row.mass_residual = out.mass_residual.cwiseAbs().maxCoeff() / scale;
    }

    const Vector rhs = loads_.F + disc_.B * flow.p;
    out.contact = contact_.solve(rhs, active_guess);

    State& next = out.next;
    next.u = out.contact.u;
    next.p = std::move(flow.p);
    next.z = std::move(flow.z);
    next.sigma_v = update_sigma_v(disc_, next.u, next.p, prev_time);
    next.k = prev_time.k + 1;
    next.time = time_;

    const Vector du = next.u - current.u;
    const Vector dp = next.p - current.p;
    const Vector dz = next.z - current.z;
    const Vector dsigma = next.sigma_v - current.sigma_v;
    const Vector div_du = cell_divergence(disc_.mesh, du);
    const Eigen::VectorXd eps_sq = cell_strain_squared(disc_.mesh, du);

    IterationRecord& row = out.row;
    row.k = next.k;
    row.norm_dsigma = p0_l2_norm(disc_.mesh, dsigma);
    row.norm_adp = params.alpha * p0_l2_norm(disc_.mesh, dp);
    row.norm_dz = std::sqrt(std::max(0.0, dz.dot(disc_.Mz * dz)));
    row.norm_eps_du = std::sqrt(disc_.cell_areas.dot(eps_sq));
    row.norm_div_du = p0_l2_norm(disc_.mesh, div_du);
    row.active_set_size = out.contact.active_count();
    row.contact_iterations = out.contact.iterations;
    row.dsigma_identity_error =
        p0_l2_norm(disc_.mesh, dsigma - (params.lambda * div_du - params.alpha * dp));
    return out;
}

CoupledIterate coupled_iterate(const Discretization& disc, const Loads& loads,
                               const State& prev_time, const State& current, double dt,
                               const FixedStressOptions& options)
{
    return FixedStressStep(disc, loads, dt, prev_time.time + dt, options).iterate(prev_time, current);
}

namespace {

TimeStepResult iterate_to_convergence(const Discretization& disc, const FixedStressStep& step,
                                      const State& prev_time, const FixedStressOptions& options)
{
    const auto& params = disc.params;
    const bool monitored = params.alpha > 0.0;
    const double bound = monitored ? contraction_bound(params) : kUndefined;
    const double beta_value = monitored ? beta(params) : kUndefined;
    const double stop_at =
        options.tol * std::max(p0_l2_norm(disc.mesh, prev_time.sigma_v), options.stress_floor);

    TimeStepResult result;
    result.report.k = prev_time.k + 1;
    State current = prev_time;
    ActiveSet active;
    double prev_dsigma_sq = kUndefined;

    for (int n = 1; n <= options.max_iters; ++n) {
        CoupledIterate it = step.iterate(prev_time, current, active.empty() ? nullptr : &active);
        IterationRecord& row = it.row;
        row.n = n;
        row.bound = bound;
        const double dsigma_sq = row.norm_dsigma * row.norm_dsigma;
        if (n >= 2) {
            if (prev_dsigma_sq > 0.0) row.ratio = dsigma_sq / prev_dsigma_sq;
            if (monitored) {
                row.composite_lhs = dsigma_sq +
                                    2.0 * step.dt() / (params.mu_f * beta_value) * row.norm_dz * row.norm_dz +
                                    4.0 * params.G * params.lambda * row.norm_eps_du * row.norm_eps_du +
                                    params.lambda * params.lambda * row.norm_div_du * row.norm_div_du;
                row.composite_rhs = bound * prev_dsigma_sq;
            }
        }
        prev_dsigma_sq = dsigma_sq;
        active = it.contact.active;
        result.report.rows.push_back(row);
        current = std::move(it.next);
        result.contact = std::move(it.contact);

        if (!std::isfinite(row.norm_dsigma)) {
            result.report.stopping_reason = "diverged (non-finite dsigma_v)";
            throw FixedStressError("fixed-stress iteration diverged at iteration " + std::to_string(n),
                                   result.report);
        }
        if (row.norm_dsigma <= stop_at) {
            result.report.converged = true;
            result.report.stopping_reason = "dsigma_v below tolerance";
            result.state = std::move(current);
            return result;
        }
    }
    result.report.stopping_reason = "max_iters exceeded";
    std::string hint;
    if (monitored && params.stabilization() <= params.alpha * params.alpha / (2.0 * params.lambda))
        hint = " (stab_L is not above alpha^2/(2 lambda))";
    throw FixedStressError("fixed-stress iteration did not converge in " +
                               std::to_string(options.max_iters) + " iterations" + hint,
                           result.report);
}

}  // namespace

TimeStepResult solve_time_step(const Discretization& disc, const Loads& loads, const State& prev_time,
                               double dt, const FixedStressOptions& options)
{
    if (!(options.tol > 0.0)) throw ParameterError("tol must be positive");
    const FixedStressStep step(disc, loads, dt, prev_time.time + dt, options);
    return iterate_to_convergence(disc, step, prev_time, options);
}

int num_time_steps(double dt, double T)
{
    if (!(dt > 0.0) || !(T >= dt * (1.0 - 1e-12)))
        throw ParameterError("need dt > 0 and T >= dt");
    return static_cast<int>(std::llround(T / dt));
}

SimulationResult run_simulation(const Discretization& disc, const Loads& loads,
                                const SimulationSettings& settings)
{
    const int steps = num_time_steps(settings.dt, settings.T);
    SimulationResult out;
    out.states.push_back(settings.initial ? *settings.initial : zero_state(disc));
    for (int k = 1; k <= steps; ++k) {
        const State& prev = out.states.back();
        try {
            TimeStepResult r = solve_time_step(disc, loads, prev, settings.dt, settings.options);
            out.states.push_back(std::move(r.state));
            out.reports.push_back(std::move(r.report));
            out.contacts.push_back(std::move(r.contact));
        } catch (const FixedStressError& e) {
            out.reports.push_back(e.report);
            out.failure = "time step " + std::to_string(k) + ": " + e.what();
            break;
        } catch (const std::exception& e) {
            out.failure = "time step " + std::to_string(k) + ": " + e.what();
            break;
        }
    }
    return out;
}

}  // namespace porocontact
