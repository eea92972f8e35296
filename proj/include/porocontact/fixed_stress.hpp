#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "porocontact/assembly.hpp"
#include "porocontact/contact.hpp"
#include "porocontact/flow.hpp"

namespace porocontact {

/// Discrete fields at one time level (or one coupling iterate).
struct State {
    Vector u;        // displacement, 2 per vertex
    Vector p;        // pressure, 1 per cell
    Vector z;        // flux, 1 per edge (net flux along the global normal)
    Vector sigma_v;  // volumetric mean total stress, 1 per cell
    int k = 0;
    double time = 0.0;
};

/// State with sigma_v = lambda div(u0) - alpha p0 and zero flux.
State initial_state(const Discretization& disc, const Vector& u0, const Vector& p0, double time = 0.0);
State zero_state(const Discretization& disc, double time = 0.0);

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

/// One coupling iteration. All norms are L2 over the domain of differences
/// between consecutive iterates. `ratio`, `composite_lhs` and `composite_rhs`
/// are NaN for n = 1 (the first difference involves the warm start).
struct IterationRecord {
    int k = 0;
    int n = 0;
    double norm_dsigma = 0.0;
    double norm_adp = 0.0;
    double norm_dz = 0.0;       // ||K^{-1/2} dz||
    double norm_eps_du = 0.0;
    double norm_div_du = 0.0;
    double ratio = kUndefined;  // ||dsigma^n||^2 / ||dsigma^{n-1}||^2
    double bound = kUndefined;  // (1 / (lambda beta))^2, NaN when alpha = 0
    int active_set_size = 0;
    double composite_lhs = kUndefined;
    double composite_rhs = kUndefined;  // bound * ||dsigma^{n-1}||^2
    double dsigma_identity_error = 0.0;  // ||(sigma^n - sigma^{n-1}) - (lambda div du - alpha dp)||
    double mass_residual = 0.0;          // max |cell residual| / scale
    int contact_iterations = 0;
};

struct IterationReport {
    int k = 0;
    std::vector<IterationRecord> rows;
    std::string stopping_reason;
    bool converged = false;
};

class FixedStressError : public std::runtime_error {
public:
    FixedStressError(const std::string& what, IterationReport report)
        : std::runtime_error(what), report(std::move(report))
    {}
    IterationReport report;
};

/// 1/(M alpha^2) + c_f phi0 / alpha^2 + 1/lambda. Throws for alpha = 0.
double beta(const MaterialParams& params);
/// (1 / (lambda beta))^2, the guaranteed per-iteration decay of ||dsigma_v||^2.
double contraction_bound(const MaterialParams& params);

/// sigma_v = sigma_v^{k-1} + lambda div(u - u^{k-1}) - alpha (p - p^{k-1}), per cell.
Vector update_sigma_v(const Discretization& disc, const Vector& u, const Vector& p,
                      const State& prev_time);

struct FixedStressOptions {
    double tol = 1e-10;
    int max_iters = 500;
    double stress_floor = 1.0;
    ContactOptions contact;
};

struct CoupledIterate {
    State next;
    IterationRecord row;  // difference norms only; ratio fields filled by the caller
    ContactSolution contact;
    Vector mass_residual;
};

/// Per-time-step machinery: the flow factorization and the contact solver
/// with the loads of the new time level.
class FixedStressStep {
public:
    FixedStressStep(const Discretization& disc, const Loads& loads, double dt, double time_new,
                    const FixedStressOptions& options);

    /// Flow solve followed by the contact mechanics solve.
    CoupledIterate iterate(const State& prev_time, const State& current,
                           const ActiveSet* active_guess = nullptr) const;

    const FlowSolver& flow() const { return flow_; }
    const ContactSolver& contact() const { return contact_; }
    const LoadVectors& loads() const { return loads_; }
    double time() const { return time_; }
    double dt() const { return dt_; }

private:
    const Discretization& disc_;
    double dt_;
    double time_;
    LoadVectors loads_;
    FlowSolver flow_;
    ContactSolver contact_;
};

CoupledIterate coupled_iterate(const Discretization& disc, const Loads& loads,
                               const State& prev_time, const State& current, double dt,
                               const FixedStressOptions& options = {});

struct TimeStepResult {
    State state;
    IterationReport report;
    ContactSolution contact;
};

TimeStepResult solve_time_step(const Discretization& disc, const Loads& loads, const State& prev_time,
                               double dt, const FixedStressOptions& options = {});

struct SimulationSettings {
    double dt = 1.0;
    double T = 1.0;
    std::optional<State> initial;  // zero state when unset
    FixedStressOptions options;
};

struct SimulationResult {
    std::vector<State> states;  // states[0] is the initial state
    std::vector<IterationReport> reports;
    std::vector<ContactSolution> contacts;
    std::optional<std::string> failure;
};

/// Backward-Euler march over [0, T]. A failing step stops the march; the
/// completed steps and the failing step's report are kept.
SimulationResult run_simulation(const Discretization& disc, const Loads& loads,
                                const SimulationSettings& settings);

int num_time_steps(double dt, double T);

}  // namespace porocontact
