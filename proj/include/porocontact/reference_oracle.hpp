#pragma once

#include <algorithm>
#include <stdexcept>

#include "porocontact/contact.hpp"
#include "porocontact/fixed_stress.hpp"

namespace porocontact {

struct MonolithicOptions {
    ContactOptions contact;
};

struct MonolithicResult {
    State state;
    Vector multipliers;
    ActiveSet active;
    int iterations = 0;
};

/// Fully implicit (unregularized) single time step: the flow equations and the
/// contact problem solved together. Contact is resolved by the primal-dual
/// active-set update applied to the coupled system, with each trial set
/// solved exactly as one sparse block system in (u, p, z, multipliers).
MonolithicResult monolithic_step(const Discretization& disc, const Loads& loads,
                                 const State& prev_time, double dt,
                                 const MonolithicOptions& options = {},
                                 const ActiveSet* initial_active = nullptr);

/// Solves the coupled block system for one fixed active set.
MonolithicResult monolithic_solve_for_active_set(const Discretization& disc, const LoadVectors& loads,
                                                 const ContactConstraints& constraints,
                                                 const State& prev_time, double dt,
                                                 const ActiveSet& active);

/// Brute force over all 2^m active sets with a dense KKT solve each; returns
/// the KKT-feasible one. Only for m <= 16.
ContactSolution enumerate_contact_vi(const SparseMatrix& A, const std::vector<char>& essential,
                                     const Vector& rhs, const ContactConstraints& constraints);

/// Brute force for the coupled step: every active set gets a dense coupled
/// solve; the KKT-feasible one is returned.
MonolithicResult enumerate_monolithic(const Discretization& disc, const Loads& loads,
                                      const State& prev_time, double dt);

/// Relative discrepancies ||a - b|| / ||b|| in the natural norms of each
/// space; absolute when ||b|| is negligible.
struct StateDiscrepancy {
    double p_l2 = 0.0;
    double u_h1 = 0.0;
    double z_hdiv = 0.0;

    double max() const { return std::max({p_l2, u_h1, z_hdiv}); }
};

struct FieldNorms {
    double p_l2 = 0.0;
    double u_h1 = 0.0;
    double z_hdiv = 0.0;
};

FieldNorms field_norms(const Discretization& disc, const Vector& u, const Vector& p, const Vector& z);

StateDiscrepancy compare_states(const State& a, const State& b, const Discretization& disc);

}  // namespace porocontact
