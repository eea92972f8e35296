#pragma once

#include <stdexcept>

#include <Eigen/SparseLU>

#include "porocontact/assembly.hpp"

namespace porocontact {

class FlowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pressure and displacement at one level: either the previous time step or
/// the previous coupling iterate.
struct FlowLevel {
    const Vector& p;
    const Vector& u;
};

struct FlowResult {
    Vector p;
    Vector z;
};

/// Stabilized backward-Euler mixed flow step, multiplied through by dt:
///
///   Mz z - D^T p                    = Gz
///   (dt/mu) D z + S p               = S p_old + L|T|(p_iter - p_old)
///                                     - B^T (u_iter - u_old) + dt Qv
///
/// with S = diag(|T| (1/M + c_f phi0 + L)). Setting L = 0 and p_iter, u_iter
/// equal to the unknowns gives back the unregularized implicit system.
/// The saddle matrix is factored once per (dt, L).
class FlowSolver {
public:
    FlowSolver(const Discretization& disc, double dt, double stab_L);

    FlowResult step(FlowLevel prev_time, FlowLevel prev_iter, const LoadVectors& loads) const;

    /// Per-cell residual of the mass balance, in the per-unit-time form,
    /// tested with each cell indicator.
    Vector mass_balance_residual(const FlowResult& result, FlowLevel prev_time, FlowLevel prev_iter,
                                 const LoadVectors& loads) const;

    /// |T| (1/M + c_f phi0 + L) per cell.
    const Vector& storage_diagonal() const { return storage_; }
    double dt() const { return dt_; }
    double stabilization() const { return stab_L_; }

private:
    Vector mass_rhs(FlowLevel prev_time, FlowLevel prev_iter, const LoadVectors& loads) const;

    const Discretization& disc_;
    double dt_;
    double stab_L_;
    Vector storage_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> factor_;
};

FlowResult flow_step(const Discretization& disc, FlowLevel prev_time, FlowLevel prev_iter,
                     const LoadVectors& loads, double dt);

Vector check_local_mass_balance(const Discretization& disc, const FlowResult& result,
                                FlowLevel prev_time, FlowLevel prev_iter, const LoadVectors& loads,
                                double dt);

}  // namespace porocontact
