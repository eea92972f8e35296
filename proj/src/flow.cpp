#include "porocontact/flow.hpp"

namespace porocontact {

using Triplet = Eigen::Triplet<double>;

FlowSolver::FlowSolver(const Discretization& disc, double dt, double stab_L)
    : disc_(disc), dt_(dt), stab_L_(stab_L)
{
    if (!(dt > 0.0)) throw FlowError("time step must be positive");
    const auto& essential = disc.dofs.flux.essential;
    const int nz = disc.dofs.flux.size;
    const int np = disc.dofs.pressure.size;
    storage_ = disc.cell_areas * (disc.params.storage() + stab_L);

    std::vector<Triplet> trips;
    trips.reserve(disc.Mz.nonZeros() + 2 * disc.D.nonZeros() + nz + np);
    for (int col = 0; col < disc.Mz.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(disc.Mz, col); it; ++it)
            if (!essential[it.row()] && !essential[it.col()])
                trips.emplace_back(it.row(), it.col(), it.value());
    const double flux_scale = dt / disc.params.mu_f;
    for (int e = 0; e < disc.D.outerSize(); ++e) {
        if (essential[e]) continue;
        for (SparseMatrix::InnerIterator it(disc.D, e); it; ++it) {
            trips.emplace_back(e, nz + it.row(), -it.value());
            trips.emplace_back(nz + it.row(), e, flux_scale * it.value());
        }
    }
    for (int e = 0; e < nz; ++e)
        if (essential[e]) trips.emplace_back(e, e, 1.0);
    for (int t = 0; t < np; ++t) trips.emplace_back(nz + t, nz + t, storage_[t]);

    SparseMatrix K(nz + np, nz + np);
    K.setFromTriplets(trips.begin(), trips.end());
    factor_.analyzePattern(K);
    factor_.factorize(K);
    if (factor_.info() != Eigen::Success) throw FlowError("flow saddle system is singular");
}

Vector FlowSolver::mass_rhs(FlowLevel prev_time, FlowLevel prev_iter, const LoadVectors& loads) const
{
    Vector r = storage_.cwiseProduct(prev_time.p) +
               stab_L_ * disc_.cell_areas.cwiseProduct(prev_iter.p - prev_time.p) -
               disc_.B.transpose() * (prev_iter.u - prev_time.u) + dt_ * loads.Qv;
    return r;
}

FlowResult FlowSolver::step(FlowLevel prev_time, FlowLevel prev_iter, const LoadVectors& loads) const
{
    const int nz = disc_.dofs.flux.size;
    const int np = disc_.dofs.pressure.size;
    Vector rhs(nz + np);
    rhs.head(nz) = loads.Gz;
    zero_essential(rhs, disc_.dofs.flux.essential);
    rhs.tail(np) = mass_rhs(prev_time, prev_iter, loads);
    const Vector x = factor_.solve(rhs);
    if (factor_.info() != Eigen::Success) throw FlowError("flow solve failed");
    return {x.tail(np), x.head(nz)};
}

Vector FlowSolver::mass_balance_residual(const FlowResult& result, FlowLevel prev_time,
                                         FlowLevel prev_iter, const LoadVectors& loads) const
{
    const Vector lhs = storage_.cwiseProduct(result.p) +
                       (dt_ / disc_.params.mu_f) * (disc_.D * result.z);
    return (lhs - mass_rhs(prev_time, prev_iter, loads)) / dt_;
}

FlowResult flow_step(const Discretization& disc, FlowLevel prev_time, FlowLevel prev_iter,
                     const LoadVectors& loads, double dt)
{
    return FlowSolver(disc, dt, disc.params.stabilization()).step(prev_time, prev_iter, loads);
}

Vector check_local_mass_balance(const Discretization& disc, const FlowResult& result,
                                FlowLevel prev_time, FlowLevel prev_iter, const LoadVectors& loads,
                                double dt)
{
    return FlowSolver(disc, dt, disc.params.stabilization())
        .mass_balance_residual(result, prev_time, prev_iter, loads);
}

}  // namespace porocontact
