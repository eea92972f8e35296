#include "porocontact/reference_oracle.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/SparseLU>

namespace porocontact {

using Triplet = Eigen::Triplet<double>;

namespace {

std::vector<int> active_indices(const ActiveSet& active)
{
    std::vector<int> idx;
    for (std::size_t i = 0; i < active.size(); ++i)
        if (active[i]) idx.push_back(static_cast<int>(i));
    return idx;
}

struct BlockSystem {
    SparseMatrix matrix;
    Vector rhs;
    int nu, np, nz;
};

// Unknowns ordered (u, p, z, multipliers of the active constraints).
BlockSystem build_block(const Discretization& disc, const LoadVectors& loads,
                        const ContactConstraints& constraints, const State& prev_time, double dt,
                        const std::vector<int>& active)
{
    const auto& ue = disc.dofs.displacement.essential;
    const auto& ze = disc.dofs.flux.essential;
    const int nu = disc.dofs.displacement.size;
    const int np = disc.dofs.pressure.size;
    const int nz = disc.dofs.flux.size;
    const int na = static_cast<int>(active.size());
    const int op = nu, oz = nu + np, ol = nu + np + nz;
    const double flux_scale = dt / disc.params.mu_f;

    std::vector<Triplet> t;
    for (int c = 0; c < disc.A.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(disc.A, c); it; ++it)
            if (!ue[it.row()] && !ue[it.col()]) t.emplace_back(it.row(), it.col(), it.value());
    for (int c = 0; c < disc.B.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(disc.B, c); it; ++it) {
            if (ue[it.row()]) continue;
            t.emplace_back(it.row(), op + c, -it.value());
            t.emplace_back(op + c, it.row(), it.value());
        }
    for (int c = 0; c < np; ++c) t.emplace_back(op + c, op + c, disc.cell_areas[c] * disc.params.storage());
    for (int e = 0; e < disc.D.outerSize(); ++e) {
        if (ze[e]) continue;
        for (SparseMatrix::InnerIterator it(disc.D, e); it; ++it) {
            t.emplace_back(op + it.row(), oz + e, flux_scale * it.value());
            t.emplace_back(oz + e, op + it.row(), -it.value());
        }
    }
    for (int c = 0; c < disc.Mz.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(disc.Mz, c); it; ++it)
            if (!ze[it.row()] && !ze[it.col()]) t.emplace_back(oz + it.row(), oz + it.col(), it.value());
    for (int i = 0; i < nu; ++i)
        if (ue[i]) t.emplace_back(i, i, 1.0);
    for (int e = 0; e < nz; ++e)
        if (ze[e]) t.emplace_back(oz + e, oz + e, 1.0);

    const SparseMatrix Nrows = SparseMatrix(constraints.N.transpose());  // columns = constraints
    for (int a = 0; a < na; ++a)
        for (SparseMatrix::InnerIterator it(Nrows, active[a]); it; ++it) {
            t.emplace_back(ol + a, it.row(), it.value());
            t.emplace_back(it.row(), ol + a, it.value());
        }

    BlockSystem sys{SparseMatrix(ol + na, ol + na), Vector::Zero(ol + na), nu, np, nz};
    sys.matrix.setFromTriplets(t.begin(), t.end());
    Vector F = loads.F;
    zero_essential(F, ue);
    Vector G = loads.Gz;
    zero_essential(G, ze);
    sys.rhs.head(nu) = F;
    sys.rhs.segment(op, np) = disc.cell_areas.cwiseProduct(prev_time.p) * disc.params.storage() +
                              disc.B.transpose() * prev_time.u + dt * loads.Qv;
    sys.rhs.segment(oz, nz) = G;
    for (int a = 0; a < na; ++a) sys.rhs[ol + a] = constraints.gap[active[a]];
    return sys;
}

MonolithicResult unpack(const Discretization& disc, const BlockSystem& sys, const Vector& x,
                        const ContactConstraints& constraints, const std::vector<int>& active,
                        const State& prev_time, double dt)
{
    MonolithicResult r;
    r.state.u = x.head(sys.nu);
    r.state.p = x.segment(sys.nu, sys.np);
    r.state.z = x.segment(sys.nu + sys.np, sys.nz);
    r.state.sigma_v = update_sigma_v(disc, r.state.u, r.state.p, prev_time);
    r.state.k = prev_time.k + 1;
    r.state.time = prev_time.time + dt;
    r.multipliers = Vector::Zero(constraints.size());
    r.active.assign(constraints.size(), 0);
    for (std::size_t a = 0; a < active.size(); ++a) {
        r.multipliers[active[a]] = x[sys.nu + sys.np + sys.nz + static_cast<int>(a)];
        r.active[active[a]] = 1;
    }
    return r;
}

}  // namespace

MonolithicResult monolithic_solve_for_active_set(const Discretization& disc, const LoadVectors& loads,
                                                 const ContactConstraints& constraints,
                                                 const State& prev_time, double dt,
                                                 const ActiveSet& active)
{
    const auto idx = active_indices(active);
    const BlockSystem sys = build_block(disc, loads, constraints, prev_time, dt, idx);
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw std::runtime_error("monolithic block system is singular");
    const Vector x = lu.solve(sys.rhs);
    return unpack(disc, sys, x, constraints, idx, prev_time, dt);
}

MonolithicResult monolithic_step(const Discretization& disc, const Loads& loads,
                                 const State& prev_time, double dt, const MonolithicOptions& options,
                                 const ActiveSet* initial_active)
{
    const double time = prev_time.time + dt;
    const LoadVectors lv = assemble_loads(disc.mesh, disc.dofs, loads, disc.params, time);
    const ContactConstraints constraints = build_constraints(disc.mesh, disc.dofs, loads.gap, time);
    const int m = constraints.size();

    const SparseMatrix Ae = eliminate_essential(disc.A, disc.dofs.displacement.essential);
    Vector scaling(m);
    for (int i = 0; i < m; ++i) {
        const Vector row = constraints.N.row(i).transpose();
        scaling[i] = options.contact.complementarity_scaling * row.dot(Ae * row);
    }

    ActiveSet active = initial_active ? *initial_active : ActiveSet(m, 0);
    for (int it = 1; it <= options.contact.max_active_set_iterations; ++it) {
        MonolithicResult r = monolithic_solve_for_active_set(disc, lv, constraints, prev_time, dt, active);
        r.iterations = it;
        const Vector violation = constraints.N * r.state.u - constraints.gap;
        const double size_scale =
            r.state.u.cwiseAbs().maxCoeff() + (m > 0 ? constraints.gap.maxCoeff() : 0.0);
        ActiveSet next(m, 0);
        for (int i = 0; i < m; ++i)
            next[i] = r.multipliers[i] + scaling[i] * violation[i] > 1e-12 * scaling[i] * size_scale;
        if (next == active) return r;
        active = std::move(next);
    }
    throw std::runtime_error("monolithic active-set loop did not terminate");
}

ContactSolution enumerate_contact_vi(const SparseMatrix& A, const std::vector<char>& essential,
                                     const Vector& rhs, const ContactConstraints& constraints)
{
    const int m = constraints.size();
    if (m > 16) throw std::invalid_argument("exhaustive enumeration limited to 16 constraints");
    const int n = static_cast<int>(A.rows());
    const Eigen::MatrixXd Ae = Eigen::MatrixXd(eliminate_essential(A, essential));
    const Eigen::MatrixXd N = Eigen::MatrixXd(constraints.N);
    Vector r = rhs;
    zero_essential(r, essential);

    std::optional<ContactSolution> best;
    double best_violation = 0.0;
    double free_scale = 0.0;  // size of the unconstrained solution (mask 0)
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        const int k = static_cast<int>(idx.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
        K.topLeftCorner(n, n) = Ae;
        Vector b(n + k);
        b.head(n) = r;
        for (int a = 0; a < k; ++a) {
            K.block(n + a, 0, 1, n) = N.row(idx[a]);
            K.block(0, n + a, n, 1) = N.row(idx[a]).transpose();
            b[n + a] = constraints.gap[idx[a]];
        }
        const Vector x = K.fullPivLu().solve(b);
        ContactSolution cand;
        cand.u = x.head(n);
        cand.multipliers = Vector::Zero(m);
        cand.active.assign(m, 0);
        for (int a = 0; a < k; ++a) {
            cand.multipliers[idx[a]] = x[n + a];
            cand.active[idx[a]] = 1;
        }
        const Vector g = N * cand.u - constraints.gap;
        if (mask == 0) free_scale = cand.u.cwiseAbs().maxCoeff();
        const double u_scale =
            std::max(cand.u.cwiseAbs().maxCoeff() + constraints.gap.cwiseAbs().maxCoeff(), free_scale);
        const double l_scale = r.cwiseAbs().maxCoeff();
        double violation = 0.0;
        for (int i = 0; i < m; ++i) {
            violation = std::max(violation, g[i] / std::max(u_scale, 1e-300));
            violation = std::max(violation, -cand.multipliers[i] / std::max(l_scale, 1e-300));
        }
        if (!best || violation < best_violation) {
            best = std::move(cand);
            best_violation = violation;
        }
    }
    if (!best || best_violation > 1e-8)
        throw std::runtime_error("no KKT-feasible active set found by enumeration");
    best->iterations = 1 << m;
    return *best;
}

MonolithicResult enumerate_monolithic(const Discretization& disc, const Loads& loads,
                                      const State& prev_time, double dt)
{
    const double time = prev_time.time + dt;
    const LoadVectors lv = assemble_loads(disc.mesh, disc.dofs, loads, disc.params, time);
    const ContactConstraints constraints = build_constraints(disc.mesh, disc.dofs, loads.gap, time);
    const int m = constraints.size();
    if (m > 16) throw std::invalid_argument("exhaustive enumeration limited to 16 constraints");

    std::optional<MonolithicResult> best;
    double best_violation = 0.0;
    double free_scale = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        const BlockSystem sys = build_block(disc, lv, constraints, prev_time, dt, idx);
        const Vector x = Eigen::MatrixXd(sys.matrix).partialPivLu().solve(sys.rhs);
        MonolithicResult cand = unpack(disc, sys, x, constraints, idx, prev_time, dt);
        const Vector g = constraints.N * cand.state.u - constraints.gap;
        if (mask == 0) free_scale = cand.state.u.cwiseAbs().maxCoeff();
        const double u_scale = std::max(
            cand.state.u.cwiseAbs().maxCoeff() + (m ? constraints.gap.cwiseAbs().maxCoeff() : 0.0), free_scale);
        const double l_scale = std::max(lv.F.cwiseAbs().maxCoeff(), (disc.B * cand.state.p).cwiseAbs().maxCoeff());
        double violation = 0.0;
        for (int i = 0; i < m; ++i) {
            violation = std::max(violation, g[i] / std::max(u_scale, 1e-300));
            violation = std::max(violation, -cand.multipliers[i] / std::max(l_scale, 1e-300));
        }
        if (!best || violation < best_violation) {
            best = std::move(cand);
            best_violation = violation;
        }
    }
    if (!best || best_violation > 1e-8)
        throw std::runtime_error("no KKT-feasible active set found by enumeration");
    best->iterations = 1 << m;
    return *best;
}

FieldNorms field_norms(const Discretization& disc, const Vector& u, const Vector& p, const Vector& z)
{
    FieldNorms n;
    n.p_l2 = p0_l2_norm(disc.mesh, p);
    n.u_h1 = std::sqrt(std::max(0.0, u.dot(disc.Mu * u)) +
                       disc.cell_areas.dot(cell_gradient_squared(disc.mesh, u)));
    const Vector div = (disc.D * z).cwiseQuotient(disc.cell_areas);
    n.z_hdiv = std::sqrt(std::max(0.0, z.dot(disc.Mz_plain * z)) + disc.cell_areas.dot(div.cwiseAbs2()));
    return n;
}

StateDiscrepancy compare_states(const State& a, const State& b, const Discretization& disc)
{
    if (a.u.size() != b.u.size() || a.p.size() != b.p.size() || a.z.size() != b.z.size() ||
        b.u.size() != disc.dofs.displacement.size || b.p.size() != disc.dofs.pressure.size ||
        b.z.size() != disc.dofs.flux.size)
        throw std::invalid_argument("compare_states: states do not live on the same discretization");
    const FieldNorms diff = field_norms(disc, a.u - b.u, a.p - b.p, a.z - b.z);
    const FieldNorms ref = field_norms(disc, b.u, b.p, b.z);
    auto rel = [](double d, double r) { return r > 1e-12 ? d / r : d; };
    return {rel(diff.p_l2, ref.p_l2), rel(diff.u_h1, ref.u_h1), rel(diff.z_hdiv, ref.z_hdiv)};
}

}  // namespace porocontact
