#include "porocontact/contact.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace porocontact {

int ContactSolution::active_count() const
{
    return static_cast<int>(std::count(active.begin(), active.end(), 1));
}

ContactConstraints build_constraints(const Mesh& mesh, const DofMaps& dofs, const ScalarField& gap,
                                     double time)
{
    ContactConstraints out;
    std::map<int, Point> normal_sum;
    for (const auto& edge : mesh.edges()) {
        if (edge.tag != BoundaryTag::Gamma3) continue;
        for (int v : edge.vertices) {
            auto [it, inserted] = normal_sum.try_emplace(v, Point::Zero());
            it->second += edge.normal;
        }
    }
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<double> gaps;
    for (const auto& [v, sum] : normal_sum) {
        if (dofs.displacement.is_essential(displacement_dof(v, 0))) {
            out.warnings.push_back("vertex " + std::to_string(v) +
                                   " lies on GAMMA1 and GAMMA3; contact constraint dropped");
            continue;
        }
        const Point n = sum.normalized();
        const int row = out.size();
        out.vertices.push_back(v);
        out.normals.push_back(n);
        const double g = gap ? gap(mesh.vertices()[v], time) : 0.0;
        if (g < 0.0)
            throw ParameterError("gap must be nonnegative on GAMMA3 (vertex " + std::to_string(v) + ")");
        gaps.push_back(g);
        trips.emplace_back(row, displacement_dof(v, 0), n.x());
        trips.emplace_back(row, displacement_dof(v, 1), n.y());
    }
    out.gap = Eigen::Map<Vector>(gaps.data(), static_cast<Eigen::Index>(gaps.size()));
    out.N.resize(out.size(), dofs.displacement.size);
    out.N.setFromTriplets(trips.begin(), trips.end());
    return out;
}

ContactSolver::ContactSolver(const SparseMatrix& A, std::vector<char> essential,
                             ContactConstraints constraints, ContactOptions options)
    : essential_(std::move(essential))
    , constraints_(std::move(constraints))
    , options_(options)
{
    const SparseMatrix Ae = eliminate_essential(A, essential_);
    factor_.compute(Ae);
    if (factor_.info() != Eigen::Success)
        throw ContactError("stiffness factorization failed (is GAMMA1 empty?)", {});

    const int m = constraints_.size();
    const Eigen::MatrixXd Nt = Eigen::MatrixXd(constraints_.N.transpose());
    W_ = m > 0 ? Eigen::MatrixXd(factor_.solve(Nt)) : Eigen::MatrixXd(Ae.rows(), 0);
    schur_ = constraints_.N * W_;
    schur_ = 0.5 * (schur_ + schur_.transpose()).eval();

    scaling_.resize(m);
    const Eigen::MatrixXd NANt = constraints_.N * (Ae * Nt);
    for (int i = 0; i < m; ++i) scaling_[i] = options_.complementarity_scaling * NANt(i, i);
}

Vector ContactSolver::unconstrained(const Vector& rhs) const
{
    Vector r = rhs;
    zero_essential(r, essential_);
    return factor_.solve(r);
}

ActiveSetStep ContactSolver::step_from(const ActiveSet& active, const Vector& u0) const
{
    const int m = constraints_.size();
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
        if (active[i]) idx.push_back(i);

    const Vector violation0 = constraints_.N * u0 - constraints_.gap;
    ActiveSetStep out;
    out.multipliers = Vector::Zero(m);
    out.u = u0;
    if (!idx.empty()) {
        const int k = static_cast<int>(idx.size());
        Eigen::MatrixXd S(k, k);
        Vector r(k);
        for (int a = 0; a < k; ++a) {
            r[a] = violation0[idx[a]];
            for (int b = 0; b < k; ++b) S(a, b) = schur_(idx[a], idx[b]);
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() <= 1e-14 * ldlt.vectorD().maxCoeff())
            throw ContactError("singular constrained system for the trial active set", {});
        const Vector lam = ldlt.solve(r);
        for (int a = 0; a < k; ++a) {
            out.multipliers[idx[a]] = lam[a];
            out.u.noalias() -= lam[a] * W_.col(idx[a]);
        }
    }
    const Vector violation = constraints_.N * out.u - constraints_.gap;
    const double size_scale = u0.cwiseAbs().maxCoeff() + (m > 0 ? constraints_.gap.maxCoeff() : 0.0);
    out.next.assign(m, 0);
    for (int i = 0; i < m; ++i) {
        const double threshold = 1e-12 * scaling_[i] * size_scale;
        out.next[i] = out.multipliers[i] + scaling_[i] * violation[i] > threshold ? 1 : 0;
    }
    return out;
}

ActiveSetStep ContactSolver::step(const ActiveSet& active, const Vector& rhs) const
{
    return step_from(active, unconstrained(rhs));
}

ContactSolution ContactSolver::solve(const Vector& rhs, const ActiveSet* initial) const
{
    const int m = constraints_.size();
    const Vector u0 = unconstrained(rhs);
    ContactSolution sol;
    sol.active = initial ? *initial : ActiveSet(m, 0);
    sol.history.push_back(sol.active);
    for (int it = 1; it <= options_.max_active_set_iterations; ++it) {
        ActiveSetStep s = step_from(sol.active, u0);
        sol.u = std::move(s.u);
        sol.multipliers = std::move(s.multipliers);
        sol.iterations = it;
        if (s.next == sol.active) return sol;
        sol.active = std::move(s.next);
        sol.history.push_back(sol.active);
    }
    throw ContactError("active-set iteration did not converge in " +
                           std::to_string(options_.max_active_set_iterations) + " iterations",
                       sol);
}

ContactSolution solve_contact_vi(const SparseMatrix& A, const std::vector<char>& essential,
                                 const Vector& rhs, const ContactConstraints& constraints,
                                 const ContactOptions& options)
{
    return ContactSolver(A, essential, constraints, options).solve(rhs);
}

ActiveSetStep primal_dual_active_set_step(const ActiveSet& active, const SparseMatrix& A,
                                          const std::vector<char>& essential, const Vector& rhs,
                                          const ContactConstraints& constraints,
                                          const ContactOptions& options)
{
    return ContactSolver(A, essential, constraints, options).step(active, rhs);
}

KktResiduals kkt_residuals(const SparseMatrix& A, const std::vector<char>& essential,
                           const Vector& rhs, const ContactConstraints& constraints,
                           const Vector& u, const Vector& multipliers)
{
    KktResiduals r;
    const Vector violation = constraints.N * u - constraints.gap;
    for (int i = 0; i < constraints.size(); ++i) {
        r.feasibility = std::max(r.feasibility, violation[i]);
        r.sign = std::max(r.sign, -multipliers[i]);
        r.complementarity = std::max(r.complementarity, std::abs(multipliers[i] * violation[i]));
    }
    Vector res = A * u - rhs + constraints.N.transpose() * multipliers;
    zero_essential(res, essential);
    r.stationarity = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
    return r;
}

}  // namespace porocontact
