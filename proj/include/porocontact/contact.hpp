#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "porocontact/assembly.hpp"

namespace porocontact {

/// Nodal Signorini constraints N u <= g on GAMMA3 vertices. GAMMA1 vertices
/// are excluded (the Dirichlet condition wins).
struct ContactConstraints {
    std::vector<int> vertices;
    std::vector<Point> normals;
    Vector gap;
    SparseMatrix N;  // size() x displacement dofs, two entries per row
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(vertices.size()); }
};

/// Vertex normals on GAMMA3 are the normalized average of the outward normals
/// of the adjacent GAMMA3 edges.
ContactConstraints build_constraints(const Mesh& mesh, const DofMaps& dofs, const ScalarField& gap,
                                     double time = 0.0);

struct ContactOptions {
    double complementarity_scaling = 1.0;  // c, relative to diag(N A N^T)
    int max_active_set_iterations = 100;
};

using ActiveSet = std::vector<char>;

/// Minimizer of 1/2 u^T A u - rhs^T u over {N u <= g}. Multipliers are
/// compression-positive (they represent -sigma_nu).
struct ContactSolution {
    Vector u;
    Vector multipliers;
    ActiveSet active;
    int iterations = 0;
    std::vector<ActiveSet> history;

    int active_count() const;
};

class ContactError : public std::runtime_error {
public:
    ContactError(const std::string& what, ContactSolution last)
        : std::runtime_error(what), last_iterate(std::move(last))
    {}
    ContactSolution last_iterate;
};

struct ActiveSetStep {
    ActiveSet next;
    Vector u;
    Vector multipliers;
};

/// Holds one sparse factorization of the Dirichlet-eliminated stiffness and
/// the dense coupling A^{-1} N^T, so repeated solves with new right-hand
/// sides cost a back-substitution plus an m x m dense solve.
class ContactSolver {
public:
    ContactSolver(const SparseMatrix& A, std::vector<char> essential, ContactConstraints constraints,
                  ContactOptions options = {});

    /// `rhs` is the raw load vector; essential entries are ignored.
    ContactSolution solve(const Vector& rhs, const ActiveSet* initial = nullptr) const;

    /// One primal-dual active-set update for a fixed trial set.
    ActiveSetStep step(const ActiveSet& active, const Vector& rhs) const;

    const ContactConstraints& constraints() const { return constraints_; }
    const std::vector<char>& essential() const { return essential_; }

private:
    Vector unconstrained(const Vector& rhs) const;
    ActiveSetStep step_from(const ActiveSet& active, const Vector& u0) const;

    std::vector<char> essential_;
    ContactConstraints constraints_;
    ContactOptions options_;
    Eigen::SimplicialLDLT<SparseMatrix> factor_;
    Eigen::MatrixXd W_;      // A^{-1} N^T
    Eigen::MatrixXd schur_;  // N A^{-1} N^T
    Vector scaling_;         // c * (N A N^T)_ii
};

ContactSolution solve_contact_vi(const SparseMatrix& A, const std::vector<char>& essential,
                                 const Vector& rhs, const ContactConstraints& constraints,
                                 const ContactOptions& options = {});

ActiveSetStep primal_dual_active_set_step(const ActiveSet& active, const SparseMatrix& A,
                                          const std::vector<char>& essential, const Vector& rhs,
                                          const ContactConstraints& constraints,
                                          const ContactOptions& options = {});

/// Raw (unscaled) KKT residuals of a contact solution.
struct KktResiduals {
    double feasibility = 0.0;      // max(N u - g, 0)
    double sign = 0.0;             // max(-lambda, 0)
    double complementarity = 0.0;  // max |lambda_i (N u - g)_i|
    double stationarity = 0.0;     // |A u - rhs + N^T lambda|_inf on free dofs
};

KktResiduals kkt_residuals(const SparseMatrix& A, const std::vector<char>& essential,
                           const Vector& rhs, const ContactConstraints& constraints,
                           const Vector& u, const Vector& multipliers);

}  // namespace porocontact
