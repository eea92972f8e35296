#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "porocontact/fespace.hpp"
#include "porocontact/mesh.hpp"

namespace porocontact {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical coefficients, all spatially constant. `stab_L` is the fixed-stress
/// regularization coefficient; when unset it defaults to alpha^2 / lambda.
struct MaterialParams {
    double lambda = 1.0;
    double G = 1.0;
    double alpha = 1.0;
    double M = 1.0;
    double c_f = 0.0;
    double phi0 = 0.0;
    double mu_f = 1.0;
    Eigen::Matrix2d K = Eigen::Matrix2d::Identity();
    double rho_f_r = 0.0;
    double g_grav = 0.0;
    std::function<double(const Point&)> eta;  // elevation; empty means no gravity
    std::optional<double> stab_L;

    /// 1/M + c_f * phi0.
    double storage() const { return 1.0 / M + c_f * phi0; }
    double stabilization() const { return stab_L.value_or(alpha * alpha / lambda); }

    /// Throws ParameterError naming the first violated constraint.
    void validate() const;
};

using ScalarField = std::function<double(const Point&, double)>;
using VectorField = std::function<Point(const Point&, double)>;

/// External data. Any empty field is treated as identically zero.
struct Loads {
    VectorField f0;   // body force on the domain
    VectorField f2;   // traction on GAMMA2
    ScalarField q;    // fluid source rate
    ScalarField gap;  // initial gap on GAMMA3, must be >= 0
};

/// 2G(eps(phi_i), eps(phi_j)) + lambda(div phi_i, div phi_j), no constraints applied.
SparseMatrix assemble_elasticity(const Mesh& mesh, const DofMaps& dofs, const MaterialParams& params);
/// (B p)_i = alpha (p, div phi_i); rows are displacement dofs, columns cells.
SparseMatrix assemble_coupling(const Mesh& mesh, const DofMaps& dofs, double alpha);
/// (K^{-1} phi_e, phi_f) over the RT0 basis.
SparseMatrix assemble_rt0_mass(const Mesh& mesh, const DofMaps& dofs, const Eigen::Matrix2d& K);
/// D_{T,e} = integral over T of div phi_e, entries in {-1, 0, +1}.
SparseMatrix assemble_div(const Mesh& mesh, const DofMaps& dofs);
/// P1 vector mass matrix, used for H1 norms.
SparseMatrix assemble_displacement_mass(const Mesh& mesh, const DofMaps& dofs);

struct LoadVectors {
    Vector F;   // mechanics right-hand side (f0, phi_i) + (f2, phi_i)_GAMMA2
    Vector Qv;  // (q, 1)_T per cell
    Vector Gz;  // (rho g grad(eta), phi_e)
};

LoadVectors assemble_loads(const Mesh& mesh, const DofMaps& dofs, const Loads& loads,
                           const MaterialParams& params, double time);

/// Symmetric elimination of essential-zero dofs: rows and columns are
/// removed and a unit diagonal inserted.
SparseMatrix eliminate_essential(const SparseMatrix& A, const std::vector<char>& essential);
void zero_essential(Vector& v, const std::vector<char>& essential);

/// Everything that is constant across a run: mesh, dofs, and the
/// parameter-dependent operators.
struct Discretization {
    Discretization(Mesh mesh, MaterialParams params, std::vector<BoundaryTag> drained_tags = {});

    Mesh mesh;
    MaterialParams params;
    std::vector<BoundaryTag> drained_tags;
    DofMaps dofs;
    SparseMatrix A;          // elasticity, raw
    SparseMatrix B;          // coupling, raw
    SparseMatrix Mz;         // K^{-1}-weighted RT0 mass, raw
    SparseMatrix Mz_plain;   // unweighted RT0 mass for H(div) norms
    SparseMatrix D;          // divergence, raw
    SparseMatrix Mu;         // P1 vector mass
    Vector cell_areas;
};

}  // namespace porocontact
