#pragma once

#include <functional>
#include <string>
#include <vector>

#include "porocontact/fixed_stress.hpp"

namespace porocontact {

enum class ManufacturedCase {
    Zero,           // u = 0, p = 0, no data
    Linear,         // u = t (a x, b x), p = 0; clamped at x = 0, tractions elsewhere
    Trigonometric,  // u = t sin(pi x) sin(pi y) (1, 1), p = t cos(pi x) cos(pi y); clamped everywhere
};

/// A smooth exact solution on the unit square without a contact segment,
/// with the body force, traction and source obtained by substituting it into
/// the Biot equations by hand.
struct ManufacturedProblem {
    MaterialParams params;
    SideTags tags;
    Loads loads;
    std::function<Point(const Point&, double)> u;
    std::function<Eigen::Matrix2d(const Point&, double)> grad_u;
    std::function<double(const Point&, double)> p;
    std::function<Point(const Point&, double)> z;
    std::function<double(const Point&, double)> div_z;
    double T = 1.0;
};

ManufacturedProblem manufactured_problem(ManufacturedCase which);

struct ManufacturedErrors {
    double h = 0.0;
    double p_l2 = 0.0;
    double u_h1 = 0.0;
    double z_hdiv = 0.0;
    double split_vs_monolithic = 0.0;  // max relative discrepancy of the final states
    int max_iterations = 0;
};

/// Errors at the final time on an n x n mesh of the unit square.
ManufacturedErrors manufactured_biot(ManufacturedCase which, int n, double dt,
                                     const FixedStressOptions& options = {});

/// Errors of a computed state against the exact fields of `problem` at time t.
ManufacturedErrors manufactured_errors(const Discretization& disc, const ManufacturedProblem& problem,
                                       const State& state, double t);

/// One-dimensional consolidation of a column: clamped impermeable base,
/// drained loaded top, frictionless rigid side walls realized as zero-gap
/// contact segments.
struct TerzaghiSetup {
    MaterialParams params;  // lambda = G = alpha = M = 1, K = I, mu_f = 1
    double height = 1.0;
    double width = 1.0 / 32.0;
    int nx = 2;
    double load = 1.0;  // compressive traction magnitude on the top

    double constrained_modulus() const { return params.lambda + 2.0 * params.G; }
    /// c_v = (k / mu) / (S + alpha^2 / (lambda + 2G)) with S = 1/M + c_f phi0.
    double consolidation_coefficient() const;
    /// Undrained pressure right after loading.
    double initial_pressure() const;
    /// Series solution; depth measured from the drained top.
    double pressure(double y, double t, int terms = 400) const;
    /// Time at which c_v t / H^2 equals `tv`.
    double time_for(double tv) const;
};

struct TerzaghiResult {
    double time = 0.0;
    double relative_l2_error = 0.0;
    double max_relative_error = 0.0;  // max over cells / initial pressure
    double numeric_l2 = 0.0;          // ||p_h|| / ||p_initial||
    Vector p_numeric;
    Vector p_exact;
    int steps = 0;
};

/// Runs the column with ny cells over the height (cell size height/ny) and
/// reports the pressure profile error at each requested dimensionless time.
std::vector<TerzaghiResult> terzaghi_case(const TerzaghiSetup& setup, int ny, double dt,
                                          const std::vector<double>& tv_samples,
                                          const FixedStressOptions& options = {});

struct OrderEstimate {
    double order = 0.0;
    bool flagged = false;
    std::string note;
};

/// Least-squares slope of log(error) against log(h). Flags non-monotone
/// sequences and sequences whose pairwise orders stray from the fit.
OrderEstimate estimate_order(const std::vector<double>& h, const std::vector<double>& errors);

}  // namespace porocontact
