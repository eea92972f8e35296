#include "porocontact/bench_validate.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "porocontact/reference_oracle.hpp"

namespace porocontact {

namespace {

constexpr double pi = std::numbers::pi;

MaterialParams unit_params()
{
    MaterialParams p;
    p.lambda = 1.0;
    p.G = 1.0;
    p.alpha = 1.0;
    p.M = 1.0;
    p.c_f = 0.0;
    p.phi0 = 0.0;
    p.mu_f = 1.0;
    return p;
}

}  // namespace

ManufacturedProblem manufactured_problem(ManufacturedCase which)
{
    ManufacturedProblem mp;
    mp.params = unit_params();
    mp.T = 1.0;
    const auto params = mp.params;
    const double lambda = params.lambda, G = params.G, alpha = params.alpha, mu = params.mu_f;
    const double storage = params.storage();

    switch (which) {
    case ManufacturedCase::Zero:
        mp.tags = {BoundaryTag::Gamma1, BoundaryTag::Gamma1, BoundaryTag::Gamma1, BoundaryTag::Gamma1};
        mp.u = [](const Point&, double) { return Point(0.0, 0.0); };
        mp.grad_u = [](const Point&, double) { return Eigen::Matrix2d::Zero().eval(); };
        mp.p = [](const Point&, double) { return 0.0; };
        mp.z = [](const Point&, double) { return Point(0.0, 0.0); };
        mp.div_z = [](const Point&, double) { return 0.0; };
        break;

    case ManufacturedCase::Linear: {
        // u = t (a x, b x): eps = [[a, b/2], [b/2, 0]], div u = a, sigma constant.
        const double a = 0.1, b = 0.2;
        mp.tags = {BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma2, BoundaryTag::Gamma2};
        Eigen::Matrix2d sigma;
        sigma << lambda * a + 2.0 * G * a, G * b, G * b, lambda * a;
        mp.u = [a, b](const Point& x, double t) { return Point(t * a * x.x(), t * b * x.x()); };
        mp.grad_u = [a, b](const Point&, double t) {
            Eigen::Matrix2d g;
            g << t * a, 0.0, t * b, 0.0;
            return g;
        };
        mp.p = [](const Point&, double) { return 0.0; };
        mp.z = [](const Point&, double) { return Point(0.0, 0.0); };
        mp.div_z = [](const Point&, double) { return 0.0; };
        mp.loads.f2 = [sigma](const Point& x, double t) {
            Point n(0.0, 0.0);
            if (std::abs(x.x() - 1.0) < 1e-12) n = Point(1.0, 0.0);
            else if (std::abs(x.y() - 1.0) < 1e-12) n = Point(0.0, 1.0);
            else if (std::abs(x.y()) < 1e-12) n = Point(0.0, -1.0);
            return Point(t * (sigma * n));
        };
        mp.loads.q = [alpha, a](const Point&, double) { return alpha * a; };
        break;
    }

    case ManufacturedCase::Trigonometric: {
        // s = sin(pi x) sin(pi y), c = cos(pi x) cos(pi y); u = t s (1, 1), p = t c.
        // div sigma(u) = G lap u + (lambda + G) grad div u
        //              = t [ -2 G pi^2 s + (lambda + G) pi^2 (c - s) ] (1, 1)
        // f0 = -div sigma(u) + alpha grad p
        // z = -K grad p = t pi (sin(pi x) cos(pi y), cos(pi x) sin(pi y)), div z = 2 pi^2 t c
        // q = storage c + alpha pi (cos(pi x) sin(pi y) + sin(pi x) cos(pi y)) + 2 pi^2 t c / mu
        mp.tags = {BoundaryTag::Gamma1, BoundaryTag::Gamma1, BoundaryTag::Gamma1, BoundaryTag::Gamma1};
        mp.u = [](const Point& x, double t) {
            const double s = std::sin(pi * x.x()) * std::sin(pi * x.y());
            return Point(t * s, t * s);
        };
        mp.grad_u = [](const Point& x, double t) {
            const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
            const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
            Eigen::Matrix2d g;
            g << t * pi * cx * sy, t * pi * sx * cy, t * pi * cx * sy, t * pi * sx * cy;
            return g;
        };
        mp.p = [](const Point& x, double t) { return t * std::cos(pi * x.x()) * std::cos(pi * x.y()); };
        mp.z = [](const Point& x, double t) {
            return Point(t * pi * std::sin(pi * x.x()) * std::cos(pi * x.y()),
                         t * pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
        };
        mp.div_z = [](const Point& x, double t) {
            return 2.0 * pi * pi * t * std::cos(pi * x.x()) * std::cos(pi * x.y());
        };
        mp.loads.f0 = [lambda, G, alpha](const Point& x, double t) {
            const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
            const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
            const double s = sx * sy, c = cx * cy;
            const double elastic = t * (2.0 * G * pi * pi * s - (lambda + G) * pi * pi * (c - s));
            return Point(elastic - alpha * t * pi * sx * cy, elastic - alpha * t * pi * cx * sy);
        };
        mp.loads.q = [storage, alpha, mu](const Point& x, double t) {
            const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
            const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
            return storage * cx * cy + alpha * pi * (cx * sy + sx * cy) + 2.0 * pi * pi * t * cx * cy / mu;
        };
        break;
    }
    }
    return mp;
}

ManufacturedErrors manufactured_errors(const Discretization& disc, const ManufacturedProblem& problem,
                                       const State& state, double t)
{
    const auto& mesh = disc.mesh;
    const auto& rule = triangle_rule_degree4();
    double ep = 0.0, eu = 0.0, ez = 0.0, h = 0.0;
    for (int c = 0; c < mesh.num_triangles(); ++c) {
        const auto geom = mesh.triangle_points(c);
        const auto& tri = mesh.triangles()[c];
        const auto grads = local_p1_gradients(geom);
        Eigen::Matrix2d grad_uh = Eigen::Matrix2d::Zero();
        std::array<Point, 3> nodal;
        for (int i = 0; i < 3; ++i) {
            nodal[i] = Point(state.u[displacement_dof(tri[i], 0)], state.u[displacement_dof(tri[i], 1)]);
            grad_uh += nodal[i] * grads[i].transpose();
        }
        double div_zh = 0.0;
        for (int i = 0; i < 3; ++i) div_zh += disc.D.coeff(c, mesh.triangle_edge(c, i)) * state.z[mesh.triangle_edge(c, i)];
        div_zh /= mesh.area(c);
        for (int i = 0; i < 3; ++i)
            h = std::max(h, (geom[(i + 1) % 3] - geom[i]).norm());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& bary = rule.points[q];
            const Point x = map_to_physical(geom, bary);
            const double w = rule.weights[q] * 2.0 * mesh.area(c);
            const Point uh = bary[0] * nodal[0] + bary[1] * nodal[1] + bary[2] * nodal[2];
            ep += w * std::pow(state.p[c] - problem.p(x, t), 2);
            eu += w * ((uh - problem.u(x, t)).squaredNorm() + (grad_uh - problem.grad_u(x, t)).squaredNorm());
            ez += w * ((evaluate_rt0(mesh, state.z, c, x) - problem.z(x, t)).squaredNorm() +
                       std::pow(div_zh - problem.div_z(x, t), 2));
        }
    }
    ManufacturedErrors e;
    e.h = h;
    e.p_l2 = std::sqrt(ep);
    e.u_h1 = std::sqrt(eu);
    e.z_hdiv = std::sqrt(ez);
    return e;
}

ManufacturedErrors manufactured_biot(ManufacturedCase which, int n, double dt,
                                     const FixedStressOptions& options)
{
    const ManufacturedProblem problem = manufactured_problem(which);
    const Discretization disc(build_rect_mesh(n, n, {}, problem.tags), problem.params);
    SimulationSettings settings;
    settings.dt = dt;
    settings.T = problem.T;
    settings.options = options;
    const SimulationResult run = run_simulation(disc, problem.loads, settings);
    if (run.failure) throw std::runtime_error("manufactured run failed: " + *run.failure);

    State mono = run.states.front();
    for (std::size_t k = 1; k < run.states.size(); ++k)
        mono = monolithic_step(disc, problem.loads, mono, dt).state;

    const State& final_state = run.states.back();
    ManufacturedErrors e = manufactured_errors(disc, problem, final_state, final_state.time);
    e.split_vs_monolithic = compare_states(final_state, mono, disc).max();
    for (const auto& r : run.reports) e.max_iterations = std::max(e.max_iterations, static_cast<int>(r.rows.size()));
    return e;
}

double TerzaghiSetup::consolidation_coefficient() const
{
    const double k = params.K(1, 1);
    return (k / params.mu_f) /
           (params.storage() + params.alpha * params.alpha / constrained_modulus());
}

double TerzaghiSetup::initial_pressure() const
{
    return load * params.alpha /
           (params.alpha * params.alpha + params.storage() * constrained_modulus());
}

double TerzaghiSetup::pressure(double y, double t, int terms) const
{
    const double depth = height - y;
    const double cv = consolidation_coefficient();
    double sum = 0.0;
    for (int m = 0; m < terms; ++m) {
        const double k = (2.0 * m + 1.0) * pi / 2.0;
        sum += 2.0 / k * std::sin(k * depth / height) * std::exp(-k * k * cv * t / (height * height));
    }
    return initial_pressure() * sum;
}

double TerzaghiSetup::time_for(double tv) const
{
    return tv * height * height / consolidation_coefficient();
}

std::vector<TerzaghiResult> terzaghi_case(const TerzaghiSetup& setup, int ny, double dt,
                                          const std::vector<double>& tv_samples,
                                          const FixedStressOptions& options)
{
    const SideTags tags{BoundaryTag::Gamma3, BoundaryTag::Gamma3, BoundaryTag::Gamma1, BoundaryTag::Gamma2};
    const Discretization disc(build_rect_mesh(setup.nx, ny, {0.0, 0.0, setup.width, setup.height}, tags),
                              setup.params, {BoundaryTag::Gamma2});
    Loads loads;
    const double load = setup.load;
    loads.f2 = [load](const Point&, double) { return Point(0.0, -load); };

    std::vector<TerzaghiResult> out;
    State state = zero_state(disc);
    int step = 0;
    const double p0 = setup.initial_pressure();
    const double ref_l2 = p0 * std::sqrt(disc.cell_areas.sum());
    for (double tv : tv_samples) {
        const double target = setup.time_for(tv);
        while (state.time < target - 1e-9 * dt) {
            const double h = std::min(dt, target - state.time);
            state = solve_time_step(disc, loads, state, h, options).state;
            ++step;
        }
        TerzaghiResult r;
        r.time = state.time;
        r.steps = step;
        r.p_numeric = state.p;
        r.p_exact.resize(disc.mesh.num_triangles());
        double err = 0.0, norm = 0.0;
        for (int c = 0; c < disc.mesh.num_triangles(); ++c) {
            r.p_exact[c] = setup.pressure(disc.mesh.centroid(c).y(), state.time);
            const double d = state.p[c] - r.p_exact[c];
            err += disc.mesh.area(c) * d * d;
            norm += disc.mesh.area(c) * r.p_exact[c] * r.p_exact[c];
            r.max_relative_error = std::max(r.max_relative_error, std::abs(d) / p0);
        }
        r.relative_l2_error = norm > 0.0 ? std::sqrt(err / norm) : std::sqrt(err);
        r.numeric_l2 = p0_l2_norm(disc.mesh, state.p) / ref_l2;
        out.push_back(std::move(r));
    }
    return out;
}

OrderEstimate estimate_order(const std::vector<double>& h, const std::vector<double>& errors)
{
    if (h.size() != errors.size() || h.size() < 3)
        throw std::invalid_argument("estimate_order needs at least 3 (h, error) pairs");
    for (std::size_t i = 0; i < h.size(); ++i)
        if (!(h[i] > 0.0) || !(errors[i] > 0.0))
            throw std::invalid_argument("estimate_order needs positive h and errors");

    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    OrderEstimate out;
    out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    for (std::size_t i = 1; i < n; ++i) {
        const bool refining = h[i] < h[i - 1];
        if (refining != (errors[i] < errors[i - 1])) {
            out.flagged = true;
            out.note = "non-monotone error sequence";
            return out;
        }
        const double local = std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]);
        if (std::abs(local - out.order) > 0.25) {
            out.flagged = true;
            out.note = "pairwise orders deviate from the fitted slope";
        }
    }
    return out;
}

}  // namespace porocontact
