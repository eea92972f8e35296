#include "porocontact/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "porocontact/bench_validate.hpp"
#include "porocontact/config.hpp"
#include "porocontact/outputs.hpp"
#include "porocontact/reference_oracle.hpp"

namespace porocontact {

namespace {

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunSummary {
    double worst_ratio = kUndefined;
    double bound = kUndefined;
    int max_iterations = 0;
    int steps = 0;
    bool ok = true;
    std::string failure;
};

RunSummary summarize(const MaterialParams& params, const SimulationResult& result)
{
    RunSummary s;
    s.bound = params.alpha > 0.0 ? contraction_bound(params) : kUndefined;
    for (const auto& report : result.reports) {
        s.max_iterations = std::max(s.max_iterations, static_cast<int>(report.rows.size()));
        for (const auto& row : report.rows)
            if (!std::isnan(row.ratio) && (std::isnan(s.worst_ratio) || row.ratio > s.worst_ratio))
                s.worst_ratio = row.ratio;
    }
    s.steps = static_cast<int>(result.states.size()) - 1;
    if (result.failure) {
        s.ok = false;
        s.failure = *result.failure;
    }
    return s;
}

SimulationResult simulate(const SolverConfig& config, const Discretization& disc)
{
    SimulationSettings settings;
    settings.dt = config.dt;
    settings.T = config.T;
    settings.options = config.solver;
    return run_simulation(disc, build_loads(config), settings);
}

void print_warnings(const SolverConfig& config, const Mesh* mesh, std::ostream& err)
{
    for (const auto& w : config.warnings) err << "warning: " << w << "\n";
    if (mesh)
        for (const auto& w : mesh->warnings()) err << "warning: mesh: " << w << "\n";
}

int cmd_run(const std::string& config_path, const std::string& output_override, std::ostream& out,
            std::ostream& err)
{
    const SolverConfig config = load_config(config_path);
    const Discretization disc(build_mesh(config), build_params(config), config.mesh.drained);
    print_warnings(config, &disc.mesh, err);
    const SimulationResult result = simulate(config, disc);
    const std::filesystem::path dir = output_override.empty() ? config.output_dir : std::filesystem::path(output_override);
    const auto files = write_outputs(dir, config, disc.mesh, result);
    const RunSummary s = summarize(disc.params, result);
    out << "steps=" << s.steps << " max_iterations=" << s.max_iterations << " worst_ratio=" << fmt(s.worst_ratio)
        << " bound=" << fmt(s.bound) << "\n";
    out << "wrote " << files.size() << " files to " << dir.string() << "\n";
    if (!s.ok) {
        err << "error: simulation: " << s.failure << "\n";
        return 3;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& output_override, std::ostream& out,
              std::ostream& err)
{
    const SolverConfig base = load_config(config_path);
    print_warnings(base, nullptr, err);
    if (base.sweep.empty()) throw ConfigError("section [sweep]: no parameter lists declared");

    std::vector<std::vector<double>> cells{{}};
    for (const auto& axis : base.sweep) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : cells)
            for (double v : axis.values) {
                auto c = prefix;
                c.push_back(v);
                next.push_back(std::move(c));
            }
        cells = std::move(next);
    }

    const std::filesystem::path dir = output_override.empty() ? base.output_dir : std::filesystem::path(output_override);
    auto run_cell = [&base, &dir](std::size_t index, const std::vector<double>& values) {
        SolverConfig config = base;
        for (std::size_t a = 0; a < values.size(); ++a) set_material_value(config, base.sweep[a].key, values[a]);
        const Discretization disc(build_mesh(config), build_params(config), config.mesh.drained);
        const SimulationResult result = simulate(config, disc);
        char name[32];
        std::snprintf(name, sizeof name, "cell_%03zu", index);
        write_outputs(dir / name, config, disc.mesh, result);
        return summarize(disc.params, result);
    };

    const std::size_t threads = base.sweep_threads > 0
                                    ? static_cast<std::size_t>(base.sweep_threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
    std::vector<RunSummary> summaries(cells.size());
    for (std::size_t start = 0; start < cells.size(); start += threads) {
        std::vector<std::future<RunSummary>> batch;
        const std::size_t stop = std::min(cells.size(), start + threads);
        for (std::size_t i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, run_cell, i, cells[i]));
        for (std::size_t i = start; i < stop; ++i) summaries[i] = batch[i - start].get();
    }

    std::string csv = "cell";
    for (const auto& axis : base.sweep) csv += "," + axis.key;
    csv += ",worst_ratio,bound,iterations,converged\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        csv += std::to_string(i);
        for (double v : cells[i]) csv += "," + fmt(v);
        const auto& s = summaries[i];
        csv += "," + fmt(s.worst_ratio) + "," + fmt(s.bound) + "," + std::to_string(s.max_iterations) + "," +
               (s.ok ? "1" : "0") + "\n";
        all_ok = all_ok && s.ok;
    }
    write_text_file(dir / "summary.csv", csv);
    out << csv;
    return all_ok ? 0 : 3;
}

int cmd_validate(bool quick, const std::string& output_dir, std::ostream& out)
{
    std::string csv = "suite,case,h,p_l2,u_h1,z_hdiv,split_vs_monolithic\n";
    bool ok = true;
    FixedStressOptions tight;
    tight.tol = 1e-14;

    for (auto which : {ManufacturedCase::Zero, ManufacturedCase::Linear}) {
        const auto e = manufactured_biot(which, 4, 0.5, tight);
        const char* name = which == ManufacturedCase::Zero ? "zero" : "linear";
        csv += std::string("manufactured,") + name + "," + fmt(e.h) + "," + fmt(e.p_l2) + "," + fmt(e.u_h1) + "," +
               fmt(e.z_hdiv) + "," + fmt(e.split_vs_monolithic) + "\n";
        const bool pass = e.p_l2 < 1e-10 && e.u_h1 < 1e-10 && e.z_hdiv < 1e-10;
        out << "manufactured " << name << ": " << (pass ? "exact" : "NOT exact") << " (u_h1=" << fmt(e.u_h1) << ")\n";
        ok = ok && pass;
    }

    const std::vector<int> ns = quick ? std::vector<int>{4, 8, 16} : std::vector<int>{8, 16, 32};
    std::vector<double> hs, ep, eu, ez;
    for (int n : ns) {
        const auto e = manufactured_biot(ManufacturedCase::Trigonometric, n, 1.0, tight);
        hs.push_back(e.h);
        ep.push_back(e.p_l2);
        eu.push_back(e.u_h1);
        ez.push_back(e.z_hdiv);
        csv += "manufactured,trig," + fmt(e.h) + "," + fmt(e.p_l2) + "," + fmt(e.u_h1) + "," + fmt(e.z_hdiv) + "," +
               fmt(e.split_vs_monolithic) + "\n";
    }
    const struct {
        const char* field;
        const std::vector<double>& errors;
    } fields[] = {{"p_l2", ep}, {"u_h1", eu}, {"z_hdiv", ez}};
    for (const auto& f : fields) {
        const auto order = estimate_order(hs, f.errors);
        const bool pass = std::abs(order.order - 1.0) <= 0.2;
        out << "order " << f.field << " = " << fmt_short(order.order) << (order.flagged ? " [" + order.note + "]" : "")
            << (pass ? "" : " (outside 1.0 +- 0.2)") << "\n";
        ok = ok && pass;
    }

    TerzaghiSetup setup;
    const int ny = quick ? 32 : 64;
    const double tv = 0.2;
    const double dt = setup.time_for(tv) / (quick ? 100 : 200);
    const auto tz = terzaghi_case(setup, ny, dt, {0.05, tv});
    for (const auto& r : tz) {
        csv += "terzaghi,tv," + fmt(setup.height / ny) + "," + fmt(r.relative_l2_error) + ",nan,nan,nan\n";
        out << "terzaghi t=" << fmt_short(r.time) << " relative L2 pressure error = " << fmt_short(r.relative_l2_error)
            << "\n";
    }
    ok = ok && tz.back().relative_l2_error <= 0.02;

    if (!output_dir.empty()) write_text_file(std::filesystem::path(output_dir) / "validate.csv", csv);
    out << (ok ? "validate: PASS" : "validate: FAIL") << "\n";
    return ok ? 0 : 4;
}

int cmd_compare_oracle(const std::string& config_path, double threshold, std::ostream& out, std::ostream& err)
{
    const SolverConfig config = load_config(config_path);
    const Discretization disc(build_mesh(config), build_params(config), config.mesh.drained);
    print_warnings(config, &disc.mesh, err);
    const Loads loads = build_loads(config);
    const int steps = num_time_steps(config.dt, config.T);
    State state = zero_state(disc);
    double worst = 0.0;
    out << "step,time,p_l2,u_h1,z_hdiv,iterations,active_set_size\n";
    for (int k = 1; k <= steps; ++k) {
        const TimeStepResult split = solve_time_step(disc, loads, state, config.dt, config.solver);
        const MonolithicResult mono = monolithic_step(disc, loads, state, config.dt, {config.solver.contact});
        const StateDiscrepancy d = compare_states(split.state, mono.state, disc);
        out << k << "," << fmt(split.state.time) << "," << fmt(d.p_l2) << "," << fmt(d.u_h1) << "," << fmt(d.z_hdiv)
            << "," << split.report.rows.size() << "," << split.contact.active_count() << "\n";
        worst = std::max(worst, d.max());
        state = split.state;
    }
    out << "worst=" << fmt(worst) << " threshold=" << fmt(threshold) << "\n";
    return worst <= threshold ? 0 : 5;
}

int cmd_print_bound(const std::string& config_path, std::ostream& out)
{
    const SolverConfig config = load_config(config_path);
    out << "beta=" << fmt_short(beta(config.params)) << "\n";
    out << "bound=" << fmt_short(contraction_bound(config.params)) << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fixed-stress split solver for poroelasticity with frictionless contact"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    double threshold = 1e-8;
    bool quick = false;

    auto* run = app.add_subcommand("run", "Run the config according to its [run] mode (default: simulate)");
    run->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output_dir, "Output directory (overrides [output] dir)");

    auto* sweep = app.add_subcommand("sweep", "Run the parameter grid declared in [sweep]");
    sweep->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--output", output_dir, "Output directory (overrides [output] dir)");

    auto* validate = app.add_subcommand("validate", "Run the manufactured-solution and consolidation suites");
    validate->add_flag("--quick", quick, "Coarser meshes");
    validate->add_option("-o,--output", output_dir, "Directory for validate.csv");

    auto* compare = app.add_subcommand("compare-oracle", "Compare the split scheme with the monolithic solve");
    compare->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    compare->add_option("--threshold", threshold, "Largest acceptable relative discrepancy");

    auto* bound = app.add_subcommand("print-bound", "Print beta and the contraction bound");
    bound->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*run) {
            switch (load_config(config_path).mode) {
            case RunMode::Sweep: return cmd_sweep(config_path, output_dir, out, err);
            case RunMode::Validate: return cmd_validate(false, output_dir, out);
            case RunMode::CompareOracle: return cmd_compare_oracle(config_path, threshold, out, err);
            case RunMode::Simulate: break;
            }
            return cmd_run(config_path, output_dir, out, err);
        }
        if (*sweep) return cmd_sweep(config_path, output_dir, out, err);
        if (*validate) return cmd_validate(quick, output_dir, out);
        if (*compare) return cmd_compare_oracle(config_path, threshold, out, err);
        if (*bound) return cmd_print_bound(config_path, out);
    } catch (const ConfigError& e) {
        err << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const MeshError& e) {
        err << "error: mesh: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        err << "error: parameters: " << e.what() << "\n";
        return 2;
    } catch (const OutputError& e) {
        err << "error: output: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: solver: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace porocontact
