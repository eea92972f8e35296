#include "porocontact/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace porocontact {

namespace {

void append_number(std::string& out, double v)
{
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out += buf;
}

std::string step_name(const char* prefix, int index, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d.%s", prefix, index, ext);
    return buf;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OutputError("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

std::string format_report_csv(const IterationReport& report)
{
    std::string out = "k,n,norm_dsigma,norm_adp,norm_dz,norm_eps_du,norm_div_du,ratio,bound,active_set_size\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.k);
        out += ',';
        out += std::to_string(r.n);
        for (double v : {r.norm_dsigma, r.norm_adp, r.norm_dz, r.norm_eps_du, r.norm_div_du, r.ratio, r.bound}) {
            out += ',';
            append_number(out, v);
        }
        out += ',';
        out += std::to_string(r.active_set_size);
        out += '\n';
    }
    return out;
}

std::string format_vtk(const Mesh& mesh, const State& state)
{
    std::string out;
    out += "# vtk DataFile Version 3.0\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "porocontact state k=%d t=%.16e\n", state.k, state.time);
    out += buf;
    out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(mesh.num_vertices()) + " double\n";
    for (const auto& v : mesh.vertices()) {
        append_number(out, v.x());
        out += ' ';
        append_number(out, v.y());
        out += " 0\n";
    }
    const int nt = mesh.num_triangles();
    out += "CELLS " + std::to_string(nt) + " " + std::to_string(4 * nt) + "\n";
    for (const auto& t : mesh.triangles())
        out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
    out += "CELL_TYPES " + std::to_string(nt) + "\n";
    for (int i = 0; i < nt; ++i) out += "5\n";
    out += "POINT_DATA " + std::to_string(mesh.num_vertices()) + "\n";
    out += "VECTORS displacement double\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        append_number(out, state.u[displacement_dof(v, 0)]);
        out += ' ';
        append_number(out, state.u[displacement_dof(v, 1)]);
        out += " 0\n";
    }
    out += "CELL_DATA " + std::to_string(nt) + "\n";
    out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < nt; ++c) {
        append_number(out, state.p[c]);
        out += '\n';
    }
    out += "SCALARS sigma_v double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < nt; ++c) {
        append_number(out, state.sigma_v[c]);
        out += '\n';
    }
    return out;
}

std::string format_timeseries_csv(const SimulationResult& result)
{
    std::string out = "step,time,iterations,active_set_size,converged\n";
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const auto& report = result.reports[i];
        const double time = i + 1 < result.states.size() ? result.states[i + 1].time : std::nan("");
        const int active = i < result.contacts.size() ? result.contacts[i].active_count() : 0;
        out += std::to_string(report.k) + ",";
        append_number(out, time);
        out += "," + std::to_string(report.rows.size()) + "," + std::to_string(active) + "," +
               (report.converged ? "1" : "0") + "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw OutputError("write failed for " + path.string());
}

std::filesystem::path write_manifest(const std::filesystem::path& dir, const std::string& config_text,
                                     const std::vector<std::filesystem::path>& files)
{
    std::string out = "config_hash " + config_hash(config_text) + "\n";
    out += "files " + std::to_string(files.size()) + "\n";
    for (const auto& rel : files) {
        const std::string content = read_file(dir / rel);
        out += rel.generic_string() + " " + std::to_string(content.size()) + " " + config_hash(content) + "\n";
    }
    const auto path = dir / "manifest.txt";
    write_text_file(path, out);
    return path;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const SolverConfig& config,
                                                 const Mesh& mesh, const SimulationResult& result)
{
    std::vector<std::filesystem::path> files;
    auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
        write_text_file(dir / rel, content);
        files.push_back(rel);
    };
    for (const auto& report : result.reports)
        emit(std::filesystem::path("reports") / step_name("step", report.k, "csv"), format_report_csv(report));
    if (config.write_vtk)
        for (std::size_t i = 0; i < result.states.size(); ++i)
            emit(std::filesystem::path("vtk") / step_name("state", static_cast<int>(i), "vtk"),
                 format_vtk(mesh, result.states[i]));
    emit("timeseries.csv", format_timeseries_csv(result));
    write_manifest(dir, config.source_text, files);
    files.emplace_back("manifest.txt");
    return files;
}

}  // namespace porocontact
