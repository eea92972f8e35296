#include "porocontact/config.hpp"

#include <charconv>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace porocontact {

std::string_view to_string(RunMode mode)
{
    switch (mode) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Sweep: return "sweep";
    case RunMode::Validate: return "validate";
    case RunMode::CompareOracle: return "compare-oracle";
    }
    return "simulate";
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::string item;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

double to_double(const std::string& key, const std::string& value)
{
    double v = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    return v;
}

int to_int(const std::string& key, const std::string& value)
{
    int v = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
    if (value == "false" || value == "no" || value == "0" || value == "off") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

BoundaryTag to_tag(const std::string& key, const std::string& value)
{
    const auto tag = parse_boundary_tag(value);
    if (!tag) throw ConfigError("key '" + key + "': unknown boundary tag '" + value + "'");
    return *tag;
}

Expression to_expression(const std::string& key, const std::string& value)
{
    try {
        return Expression::parse(value);
    } catch (const ExpressionError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

double* material_slot(MaterialParams& p, const std::string& key)
{
    if (key == "lambda") return &p.lambda;
    if (key == "G") return &p.G;
    if (key == "alpha") return &p.alpha;
    if (key == "M") return &p.M;
    if (key == "c_f") return &p.c_f;
    if (key == "phi0") return &p.phi0;
    if (key == "mu_f") return &p.mu_f;
    if (key == "rho_f_r") return &p.rho_f_r;
    if (key == "g") return &p.g_grav;
    return nullptr;
}

using Setter = std::function<void(SolverConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters()
{
    static const std::map<std::string, std::map<std::string, Setter>> table = [] {
        std::map<std::string, std::map<std::string, Setter>> t;
        auto& run = t["run"];
        run["mode"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            if (v == "simulate") c.mode = RunMode::Simulate;
            else if (v == "sweep") c.mode = RunMode::Sweep;
            else if (v == "validate") c.mode = RunMode::Validate;
            else if (v == "compare-oracle") c.mode = RunMode::CompareOracle;
            else throw ConfigError("key '" + k + "': unknown run mode '" + v + "'");
        };

        auto& mesh = t["mesh"];
        mesh["type"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            if (v == "rect") c.mesh.kind = MeshSource::Kind::Rect;
            else if (v == "file") c.mesh.kind = MeshSource::Kind::File;
            else throw ConfigError("key '" + k + "': expected rect or file, got '" + v + "'");
        };
        mesh["nx"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.mesh.nx = to_int(k, v); };
        mesh["ny"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.mesh.ny = to_int(k, v); };
        mesh["extents"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            const auto items = split_list(v);
            if (items.size() != 4) throw ConfigError("key '" + k + "': expected x0 y0 x1 y1");
            c.mesh.extents = {to_double(k, items[0]), to_double(k, items[1]), to_double(k, items[2]),
                              to_double(k, items[3])};
        };
        mesh["left"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.mesh.tags.left = to_tag(k, v); };
        mesh["right"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.mesh.tags.right = to_tag(k, v); };
        mesh["bottom"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.mesh.tags.bottom = to_tag(k, v); };
        mesh["top"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.mesh.tags.top = to_tag(k, v); };
        mesh["drained"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.mesh.drained.clear();
            for (const auto& item : split_list(v)) c.mesh.drained.push_back(to_tag(k, item));
        };
        mesh["file"] = [](SolverConfig& c, const std::string&, const std::string& v) { c.mesh.file = v; };

        auto& material = t["material"];
        for (const char* key : {"lambda", "G", "alpha", "M", "c_f", "phi0", "mu_f", "rho_f_r", "g"}) {
            material[key] = [](SolverConfig& c, const std::string& k, const std::string& v) {
                *material_slot(c.params, k) = to_double(k, v);
            };
        }
        material["K"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            const auto items = split_list(v);
            if (items.size() == 1) {
                c.params.K = to_double(k, items[0]) * Eigen::Matrix2d::Identity();
            } else if (items.size() == 4) {
                c.params.K << to_double(k, items[0]), to_double(k, items[1]), to_double(k, items[2]),
                    to_double(k, items[3]);
            } else {
                throw ConfigError("key '" + k + "': expected 1 or 4 numbers");
            }
        };
        material["stab_L"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.params.stab_L = to_double(k, v);
        };

        auto& loads = t["loads"];
        loads["f0_x"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.loads.f0_x = to_expression(k, v); };
        loads["f0_y"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.loads.f0_y = to_expression(k, v); };
        loads["f2_x"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.loads.f2_x = to_expression(k, v); };
        loads["f2_y"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.loads.f2_y = to_expression(k, v); };
        loads["q"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.loads.q = to_expression(k, v); };
        loads["gap"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.loads.gap = to_expression(k, v); };
        loads["eta"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.loads.eta = to_expression(k, v);
            c.loads.has_eta = true;
        };

        auto& time = t["time"];
        time["dt"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); };
        time["T"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.T = to_double(k, v); };

        auto& solver = t["solver"];
        solver["tol"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.solver.tol = to_double(k, v); };
        solver["max_iters"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.solver.max_iters = to_int(k, v);
        };
        solver["stress_floor"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.solver.stress_floor = to_double(k, v);
        };
        solver["contact_scaling"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.solver.contact.complementarity_scaling = to_double(k, v);
        };
        solver["max_active_set_iters"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.solver.contact.max_active_set_iterations = to_int(k, v);
        };

        auto& output = t["output"];
        output["dir"] = [](SolverConfig& c, const std::string&, const std::string& v) { c.output_dir = v; };
        output["vtk"] = [](SolverConfig& c, const std::string& k, const std::string& v) { c.write_vtk = to_bool(k, v); };

        auto& sweep = t["sweep"];
        for (const char* key : {"lambda", "G", "alpha", "M", "c_f", "phi0", "mu_f", "stab_L"}) {
            sweep[key] = [](SolverConfig& c, const std::string& k, const std::string& v) {
                SweepAxis axis{k, {}};
                for (const auto& item : split_list(v)) axis.values.push_back(to_double(k, item));
                if (axis.values.empty()) throw ConfigError("key '" + k + "': empty sweep list");
                c.sweep.push_back(std::move(axis));
            };
        }
        sweep["threads"] = [](SolverConfig& c, const std::string& k, const std::string& v) {
            c.sweep_threads = to_int(k, v);
        };
        return t;
    }();
    return table;
}

}  // namespace

void validate_config(SolverConfig& config)
{
    config.warnings.clear();
    if (!(config.dt > 0.0)) throw ConfigError("key 'dt': time step must be positive");
    if (!(config.T >= config.dt * (1.0 - 1e-12))) throw ConfigError("key 'T': final time must be at least dt");
    if (!(config.solver.tol > 0.0)) throw ConfigError("key 'tol': must be positive");
    if (config.solver.max_iters < 1) throw ConfigError("key 'max_iters': must be at least 1");
    if (!(config.solver.stress_floor > 0.0)) throw ConfigError("key 'stress_floor': must be positive");
    if (!(config.solver.contact.complementarity_scaling > 0.0))
        throw ConfigError("key 'contact_scaling': must be positive");
    if (config.solver.contact.max_active_set_iterations < 1)
        throw ConfigError("key 'max_active_set_iters': must be at least 1");
    if (config.mesh.kind == MeshSource::Kind::Rect) {
        if (config.mesh.nx < 1) throw ConfigError("key 'nx': must be at least 1");
        if (config.mesh.ny < 1) throw ConfigError("key 'ny': must be at least 1");
        const auto& e = config.mesh.extents;
        if (!(e.x1 > e.x0) || !(e.y1 > e.y0)) throw ConfigError("key 'extents': empty rectangle");
    } else {
        if (config.mesh.file.empty()) throw ConfigError("key 'file': mesh type is file but no path given");
        if (!std::filesystem::exists(config.mesh.file))
            throw ConfigError("key 'file': mesh file not found: " + config.mesh.file.string());
    }
    try {
        build_params(config).validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const auto& p = config.params;
    if (p.stab_L && p.lambda > 0.0) {
        const double threshold = p.alpha * p.alpha / (2.0 * p.lambda);
        if (*p.stab_L <= threshold) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "stab_L = %.6g is outside the admissible range stab_L > alpha^2/(2 lambda) = %.6g; "
                          "the coupling iteration may diverge",
                          *p.stab_L, threshold);
            config.warnings.emplace_back(buf);
        }
    }
    for (const auto& axis : config.sweep)
        for (double v : axis.values)
            if (!std::isfinite(v)) throw ConfigError("key '" + axis.key + "': non-finite sweep value");
}

SolverConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    SolverConfig config;
    config.source_text = std::string(text);
    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!setters().count(section)) throw ConfigError(where + "unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + "key '" + key + "' outside of any section");
        const auto& keys = setters().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
        if (!seen.insert(section + "." + key).second)
            throw ConfigError(where + "duplicate key '" + key + "' in section [" + section + "]");
        if (value.empty()) throw ConfigError(where + "key '" + key + "' has an empty value");
        try {
            it->second(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    if (config.mesh.kind == MeshSource::Kind::File && config.mesh.file.is_relative() && !base_dir.empty())
        config.mesh.file = base_dir / config.mesh.file;
    validate_config(config);
    return config;
}

SolverConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

void set_material_value(SolverConfig& config, const std::string& key, double value)
{
    if (key == "stab_L") {
        config.params.stab_L = value;
    } else if (double* slot = material_slot(config.params, key)) {
        *slot = value;
    } else {
        throw ConfigError("key '" + key + "': not a material parameter");
    }
    validate_config(config);
}

MaterialParams build_params(const SolverConfig& config)
{
    MaterialParams p = config.params;
    if (config.loads.has_eta) {
        const Expression eta = config.loads.eta;
        p.eta = [eta](const Point& x) { return eta(x.x(), x.y(), 0.0); };
    }
    return p;
}

Mesh build_mesh(const SolverConfig& config)
{
    if (config.mesh.kind == MeshSource::Kind::Rect)
        return build_rect_mesh(config.mesh.nx, config.mesh.ny, config.mesh.extents, config.mesh.tags);
    std::ifstream in(config.mesh.file);
    if (!in) throw ConfigError("cannot open mesh file: " + config.mesh.file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return read_mesh(buffer.str());
}

Loads build_loads(const SolverConfig& config)
{
    const LoadExpressions e = config.loads;
    Loads loads;
    if (!e.f0_x.is_zero_literal() || !e.f0_y.is_zero_literal())
        loads.f0 = [e](const Point& x, double t) { return Point(e.f0_x(x.x(), x.y(), t), e.f0_y(x.x(), x.y(), t)); };
    if (!e.f2_x.is_zero_literal() || !e.f2_y.is_zero_literal())
        loads.f2 = [e](const Point& x, double t) { return Point(e.f2_x(x.x(), x.y(), t), e.f2_y(x.x(), x.y(), t)); };
    if (!e.q.is_zero_literal()) loads.q = [e](const Point& x, double t) { return e.q(x.x(), x.y(), t); };
    if (!e.gap.is_zero_literal()) loads.gap = [e](const Point& x, double t) { return e.gap(x.x(), x.y(), t); };
    return loads;
}

std::string config_hash(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace porocontact
