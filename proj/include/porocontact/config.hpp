#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "porocontact/assembly.hpp"
#include "porocontact/expression.hpp"
#include "porocontact/fixed_stress.hpp"

namespace porocontact {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class RunMode { Simulate, Sweep, Validate, CompareOracle };

std::string_view to_string(RunMode mode);

struct MeshSource {
    enum class Kind { Rect, File };
    Kind kind = Kind::Rect;
    int nx = 8;
    int ny = 8;
    RectExtents extents;
    SideTags tags;
    std::filesystem::path file;
    std::vector<BoundaryTag> drained;
};

struct LoadExpressions {
    Expression f0_x, f0_y;
    Expression f2_x, f2_y;
    Expression q;
    Expression gap;
    Expression eta;
    bool has_eta = false;
};

/// One swept parameter: a material key and the values it takes.
struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

struct SolverConfig {
    MeshSource mesh;
    MaterialParams params;
    LoadExpressions loads;
    double dt = 0.1;
    double T = 1.0;
    FixedStressOptions solver;
    std::filesystem::path output_dir = "out";
    bool write_vtk = true;
    int sweep_threads = 0;  // 0 means hardware concurrency
    RunMode mode = RunMode::Simulate;
    std::vector<SweepAxis> sweep;
    std::vector<std::string> warnings;
    std::string source_text;
};

/// Parses the line-oriented "[section]" / "key = value" format. '#' starts a
/// comment. Relative mesh file paths are resolved against `base_dir`.
/// Unknown sections or keys and invalid values raise ConfigError naming the key.
SolverConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
SolverConfig load_config(const std::filesystem::path& path);

/// Sets one material key ("lambda", "G", "alpha", "M", "c_f", "phi0", "mu_f",
/// "stab_L", ...) and re-runs validation.
void set_material_value(SolverConfig& config, const std::string& key, double value);

/// Re-checks the cross-field invariants and refreshes the warnings list.
void validate_config(SolverConfig& config);

Mesh build_mesh(const SolverConfig& config);
Loads build_loads(const SolverConfig& config);
MaterialParams build_params(const SolverConfig& config);

/// 64-bit FNV-1a of the configuration text, as 16 hex digits.
std::string config_hash(std::string_view text);

}  // namespace porocontact
