#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "porocontact/config.hpp"
#include "porocontact/fixed_stress.hpp"

namespace porocontact {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Header and rows of one time step's iteration report, numbers in %.16e and
/// undefined values as "nan".
std::string format_report_csv(const IterationReport& report);

/// Legacy ASCII VTK unstructured grid: point displacement, cell pressure and
/// cell sigma_v.
std::string format_vtk(const Mesh& mesh, const State& state);

/// Per-step summary: step, time, iterations, active set size, converged flag.
std::string format_timeseries_csv(const SimulationResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Writes "manifest.txt" in `dir` listing the config hash and every file
/// (relative path, byte count, content hash). Returns the manifest path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const std::string& config_text,
                                     const std::vector<std::filesystem::path>& files);

/// Writes the full output set of a run below `dir`: reports/step_NNNN.csv,
/// vtk/state_NNNN.vtk (when enabled), timeseries.csv and manifest.txt.
/// Returns the written paths relative to `dir`.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const SolverConfig& config,
                                                 const Mesh& mesh, const SimulationResult& result);

}  // namespace porocontact
