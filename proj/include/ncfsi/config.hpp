#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ncfsi/mesh.hpp"
#include "ncfsi/physics.hpp"

namespace ncfsi {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { cosserat, classical };

/// Complete description of a run. Defaults reproduce the flag-behind-
/// cylinder benchmark configuration.
struct RunConfig {
    BenchmarkGeometry geometry;
    MaterialParams params;
    double dt = 0.005;
    double t_max = 5.0;
    int mesh_vertices = 2199;
    std::string output_dir = "out";
    int snapshot_every = 200; // steps; 0 disables snapshots
    RunMode mode = RunMode::cosserat;
    bool determinism = true;
    bool ramp = false;
    double t_ramp = 0.5;
    Vec2 body_force{0.0, 0.0};
    double body_couple = 0.0;
    /// Tracked control point; unset = solid vertex with maximal x at t = 0.
    std::optional<Vec2> control_point;

    /// Validates constraints (naming the offending field), forces the
    /// classical limit when requested, finalizes material parameters.
    void finalize();
};

/// Parses the flat `key = value` format with '#' comments. Unknown keys are
/// rejected by name, malformed lines by line number. Omitted keys keep the
/// benchmark defaults.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Applies one `key=value` override (the CLI --set flag).
void apply_override(RunConfig& config, const std::string& assignment);

/// The key table, for documentation and error messages.
std::string config_keys_help();

} // namespace ncfsi
