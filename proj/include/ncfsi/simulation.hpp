#pragma once

#include <string>
#include <vector>

#include "ncfsi/config.hpp"
#include "ncfsi/stepper.hpp"

namespace ncfsi {

struct TipSample {
    double t;
    double dx;
    double dy;
};

struct RunResult {
    int steps_completed = 0;
    std::vector<TipSample> tip;      // one sample per step, t = 0 included
    double min_area_over_run = 0.0;  // smallest triangle area seen
    Vec2 control_point{};            // resolved control point A
    double wall_seconds = 0.0;
    std::string tip_csv_path;
    std::string provenance_path;
};

/// Drives a full simulation: builds the mesh, marches to t_max, writes
/// tip.csv (one row per step, 17-significant-digit decimals), snapshots
/// every snapshot_every steps plus the final one, and a run.json provenance
/// record. On MeshInversion/SolverFailure the exception is rethrown with the
/// failing step index; partial outputs are kept on disk.
RunResult run_simulation(const RunConfig& config);

} // namespace ncfsi
