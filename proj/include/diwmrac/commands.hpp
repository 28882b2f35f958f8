#pragma once

// The three CLI commands as library functions, so tests can drive them
// without spawning processes. Each returns the process exit code:
// 0 success, 2 configuration/validation failure, 3 numerical divergence,
// 4 sweep finished with at least one failed case.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace diwmrac {

struct RunManifest {
    std::string scenario_path;
    std::string out_dir;
    std::vector<std::string> overrides; ///< dotted.path=value assignments
    std::optional<std::uint64_t> seed;  ///< reseeds all noise channels when set
    bool plots = false;
};

/// Single closed-loop run. Writes trajectory.csv, metrics.csv, report.txt
/// and, with plots requested, tracking.svg and adaptation.svg.
int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Adaptive versus frozen-estimator pair on the shared scenario. Writes
/// trajectory_adaptive.csv, trajectory_nonadaptive.csv, metrics.csv,
/// report.txt and optionally the overlaid plot pair.
int cmd_compare(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Disturbance-magnitude sweep over the scenario's case list. Writes
/// performance.txt, performance.csv, report.txt and per-case trajectories
/// under cases/<label>/. Parallelism is capped by DIW_MRAC_THREADS.
int cmd_sweep(const RunManifest& manifest, std::ostream& out, std::ostream& err);

} // namespace diwmrac
