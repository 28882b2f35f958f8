#pragma once

// Renderers for everything a command writes to disk: trajectory and
// metrics CSVs, the plain-text run report, and static SVG line charts.
// All functions produce complete file contents in memory; callers decide
// where (and whether) bytes land on disk.

#include <optional>
#include <string>
#include <vector>

#include "diwmrac/analysis.hpp"
#include "diwmrac/sim.hpp"

namespace diwmrac {

/// CSV with the fixed 15-column trajectory schema, one row per logged
/// sample, doubles shortest-round-trip. Byte-stable for identical runs.
std::string trajectory_csv(const Trajectory& traj);

/// Per-subsystem settling metrics of a finished run.
struct RunMetricsRow {
    std::string subsystem; ///< "nozzle" or "plate"
    double t_inject = 0.0;
    ConvergenceMetrics metrics;
    double final_e = 0.0;
    double final_residual = 0.0;
};

std::string metrics_csv(const std::vector<RunMetricsRow>& rows);

/// One plotted curve. Points are (x, y) pairs from equal-length vectors.
struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

/// One chart panel: titled axes plus any number of series.
struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Self-contained SVG document with the panels stacked vertically.
std::string render_svg(const std::vector<PlotPanel>& panels);

/// tracking.svg content: plant vs reference per sub-system.
std::string tracking_svg(const std::vector<std::pair<std::string, const Trajectory*>>& runs);

/// adaptation.svg content: effective uncertainty vs estimate per channel.
std::string adaptation_svg(const std::vector<std::pair<std::string, const Trajectory*>>& runs);

} // namespace diwmrac
