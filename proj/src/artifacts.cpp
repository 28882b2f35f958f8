#include "diwmrac/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "diwmrac/errors.hpp"
#include "diwmrac/text.hpp"

namespace diwmrac {

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    for (std::size_t i = 0; i < std::size(Trajectory::kColumns); ++i)
        out << (i ? "," : "") << Trajectory::kColumns[i];
    out << "\n";
    for (const auto& r : traj.rows) {
        const double fields[] = {r.t,  r.v1,      r.u3,      r.vr1,   r.ur3,
                                 r.e1, r.e3,      r.mdot,    r.us,    r.d1_true,
                                 r.d3_true, r.dhat1, r.dhat3, r.V,    r.Vdot};
        for (std::size_t i = 0; i < std::size(fields); ++i)
            out << (i ? "," : "") << format_shortest(fields[i]);
        out << "\n";
    }
    return out.str();
}

std::string metrics_csv(const std::vector<RunMetricsRow>& rows) {
    std::ostringstream out;
    out << "subsystem,t_inject,t_cp,t_cr,adaptation_converged,tracking_converged,"
           "e_band,d_band,final_e,final_residual\n";
    for (const auto& r : rows) {
        out << r.subsystem << "," << format_shortest(r.t_inject) << ","
            << (r.metrics.t_cp ? format_shortest(*r.metrics.t_cp) : "") << ","
            << (r.metrics.t_cr ? format_shortest(*r.metrics.t_cr) : "") << ","
            << (r.metrics.adaptation_converged ? "1" : "0") << ","
            << (r.metrics.tracking_converged ? "1" : "0") << ","
            << format_shortest(r.metrics.e_band) << ","
            << format_shortest(r.metrics.d_band) << ","
            << format_shortest(r.final_e) << ","
            << format_shortest(r.final_residual) << "\n";
    }
    return out.str();
}

namespace {

constexpr int kPanelWidth = 760;
constexpr int kPanelHeight = 300;
constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 46;
constexpr std::size_t kMaxPointsPerSeries = 2000;

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    void pad() {
        if (lo > hi) { // no data
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            const double bump = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= bump;
            hi += bump;
        }
    }
};

void render_panel(std::ostringstream& svg, const PlotPanel& panel, int y_offset) {
    Range xr, yr;
    for (const auto& s : panel.series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    xr.pad();
    const double y_span = yr.hi - yr.lo;
    yr.pad();
    if (y_span > 0.0) { // headroom so curves don't hug the frame
        yr.lo -= 0.05 * y_span;
        yr.hi += 0.05 * y_span;
    }

    const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
    const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
    auto px = [&](double v) {
        return kMarginLeft + plot_w * (v - xr.lo) / (xr.hi - xr.lo);
    };
    auto py = [&](double v) {
        return y_offset + kMarginTop + plot_h * (yr.hi - v) / (yr.hi - yr.lo);
    };

    svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << y_offset + kMarginTop << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << kPanelWidth / 2 << "\" y=\"" << y_offset + 20
        << "\" text-anchor=\"middle\" font-size=\"14\">" << panel.title << "</text>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i < kTicks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / (kTicks - 1);
        const double gx = px(fx);
        svg << "<line x1=\"" << gx << "\" y1=\"" << py(yr.lo) << "\" x2=\"" << gx
            << "\" y2=\"" << py(yr.lo) + 4 << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << gx << "\" y=\"" << py(yr.lo) + 18
            << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";

        const double fy = yr.lo + (yr.hi - yr.lo) * i / (kTicks - 1);
        const double gy = py(fy);
        svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << gy << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << gy << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << gy + 4
            << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
    }
    svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
        << y_offset + kPanelHeight - 8 << "\" text-anchor=\"middle\">" << panel.x_label
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << y_offset + kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << y_offset + kMarginTop + plot_h / 2 << ")\">" << panel.y_label << "</text>\n";

    double legend_x = kMarginLeft + 10;
    const double legend_y = y_offset + kMarginTop + 16;
    for (const auto& s : panel.series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw ConfigError("plot series \"" + s.name + "\" empty or misaligned");
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPointsPerSeries);
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
        svg << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += stride)
            svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
        // Always include the final sample so the curve reaches t_end.
        svg << px(s.x.back()) << "," << py(s.y.back());
        svg << "\"/>\n";

        svg << "<line x1=\"" << legend_x << "\" y1=\"" << legend_y << "\" x2=\""
            << legend_x + 22 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\"";
        if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
        svg << "/>\n";
        svg << "<text x=\"" << legend_x + 27 << "\" y=\"" << legend_y + 4 << "\">" << s.name
            << "</text>\n";
        legend_x += 27.0 + 7.0 * static_cast<double>(s.name.size()) + 24.0;
    }
    svg << "</g>\n";
}

const char* series_color(std::size_t i) {
    static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                               "#9467bd", "#ff7f0e", "#8c564b"};
    return kPalette[i % std::size(kPalette)];
}

std::vector<double> column(const Trajectory& traj, double TrajectoryRow::* field) {
    std::vector<double> out;
    out.reserve(traj.rows.size());
    for (const auto& r : traj.rows) out.push_back(r.*field);
    return out;
}

} // namespace

std::string render_svg(const std::vector<PlotPanel>& panels) {
    std::ostringstream svg;
    const int total_h = kPanelHeight * static_cast<int>(panels.size());
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelWidth
        << "\" height=\"" << total_h << "\" viewBox=\"0 0 " << kPanelWidth << " "
        << total_h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    int offset = 0;
    for (const auto& panel : panels) {
        render_panel(svg, panel, offset);
        offset += kPanelHeight;
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string tracking_svg(
    const std::vector<std::pair<std::string, const Trajectory*>>& runs) {
    PlotPanel nozzle{"Nozzle-exit velocity tracking", "t [s]", "v1 [m/s]", {}};
    PlotPanel plate{"Film-thickness channel tracking", "t [s]", "u3 [m/s]", {}};
    if (!runs.empty()) {
        const Trajectory& first = *runs.front().second;
        nozzle.series.push_back(
            {"reference", column(first, &TrajectoryRow::t), column(first, &TrajectoryRow::vr1),
             "#444444", true});
        plate.series.push_back(
            {"reference", column(first, &TrajectoryRow::t), column(first, &TrajectoryRow::ur3),
             "#444444", true});
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& [name, traj] = runs[i];
        nozzle.series.push_back({name, column(*traj, &TrajectoryRow::t),
                                 column(*traj, &TrajectoryRow::v1), series_color(i), false});
        plate.series.push_back({name, column(*traj, &TrajectoryRow::t),
                                column(*traj, &TrajectoryRow::u3), series_color(i), false});
    }
    return render_svg({nozzle, plate});
}

std::string adaptation_svg(
    const std::vector<std::pair<std::string, const Trajectory*>>& runs) {
    PlotPanel flow{"Mass-flow uncertainty estimate", "t [s]", "d1 [kg/s]", {}};
    PlotPanel plate{"Plate-velocity uncertainty estimate", "t [s]", "d3 [m/s]", {}};
    if (!runs.empty()) {
        const Trajectory& first = *runs.front().second;
        flow.series.push_back({"true", column(first, &TrajectoryRow::t),
                               column(first, &TrajectoryRow::d1_true), "#444444", true});
        plate.series.push_back({"true", column(first, &TrajectoryRow::t),
                                column(first, &TrajectoryRow::d3_true), "#444444", true});
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& [name, traj] = runs[i];
        flow.series.push_back({name + " estimate", column(*traj, &TrajectoryRow::t),
                               column(*traj, &TrajectoryRow::dhat1), series_color(i), false});
        plate.series.push_back({name + " estimate", column(*traj, &TrajectoryRow::t),
                                column(*traj, &TrajectoryRow::dhat3), series_color(i), false});
    }
    return render_svg({flow, plate});
}

} // namespace diwmrac
