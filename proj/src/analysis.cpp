#include "diwmrac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "diwmrac/errors.hpp"
#include "diwmrac/text.hpp"

namespace diwmrac {

std::optional<double> convergence_time(const std::vector<double>& t,
                                       const std::vector<double>& y, double t_inject,
                                       double band) {
    if (t.empty() || t.size() != y.size())
        throw ConfigError("convergence_time: series must be non-empty and aligned");
    if (!std::isfinite(band) || band <= 0.0)
        throw ConfigError("convergence_time: band must be positive");
    // Grid times carry up to 1 ulp of accumulation; don't let that drop
    // the sample at exactly t_inject.
    const double snap = 1e-9 * std::max(1.0, std::abs(t_inject));
    if (t_inject < t.front() - snap || t_inject > t.back() + snap)
        throw ConfigError("convergence_time: t_inject outside the sampled range");

    bool exited = false;
    double t_last = t_inject;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_inject - snap) continue;
        if (std::abs(y[i]) > band) {
            exited = true;
            t_last = t[i];
        }
    }
    if (!exited) return 0.0;
    if (std::abs(y.back()) > band) return std::nullopt;
    return t_last - t_inject;
}

ConvergenceMetrics measure_convergence(const Trajectory& traj, Subsystem channel,
                                       double t_inject) {
    if (traj.rows.empty()) throw ConfigError("measure_convergence: empty trajectory");

    std::vector<double> t, e, residual;
    t.reserve(traj.rows.size());
    e.reserve(traj.rows.size());
    residual.reserve(traj.rows.size());
    for (const auto& row : traj.rows) {
        t.push_back(row.t);
        if (channel == Subsystem::Nozzle) {
            e.push_back(row.e1);
            residual.push_back(row.d1_true - row.dhat1);
        } else {
            e.push_back(row.e3);
            residual.push_back(row.d3_true - row.dhat3);
        }
    }

    const auto& last = traj.rows.back();
    const double ref_final = channel == Subsystem::Nozzle ? last.vr1 : last.ur3;
    const double d_final = channel == Subsystem::Nozzle ? last.d1_true : last.d3_true;

    ConvergenceMetrics m;
    m.e_band = std::max(0.02 * std::abs(ref_final), 1e-4);
    m.d_band = std::max(0.02 * std::abs(d_final), 1e-4);
    m.t_cr = convergence_time(t, e, t_inject, m.e_band);
    m.t_cp = convergence_time(t, residual, t_inject, m.d_band);
    m.tracking_converged = m.t_cr.has_value();
    m.adaptation_converged = m.t_cp.has_value();
    return m;
}

TrackingError steady_state_error_prediction(const BetaSet& b, const ControllerConfig& cfg,
                                            const ParamError& residual) {
    const GainValidation gains = validate_gains(b, cfg);
    if (!gains)
        throw ConfigError("steady_state_error_prediction requires stabilizing gains");
    TrackingError e;
    e.e1 = b.b3 * residual.dtilde1 / (b.b3 * cfg.k1 - b.b2);
    e.e3 = b.b7 * residual.dtilde3 / (b.b7 * cfg.k3 - b.b6);
    return e;
}

namespace {

constexpr const char* kPerformanceHeader =
    "case,channel,delta,t_cp,t_cr,adaptation_converged,tracking_converged,e_band,d_band";

std::string settle_cell(const std::optional<double>& v) {
    if (!v) return "unsettled";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

void render_block(std::ostringstream& out, const char* title, const char* delta_header,
                  const std::vector<const SweepCaseResult*>& rows) {
    out << title << "\n";
    char line[128];
    std::snprintf(line, sizeof line, "  %-12s %14s %11s %11s\n", "Case", delta_header,
                  "t_cp [s]", "t_cr [s]");
    out << line;
    for (const auto* r : rows) {
        char delta[32];
        std::snprintf(delta, sizeof delta, "%+g", r->delta);
        std::snprintf(line, sizeof line, "  %-12s %14s %11s %11s\n", r->label.c_str(),
                      delta, settle_cell(r->metrics.t_cp).c_str(),
                      settle_cell(r->metrics.t_cr).c_str());
        out << line;
    }
}

} // namespace

PerformanceReport performance_table(const std::vector<SweepCaseResult>& results) {
    if (results.empty()) throw ConfigError("performance_table: no cases");

    std::vector<const SweepCaseResult*> flow_cases, plate_cases;
    for (const auto& r : results)
        (r.channel == "mdot" ? flow_cases : plate_cases).push_back(&r);

    PerformanceReport report;
    std::ostringstream text;
    if (!flow_cases.empty())
        render_block(text, "Mass-flow disturbance cases", "delta_m [kg/s]", flow_cases);
    if (!flow_cases.empty() && !plate_cases.empty()) text << "\n";
    if (!plate_cases.empty())
        render_block(text, "Plate-velocity disturbance cases", "delta_p [m/s]",
                     plate_cases);
    report.text = text.str();

    std::ostringstream csv;
    csv << kPerformanceHeader << "\n";
    for (const auto& r : results) {
        csv << r.label << "," << r.channel << "," << format_shortest(r.delta) << ","
            << (r.metrics.t_cp ? format_shortest(*r.metrics.t_cp) : "") << ","
            << (r.metrics.t_cr ? format_shortest(*r.metrics.t_cr) : "") << ","
            << (r.metrics.adaptation_converged ? "1" : "0") << ","
            << (r.metrics.tracking_converged ? "1" : "0") << ","
            << format_shortest(r.metrics.e_band) << ","
            << format_shortest(r.metrics.d_band) << "\n";
    }
    report.csv = csv.str();
    return report;
}

std::vector<SweepCaseResult> parse_performance_csv(const std::string& csv) {
    const auto lines = split_lines(csv);
    if (lines.empty() || lines.front() != kPerformanceHeader)
        throw ConfigError("performance csv: missing or unexpected header");

    std::vector<SweepCaseResult> results;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_row(lines[i]);
        if (fields.size() != 9)
            throw ConfigError("performance csv: row " + std::to_string(i) +
                              " has wrong field count");
        SweepCaseResult r;
        r.label = fields[0];
        r.channel = fields[1];
        r.delta = parse_double_strict(fields[2]);
        if (!fields[3].empty()) r.metrics.t_cp = parse_double_strict(fields[3]);
        if (!fields[4].empty()) r.metrics.t_cr = parse_double_strict(fields[4]);
        r.metrics.adaptation_converged = fields[5] == "1";
        r.metrics.tracking_converged = fields[6] == "1";
        r.metrics.e_band = parse_double_strict(fields[7]);
        r.metrics.d_band = parse_double_strict(fields[8]);
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace diwmrac
