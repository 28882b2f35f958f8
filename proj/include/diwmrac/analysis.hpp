#pragma once

// Post-run analysis: settling-time metrics for tracking and adaptation,
// the closed-form steady-error prediction for frozen estimates, and the
// two-block performance table a disturbance sweep reports.

#include <optional>
#include <string>
#include <vector>

#include "diwmrac/model.hpp"
#include "diwmrac/mrac.hpp"
#include "diwmrac/sim.hpp"

namespace diwmrac {

/// Last-exit settling time: the final sampled instant after t_inject at
/// which |y| > band, measured relative to t_inject. Returns 0 when the
/// series never leaves the band, and nullopt when it is still outside the
/// band at the final sample (settling did not complete on this horizon).
/// Throws ConfigError on an empty/mismatched series or t_inject outside it.
///
/// Last-exit rather than first-entry: transient re-crossings after the
/// first band entry must count against the settling time.
std::optional<double> convergence_time(const std::vector<double>& t,
                                       const std::vector<double>& y, double t_inject,
                                       double band);

/// Settling metrics of one sub-system after a disturbance hits it.
/// t_cr: tracking error settled into e_band. t_cp: estimation residual
/// (effective uncertainty minus estimate) settled into d_band. A false
/// flag means the corresponding time is absent (horizon-limited).
struct ConvergenceMetrics {
    std::optional<double> t_cr;
    std::optional<double> t_cp;
    bool tracking_converged = false;
    bool adaptation_converged = false;
    double e_band = 0.0;
    double d_band = 0.0;
};

/// The two decoupled control channels. Values carry the conventional
/// sub-system indices.
enum class Subsystem { Nozzle = 1, Plate = 3 };

/// Measure settling of one sub-system on a finished trajectory. Bands
/// default to 2% of the channel's final reference value (for e) and 2% of
/// the final effective uncertainty (for the residual), floored at 1e-4 so
/// near-zero targets keep a meaningful band.
ConvergenceMetrics measure_convergence(const Trajectory& traj, Subsystem channel,
                                       double t_inject);

/// Steady tracking error when estimates are frozen at a constant residual
/// dtilde: the error dynamics settle at e_ss = b_in*dtilde/(b_in*k - b_self)
/// per channel.
TrackingError steady_state_error_prediction(const BetaSet& b, const ControllerConfig& cfg,
                                            const ParamError& residual);

/// One sweep case with its measured outcome.
struct SweepCaseResult {
    std::string label;
    std::string channel; ///< "mdot" or "us"
    double delta = 0.0;  ///< disturbance magnitude
    ConvergenceMetrics metrics;
};

/// Human and machine renderings of a sweep outcome.
struct PerformanceReport {
    std::string text; ///< two aligned blocks: mass-flow cases, then plate-velocity cases
    std::string csv;  ///< one row per case; parses back via parse_performance_csv
};

PerformanceReport performance_table(const std::vector<SweepCaseResult>& results);

/// Inverse of the csv half of performance_table; round-trips exactly.
std::vector<SweepCaseResult> parse_performance_csv(const std::string& csv);

} // namespace diwmrac
