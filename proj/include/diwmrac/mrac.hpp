#pragma once

// Model-reference adaptive controller for the two-channel extrusion plant:
// state-feedback control law with exact feedforward cancelation, integral
// adaptation of the channel uncertainties, first-order reference models,
// a gain validity check, and the quadratic certificate used to monitor
// boundedness along trajectories.

#include <optional>
#include <string>
#include <vector>

#include "diwmrac/model.hpp"

namespace diwmrac {

/// Feedback gains, adaptation rates, and certificate weights.
struct ControllerConfig {
    double k1 = 5.0;      ///< nozzle-channel feedback gain
    double k3 = 5.0;      ///< plate-channel feedback gain
    double gamma1 = 50.0; ///< adaptation rate, mass-flow estimate (>= 0; 0 = non-adaptive)
    double gamma3 = 20.0; ///< adaptation rate, plate-velocity estimate (>= 0)
    double p1 = 1.0;      ///< certificate weight, nozzle error (> 0)
    double p3 = 1.0;      ///< certificate weight, plate error (> 0)

    /// Use the alternate feedforward coefficients (b2/b3 on the pressure
    /// term, b4*b6/b7 on the coupling term) instead of the exact-cancelation
    /// coefficients (b1/b3, b5*b4/b7). With the alternate coefficients the
    /// closed loop no longer reproduces the reference model exactly; kept
    /// for side-by-side comparison.
    bool alt_feedforward = false;

    bool operator==(const ControllerConfig&) const = default;
};

/// Adaptive estimates of the channel uncertainties.
struct EstimatorState {
    double dhat1 = 0.0;
    double dhat3 = 0.0;

    bool operator==(const EstimatorState&) const = default;
};

/// Reference-model states the plant is driven to track.
struct ReferenceState {
    double vr1 = 0.0;
    double ur3 = 0.0;

    bool operator==(const ReferenceState&) const = default;
};

/// Plant state minus reference state, per channel.
struct TrackingError {
    double e1 = 0.0; ///< v1 - vr1
    double e3 = 0.0; ///< u3 - ur3
};

/// True uncertainty minus its estimate. Only computable inside the
/// simulator, where the true uncertainty is known.
struct ParamError {
    double dtilde1 = 0.0;
    double dtilde3 = 0.0;
};

/// Outcome of the stability-condition check. The closed-loop poles are
/// reported whether or not the verdict is valid.
struct GainValidation {
    bool valid = false;
    double pole1 = 0.0; ///< b2 - b3*k1
    double pole3 = 0.0; ///< b6 - b7*k3
    std::vector<std::string> reasons; ///< empty when valid

    explicit operator bool() const { return valid; }
};

/// Check the boundedness conditions: both closed-loop poles strictly
/// negative. Invalid gains are a verdict, not an error.
GainValidation validate_gains(const BetaSet& b, const ControllerConfig& cfg);

/// Throw ConfigError unless the coefficient invariants, divisor guards,
/// certificate weights, adaptation-rate signs, and gain conditions all
/// hold. Call once before running; the per-step laws assume it passed.
void validate_controller(const BetaSet& b, const ControllerConfig& cfg);

/// State-feedback control with feedforward cancelation of the pressure
/// term and the film coupling, minus the current uncertainty estimates:
///   mdot = -k1*v1 + r1 - (b1/b3)*pd1 - dhat1
///   us   = -k3*u3 + r3 - (b5*b4/b7)*v1 - dhat3
/// (coefficients switch per ControllerConfig::alt_feedforward).
ControlInput control_law(const ControllerConfig& cfg, const BetaSet& b,
                         const PlantState& x, double r1, double r3, double pd1,
                         const EstimatorState& est);

/// Derivative of the uncertainty estimates, driven by tracking error:
///   dhat1' = gamma1*p1*b3*e1,  dhat3' = gamma3*p3*b7*e3.
/// Identically zero in non-adaptive mode (gamma = 0).
EstimatorState adaptation_derivative(const ControllerConfig& cfg, const BetaSet& b,
                                     const TrackingError& e);

/// Derivative of the first-order reference models:
///   vr1' = (b2 - b3*k1)*vr1 + b3*r1,  ur3' = (b6 - b7*k3)*ur3 + b7*r3.
ReferenceState reference_model_derivative(const BetaSet& b, const ControllerConfig& cfg,
                                          const ReferenceState& ref, double r1, double r3);

/// Quadratic certificate value
///   V = (p1/2)e1^2 + (p3/2)e3^2 + (1/(2*gamma1))dtilde1^2 + (1/(2*gamma3))dtilde3^2.
/// Returns nullopt when either adaptation rate is zero (monitor not
/// applicable in non-adaptive mode).
std::optional<double> lyapunov_value(const ControllerConfig& cfg, const TrackingError& e,
                                     const ParamError& pe);

/// Certificate rate along closed-loop trajectories:
///   p1*(b2 - b3*k1)*e1^2 + p3*(b6 - b7*k3)*e3^2.
/// Non-positive whenever the gain conditions hold.
double lyapunov_rate(const ControllerConfig& cfg, const BetaSet& b, const TrackingError& e);

} // namespace diwmrac
