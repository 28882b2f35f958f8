#pragma once

// Reduced-order extrusion plant: two dynamic states (mean nozzle flow
// velocity and mean deposited-strand flow velocity) plus an algebraic
// film sub-system linking them. Available in two forms:
//   - input-dependent (time-varying) coefficients generated from the
//     actuator signals, and
//   - fixed coefficients at a nominal operating point with additive
//     per-channel uncertainties.

#include <string>

namespace diwmrac {

/// Dynamic states of the extrusion system.
struct PlantState {
    double v1 = 0.0; ///< mean nozzle flow velocity [m/s]
    double u3 = 0.0; ///< mean deposited-strand flow velocity on the plate [m/s]

    bool operator==(const PlantState&) const = default;
};

/// Time derivative of PlantState.
struct StateDerivative {
    double dv1 = 0.0;
    double du3 = 0.0;

    bool operator==(const StateDerivative&) const = default;
};

/// Fixed plant coefficients. b4 is the dimensionless film gain; the others
/// carry units so every term of the state equations is [m/s^2].
struct BetaSet {
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double b4 = 0.0;
    double b5 = 0.0;
    double b6 = 0.0;
    double b7 = 0.0;

    bool operator==(const BetaSet&) const = default;
};

/// Generators of the input-dependent coefficients: g1..g3 scale with the
/// inlet mass flow rate, g5..g7 with the plate velocity. The film gain b4
/// has no input dependence and is stored as a constant.
struct GammaBarSet {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double b4 = 0.0;
    double g5 = 0.0;
    double g6 = 0.0;
    double g7 = 0.0;

    bool operator==(const GammaBarSet&) const = default;
};

/// Actuator signals plus the exogenous nozzle pressure gradient.
struct ControlInput {
    double mdot = 0.0; ///< inlet mass flow rate [kg/s]
    double us = 0.0;   ///< build-plate velocity [m/s]
    double pd1 = 0.0;  ///< nozzle pressure gradient [Pa/m], exogenous

    bool operator==(const ControlInput&) const = default;
};

/// Additive uncertainties on the two actuator channels.
struct UncertaintyPair {
    double d1 = 0.0; ///< mass-flow channel
    double d3 = 0.0; ///< plate-velocity channel

    bool operator==(const UncertaintyPair&) const = default;
};

/// Input-dependent coefficient generators plus the nominal operating point
/// at which the fixed-coefficient design model is taken.
struct ModelProfile {
    GammaBarSet gamma;
    double mdot0 = 0.0; ///< nominal inlet mass flow rate [kg/s]
    double us0 = 0.0;   ///< nominal plate velocity [m/s]

    bool operator==(const ModelProfile&) const = default;
};

/// Divisor guard for the b3, b7 divisions in the control law.
inline constexpr double kDivisorEpsilon = 1e-9;

/// Shipped default profile. The nominal coefficient set it generates is
/// (1, -2, 1, 1, 1, -3, 1): a placeholder chosen to satisfy the stability
/// and divisor requirements, not a physical calibration.
ModelProfile default_model_profile();

/// Evaluate the input-dependent coefficients at an instantaneous
/// (mdot, us): b1..b3 = g1..g3 * mdot, b5..b7 = g5..g7 * us, b4 constant.
/// Throws ConfigError on non-finite input.
BetaSet beta_from_inputs(const GammaBarSet& g, double mdot, double us);

/// Nominal coefficients at the profile's operating point.
BetaSet nominal_betas(const ModelProfile& profile);

/// Check the fixed-coefficient invariants: all finite, |b3| and |b7| above
/// the divisor guard, and b2 < 0, b6 < 0 (stable nominal plant).
/// Throws ConfigError describing every violated condition.
void validate_beta(const BetaSet& b);

/// State derivative of the fixed-coefficient plant with additive channel
/// uncertainties:
///   dv1 = b1*pd1 + b2*v1 + b3*(mdot + d1)
///   du3 = b5*b4*v1 + b6*u3 + b7*(us + d3)
StateDerivative plant_derivative_lti(const PlantState& x, const ControlInput& u,
                                     const BetaSet& b, const UncertaintyPair& d);

/// State derivative of the input-dependent plant, with the algebraic film
/// stage folded into the deposition equation. Throws ConfigError on
/// non-finite input.
StateDerivative plant_derivative_ltv(const PlantState& x, const ControlInput& u,
                                     const GammaBarSet& g);

/// Algebraic film sub-system: mean outlet velocity of the bending/swelling
/// stage, b4 * v1.
double film_output(double v1, double b4);

} // namespace diwmrac
