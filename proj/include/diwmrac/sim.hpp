#pragma once

// Closed-loop simulation of the extrusion process under adaptive control:
// plant, reference model, and estimator integrated together as one
// 6-dimensional state with fixed-step RK4, plus decimated logging of every
// signal a run can be judged by.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diwmrac/model.hpp"
#include "diwmrac/mrac.hpp"
#include "diwmrac/scenario.hpp"

namespace diwmrac {

/// Plant truth used inside the loop. `Lti` integrates the fixed-coefficient
/// design model with the scenario disturbances injected additively. `Ltv`
/// integrates the input-dependent plant; the controller still uses the
/// fixed nominal coefficients, so the coefficient drift itself becomes the
/// uncertainty the estimator has to absorb.
enum class PlantFidelity { Lti, Ltv };

std::string fidelity_name(PlantFidelity f);
PlantFidelity parse_fidelity(const std::string& name);

struct SimulationConfig {
    std::string label = "run";
    double dt = 0.01;      ///< integration step [s]
    double t_end = 90.0;   ///< horizon [s]
    PlantFidelity fidelity = PlantFidelity::Lti;
    std::int64_t decimation = 1; ///< log every Nth step
    ModelProfile model;
    ControllerConfig controller;
    ScenarioBundle scenario;
};

/// Throws ConfigError on any violated precondition: grid parameters,
/// model profile, controller gains against the nominal coefficients,
/// scenario signals.
void validate_simulation_config(const SimulationConfig& cfg);

/// One logged sample. d1_true/d3_true are the effective uncertainties the
/// design model sees: the injected disturbance plus noise in Lti mode, and
/// the implied per-channel residual (true derivative minus design-model
/// derivative, divided by the input coefficient) in Ltv mode. V and Vdot
/// are logged as 0.0 when adaptation is disabled on either channel, since
/// the certificate is only defined for positive rates.
struct TrajectoryRow {
    double t = 0.0;
    double v1 = 0.0;
    double u3 = 0.0;
    double vr1 = 0.0;
    double ur3 = 0.0;
    double e1 = 0.0;
    double e3 = 0.0;
    double mdot = 0.0;
    double us = 0.0;
    double d1_true = 0.0;
    double d3_true = 0.0;
    double dhat1 = 0.0;
    double dhat3 = 0.0;
    double V = 0.0;
    double Vdot = 0.0;
};

struct Trajectory {
    static constexpr const char* kColumns[] = {
        "t",    "v1",      "u3",      "vr1",   "ur3",   "e1", "e3",   "mdot",
        "us",   "d1_true", "d3_true", "dhat1", "dhat3", "V",  "Vdot",
    };

    std::vector<TrajectoryRow> rows;
};

using StateVector6 = std::array<double, 6>; // v1, u3, vr1, ur3, dhat1, dhat3

/// State a run starts from: either resolved from the nominal operating
/// point or taken verbatim from the scenario's explicit fields.
StateVector6 resolve_initial_state(const SimulationConfig& cfg);

/// Integrate the closed loop over [0, t_end]. Row count is
/// floor(t_end/(dt*decimation)) + 1; logged times are exact multiples of
/// the step (integer index times dt). Throws ConfigError before touching
/// the integrator if validation fails, SimulationError if any state
/// magnitude exceeds the divergence bound or a derivative goes non-finite.
Trajectory run_closed_loop(const SimulationConfig& cfg);

/// Run two configs that are identical except for adaptation settings
/// (rates and initial estimates) on the shared scenario and grid, so the
/// pair is directly comparable sample by sample. Throws ConfigError if the
/// configs differ anywhere else.
std::pair<Trajectory, Trajectory> run_pair_comparison(const SimulationConfig& adaptive,
                                                      const SimulationConfig& frozen);

/// Largest state magnitude tolerated before a run aborts as divergent.
inline constexpr double kDivergenceBound = 1e12;

} // namespace diwmrac
