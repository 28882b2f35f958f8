#pragma once

// Deterministic signal sources that define a run: reference commands,
// disturbance shapes on the actuator channels, seeded zero-order-hold
// noise, and the bundled presets for the shipped case studies.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diwmrac/model.hpp"
#include "diwmrac/mrac.hpp"

namespace diwmrac {

enum class SignalKind { Constant, Step, Ramp, PiecewiseConstant, Sum };

/// Point of a piecewise-constant profile: `value` holds from `t` onward
/// (until the next point).
struct PiecewisePoint {
    double t = 0.0;
    double value = 0.0;

    bool operator==(const PiecewisePoint&) const = default;
};

/// Time signal evaluable at any t >= 0. Step transitions are left-closed:
/// the new value holds at exactly t = t0. A ramp runs from t0 with the
/// given slope and holds its end value from t1 on (ramps forever when t1
/// is absent).
struct SignalProfile {
    SignalKind kind = SignalKind::Constant;
    double magnitude = 0.0;             ///< constant value or step height
    double t0 = 0.0;                    ///< activation time [s]
    std::optional<double> t1;           ///< step removal / ramp end [s]
    double slope = 0.0;                 ///< ramp slope [units/s]
    std::vector<PiecewisePoint> points; ///< piecewise-constant segments, sorted by t
    std::vector<SignalProfile> children; ///< summands of a Sum profile

    bool operator==(const SignalProfile&) const = default;

    static SignalProfile constant(double value);
    static SignalProfile step(double t0, double magnitude,
                              std::optional<double> t1 = std::nullopt);
    static SignalProfile ramp(double t0, double slope,
                              std::optional<double> t1 = std::nullopt);
    static SignalProfile piecewise(std::vector<PiecewisePoint> points);
    static SignalProfile sum(std::vector<SignalProfile> children);
};

/// Piecewise-exact evaluation at time t >= 0.
double evaluate_signal(const SignalProfile& p, double t);

/// Earliest time at which the profile can become active (first step onset,
/// ramp start, first piecewise transition, ...). nullopt for profiles that
/// are constant for all time. Used to anchor convergence measurements.
std::optional<double> first_active_time(const SignalProfile& p);

/// Throw ConfigError if the profile is not evaluable: non-finite
/// parameters, t1 <= t0, or unsorted/overlapping piecewise segments.
void validate_signal(const SignalProfile& p);

/// Seeded Gaussian noise sampled with a zero-order hold: the value is
/// constant within each sample period and fully determined by (seed,
/// period index), so the sequence is reproducible and random-access.
struct NoiseModel {
    double mean = 0.0;
    double std_dev = 0.0;        ///< >= 0; 0 disables sampling entirely
    std::uint64_t seed = 0;
    double sample_period = 0.01; ///< [s]

    bool operator==(const NoiseModel&) const = default;
};

double sample_noise(const NoiseModel& n, double t);

void validate_noise(const NoiseModel& n);

/// Derive an independent stream seed from a base seed. Pure mixing, so
/// any (base, stream) pair names the same sequence on every run.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Initial conditions of the augmented loop. With `nominal` set, the run
/// starts settled at the model profile's operating point (plant and
/// reference at the nominal equilibrium, estimates at the deterministic
/// disturbance value at t = 0); the explicit fields are ignored.
struct InitialConditions {
    bool nominal = false;
    double v1 = 0.0;
    double u3 = 0.0;
    double vr1 = 0.0;
    double ur3 = 0.0;
    double dhat1 = 0.0;
    double dhat3 = 0.0;

    bool operator==(const InitialConditions&) const = default;
};

/// Everything time-dependent about a run: commands, disturbances, noise.
struct ScenarioBundle {
    SignalProfile r1 = SignalProfile::constant(0.0);  ///< nozzle reference command
    SignalProfile r3 = SignalProfile::constant(0.0);  ///< plate reference command
    SignalProfile pd1 = SignalProfile::constant(0.0); ///< exogenous pressure gradient
    SignalProfile disturbance_mdot = SignalProfile::constant(0.0);
    SignalProfile disturbance_us = SignalProfile::constant(0.0);
    NoiseModel noise_mdot;
    NoiseModel noise_us;
    InitialConditions initial;

    bool operator==(const ScenarioBundle&) const = default;
};

/// Validate every signal, both noise models, and the explicit initial
/// conditions. Throws ConfigError listing all problems found.
void validate_scenario(const ScenarioBundle& s);

/// One case of a disturbance-magnitude sweep: a persistent step of height
/// `delta` on one actuator channel at time t0.
struct SweepCase {
    std::string label;
    std::string channel; ///< "mdot" or "us"
    double delta = 0.0;
    double t0 = 40.0;

    bool operator==(const SweepCase&) const = default;
};

/// Steady operating values consistent with a model profile and gains:
/// plant equilibrium at the nominal inputs, and the constant reference
/// commands whose reference-model steady states sit exactly there.
struct NominalOperatingPoint {
    double v1 = 0.0;
    double u3 = 0.0;
    double r1 = 0.0;
    double r3 = 0.0;
};

NominalOperatingPoint nominal_operating_point(const ModelProfile& profile,
                                              const ControllerConfig& cfg, double pd1);

/// Fully-populated configuration of a preset case study (scenario plus the
/// settings it pins).
struct CaseStudyPreset {
    std::string id;
    ScenarioBundle scenario;
    std::string fidelity = "ltv"; ///< plant fidelity the preset runs at
    double t_end = 90.0;
    std::optional<double> gamma1_override; ///< non-adaptive variants set these to 0
    std::optional<double> gamma3_override;
    std::vector<SweepCase> sweep_cases;    ///< non-empty only for sweep presets
};

/// Valid ids: "1" (plate-velocity step, removed after 30 s), "2"
/// (mass-flow ramp), "3a"/"3b" (same disturbances, adaptation off),
/// "table1-sweep" (ten-case magnitude sweep). Throws ConfigError listing
/// the valid ids for anything else.
CaseStudyPreset case_study_preset(const std::string& id, const ModelProfile& profile,
                                  const ControllerConfig& cfg);

std::vector<std::string> case_study_ids();

} // namespace diwmrac
