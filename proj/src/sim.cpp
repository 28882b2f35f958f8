#include "diwmrac/sim.hpp"

#include <cmath>
#include <sstream>

#include "diwmrac/errors.hpp"
#include "diwmrac/rk4.hpp"

namespace diwmrac {

std::string fidelity_name(PlantFidelity f) {
    return f == PlantFidelity::Lti ? "lti" : "ltv";
}

PlantFidelity parse_fidelity(const std::string& name) {
    if (name == "lti") return PlantFidelity::Lti;
    if (name == "ltv") return PlantFidelity::Ltv;
    throw ConfigError("unknown fidelity \"" + name + "\"; expected \"lti\" or \"ltv\"");
}

void validate_simulation_config(const SimulationConfig& cfg) {
    std::vector<std::string> problems;
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0)
        problems.push_back("dt must be finite and > 0");
    if (!std::isfinite(cfg.t_end) || cfg.t_end < cfg.dt)
        problems.push_back("t_end must be finite and >= dt");
    if (cfg.decimation < 1) problems.push_back("decimation must be >= 1");
    if (!std::isfinite(cfg.model.mdot0) || !std::isfinite(cfg.model.us0))
        problems.push_back("model operating point must be finite");
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid simulation config:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
    validate_controller(nominal_betas(cfg.model), cfg.controller);
    validate_scenario(cfg.scenario);
}

namespace {

// Step count for the horizon, snapped so exact multiples of dt are not
// lost to the division rounding (90/0.01 lands just below 9000.0).
std::int64_t grid_steps(double t_end, double dt) {
    return static_cast<std::int64_t>(std::floor(t_end / dt + 1e-9));
}

struct LoopContext {
    const SimulationConfig& cfg;
    BetaSet nominal; // controller's fixed design coefficients

    struct Inputs {
        double r1, r3, pd1;
        double d1, d3; // injected disturbance + noise per channel
    };

    Inputs inputs_at(double t) const {
        Inputs in;
        in.r1 = evaluate_signal(cfg.scenario.r1, t);
        in.r3 = evaluate_signal(cfg.scenario.r3, t);
        in.pd1 = evaluate_signal(cfg.scenario.pd1, t);
        in.d1 = evaluate_signal(cfg.scenario.disturbance_mdot, t) +
                sample_noise(cfg.scenario.noise_mdot, t);
        in.d3 = evaluate_signal(cfg.scenario.disturbance_us, t) +
                sample_noise(cfg.scenario.noise_us, t);
        return in;
    }

    StateVector6 derivative(double t, const StateVector6& x) const {
        const Inputs in = inputs_at(t);
        const PlantState plant{x[0], x[1]};
        const ReferenceState ref{x[2], x[3]};
        const EstimatorState est{x[4], x[5]};

        const ControlInput u =
            control_law(cfg.controller, nominal, plant, in.r1, in.r3, in.pd1, est);

        StateDerivative dplant;
        if (cfg.fidelity == PlantFidelity::Lti) {
            dplant = plant_derivative_lti(plant, u, nominal, {in.d1, in.d3});
        } else {
            ControlInput applied = u;
            applied.mdot += in.d1;
            applied.us += in.d3;
            dplant = plant_derivative_ltv(plant, applied, cfg.model.gamma);
        }

        const TrackingError e{plant.v1 - ref.vr1, plant.u3 - ref.ur3};
        const ReferenceState dref =
            reference_model_derivative(nominal, cfg.controller, ref, in.r1, in.r3);
        const EstimatorState dest = adaptation_derivative(cfg.controller, nominal, e);

        return {dplant.dv1, dplant.du3, dref.vr1, dref.ur3, dest.dhat1, dest.dhat3};
    }

    // Uncertainty the design model attributes to each channel: whatever
    // separates the true plant derivative from the nominal one, scaled
    // back to input units. In Lti mode this is the injection itself.
    UncertaintyPair effective_uncertainty(const StateVector6& x, const ControlInput& u,
                                          const Inputs& in) const {
        if (cfg.fidelity == PlantFidelity::Lti) return {in.d1, in.d3};
        const PlantState plant{x[0], x[1]};
        ControlInput applied = u;
        applied.mdot += in.d1;
        applied.us += in.d3;
        const StateDerivative truth = plant_derivative_ltv(plant, applied, cfg.model.gamma);
        const StateDerivative design =
            plant_derivative_lti(plant, u, nominal, {0.0, 0.0});
        return {(truth.dv1 - design.dv1) / nominal.b3,
                (truth.du3 - design.du3) / nominal.b7};
    }

    TrajectoryRow log_row(double t, const StateVector6& x) const {
        const Inputs in = inputs_at(t);
        const PlantState plant{x[0], x[1]};
        const EstimatorState est{x[4], x[5]};
        const ControlInput u =
            control_law(cfg.controller, nominal, plant, in.r1, in.r3, in.pd1, est);
        const UncertaintyPair d_true = effective_uncertainty(x, u, in);
        const TrackingError e{x[0] - x[2], x[1] - x[3]};

        TrajectoryRow row;
        row.t = t;
        row.v1 = x[0];
        row.u3 = x[1];
        row.vr1 = x[2];
        row.ur3 = x[3];
        row.e1 = e.e1;
        row.e3 = e.e3;
        row.mdot = u.mdot;
        row.us = u.us;
        row.d1_true = d_true.d1;
        row.d3_true = d_true.d3;
        row.dhat1 = est.dhat1;
        row.dhat3 = est.dhat3;
        const ParamError pe{d_true.d1 - est.dhat1, d_true.d3 - est.dhat3};
        if (const auto v = lyapunov_value(cfg.controller, e, pe)) {
            row.V = *v;
            // + 0.0 canonicalizes the -0.0 that pole*e^2 yields at e = 0,
            // keeping logs comparable across adaptive/frozen runs.
            row.Vdot = lyapunov_rate(cfg.controller, nominal, e) + 0.0;
        }
        return row;
    }
};

void check_divergence(const StateVector6& x, double t) {
    for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) {
            std::ostringstream msg;
            msg << "state diverged at t = " << t << ": [";
            for (std::size_t i = 0; i < x.size(); ++i)
                msg << (i ? ", " : "") << x[i];
            msg << "]";
            throw SimulationError(msg.str());
        }
    }
}

} // namespace

StateVector6 resolve_initial_state(const SimulationConfig& cfg) {
    const InitialConditions& init = cfg.scenario.initial;
    if (!init.nominal)
        return {init.v1, init.u3, init.vr1, init.ur3, init.dhat1, init.dhat3};
    const NominalOperatingPoint op = nominal_operating_point(
        cfg.model, cfg.controller, evaluate_signal(cfg.scenario.pd1, 0.0));
    // Settled start: plant and reference on the operating point, estimates
    // matching whatever deterministic disturbance is already active.
    const double d1 = evaluate_signal(cfg.scenario.disturbance_mdot, 0.0);
    const double d3 = evaluate_signal(cfg.scenario.disturbance_us, 0.0);
    return {op.v1, op.u3, op.v1, op.u3, d1, d3};
}

Trajectory run_closed_loop(const SimulationConfig& cfg) {
    validate_simulation_config(cfg);

    const LoopContext ctx{cfg, nominal_betas(cfg.model)};
    const std::int64_t steps = grid_steps(cfg.t_end, cfg.dt);

    StateVector6 x = resolve_initial_state(cfg);
    check_divergence(x, 0.0);

    auto deriv = [&ctx](double t, const StateVector6& s) { return ctx.derivative(t, s); };

    Trajectory out;
    out.rows.reserve(static_cast<std::size_t>(steps / cfg.decimation) + 1);
    for (std::int64_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * cfg.dt;
        if (i % cfg.decimation == 0) out.rows.push_back(ctx.log_row(t, x));
        if (i < steps) {
            x = rk4_step(deriv, t, x, cfg.dt);
            check_divergence(x, static_cast<double>(i + 1) * cfg.dt);
        }
    }
    return out;
}

std::pair<Trajectory, Trajectory> run_pair_comparison(const SimulationConfig& adaptive,
                                                      const SimulationConfig& frozen) {
    std::vector<std::string> diffs;
    if (adaptive.dt != frozen.dt || adaptive.t_end != frozen.t_end ||
        adaptive.decimation != frozen.decimation)
        diffs.push_back("time grid");
    if (adaptive.fidelity != frozen.fidelity) diffs.push_back("plant fidelity");
    if (!(adaptive.model == frozen.model)) diffs.push_back("model profile");
    {
        ScenarioBundle a = adaptive.scenario;
        ScenarioBundle b = frozen.scenario;
        // Initial estimates belong to the adaptation settings a pair may
        // legitimately differ in.
        a.initial.dhat1 = b.initial.dhat1 = 0.0;
        a.initial.dhat3 = b.initial.dhat3 = 0.0;
        if (!(a == b)) diffs.push_back("scenario");
    }
    {
        ControllerConfig a = adaptive.controller;
        ControllerConfig b = frozen.controller;
        a.gamma1 = b.gamma1 = 0.0;
        a.gamma3 = b.gamma3 = 0.0;
        if (!(a == b)) diffs.push_back("controller gains beyond adaptation rates");
    }
    if (!diffs.empty()) {
        std::ostringstream msg;
        msg << "comparison configs must only differ in adaptation settings; mismatched:";
        for (const auto& d : diffs) msg << " " << d << ";";
        throw ConfigError(msg.str());
    }
    return {run_closed_loop(adaptive), run_closed_loop(frozen)};
}

} // namespace diwmrac
