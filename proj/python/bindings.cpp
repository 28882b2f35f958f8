// Python face of the simulator: scenario text in, trajectory columns and
// settling metrics out. Heavy lifting stays in the C++ library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diwmrac/analysis.hpp"
#include "diwmrac/config_json.hpp"
#include "diwmrac/errors.hpp"
#include "diwmrac/scenario.hpp"
#include "diwmrac/sim.hpp"

namespace py = pybind11;

namespace {

using namespace diwmrac;

py::dict trajectory_columns(const Trajectory& traj) {
    auto column = [&](double TrajectoryRow::* field) {
        std::vector<double> out;
        out.reserve(traj.rows.size());
        for (const auto& r : traj.rows) out.push_back(r.*field);
        return out;
    };
    py::dict d;
    d["t"] = column(&TrajectoryRow::t);
    d["v1"] = column(&TrajectoryRow::v1);
    d["u3"] = column(&TrajectoryRow::u3);
    d["vr1"] = column(&TrajectoryRow::vr1);
    d["ur3"] = column(&TrajectoryRow::ur3);
    d["e1"] = column(&TrajectoryRow::e1);
    d["e3"] = column(&TrajectoryRow::e3);
    d["mdot"] = column(&TrajectoryRow::mdot);
    d["us"] = column(&TrajectoryRow::us);
    d["d1_true"] = column(&TrajectoryRow::d1_true);
    d["d3_true"] = column(&TrajectoryRow::d3_true);
    d["dhat1"] = column(&TrajectoryRow::dhat1);
    d["dhat3"] = column(&TrajectoryRow::dhat3);
    d["V"] = column(&TrajectoryRow::V);
    d["Vdot"] = column(&TrajectoryRow::Vdot);
    return d;
}

py::dict metrics_dict(const ConvergenceMetrics& m) {
    py::dict d;
    d["t_cr"] = m.t_cr;
    d["t_cp"] = m.t_cp;
    d["tracking_converged"] = m.tracking_converged;
    d["adaptation_converged"] = m.adaptation_converged;
    d["e_band"] = m.e_band;
    d["d_band"] = m.d_band;
    return d;
}

py::dict run_scenario(const std::string& text, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed) {
    ParsedScenario parsed = parse_scenario(text, overrides);
    if (seed) {
        parsed.config.scenario.noise_mdot.seed = derive_seed(*seed, 0);
        parsed.config.scenario.noise_us.seed = derive_seed(*seed, 1);
    }
    const Trajectory traj = run_closed_loop(parsed.config);

    double t_inject = 0.0;
    for (const auto* sig : {&parsed.config.scenario.disturbance_mdot,
                            &parsed.config.scenario.disturbance_us}) {
        if (auto t0 = first_active_time(*sig))
            t_inject = t_inject == 0.0 ? *t0 : std::min(t_inject, *t0);
    }

    py::dict out;
    out["label"] = parsed.config.label;
    out["columns"] = trajectory_columns(traj);
    out["nozzle"] = metrics_dict(measure_convergence(traj, Subsystem::Nozzle, t_inject));
    out["plate"] = metrics_dict(measure_convergence(traj, Subsystem::Plate, t_inject));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Closed-loop simulator for adaptive extrusion printing control";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    m.def("default_scenario", &default_scenario_json,
          "Complete defaults document as pretty-printed JSON text.");

    m.def("run_scenario", &run_scenario, py::arg("text"),
          py::arg("overrides") = std::vector<std::string>{},
          py::arg("seed") = std::nullopt,
          "Parse a scenario document, integrate the closed loop, and return "
          "trajectory columns plus per-subsystem settling metrics.");

    m.def(
        "convergence_time",
        [](const std::vector<double>& t, const std::vector<double>& y, double t_inject,
           double band) { return convergence_time(t, y, t_inject, band); },
        py::arg("t"), py::arg("y"), py::arg("t_inject"), py::arg("band"),
        "Last-exit settling time of a sampled series relative to t_inject; "
        "None when the series is still outside the band at the end.");
}
