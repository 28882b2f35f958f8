#include "diwmrac/mrac.hpp"

#include <cmath>
#include <sstream>

#include "diwmrac/errors.hpp"

namespace diwmrac {

GainValidation validate_gains(const BetaSet& b, const ControllerConfig& cfg) {
    GainValidation v;
    v.pole1 = b.b2 - b.b3 * cfg.k1;
    v.pole3 = b.b6 - b.b7 * cfg.k3;
    if (!(v.pole1 < 0.0)) {
        std::ostringstream r;
        r << "nozzle-channel pole b2 - b3*k1 = " << v.pole1 << " must be strictly negative";
        v.reasons.push_back(r.str());
    }
    if (!(v.pole3 < 0.0)) {
        std::ostringstream r;
        r << "plate-channel pole b6 - b7*k3 = " << v.pole3 << " must be strictly negative";
        v.reasons.push_back(r.str());
    }
    v.valid = v.reasons.empty();
    return v;
}

void validate_controller(const BetaSet& b, const ControllerConfig& cfg) {
    validate_beta(b);

    std::ostringstream problems;
    auto add = [&problems](const std::string& p) {
        if (problems.tellp() > 0) problems << "; ";
        problems << p;
    };

    if (!(cfg.p1 > 0.0) || !std::isfinite(cfg.p1)) add("p1 must be positive");
    if (!(cfg.p3 > 0.0) || !std::isfinite(cfg.p3)) add("p3 must be positive");
    if (cfg.gamma1 < 0.0 || !std::isfinite(cfg.gamma1)) add("gamma1 must be >= 0");
    if (cfg.gamma3 < 0.0 || !std::isfinite(cfg.gamma3)) add("gamma3 must be >= 0");
    if (!std::isfinite(cfg.k1) || !std::isfinite(cfg.k3)) add("gains must be finite");

    const GainValidation gv = validate_gains(b, cfg);
    for (const auto& reason : gv.reasons) add(reason);

    if (problems.tellp() > 0) {
        throw ConfigError("invalid controller configuration: " + problems.str());
    }
}

ControlInput control_law(const ControllerConfig& cfg, const BetaSet& b,
                         const PlantState& x, double r1, double r3, double pd1,
                         const EstimatorState& est) {
    const double pressure_coeff = cfg.alt_feedforward ? (b.b2 / b.b3) : (b.b1 / b.b3);
    const double coupling_coeff =
        cfg.alt_feedforward ? (b.b4 * b.b6 / b.b7) : (b.b5 * b.b4 / b.b7);

    ControlInput u;
    u.mdot = -cfg.k1 * x.v1 + r1 - pressure_coeff * pd1 - est.dhat1;
    u.us = -cfg.k3 * x.u3 + r3 - coupling_coeff * x.v1 - est.dhat3;
    u.pd1 = pd1;
    return u;
}

EstimatorState adaptation_derivative(const ControllerConfig& cfg, const BetaSet& b,
                                     const TrackingError& e) {
    EstimatorState d;
    d.dhat1 = cfg.gamma1 * cfg.p1 * b.b3 * e.e1;
    d.dhat3 = cfg.gamma3 * cfg.p3 * b.b7 * e.e3;
    return d;
}

ReferenceState reference_model_derivative(const BetaSet& b, const ControllerConfig& cfg,
                                          const ReferenceState& ref, double r1, double r3) {
    ReferenceState d;
    d.vr1 = (b.b2 - b.b3 * cfg.k1) * ref.vr1 + b.b3 * r1;
    d.ur3 = (b.b6 - b.b7 * cfg.k3) * ref.ur3 + b.b7 * r3;
    return d;
}

std::optional<double> lyapunov_value(const ControllerConfig& cfg, const TrackingError& e,
                                     const ParamError& pe) {
    if (!(cfg.gamma1 > 0.0) || !(cfg.gamma3 > 0.0)) {
        return std::nullopt;
    }
    return 0.5 * cfg.p1 * e.e1 * e.e1 + 0.5 * cfg.p3 * e.e3 * e.e3 +
           pe.dtilde1 * pe.dtilde1 / (2.0 * cfg.gamma1) +
           pe.dtilde3 * pe.dtilde3 / (2.0 * cfg.gamma3);
}

double lyapunov_rate(const ControllerConfig& cfg, const BetaSet& b, const TrackingError& e) {
    const double pole1 = b.b2 - b.b3 * cfg.k1;
    const double pole3 = b.b6 - b.b7 * cfg.k3;
    return cfg.p1 * pole1 * e.e1 * e.e1 + cfg.p3 * pole3 * e.e3 * e.e3;
}

} // namespace diwmrac
