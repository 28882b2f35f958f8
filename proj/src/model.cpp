#include "diwmrac/model.hpp"

#include <cmath>
#include <sstream>

#include "diwmrac/errors.hpp"

namespace diwmrac {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite value for " << name << " (" << v << ")";
        throw ConfigError(msg.str());
    }
}

} // namespace

ModelProfile default_model_profile() {
    // Nominal betas (1, -2, 1, 1, 1, -3, 1) at mdot0 = 0.025 kg/s,
    // us0 = 50 m/s. The operating point is sized so the shipped sweep
    // magnitudes stay below 100% of nominal on both channels.
    ModelProfile p;
    p.gamma = GammaBarSet{40.0, -80.0, 40.0, 1.0, 0.02, -0.06, 0.02};
    p.mdot0 = 0.025;
    p.us0 = 50.0;
    return p;
}

BetaSet beta_from_inputs(const GammaBarSet& g, double mdot, double us) {
    require_finite(g.g1, "g1");
    require_finite(g.g2, "g2");
    require_finite(g.g3, "g3");
    require_finite(g.b4, "b4");
    require_finite(g.g5, "g5");
    require_finite(g.g6, "g6");
    require_finite(g.g7, "g7");
    require_finite(mdot, "mdot");
    require_finite(us, "us");

    BetaSet b;
    b.b1 = g.g1 * mdot;
    b.b2 = g.g2 * mdot;
    b.b3 = g.g3 * mdot;
    b.b4 = g.b4;
    b.b5 = g.g5 * us;
    b.b6 = g.g6 * us;
    b.b7 = g.g7 * us;
    return b;
}

BetaSet nominal_betas(const ModelProfile& profile) {
    return beta_from_inputs(profile.gamma, profile.mdot0, profile.us0);
}

void validate_beta(const BetaSet& b) {
    std::ostringstream problems;
    auto add = [&problems](const std::string& p) {
        if (problems.tellp() > 0) problems << "; ";
        problems << p;
    };

    for (double v : {b.b1, b.b2, b.b3, b.b4, b.b5, b.b6, b.b7}) {
        if (!std::isfinite(v)) {
            add("coefficients must all be finite");
            break;
        }
    }
    if (std::abs(b.b3) <= kDivisorEpsilon) {
        add("|b3| must exceed " + std::to_string(kDivisorEpsilon) +
            " (divides the mass-flow feedforward), got " + std::to_string(b.b3));
    }
    if (std::abs(b.b7) <= kDivisorEpsilon) {
        add("|b7| must exceed " + std::to_string(kDivisorEpsilon) +
            " (divides the plate-velocity feedforward), got " + std::to_string(b.b7));
    }
    if (!(b.b2 < 0.0)) {
        add("b2 must be negative for a stable nominal plant, got " + std::to_string(b.b2));
    }
    if (!(b.b6 < 0.0)) {
        add("b6 must be negative for a stable nominal plant, got " + std::to_string(b.b6));
    }

    if (problems.tellp() > 0) {
        throw ConfigError("invalid plant coefficients: " + problems.str());
    }
}

StateDerivative plant_derivative_lti(const PlantState& x, const ControlInput& u,
                                     const BetaSet& b, const UncertaintyPair& d) {
    StateDerivative out;
    out.dv1 = b.b1 * u.pd1 + b.b2 * x.v1 + b.b3 * (u.mdot + d.d1);
    out.du3 = b.b5 * b.b4 * x.v1 + b.b6 * x.u3 + b.b7 * (u.us + d.d3);
    return out;
}

StateDerivative plant_derivative_ltv(const PlantState& x, const ControlInput& u,
                                     const GammaBarSet& g) {
    require_finite(x.v1, "v1");
    require_finite(x.u3, "u3");
    require_finite(u.pd1, "pd1");
    const BetaSet b = beta_from_inputs(g, u.mdot, u.us);
    return plant_derivative_lti(x, u, b, UncertaintyPair{});
}

double film_output(double v1, double b4) {
    return b4 * v1;
}

} // namespace diwmrac
