#include "diwmrac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diwmrac/errors.hpp"

namespace diwmrac {

SignalProfile SignalProfile::constant(double value) {
    SignalProfile p;
    p.kind = SignalKind::Constant;
    p.magnitude = value;
    return p;
}

SignalProfile SignalProfile::step(double t0, double magnitude, std::optional<double> t1) {
    SignalProfile p;
    p.kind = SignalKind::Step;
    p.t0 = t0;
    p.magnitude = magnitude;
    p.t1 = t1;
    return p;
}

SignalProfile SignalProfile::ramp(double t0, double slope, std::optional<double> t1) {
    SignalProfile p;
    p.kind = SignalKind::Ramp;
    p.t0 = t0;
    p.slope = slope;
    p.t1 = t1;
    return p;
}

SignalProfile SignalProfile::piecewise(std::vector<PiecewisePoint> points) {
    SignalProfile p;
    p.kind = SignalKind::PiecewiseConstant;
    p.points = std::move(points);
    return p;
}

SignalProfile SignalProfile::sum(std::vector<SignalProfile> children) {
    SignalProfile p;
    p.kind = SignalKind::Sum;
    p.children = std::move(children);
    return p;
}

double evaluate_signal(const SignalProfile& p, double t) {
    switch (p.kind) {
    case SignalKind::Constant:
        return p.magnitude;
    case SignalKind::Step:
        if (t < p.t0) return 0.0;
        if (p.t1 && t >= *p.t1) return 0.0;
        return p.magnitude;
    case SignalKind::Ramp: {
        if (t < p.t0) return 0.0;
        const double end = p.t1 ? std::min(t, *p.t1) : t;
        return p.slope * (end - p.t0);
    }
    case SignalKind::PiecewiseConstant: {
        // Last point with point.t <= t wins; zero before the first point.
        auto it = std::upper_bound(p.points.begin(), p.points.end(), t,
                                   [](double tv, const PiecewisePoint& pt) { return tv < pt.t; });
        if (it == p.points.begin()) return 0.0;
        return std::prev(it)->value;
    }
    case SignalKind::Sum: {
        double acc = 0.0;
        for (const auto& child : p.children) acc += evaluate_signal(child, t);
        return acc;
    }
    }
    return 0.0;
}

std::optional<double> first_active_time(const SignalProfile& p) {
    switch (p.kind) {
    case SignalKind::Constant:
        return std::nullopt;
    case SignalKind::Step:
        if (p.magnitude == 0.0) return std::nullopt;
        return p.t0;
    case SignalKind::Ramp:
        if (p.slope == 0.0) return std::nullopt;
        return p.t0;
    case SignalKind::PiecewiseConstant: {
        double prev = 0.0;
        for (const auto& pt : p.points) {
            if (pt.value != prev) return pt.t;
            prev = pt.value;
        }
        return std::nullopt;
    }
    case SignalKind::Sum: {
        std::optional<double> earliest;
        for (const auto& child : p.children) {
            auto t = first_active_time(child);
            if (t && (!earliest || *t < *earliest)) earliest = t;
        }
        return earliest;
    }
    }
    return std::nullopt;
}

namespace {

void collect_signal_problems(const SignalProfile& p, const std::string& path,
                             std::vector<std::string>& problems) {
    auto finite = [&](double v, const char* field) {
        if (!std::isfinite(v)) problems.push_back(path + ": " + field + " must be finite");
    };
    switch (p.kind) {
    case SignalKind::Constant:
        finite(p.magnitude, "magnitude");
        break;
    case SignalKind::Step:
    case SignalKind::Ramp:
        finite(p.kind == SignalKind::Step ? p.magnitude : p.slope,
               p.kind == SignalKind::Step ? "magnitude" : "slope");
        finite(p.t0, "t0");
        if (p.t0 < 0.0) problems.push_back(path + ": t0 must be >= 0");
        if (p.t1) {
            finite(*p.t1, "t1");
            if (*p.t1 <= p.t0) problems.push_back(path + ": t1 must be > t0");
        }
        break;
    case SignalKind::PiecewiseConstant: {
        double prev_t = -1.0;
        for (std::size_t i = 0; i < p.points.size(); ++i) {
            const auto& pt = p.points[i];
            if (!std::isfinite(pt.t) || !std::isfinite(pt.value))
                problems.push_back(path + ": piecewise point " + std::to_string(i) +
                                   " must be finite");
            if (pt.t < 0.0)
                problems.push_back(path + ": piecewise point " + std::to_string(i) +
                                   " has t < 0");
            if (pt.t <= prev_t)
                problems.push_back(path + ": piecewise points must have strictly increasing t");
            prev_t = pt.t;
        }
        break;
    }
    case SignalKind::Sum:
        for (std::size_t i = 0; i < p.children.size(); ++i)
            collect_signal_problems(p.children[i], path + "[" + std::to_string(i) + "]",
                                    problems);
        break;
    }
}

void collect_noise_problems(const NoiseModel& n, const std::string& path,
                            std::vector<std::string>& problems) {
    if (!std::isfinite(n.mean)) problems.push_back(path + ": mean must be finite");
    if (!std::isfinite(n.std_dev) || n.std_dev < 0.0)
        problems.push_back(path + ": std must be finite and >= 0");
    if (!std::isfinite(n.sample_period) || n.sample_period <= 0.0)
        problems.push_back(path + ": sample_period must be finite and > 0");
}

[[noreturn]] void throw_problems(const std::vector<std::string>& problems) {
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw ConfigError(msg.str());
}

// splitmix64 finalizer: a fixed bijective mix, so each (seed, index) pair
// maps to an independent-looking 64-bit word without any stream state.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1]: never 0, so log() below is safe.
double unit_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

} // namespace

void validate_signal(const SignalProfile& p) {
    std::vector<std::string> problems;
    collect_signal_problems(p, "signal", problems);
    if (!problems.empty()) throw_problems(problems);
}

void validate_noise(const NoiseModel& n) {
    std::vector<std::string> problems;
    collect_noise_problems(n, "noise", problems);
    if (!problems.empty()) throw_problems(problems);
}

void validate_scenario(const ScenarioBundle& s) {
    std::vector<std::string> problems;
    collect_signal_problems(s.r1, "r1", problems);
    collect_signal_problems(s.r3, "r3", problems);
    collect_signal_problems(s.pd1, "pd1", problems);
    collect_signal_problems(s.disturbance_mdot, "disturbance_mdot", problems);
    collect_signal_problems(s.disturbance_us, "disturbance_us", problems);
    collect_noise_problems(s.noise_mdot, "noise_mdot", problems);
    collect_noise_problems(s.noise_us, "noise_us", problems);
    if (!s.initial.nominal) {
        for (auto [v, name] : {std::pair{s.initial.v1, "v1"}, {s.initial.u3, "u3"},
                               {s.initial.vr1, "vr1"}, {s.initial.ur3, "ur3"},
                               {s.initial.dhat1, "dhat1"}, {s.initial.dhat3, "dhat3"}}) {
            if (!std::isfinite(v))
                problems.push_back(std::string("initial.") + name + " must be finite");
        }
    }
    if (!problems.empty()) throw_problems(problems);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix64(base ^ (mix64(stream) + 0x9e3779b97f4a7c15ULL));
}

double sample_noise(const NoiseModel& n, double t) {
    if (n.std_dev == 0.0) return n.mean;
    const auto index = static_cast<std::uint64_t>(std::floor(t / n.sample_period));
    // Box-Muller from two counter-derived uniforms. Not stdlib
    // normal_distribution, whose output is implementation-defined and
    // would break byte-identical reruns across toolchains.
    const double u1 = unit_open(mix64(n.seed ^ mix64(2 * index)));
    const double u2 = unit_open(mix64(n.seed ^ mix64(2 * index + 1)));
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    return n.mean + n.std_dev * z;
}

NominalOperatingPoint nominal_operating_point(const ModelProfile& profile,
                                              const ControllerConfig& cfg, double pd1) {
    const BetaSet b = nominal_betas(profile);
    validate_beta(b);
    NominalOperatingPoint op;
    op.v1 = -(b.b1 * pd1 + b.b3 * profile.mdot0) / b.b2;
    op.u3 = -(b.b5 * b.b4 * op.v1 + b.b7 * profile.us0) / b.b6;
    op.r1 = op.v1 * (b.b3 * cfg.k1 - b.b2) / b.b3;
    op.r3 = op.u3 * (b.b7 * cfg.k3 - b.b6) / b.b7;
    return op;
}

std::vector<std::string> case_study_ids() {
    return {"1", "2", "3a", "3b", "table1-sweep"};
}

CaseStudyPreset case_study_preset(const std::string& id, const ModelProfile& profile,
                                  const ControllerConfig& cfg) {
    const auto ids = case_study_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        std::ostringstream msg;
        msg << "unknown case study \"" << id << "\"; valid ids:";
        for (const auto& known : ids) msg << " " << known;
        throw ConfigError(msg.str());
    }

    const NominalOperatingPoint op = nominal_operating_point(profile, cfg, 0.0);

    CaseStudyPreset preset;
    preset.id = id;
    preset.scenario.r1 = SignalProfile::constant(op.r1);
    preset.scenario.r3 = SignalProfile::constant(op.r3);
    preset.scenario.initial.nominal = true;

    // Step of 40% of the nominal plate command, withdrawn after 30 s.
    const SignalProfile plate_step = SignalProfile::step(30.0, -0.4 * profile.us0, 60.0);
    // Flow decays by 10% of nominal over 10 s, then holds the reduced value.
    const SignalProfile flow_ramp = SignalProfile::ramp(30.0, -0.010 * profile.mdot0, 40.0);

    if (id == "1") {
        preset.scenario.disturbance_us = plate_step;
    } else if (id == "2") {
        preset.scenario.disturbance_mdot = flow_ramp;
    } else if (id == "3a") {
        preset.scenario.disturbance_us = plate_step;
        preset.gamma1_override = 0.0;
        preset.gamma3_override = 0.0;
    } else if (id == "3b") {
        preset.scenario.disturbance_mdot = flow_ramp;
        preset.gamma1_override = 0.0;
        preset.gamma3_override = 0.0;
    } else { // table1-sweep
        const double t0 = 40.0;
        const std::vector<double> flow_deltas = {0.0025, -0.0025, -0.0050, -0.0075, -0.0100};
        const std::vector<double> plate_deltas = {-20.0, -10.0, -30.0, -40.0, 10.0};
        int n = 0;
        for (double delta : flow_deltas)
            preset.sweep_cases.push_back({"case-" + std::to_string(++n), "mdot", delta, t0});
        for (double delta : plate_deltas)
            preset.sweep_cases.push_back({"case-" + std::to_string(++n), "us", delta, t0});
    }
    return preset;
}

} // namespace diwmrac
