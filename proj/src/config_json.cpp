#include "diwmrac/config_json.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

#include "diwmrac/errors.hpp"

namespace diwmrac {

namespace {

using nlohmann::json;

// Strict object decoder: every key must be consumed by a getter, the rest
// are reported as unknown with their full dotted path.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
    }

    const std::string& path() const { return path_; }

    bool has(const char* key) const { return j_.contains(key); }

    const json* take(const char* key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const char* key) {
        const json* v = take(key);
        if (!v) throw ConfigError("missing key " + join(key));
        return as_number(*v, key);
    }

    double number_or(const char* key, double fallback) {
        const json* v = take(key);
        return v ? as_number(*v, key) : fallback;
    }

    std::optional<double> opt_number(const char* key) {
        const json* v = take(key);
        if (!v) return std::nullopt;
        return as_number(*v, key);
    }

    std::string string(const char* key) {
        const json* v = take(key);
        if (!v) throw ConfigError("missing key " + join(key));
        if (!v->is_string()) throw ConfigError(join(key) + " must be a string");
        return v->get<std::string>();
    }

    std::string string_or(const char* key, const std::string& fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(join(key) + " must be a string");
        return v->get<std::string>();
    }

    bool boolean_or(const char* key, bool fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(join(key) + " must be true or false");
        return v->get<bool>();
    }

    std::int64_t integer_or(const char* key, std::int64_t fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(join(key) + " must be an integer");
        return v->get<std::int64_t>();
    }

    std::uint64_t unsigned_or(const char* key, std::uint64_t fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number_integer() ||
            (!v->is_number_unsigned() && v->get<std::int64_t>() < 0))
            throw ConfigError(join(key) + " must be a non-negative integer");
        return v->get<std::uint64_t>();
    }

    /// Call after all getters; throws listing every unconsumed key.
    void done() {
        std::vector<std::string> unknown;
        for (const auto& item : j_.items())
            if (!used_.count(item.key())) unknown.push_back(join(item.key().c_str()));
        if (!unknown.empty()) {
            std::ostringstream msg;
            msg << "unknown key" << (unknown.size() > 1 ? "s" : "") << ":";
            for (const auto& k : unknown) msg << " " << k;
            throw ConfigError(msg.str());
        }
    }

private:
    std::string join(const char* key) const { return path_ + "." + key; }

    double as_number(const json& v, const char* key) const {
        if (!v.is_number()) throw ConfigError(join(key) + " must be a number");
        return v.get<double>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

SignalProfile decode_signal(const json& j, const std::string& path) {
    if (j.is_number()) return SignalProfile::constant(j.get<double>());
    Reader r(j, path);
    const std::string kind = r.string("kind");
    SignalProfile out;
    if (kind == "constant") {
        out = SignalProfile::constant(r.number("value"));
    } else if (kind == "step") {
        out = SignalProfile::step(r.number("t0"), r.number("magnitude"), r.opt_number("t1"));
    } else if (kind == "ramp") {
        out = SignalProfile::ramp(r.number("t0"), r.number("slope"), r.opt_number("t1"));
    } else if (kind == "piecewise") {
        const json* pts = r.take("points");
        if (!pts || !pts->is_array())
            throw ConfigError(path + ".points must be an array");
        std::vector<PiecewisePoint> points;
        for (std::size_t i = 0; i < pts->size(); ++i) {
            Reader pr((*pts)[i], path + ".points[" + std::to_string(i) + "]");
            PiecewisePoint pt;
            pt.t = pr.number("t");
            pt.value = pr.number("value");
            pr.done();
            points.push_back(pt);
        }
        out = SignalProfile::piecewise(std::move(points));
    } else if (kind == "sum") {
        const json* parts = r.take("parts");
        if (!parts || !parts->is_array())
            throw ConfigError(path + ".parts must be an array");
        std::vector<SignalProfile> children;
        for (std::size_t i = 0; i < parts->size(); ++i)
            children.push_back(
                decode_signal((*parts)[i], path + ".parts[" + std::to_string(i) + "]"));
        out = SignalProfile::sum(std::move(children));
    } else {
        throw ConfigError(path + ".kind \"" + kind +
                          "\" not one of constant, step, ramp, piecewise, sum");
    }
    r.done();
    return out;
}

json signal_to_json(const SignalProfile& p) {
    json j;
    switch (p.kind) {
    case SignalKind::Constant:
        j = {{"kind", "constant"}, {"value", p.magnitude}};
        break;
    case SignalKind::Step:
        j = {{"kind", "step"}, {"t0", p.t0}, {"magnitude", p.magnitude}};
        if (p.t1) j["t1"] = *p.t1;
        break;
    case SignalKind::Ramp:
        j = {{"kind", "ramp"}, {"t0", p.t0}, {"slope", p.slope}};
        if (p.t1) j["t1"] = *p.t1;
        break;
    case SignalKind::PiecewiseConstant: {
        json pts = json::array();
        for (const auto& pt : p.points) pts.push_back({{"t", pt.t}, {"value", pt.value}});
        j = {{"kind", "piecewise"}, {"points", std::move(pts)}};
        break;
    }
    case SignalKind::Sum: {
        json parts = json::array();
        for (const auto& c : p.children) parts.push_back(signal_to_json(c));
        j = {{"kind", "sum"}, {"parts", std::move(parts)}};
        break;
    }
    }
    return j;
}

NoiseModel decode_noise(const json& j, const std::string& path) {
    Reader r(j, path);
    NoiseModel n;
    n.mean = r.number_or("mean", 0.0);
    n.std_dev = r.number_or("std", 0.0);
    n.seed = r.unsigned_or("seed", n.seed);
    n.sample_period = r.number_or("sample_period", 0.01);
    r.done();
    return n;
}

ModelProfile decode_model(const json& j) {
    Reader r(j, "model");
    ModelProfile m = default_model_profile();
    m.gamma.g1 = r.number_or("g1", m.gamma.g1);
    m.gamma.g2 = r.number_or("g2", m.gamma.g2);
    m.gamma.g3 = r.number_or("g3", m.gamma.g3);
    m.gamma.b4 = r.number_or("b4", m.gamma.b4);
    m.gamma.g5 = r.number_or("g5", m.gamma.g5);
    m.gamma.g6 = r.number_or("g6", m.gamma.g6);
    m.gamma.g7 = r.number_or("g7", m.gamma.g7);
    m.mdot0 = r.number_or("mdot0", m.mdot0);
    m.us0 = r.number_or("us0", m.us0);
    r.done();
    return m;
}

ControllerConfig decode_controller(const json& j) {
    Reader r(j, "controller");
    ControllerConfig c;
    c.k1 = r.number_or("k1", c.k1);
    c.k3 = r.number_or("k3", c.k3);
    c.gamma1 = r.number_or("gamma1", c.gamma1);
    c.gamma3 = r.number_or("gamma3", c.gamma3);
    c.p1 = r.number_or("p1", c.p1);
    c.p3 = r.number_or("p3", c.p3);
    c.alt_feedforward = r.boolean_or("alt_feedforward", c.alt_feedforward);
    r.done();
    return c;
}

ParsedScenario decode_document(const json& doc) {
    Reader top(doc, "$");
    ParsedScenario out;
    out.config.label = top.string_or("label", "run");

    if (const json* m = top.take("model")) out.config.model = decode_model(*m);
    if (const json* c = top.take("controller")) out.config.controller = decode_controller(*c);

    if (const json* s = top.take("simulation")) {
        Reader r(*s, "simulation");
        out.config.dt = r.number_or("dt", out.config.dt);
        out.config.t_end = r.number_or("t_end", out.config.t_end);
        out.config.fidelity = parse_fidelity(r.string_or("fidelity", "lti"));
        out.config.decimation = r.integer_or("decimation", 1);
        r.done();
    }

    if (const json* s = top.take("scenario")) {
        Reader r(*s, "scenario");
        ScenarioBundle& b = out.config.scenario;
        if (const json* v = r.take("r1")) b.r1 = decode_signal(*v, "scenario.r1");
        if (const json* v = r.take("r3")) b.r3 = decode_signal(*v, "scenario.r3");
        if (const json* v = r.take("pd1")) b.pd1 = decode_signal(*v, "scenario.pd1");
        if (const json* v = r.take("disturbance_mdot"))
            b.disturbance_mdot = decode_signal(*v, "scenario.disturbance_mdot");
        if (const json* v = r.take("disturbance_us"))
            b.disturbance_us = decode_signal(*v, "scenario.disturbance_us");
        if (const json* v = r.take("noise_mdot"))
            b.noise_mdot = decode_noise(*v, "scenario.noise_mdot");
        if (const json* v = r.take("noise_us"))
            b.noise_us = decode_noise(*v, "scenario.noise_us");
        if (const json* v = r.take("initial")) {
            Reader ir(*v, "scenario.initial");
            InitialConditions& init = b.initial;
            init.nominal = ir.boolean_or("nominal", false);
            init.v1 = ir.number_or("v1", 0.0);
            init.u3 = ir.number_or("u3", 0.0);
            init.vr1 = ir.number_or("vr1", 0.0);
            init.ur3 = ir.number_or("ur3", 0.0);
            init.dhat1 = ir.number_or("dhat1", 0.0);
            init.dhat3 = ir.number_or("dhat3", 0.0);
            ir.done();
        }
        r.done();
    }

    if (const json* s = top.take("sweep")) {
        Reader r(*s, "sweep");
        const json* cases = r.take("cases");
        if (!cases || !cases->is_array())
            throw ConfigError("sweep.cases must be an array");
        for (std::size_t i = 0; i < cases->size(); ++i) {
            const std::string path = "sweep.cases[" + std::to_string(i) + "]";
            Reader cr((*cases)[i], path);
            SweepCase sc;
            sc.label = cr.string_or("label", "case-" + std::to_string(i + 1));
            sc.channel = cr.string("channel");
            if (sc.channel != "mdot" && sc.channel != "us")
                throw ConfigError(path + ".channel must be \"mdot\" or \"us\"");
            sc.delta = cr.number("delta");
            sc.t0 = cr.number_or("t0", 40.0);
            cr.done();
            out.sweep_cases.push_back(std::move(sc));
        }
        r.done();
    }

    top.done();
    validate_simulation_config(out.config);
    return out;
}

json default_document() {
    const ModelProfile m = default_model_profile();
    const ControllerConfig c;
    const NoiseModel noise;
    return json{
        {"label", "run"},
        {"model",
         {{"g1", m.gamma.g1},
          {"g2", m.gamma.g2},
          {"g3", m.gamma.g3},
          {"b4", m.gamma.b4},
          {"g5", m.gamma.g5},
          {"g6", m.gamma.g6},
          {"g7", m.gamma.g7},
          {"mdot0", m.mdot0},
          {"us0", m.us0}}},
        {"controller",
         {{"k1", c.k1},
          {"k3", c.k3},
          {"gamma1", c.gamma1},
          {"gamma3", c.gamma3},
          {"p1", c.p1},
          {"p3", c.p3},
          {"alt_feedforward", c.alt_feedforward}}},
        {"simulation",
         {{"dt", 0.01}, {"t_end", 90.0}, {"fidelity", "lti"}, {"decimation", 1}}},
        // Signals default to the numeric shorthand (constant 0) so a user
        // object replaces them wholesale instead of merging stray keys.
        {"scenario",
         {{"r1", 0.0},
          {"r3", 0.0},
          {"pd1", 0.0},
          {"disturbance_mdot", 0.0},
          {"disturbance_us", 0.0},
          {"noise_mdot",
           {{"mean", 0.0}, {"std", 0.0}, {"seed", 1}, {"sample_period", noise.sample_period}}},
          {"noise_us",
           {{"mean", 0.0}, {"std", 0.0}, {"seed", 2}, {"sample_period", noise.sample_period}}},
          {"initial",
           {{"nominal", false},
            {"v1", 0.0},
            {"u3", 0.0},
            {"vr1", 0.0},
            {"ur3", 0.0},
            {"dhat1", 0.0},
            {"dhat3", 0.0}}}}},
    };
}

json preset_to_json(const CaseStudyPreset& preset) {
    json j;
    j["label"] = "case-study-" + preset.id;
    j["simulation"] = {{"fidelity", preset.fidelity}, {"t_end", preset.t_end}};
    json scenario;
    scenario["r1"] = signal_to_json(preset.scenario.r1);
    scenario["r3"] = signal_to_json(preset.scenario.r3);
    if (!(preset.scenario.disturbance_mdot == SignalProfile::constant(0.0)))
        scenario["disturbance_mdot"] = signal_to_json(preset.scenario.disturbance_mdot);
    if (!(preset.scenario.disturbance_us == SignalProfile::constant(0.0)))
        scenario["disturbance_us"] = signal_to_json(preset.scenario.disturbance_us);
    scenario["initial"] = {{"nominal", true}};
    j["scenario"] = std::move(scenario);
    if (preset.gamma1_override) j["controller"]["gamma1"] = *preset.gamma1_override;
    if (preset.gamma3_override) j["controller"]["gamma3"] = *preset.gamma3_override;
    if (!preset.sweep_cases.empty()) {
        json cases = json::array();
        for (const auto& sc : preset.sweep_cases)
            cases.push_back({{"label", sc.label},
                             {"channel", sc.channel},
                             {"delta", sc.delta},
                             {"t0", sc.t0}});
        j["sweep"] = {{"cases", std::move(cases)}};
    }
    return j;
}

// "a.b.c=value" -> nested patch object, merged RFC 7386 style so JSON
// values (including null, which deletes the key) behave as in a file.
json override_patch(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override \"" + assignment + "\" must look like key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw; // unquoted strings are taken verbatim
    }

    json patch = std::move(value);
    std::size_t end = path.size();
    while (true) {
        const std::size_t dot = path.rfind('.', end - 1);
        const std::size_t start = dot == std::string::npos ? 0 : dot + 1;
        const std::string key = path.substr(start, end - start);
        if (key.empty())
            throw ConfigError("override \"" + assignment + "\" has an empty path segment");
        patch = json{{key, std::move(patch)}};
        if (dot == std::string::npos) break;
        end = dot;
    }
    return patch;
}

} // namespace

ParsedScenario parse_scenario(const std::string& text,
                              const std::vector<std::string>& overrides) {
    json user;
    try {
        user = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    if (!user.is_object()) throw ConfigError("scenario document must be a JSON object");

    // Overrides are merged last so a null can delete keys that came from
    // the file or a preset; `staged` pre-applies them only to decide the
    // preset id and the model/gains the preset expansion should see.
    std::vector<json> patches;
    patches.reserve(overrides.size());
    for (const auto& ov : overrides) patches.push_back(override_patch(ov));
    json staged = user;
    for (const auto& p : patches) staged.merge_patch(p);

    std::optional<std::string> preset_id;
    if (staged.contains("case_study")) {
        const json& cs = staged["case_study"];
        if (cs.is_number_integer())
            preset_id = std::to_string(cs.get<std::int64_t>());
        else if (cs.is_string())
            preset_id = cs.get<std::string>();
        else
            throw ConfigError("case_study must be a number or a string id");
    }
    user.erase("case_study");

    json doc = default_document();
    if (preset_id) {
        json probe = doc;
        probe.merge_patch(staged);
        const ModelProfile model = decode_model(probe.at("model"));
        const ControllerConfig ctrl = decode_controller(probe.at("controller"));
        doc.merge_patch(preset_to_json(case_study_preset(*preset_id, model, ctrl)));
    }
    doc.merge_patch(user);
    for (const auto& p : patches) doc.merge_patch(p);
    doc.erase("case_study"); // consumed above; may have arrived via an override
    return decode_document(doc);
}

std::string default_scenario_json() { return default_document().dump(2) + "\n"; }

} // namespace diwmrac
