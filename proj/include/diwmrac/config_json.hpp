#pragma once

// JSON scenario documents: defaults, preset expansion, dotted-path
// overrides, and strict decoding into a validated SimulationConfig.
//
// Precedence, lowest to highest: built-in defaults, the expanded
// `case_study` preset (if any), the user document, then `--set`
// overrides. Preset expansion probes the model and gains with the
// overrides already applied, so an overridden operating point reshapes
// the preset. Merging is RFC 7386 style: objects merge key by key,
// scalars and arrays replace, null removes a key. Unknown keys anywhere
// fail the parse.

#include <string>
#include <vector>

#include "diwmrac/scenario.hpp"
#include "diwmrac/sim.hpp"

namespace diwmrac {

/// A decoded scenario document: the run configuration plus any sweep
/// cases it declares (empty for plain runs).
struct ParsedScenario {
    SimulationConfig config;
    std::vector<SweepCase> sweep_cases;
};

/// Parse, merge, and validate a scenario document. Overrides are
/// "dotted.path=value" assignments; values parse as JSON when possible
/// and fall back to strings. Throws ConfigError with the parse location
/// or the violated invariant.
ParsedScenario parse_scenario(const std::string& text,
                              const std::vector<std::string>& overrides = {});

/// The complete defaults document, pretty-printed. A minimal user file
/// is this document minus everything the user keeps.
std::string default_scenario_json();

} // namespace diwmrac
