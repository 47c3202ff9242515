#pragma once

#include <string>
#include <string_view>

#include "contagion/experiment.hpp"

namespace contagion {

// Scenario files are flat `key = value` lines with `#` comments and an
// optional `[surcharge]` section. See README.md for the grammar.

ScenarioConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");
ScenarioConfig parse_config(const std::string& path);

/// Canonical text form; parse_config_text(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig& config);

/// Expands "start:stop:step" (inclusive) or "a, b, c" into R values.
std::vector<double> parse_r_grid(std::string_view text);

}  // namespace contagion
