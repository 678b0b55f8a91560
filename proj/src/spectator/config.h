#ifndef SPECTATOR_CONFIG_H
#define SPECTATOR_CONFIG_H

#include <optional>
#include <string>
#include <string_view>

#include "spectator/feedback_engine.h"

namespace spectator {

/// Parses `key = value` lines (`#` starts a comment). Scenario keys are namespaced,
/// e.g. `beam_delta.M = 400`. Keys absent from the text keep the scenario defaults.
/// `scenario` picks the kind when the text has no `scenario` line; a `scenario`
/// line that disagrees with it is an error. Errors are SimError(Config) and name
/// the offending line.
ScenarioConfig parse_config(std::string_view text, std::optional<ScenarioKind> scenario = std::nullopt);

/// Every key of the config's scenario, one per line, values at full precision.
std::string serialize_config(const ScenarioConfig &cfg);

}  // namespace spectator

#endif
