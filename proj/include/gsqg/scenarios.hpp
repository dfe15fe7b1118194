#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gsqg/config.hpp"

namespace gsqg {

/// Names of the bundled presets, in a fixed order.
std::vector<std::string> scenario_names();

/// INI text of a preset. Throws ConfigError for an unknown name.
std::string scenario_text(std::string_view name);

/// Parsed preset with its output directory set to out/<name>.
Config scenario_config(std::string_view name);

/// Single-run presets (pure-dissipation, manufactured) for the run command.
std::vector<std::string> run_preset_names();
std::string run_preset_text(std::string_view name);

}  // namespace gsqg
