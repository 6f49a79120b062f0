#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "switchbound/config.hpp"

namespace switchbound {

/// Names of the built-in demo systems ("dcdc", "watertank").
[[nodiscard]] std::vector<std::string> demo_names();

/// Embedded JSON configuration of a demo. Throws ValidationError for unknown names.
[[nodiscard]] std::string_view demo_config_text(std::string_view name);

[[nodiscard]] SystemConfig demo_config(std::string_view name);

}  // namespace switchbound
