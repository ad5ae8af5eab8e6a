#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wormbench/scenario.hpp"

namespace wormbench {

// cat1-set1 .. cat1-set6, cat2-set1, cat2-set2.
const std::vector<std::string>& preset_ids();
// Throws ConfigError listing the valid ids.
Scenario preset(std::string_view id);
// One-line summary for `presets --list`.
std::string preset_summary(std::string_view id);

}  // namespace wormbench
