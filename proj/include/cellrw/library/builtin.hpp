#pragma once

#include <array>
#include <string_view>

#include "cellrw/rules/rule.hpp"

namespace cellrw::library {

// Stable public rule ids, in priority order.
inline constexpr std::array<std::string_view, 6> kRuleIds = {
    "nsmallest", "concat-lists", "str-split-loop", "apply-direct", "apply-select", "substr-contains",
};

rules::Registry builtin_rules();

}  // namespace cellrw::library
