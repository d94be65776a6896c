#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cellrw::testing {

std::filesystem::path data_path(std::string_view rel);
std::string read_text(const std::filesystem::path& p);

// Cells of a "# %%" separated file, separator lines removed.
std::vector<std::string> split_cells(std::string_view text);

// Fixture names shared by the golden tests and the acceptance binary.
const std::vector<std::string>& fixture_names();

// Canonical unparse with every generated name renamed by first appearance.
// Two rewrites are structurally equal iff these strings are equal.
std::string canonicalize_temps(std::string_view code);

// The rewritten form without its guard scaffolding: hoisted temporaries are
// replaced by the expressions they hold, generated names lose their prefix
// and only the guarded branch is kept. Canonical unparse.
std::string strip_guard(std::string_view rewritten);

// Canonical unparse of plain code.
std::string canonical(std::string_view code);

}  // namespace cellrw::testing
