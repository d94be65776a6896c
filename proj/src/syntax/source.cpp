#include "cellrw/syntax/source.hpp"

#include <algorithm>

namespace cellrw::syntax {

LineIndex::LineIndex(std::string_view text) {
  starts_.push_back(0);
  for (std::uint32_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      starts_.push_back(i + 1);
    } else if (text[i] == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      starts_.push_back(i + 1);
    }
  }
}

LineCol LineIndex::locate(std::uint32_t offset) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  auto line = static_cast<int>(it - starts_.begin());
  return {line, static_cast<int>(offset - starts_[line - 1])};
}

std::uint32_t LineIndex::line_start(int line) const {
  if (line < 1) return 0;
  if (line > line_count()) return starts_.back();
  return starts_[line - 1];
}

}  // namespace cellrw::syntax
