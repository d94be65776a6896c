#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cellrw::syntax {

struct Origin {
  enum class Kind { Cell, File, NotebookCell };
  Kind kind = Kind::Cell;
  std::string id;  // file path or notebook cell id
};

struct SourceText {
  std::string text;
  Origin origin;
};

struct LineCol {
  int line = 1;  // 1-based
  int col = 0;   // 0-based, in bytes
};

class LineIndex {
 public:
  explicit LineIndex(std::string_view text);

  LineCol locate(std::uint32_t offset) const;
  std::uint32_t line_start(int line) const;
  int line_count() const { return static_cast<int>(starts_.size()); }

 private:
  std::vector<std::uint32_t> starts_;
};

}  // namespace cellrw::syntax
