#include "codebench/pysyntax/lines.hpp"

#include <string>

#include "codebench/common/text.hpp"

namespace codebench::pysyntax {

namespace {

// Whether each line begins inside an open triple-quoted string. Single-quoted
// strings never span lines except via backslash continuation.
std::vector<bool> starts_in_string(const std::vector<std::string_view>& lines) {
  std::vector<bool> out(lines.size(), false);
  char open_quote = 0;  // quote char of an open string
  bool triple = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    out[li] = open_quote != 0;
    std::string_view line = lines[li];
    std::size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (open_quote) {
        if (c == '\\') {
          i += 2;
          continue;
        }
        if (c == open_quote) {
          if (!triple) {
            open_quote = 0;
          } else if (line.substr(i, 3) == std::string(3, open_quote)) {
            open_quote = 0;
            i += 3;
            continue;
          }
        }
        ++i;
        continue;
      }
      if (c == '#') break;
      if (c == '"' || c == '\'') {
        open_quote = c;
        triple = line.substr(i, 3) == std::string(3, c);
        i += triple ? 3 : 1;
        continue;
      }
      ++i;
    }
    // An unterminated single-quoted string ends at the line break unless the
    // line ends with a continuation backslash.
    if (open_quote && !triple && (line.empty() || line.back() != '\\')) open_quote = 0;
  }
  return out;
}

}  // namespace

std::vector<LineClass> classify_lines(std::string_view source) {
  std::string norm = text::normalize_newlines(source);
  std::vector<std::string_view> lines = text::split_lines(norm);
  std::vector<bool> in_string = starts_in_string(lines);
  std::vector<LineClass> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view stripped = text::ltrim(lines[i]);
    if (stripped.empty()) {
      out.push_back(LineClass::Blank);
    } else if (stripped.front() == '#' && !in_string[i]) {
      out.push_back(LineClass::CommentOnly);
    } else {
      out.push_back(LineClass::Code);
    }
  }
  return out;
}

}  // namespace codebench::pysyntax
