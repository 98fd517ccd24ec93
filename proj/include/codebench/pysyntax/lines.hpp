#pragma once

#include <string_view>
#include <vector>

namespace codebench::pysyntax {

enum class LineClass { Code, Blank, CommentOnly };

// One tag per physical line (after newline normalization). Blank lines are
// whitespace-only; comment-only lines start with '#' outside any string
// literal; a trailing comment does not demote a code line. Never throws.
std::vector<LineClass> classify_lines(std::string_view source);

}  // namespace codebench::pysyntax
