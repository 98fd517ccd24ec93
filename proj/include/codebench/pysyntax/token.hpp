#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace codebench::pysyntax {

enum class TokenKind {
  Name,
  Number,
  String,
  Operator,
  Keyword,
  Newline,
  Indent,
  Dedent,
  Comment,
  EndOfFile,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  int line = 1;            // 1-based
  int column = 0;          // 0-based byte offset within the line
  std::size_t offset = 0;  // byte offset into the newline-normalized source

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return is(TokenKind::Operator, t); }
  bool is_kw(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

// Lexes subject-language source. Line endings are normalized to '\n' first;
// token offsets refer to the normalized text. Indentation becomes
// Indent/Dedent pairs (tabs advance to the next multiple of 8 columns),
// comments are kept, and brackets join physical lines.
//
// Throws LexError for unterminated string literals.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace codebench::pysyntax
