#include <algorithm>
#include <array>
#include <cctype>

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"
#include "codebench/pysyntax/token.hpp"

namespace codebench::pysyntax {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Name: return "Name";
    case TokenKind::Number: return "Number";
    case TokenKind::String: return "String";
    case TokenKind::Operator: return "Operator";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Newline: return "Newline";
    case TokenKind::Indent: return "Indent";
    case TokenKind::Dedent: return "Dedent";
    case TokenKind::Comment: return "Comment";
    case TokenKind::EndOfFile: return "EndOfFile";
  }
  return "?";
}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",  "yield"};

constexpr std::array<std::string_view, 4> kThreeCharOps = {"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 20> kTwoCharOps = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "<>"};

bool is_string_prefix(std::string_view word) {
  std::string w = text::to_lower(word);
  return w == "r" || w == "u" || w == "b" || w == "f" || w == "br" || w == "rb" || w == "fr" || w == "rf";
}

bool ident_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || u >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string src) : src_(std::move(src)) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!begin_line()) continue;
      }
      if (pos_ >= src_.size()) break;
      step();
    }
    if (line_has_tokens_) emit(TokenKind::Newline, "", pos_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", pos_);
    }
    emit(TokenKind::EndOfFile, "", pos_);
    return std::move(tokens_);
  }

 private:
  // Handles indentation at the start of a logical line. Returns false when
  // the line was blank or comment-only and has been fully consumed.
  bool begin_line() {
    int col = 0;
    std::size_t p = pos_;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ') {
        ++col;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
      } else if (c == '\f') {
        col = 0;
      } else {
        break;
      }
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    char c = src_[p];
    if (c == '\n') {
      pos_ = p + 1;
      new_line(pos_);
      return false;
    }
    if (c == '#') {
      pos_ = p;
      lex_comment();
      if (pos_ < src_.size() && src_[pos_] == '\n') {
        ++pos_;
        new_line(pos_);
      }
      return false;
    }
    pos_ = p;
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::Indent, "", p);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", p);
      }
      // Inconsistent dedent: open a fresh level so Indent/Dedent stay balanced.
      if (col > indents_.back()) {
        indents_.push_back(col);
        emit(TokenKind::Indent, "", p);
      }
    }
    at_line_start_ = false;
    return true;
  }

  void step() {
    char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '\n') {
      if (depth_ > 0) {
        ++pos_;
        new_line(pos_);
        return;
      }
      emit(TokenKind::Newline, "\n", pos_);
      ++pos_;
      new_line(pos_);
      at_line_start_ = true;
      line_has_tokens_ = false;
      return;
    }
    if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
      pos_ += 2;
      new_line(pos_);
      return;
    }
    if (c == '#') {
      lex_comment();
      return;
    }
    if (c == '"' || c == '\'') {
      lex_string(pos_, pos_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && text::is_ident_char(src_[pos_])) ++pos_;
      std::string_view word(src_.data() + start, pos_ - start);
      if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && is_string_prefix(word)) {
        lex_string(start, pos_);
        return;
      }
      emit(is_keyword(word) ? TokenKind::Keyword : TokenKind::Name, std::string(word), start);
      return;
    }
    lex_operator();
  }

  void lex_comment() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    Token t{TokenKind::Comment, src_.substr(start, pos_ - start), line_, static_cast<int>(start - line_start_),
            start};
    tokens_.push_back(std::move(t));
  }

  void lex_number() {
    std::size_t start = pos_;
    bool hex = src_[pos_] == '0' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X');
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') && !hex && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')) {
        ++pos_;
      } else {
        break;
      }
    }
    emit(TokenKind::Number, src_.substr(start, pos_ - start), start);
  }

  // `start` is the first byte of the token (prefix included); `quote_pos`
  // points at the opening quote.
  void lex_string(std::size_t start, std::size_t quote_pos) {
    int start_line = line_;
    int start_col = static_cast<int>(start - line_start_);
    char q = src_[quote_pos];
    bool triple = quote_pos + 2 < src_.size() && src_[quote_pos + 1] == q && src_[quote_pos + 2] == q;
    pos_ = quote_pos + (triple ? 3 : 1);
    for (;;) {
      if (pos_ >= src_.size()) {
        throw LexError(triple ? "unterminated triple-quoted string" : "unterminated string literal", start_line,
                       start_col);
      }
      char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
          pos_ += 2;
          new_line(pos_);
        } else {
          pos_ += 2;
        }
        continue;
      }
      if (c == '\n') {
        if (!triple) throw LexError("unterminated string literal", start_line, start_col);
        ++pos_;
        new_line(pos_);
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    Token t{TokenKind::String, src_.substr(start, pos_ - start), start_line, start_col, start};
    tokens_.push_back(std::move(t));
    line_has_tokens_ = true;
  }

  void lex_operator() {
    std::string_view rest(src_.data() + pos_, src_.size() - pos_);
    std::size_t len = 1;
    if (rest.substr(0, 3) == "...") {
      len = 3;
    } else if (std::any_of(kThreeCharOps.begin(), kThreeCharOps.end(),
                           [&](std::string_view op) { return rest.substr(0, 3) == op; })) {
      len = 3;
    } else if (std::any_of(kTwoCharOps.begin(), kTwoCharOps.end(),
                           [&](std::string_view op) { return rest.substr(0, 2) == op; })) {
      len = 2;
    }
    char c = src_[pos_];
    if (len == 1) {
      if (c == '(' || c == '[' || c == '{') ++depth_;
      if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
    }
    emit(TokenKind::Operator, src_.substr(pos_, len), pos_);
    pos_ += len;
  }

  void emit(TokenKind kind, std::string text, std::size_t offset) {
    int col = offset >= line_start_ ? static_cast<int>(offset - line_start_) : 0;
    tokens_.push_back(Token{kind, std::move(text), line_, col, offset});
    if (kind == TokenKind::Name || kind == TokenKind::Number || kind == TokenKind::Operator ||
        kind == TokenKind::Keyword) {
      line_has_tokens_ = true;
    }
  }

  void new_line(std::size_t next_start) {
    ++line_;
    line_start_ = next_start;
  }

  std::string src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<int> indents_{0};
  std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) {
  return Lexer(text::normalize_newlines(source)).run();
}

}  // namespace codebench::pysyntax
