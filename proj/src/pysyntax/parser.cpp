#include <algorithm>
#include <climits>
#include <map>

#include "codebench/pysyntax/tree.hpp"

namespace codebench::pysyntax {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Module: return "Module";
    case NodeKind::FunctionDef: return "FunctionDef";
    case NodeKind::ClassDef: return "ClassDef";
    case NodeKind::If: return "If";
    case NodeKind::Elif: return "Elif";
    case NodeKind::Else: return "Else";
    case NodeKind::For: return "For";
    case NodeKind::While: return "While";
    case NodeKind::Try: return "Try";
    case NodeKind::ExceptHandler: return "ExceptHandler";
    case NodeKind::Finally: return "Finally";
    case NodeKind::With: return "With";
    case NodeKind::Return: return "Return";
    case NodeKind::Raise: return "Raise";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Import: return "Import";
    case NodeKind::ExpressionStmt: return "ExpressionStmt";
    case NodeKind::Pass: return "Pass";
    case NodeKind::Break: return "Break";
    case NodeKind::Continue: return "Continue";
    case NodeKind::OpaqueLine: return "OpaqueLine";
    case NodeKind::Name: return "Name";
    case NodeKind::Attribute: return "Attribute";
    case NodeKind::Subscript: return "Subscript";
    case NodeKind::Call: return "Call";
    case NodeKind::Keyword: return "Keyword";
    case NodeKind::BoolSequence: return "BoolSequence";
    case NodeKind::Conditional: return "Conditional";
    case NodeKind::Lambda: return "Lambda";
    case NodeKind::Comprehension: return "Comprehension";
    case NodeKind::ComprehensionFor: return "ComprehensionFor";
    case NodeKind::ComprehensionIf: return "ComprehensionIf";
    case NodeKind::Compare: return "Compare";
    case NodeKind::BinaryOp: return "BinaryOp";
    case NodeKind::UnaryOp: return "UnaryOp";
    case NodeKind::Display: return "Display";
    case NodeKind::Literal: return "Literal";
    case NodeKind::Starred: return "Starred";
    case NodeKind::Slice: return "Slice";
    case NodeKind::NamedExpr: return "NamedExpr";
    case NodeKind::Yield: return "Yield";
    case NodeKind::Await: return "Await";
  }
  return "?";
}

bool Span::contains(const Span& o) const {
  auto before_or_eq = [](int l1, int c1, int l2, int c2) { return l1 < l2 || (l1 == l2 && c1 <= c2); };
  return before_or_eq(start_line, start_col, o.start_line, o.start_col) &&
         before_or_eq(o.end_line, o.end_col, end_line, end_col);
}

bool Node::is_statement() const { return kind <= NodeKind::OpaqueLine; }

void walk(const Node& node, const std::function<bool(const Node&)>& fn) {
  if (!fn(node)) return;
  for (const auto& c : node.exprs) walk(c, fn);
  for (const auto& c : node.body) walk(c, fn);
  for (const auto& c : node.branches) walk(c, fn);
}

namespace {

struct SyntaxFail {};

constexpr int kMaxExprDepth = 200;
constexpr int kMaxBlockDepth = 100;

const std::map<std::string_view, int>& binary_precedence() {
  static const std::map<std::string_view, int> table = {
      {"|", 1}, {"^", 2}, {"&", 3}, {"<<", 4}, {">>", 4}, {"+", 5}, {"-", 5},
      {"*", 6}, {"/", 6}, {"//", 6}, {"%", 6}, {"@", 6}};
  return table;
}

bool is_augassign(const Token& t) {
  static constexpr std::string_view kOps[] = {"+=", "-=", "*=", "/=", "//=", "%=", "**=",
                                              ">>=", "<<=", "&=", "|=", "^=", "@="};
  if (t.kind != TokenKind::Operator) return false;
  return std::find(std::begin(kOps), std::end(kOps), t.text) != std::end(kOps);
}

// End position of a token, accounting for multi-line strings.
std::pair<int, int> token_end(const Token& t) {
  int line = t.line;
  int col = t.column;
  std::size_t nl = t.text.rfind('\n');
  if (nl == std::string::npos || t.kind == TokenKind::Newline) {
    return {line, col + static_cast<int>(t.kind == TokenKind::Newline ? 0 : t.text.size())};
  }
  line += static_cast<int>(std::count(t.text.begin(), t.text.end(), '\n'));
  return {line, static_cast<int>(t.text.size() - nl - 1)};
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {
    if (toks_.empty() || toks_.back().kind != TokenKind::EndOfFile) {
      toks_.push_back(Token{TokenKind::EndOfFile, "", 1, 0, 0});
    }
  }

  Node module() {
    Node m;
    m.kind = NodeKind::Module;
    while (!at(TokenKind::EndOfFile)) {
      if (at(TokenKind::Dedent)) {
        advance();
        continue;
      }
      statement(m.body);
    }
    const Token& eof = toks_.back();
    m.span = Span{1, 0, std::max(eof.line, 1), eof.column};
    for (const auto& s : m.body) {
      if (s.span.end_line > m.span.end_line ||
          (s.span.end_line == m.span.end_line && s.span.end_col > m.span.end_col)) {
        m.span.end_line = s.span.end_line;
        m.span.end_col = s.span.end_col;
      }
    }
    return m;
  }

 private:
  // ---- token cursor -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_op(std::string_view s) const { return peek().is_op(s); }
  bool at_kw(std::string_view s) const { return peek().is_kw(s); }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::Indent && t.kind != TokenKind::Dedent &&
        t.kind != TokenKind::EndOfFile) {
      last_real_ = pos_;
    }
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  void expect_op(std::string_view s) {
    if (!at_op(s)) throw SyntaxFail{};
    advance();
  }
  void expect_kw(std::string_view s) {
    if (!at_kw(s)) throw SyntaxFail{};
    advance();
  }
  std::string expect_name() {
    if (!at(TokenKind::Name)) throw SyntaxFail{};
    return advance().text;
  }

  struct Mark {
    std::size_t pos;
    std::size_t last_real;
  };
  Mark mark() const { return {pos_, last_real_}; }
  void reset(Mark m) {
    pos_ = m.pos;
    last_real_ = m.last_real;
  }

  Span span_from(std::size_t start) const {
    const Token& s = toks_[start];
    std::size_t last = last_real_ >= start ? last_real_ : start;
    auto [el, ec] = token_end(toks_[last]);
    return Span{s.line, s.column, el, ec};
  }

  Node make(NodeKind kind, std::size_t start) const {
    Node n;
    n.kind = kind;
    n.span = span_from(start);
    return n;
  }

  bool at_statement_end() const {
    return at(TokenKind::Newline) || at(TokenKind::EndOfFile) || at_op(";");
  }

  // ---- statements ---------------------------------------------------------

  void statement(std::vector<Node>& out) {
    const Token& t = peek();
    if (t.kind == TokenKind::Newline) {
      advance();
      return;
    }
    if (t.kind == TokenKind::Indent) {
      // Unexpected indent: fold the block into the current one.
      advance();
      while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) statement(out);
      if (at(TokenKind::Dedent)) advance();
      return;
    }
    if (block_depth_ > kMaxBlockDepth) {
      out.push_back(opaque_compound());
      return;
    }
    if (t.kind == TokenKind::Keyword) {
      const std::string& k = t.text;
      if (k == "def" || k == "class" || k == "if" || k == "for" || k == "while" || k == "try" || k == "with") {
        out.push_back(compound_with_fallback());
        return;
      }
      if (k == "async" || k == "elif" || k == "else" || k == "except" || k == "finally") {
        out.push_back(opaque_compound());
        return;
      }
    }
    if (t.is_op("@")) {
      // Decorator expressions are kept opaque.
      std::size_t start = pos_;
      while (!at(TokenKind::Newline) && !at(TokenKind::EndOfFile)) advance();
      out.push_back(make(NodeKind::OpaqueLine, start));
      if (at(TokenKind::Newline)) advance();
      return;
    }
    if (t.kind == TokenKind::Name && t.text == "match" && looks_like_block_header()) {
      out.push_back(opaque_compound());
      return;
    }
    simple_line(out);
  }

  bool looks_like_block_header() const {
    std::size_t i = pos_ + 1;
    if (i < toks_.size() && toks_[i].kind == TokenKind::Operator &&
        (toks_[i].text == "=" || toks_[i].text == "." || toks_[i].text == ":" || toks_[i].text == ",")) {
      return false;
    }
    while (i < toks_.size() && toks_[i].kind != TokenKind::Newline && toks_[i].kind != TokenKind::EndOfFile) ++i;
    return i > pos_ + 1 && toks_[i - 1].is_op(":") && i + 1 < toks_.size() &&
           toks_[i + 1].kind == TokenKind::Indent;
  }

  // Consumes a header line and, when present, its indented block.
  Node opaque_compound() {
    std::size_t start = pos_;
    while (!at(TokenKind::Newline) && !at(TokenKind::EndOfFile)) advance();
    if (at(TokenKind::Newline)) advance();
    if (at(TokenKind::Indent)) {
      int level = 0;
      do {
        if (at(TokenKind::Indent)) ++level;
        if (at(TokenKind::Dedent)) --level;
        advance();
      } while (level > 0 && !at(TokenKind::EndOfFile));
    }
    return make(NodeKind::OpaqueLine, start);
  }

  void simple_line(std::vector<Node>& out) {
    for (;;) {
      Mark m = mark();
      std::size_t start = pos_;
      try {
        Node n = small_statement();
        if (!at_statement_end()) throw SyntaxFail{};
        out.push_back(std::move(n));
      } catch (const SyntaxFail&) {
        reset(m);
        while (!at(TokenKind::Newline) && !at(TokenKind::EndOfFile)) advance();
        out.push_back(make(NodeKind::OpaqueLine, start));
        break;
      }
      if (at_op(";")) {
        advance();
        if (at(TokenKind::Newline) || at(TokenKind::EndOfFile)) break;
        continue;
      }
      break;
    }
    if (at(TokenKind::Newline)) advance();
  }

  Node small_statement() {
    std::size_t start = pos_;
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "pass" || t.text == "break" || t.text == "continue") {
        advance();
        return make(t.text == "pass" ? NodeKind::Pass : t.text == "break" ? NodeKind::Break : NodeKind::Continue,
                    start);
      }
      if (t.text == "return") {
        advance();
        Node n;
        n.kind = NodeKind::Return;
        if (!at_statement_end()) n.exprs.push_back(testlist_star());
        n.span = span_from(start);
        return n;
      }
      if (t.text == "raise") {
        advance();
        Node n;
        n.kind = NodeKind::Raise;
        if (!at_statement_end()) {
          n.exprs.push_back(test());
          if (at_kw("from")) {
            advance();
            n.exprs.push_back(test());
          }
        }
        n.span = span_from(start);
        return n;
      }
      if (t.text == "import") return import_statement();
      if (t.text == "from") return from_import();
      if (t.text == "global" || t.text == "nonlocal") {
        advance();
        Node n;
        n.kind = NodeKind::OpaqueLine;
        n.name = t.text;
        n.names.push_back(expect_name());
        while (at_op(",")) {
          advance();
          n.names.push_back(expect_name());
        }
        n.span = span_from(start);
        return n;
      }
      if (t.text == "del" || t.text == "assert") {
        std::string flavour = t.text;
        advance();
        Node n;
        n.kind = NodeKind::ExpressionStmt;
        n.name = flavour;
        n.exprs.push_back(flavour == "del" ? exprlist() : test());
        if (flavour == "assert" && at_op(",")) {
          advance();
          n.exprs.push_back(test());
        }
        n.span = span_from(start);
        return n;
      }
    }
    return expression_statement();
  }

  Node expression_statement() {
    std::size_t start = pos_;
    Node first = at_kw("yield") ? yield_expr() : testlist_star();
    if (at_op(":")) {
      advance();
      Node n;
      n.kind = NodeKind::Assign;
      n.name = ":";
      mark_store(first, n.names);
      n.exprs.push_back(std::move(first));
      n.exprs.push_back(test());
      if (at_op("=")) {
        advance();
        n.exprs.push_back(at_kw("yield") ? yield_expr() : testlist_star());
      }
      n.span = span_from(start);
      return n;
    }
    if (is_augassign(peek())) {
      Node n;
      n.kind = NodeKind::Assign;
      n.name = advance().text;
      mark_store(first, n.names);
      n.exprs.push_back(std::move(first));
      n.exprs.push_back(at_kw("yield") ? yield_expr() : testlist_star());
      n.span = span_from(start);
      return n;
    }
    if (at_op("=")) {
      Node n;
      n.kind = NodeKind::Assign;
      n.name = "=";
      std::vector<Node> parts;
      parts.push_back(std::move(first));
      while (at_op("=")) {
        advance();
        parts.push_back(at_kw("yield") ? yield_expr() : testlist_star());
      }
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) mark_store(parts[i], n.names);
      n.exprs = std::move(parts);
      n.span = span_from(start);
      return n;
    }
    Node n;
    n.kind = NodeKind::ExpressionStmt;
    n.exprs.push_back(std::move(first));
    n.span = span_from(start);
    return n;
  }

  static void mark_store(Node& target, std::vector<std::string>& names) {
    switch (target.kind) {
      case NodeKind::Name:
        target.flag = true;
        if (std::find(names.begin(), names.end(), target.name) == names.end()) names.push_back(target.name);
        break;
      case NodeKind::Display:
        if (target.name == "tuple" || target.name == "list") {
          for (auto& e : target.exprs) mark_store(e, names);
        }
        break;
      case NodeKind::Starred:
        for (auto& e : target.exprs) mark_store(e, names);
        break;
      default:
        break;
    }
  }

  Node import_statement() {
    std::size_t start = pos_;
    expect_kw("import");
    Node n;
    n.kind = NodeKind::Import;
    for (;;) {
      std::string first = expect_name();
      std::string dotted = first;
      while (at_op(".")) {
        advance();
        dotted += "." + expect_name();
      }
      std::string bound = first;
      if (at_kw("as")) {
        advance();
        bound = expect_name();
      }
      if (!n.name.empty()) n.name += ",";
      n.name += dotted;
      n.names.push_back(bound);
      if (!at_op(",")) break;
      advance();
    }
    n.span = span_from(start);
    return n;
  }

  Node from_import() {
    std::size_t start = pos_;
    expect_kw("from");
    Node n;
    n.kind = NodeKind::Import;
    std::string module;
    while (at_op(".") || at_op("...")) module += advance().text;
    if (at(TokenKind::Name)) {
      module += advance().text;
      while (at_op(".")) {
        advance();
        module += "." + expect_name();
      }
    }
    if (module.empty()) throw SyntaxFail{};
    n.name = module;
    expect_kw("import");
    if (at_op("*")) {
      advance();
      n.names.push_back("*");
    } else {
      bool paren = at_op("(");
      if (paren) advance();
      for (;;) {
        std::string imported = expect_name();
        if (at_kw("as")) {
          advance();
          imported = expect_name();
        }
        n.names.push_back(imported);
        if (!at_op(",")) break;
        advance();
        if (paren && at_op(")")) break;
      }
      if (paren) expect_op(")");
    }
    n.span = span_from(start);
    return n;
  }

  Node compound_with_fallback() {
    Mark m = mark();
    std::size_t start = pos_;
    try {
      return compound();
    } catch (const SyntaxFail&) {
      reset(m);
    }
    // Header could not be parsed: keep the header opaque but still parse the
    // block so nested structure stays visible.
    bool block_follows = false;
    while (!at(TokenKind::Newline) && !at(TokenKind::EndOfFile)) advance();
    if (last_real_ >= start && toks_[last_real_].is_op(":")) block_follows = true;
    Node n = make(NodeKind::OpaqueLine, start);
    if (at(TokenKind::Newline)) advance();
    if (block_follows && at(TokenKind::Indent)) {
      advance();
      ++block_depth_;
      while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) statement(n.body);
      --block_depth_;
      if (at(TokenKind::Dedent)) advance();
      n.span = span_from(start);
    }
    return n;
  }

  std::vector<Node> block() {
    expect_op(":");
    std::vector<Node> body;
    if (at(TokenKind::Newline)) {
      advance();
      if (at(TokenKind::Indent)) {
        advance();
        ++block_depth_;
        while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) statement(body);
        --block_depth_;
        if (at(TokenKind::Dedent)) advance();
      }
      return body;
    }
    simple_line(body);
    return body;
  }

  Node compound() {
    const std::string& k = peek().text;
    if (k == "def") return function_def();
    if (k == "class") return class_def();
    if (k == "if") return if_statement();
    if (k == "for") return for_statement();
    if (k == "while") return while_statement();
    if (k == "try") return try_statement();
    return with_statement();
  }

  Node clause(NodeKind kind, std::size_t start) {
    Node n;
    n.kind = kind;
    n.body = block();
    n.span = span_from(start);
    return n;
  }

  void maybe_else(Node& owner) {
    if (!at_kw("else")) return;
    std::size_t start = pos_;
    advance();
    owner.branches.push_back(clause(NodeKind::Else, start));
  }

  Node function_def() {
    std::size_t start = pos_;
    expect_kw("def");
    Node n;
    n.kind = NodeKind::FunctionDef;
    n.name = expect_name();
    expect_op("(");
    parameters(n, ")");
    expect_op(")");
    if (at_op("->")) {
      advance();
      n.exprs.push_back(test());
    }
    n.body = block();
    n.span = span_from(start);
    return n;
  }

  // Parameter list shared by def (annotations allowed) and lambda.
  void parameters(Node& n, std::string_view closer) {
    bool kw_only = false;
    bool annotations = closer == ")";
    while (!at_op(closer)) {
      Param p;
      if (at_op("/")) {
        advance();
      } else if (at_op("*")) {
        advance();
        kw_only = true;
        if (at(TokenKind::Name)) {
          p.name = advance().text;
          p.kind = Param::Kind::VarArgs;
          if (annotations && at_op(":")) {
            advance();
            n.exprs.push_back(test());
            p.annotation_index = static_cast<int>(n.exprs.size()) - 1;
          }
          n.params.push_back(std::move(p));
        }
      } else if (at_op("**")) {
        advance();
        p.name = expect_name();
        p.kind = Param::Kind::KwArgs;
        if (annotations && at_op(":")) {
          advance();
          n.exprs.push_back(test());
          p.annotation_index = static_cast<int>(n.exprs.size()) - 1;
        }
        n.params.push_back(std::move(p));
      } else {
        p.name = expect_name();
        p.kind = kw_only ? Param::Kind::KwOnly : Param::Kind::Positional;
        if (annotations && at_op(":")) {
          advance();
          n.exprs.push_back(test());
          p.annotation_index = static_cast<int>(n.exprs.size()) - 1;
        }
        if (at_op("=")) {
          advance();
          n.exprs.push_back(test());
          p.default_index = static_cast<int>(n.exprs.size()) - 1;
        }
        n.params.push_back(std::move(p));
      }
      if (!at_op(",")) break;
      advance();
    }
  }

  Node class_def() {
    std::size_t start = pos_;
    expect_kw("class");
    Node n;
    n.kind = NodeKind::ClassDef;
    n.name = expect_name();
    if (at_op("(")) {
      advance();
      call_arguments(n.exprs);
      expect_op(")");
    }
    n.body = block();
    n.span = span_from(start);
    return n;
  }

  Node if_statement() {
    std::size_t start = pos_;
    expect_kw("if");
    Node n;
    n.kind = NodeKind::If;
    n.exprs.push_back(namedexpr_test());
    n.body = block();
    while (at_kw("elif")) {
      std::size_t s = pos_;
      advance();
      Node e;
      e.kind = NodeKind::Elif;
      e.exprs.push_back(namedexpr_test());
      e.body = block();
      e.span = span_from(s);
      n.branches.push_back(std::move(e));
      n.flag = true;
    }
    maybe_else(n);
    n.span = span_from(start);
    return n;
  }

  Node for_statement() {
    std::size_t start = pos_;
    expect_kw("for");
    Node n;
    n.kind = NodeKind::For;
    Node target = exprlist();
    mark_store(target, n.names);
    n.exprs.push_back(std::move(target));
    expect_kw("in");
    n.exprs.push_back(testlist_star());
    n.body = block();
    maybe_else(n);
    n.span = span_from(start);
    return n;
  }

  Node while_statement() {
    std::size_t start = pos_;
    expect_kw("while");
    Node n;
    n.kind = NodeKind::While;
    n.exprs.push_back(namedexpr_test());
    n.body = block();
    maybe_else(n);
    n.span = span_from(start);
    return n;
  }

  Node try_statement() {
    std::size_t start = pos_;
    expect_kw("try");
    Node n;
    n.kind = NodeKind::Try;
    n.body = block();
    while (at_kw("except")) {
      std::size_t s = pos_;
      advance();
      if (at_op("*")) advance();
      Node h;
      h.kind = NodeKind::ExceptHandler;
      h.flag = at_op(":");
      if (!h.flag) {
        h.exprs.push_back(test());
        if (at_kw("as")) {
          advance();
          h.name = expect_name();
          h.names.push_back(h.name);
        } else if (at_op(",")) {
          advance();
          h.exprs.push_back(test());
        }
      }
      h.body = block();
      h.span = span_from(s);
      n.branches.push_back(std::move(h));
    }
    maybe_else(n);
    if (at_kw("finally")) {
      std::size_t s = pos_;
      advance();
      n.branches.push_back(clause(NodeKind::Finally, s));
    }
    n.span = span_from(start);
    return n;
  }

  Node with_statement() {
    std::size_t start = pos_;
    expect_kw("with");
    Node n;
    n.kind = NodeKind::With;
    bool done = false;
    if (at_op("(")) {
      Mark m = mark();
      try {
        advance();
        with_items(n, ")");
        expect_op(")");
        if (!at_op(":")) throw SyntaxFail{};
        done = true;
      } catch (const SyntaxFail&) {
        reset(m);
        n.exprs.clear();
        n.names.clear();
      }
    }
    if (!done) with_items(n, ":");
    n.body = block();
    n.span = span_from(start);
    return n;
  }

  void with_items(Node& n, std::string_view closer) {
    for (;;) {
      n.exprs.push_back(test());
      if (at_kw("as")) {
        advance();
        Node target = bitor_expr();
        mark_store(target, n.names);
        n.exprs.push_back(std::move(target));
      }
      if (!at_op(",")) break;
      advance();
      if (at_op(closer)) break;
    }
  }

  // ---- expressions --------------------------------------------------------

  struct DepthGuard {
    explicit DepthGuard(int& d) : depth(d) {
      if (++depth > kMaxExprDepth) {
        --depth;
        throw SyntaxFail{};
      }
    }
    ~DepthGuard() { --depth; }
    int& depth;
  };

  static bool starts_expression(const Token& t) {
    switch (t.kind) {
      case TokenKind::Name:
      case TokenKind::Number:
      case TokenKind::String:
        return true;
      case TokenKind::Keyword:
        return t.text == "None" || t.text == "True" || t.text == "False" || t.text == "not" ||
               t.text == "lambda" || t.text == "await" || t.text == "yield";
      case TokenKind::Operator:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
               t.text == "~" || t.text == "*" || t.text == "**" || t.text == "...";
      default:
        return false;
    }
  }

  Node tuple_of(std::vector<Node> items, std::size_t start) {
    Node t;
    t.kind = NodeKind::Display;
    t.name = "tuple";
    t.exprs = std::move(items);
    t.span = span_from(start);
    return t;
  }

  // star_expr | namedexpr_test, comma separated; a comma makes a tuple.
  Node testlist_star() {
    std::size_t start = pos_;
    Node first = star_or_namedexpr();
    if (!at_op(",")) return first;
    std::vector<Node> items;
    items.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (!starts_expression(peek())) break;
      items.push_back(star_or_namedexpr());
    }
    return tuple_of(std::move(items), start);
  }

  // Targets of for/del/comprehensions: bitwise-or level so `in` is not eaten.
  Node exprlist() {
    std::size_t start = pos_;
    Node first = at_op("*") ? starred(false) : bitor_expr();
    if (!at_op(",")) return first;
    std::vector<Node> items;
    items.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (!starts_expression(peek())) break;
      items.push_back(at_op("*") ? starred(false) : bitor_expr());
    }
    return tuple_of(std::move(items), start);
  }

  Node starred(bool full_test) {
    std::size_t start = pos_;
    std::string op = advance().text;
    Node n;
    n.kind = NodeKind::Starred;
    n.name = op;
    n.exprs.push_back(full_test ? test() : bitor_expr());
    n.span = span_from(start);
    return n;
  }

  Node star_or_namedexpr() {
    if (at_op("*")) return starred(false);
    return namedexpr_test();
  }

  Node namedexpr_test() {
    if (at(TokenKind::Name) && peek(1).is_op(":=")) {
      std::size_t start = pos_;
      Node target;
      target.kind = NodeKind::Name;
      target.name = advance().text;
      target.flag = true;
      target.span = span_from(start);
      advance();
      Node n;
      n.kind = NodeKind::NamedExpr;
      n.names.push_back(target.name);
      n.exprs.push_back(std::move(target));
      n.exprs.push_back(test());
      n.span = span_from(start);
      return n;
    }
    return test();
  }

  Node test() {
    DepthGuard guard(depth_);
    if (at_kw("lambda")) return lambda();
    std::size_t start = pos_;
    Node body = or_test();
    if (!at_kw("if")) return body;
    // A trailing `if` without `else` belongs to an enclosing comprehension.
    Mark m = mark();
    advance();
    Node cond;
    try {
      cond = or_test();
      if (!at_kw("else")) throw SyntaxFail{};
    } catch (const SyntaxFail&) {
      reset(m);
      return body;
    }
    advance();
    Node orelse = test();
    Node n;
    n.kind = NodeKind::Conditional;
    n.exprs.push_back(std::move(body));
    n.exprs.push_back(std::move(cond));
    n.exprs.push_back(std::move(orelse));
    n.span = span_from(start);
    return n;
  }

  Node lambda() {
    std::size_t start = pos_;
    expect_kw("lambda");
    Node n;
    n.kind = NodeKind::Lambda;
    parameters(n, ":");
    expect_op(":");
    n.exprs.push_back(test());
    n.span = span_from(start);
    return n;
  }

  Node bool_sequence(const char* op, Node (Parser::*operand)()) {
    std::size_t start = pos_;
    Node first = (this->*operand)();
    if (!at_kw(op)) return first;
    Node n;
    n.kind = NodeKind::BoolSequence;
    n.name = op;
    n.exprs.push_back(std::move(first));
    while (at_kw(op)) {
      advance();
      n.exprs.push_back((this->*operand)());
    }
    n.length = static_cast<int>(n.exprs.size());
    n.span = span_from(start);
    return n;
  }

  Node or_test() { return bool_sequence("or", &Parser::and_test); }
  Node and_test() { return bool_sequence("and", &Parser::not_test); }

  Node not_test() {
    DepthGuard guard(depth_);
    if (at_kw("not")) {
      std::size_t start = pos_;
      advance();
      Node n;
      n.kind = NodeKind::UnaryOp;
      n.name = "not";
      n.exprs.push_back(not_test());
      n.span = span_from(start);
      return n;
    }
    return comparison();
  }

  bool at_compare_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::Operator) {
      return t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" ||
             t.text == "!=" || t.text == "<>";
    }
    if (t.is_kw("in") || t.is_kw("is")) return true;
    return t.is_kw("not") && peek(1).is_kw("in");
  }

  Node comparison() {
    std::size_t start = pos_;
    Node first = bitor_expr();
    if (!at_compare_op()) return first;
    Node n;
    n.kind = NodeKind::Compare;
    n.exprs.push_back(std::move(first));
    while (at_compare_op()) {
      std::string op = advance().text;
      if (op == "not" || (op == "is" && at_kw("not"))) op += " " + advance().text;
      if (!n.name.empty()) n.name += ",";
      n.name += op;
      n.exprs.push_back(bitor_expr());
    }
    n.span = span_from(start);
    return n;
  }

  Node bitor_expr() { return binary(1); }

  Node binary(int min_prec) {
    DepthGuard guard(depth_);
    std::size_t start = pos_;
    Node left = unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != TokenKind::Operator) break;
      auto it = binary_precedence().find(t.text);
      if (it == binary_precedence().end() || it->second < min_prec) break;
      std::string op = advance().text;
      Node right = binary(it->second + 1);
      Node n;
      n.kind = NodeKind::BinaryOp;
      n.name = op;
      n.exprs.push_back(std::move(left));
      n.exprs.push_back(std::move(right));
      n.span = span_from(start);
      left = std::move(n);
    }
    return left;
  }

  Node unary() {
    DepthGuard guard(depth_);
    if (at_op("-") || at_op("+") || at_op("~")) {
      std::size_t start = pos_;
      Node n;
      n.kind = NodeKind::UnaryOp;
      n.name = advance().text;
      n.exprs.push_back(unary());
      n.span = span_from(start);
      return n;
    }
    return power();
  }

  Node power() {
    std::size_t start = pos_;
    Node base;
    if (at_kw("await")) {
      advance();
      base.kind = NodeKind::Await;
      base.exprs.push_back(primary());
      base.span = span_from(start);
    } else {
      base = primary();
    }
    if (!at_op("**")) return base;
    advance();
    Node n;
    n.kind = NodeKind::BinaryOp;
    n.name = "**";
    n.exprs.push_back(std::move(base));
    n.exprs.push_back(unary());
    n.span = span_from(start);
    return n;
  }

  static std::string dotted_name(const Node& n) {
    if (n.kind == NodeKind::Name) return n.name;
    if (n.kind == NodeKind::Attribute && !n.exprs.empty()) {
      std::string prefix = dotted_name(n.exprs.front());
      if (!prefix.empty()) return prefix + "." + n.name;
    }
    return {};
  }

  Node primary() {
    std::size_t start = pos_;
    Node value = atom();
    for (;;) {
      if (at_op("(")) {
        advance();
        Node call;
        call.kind = NodeKind::Call;
        call.name = dotted_name(value);
        call.exprs.push_back(std::move(value));
        call_arguments(call.exprs);
        expect_op(")");
        call.span = span_from(start);
        value = std::move(call);
      } else if (at_op("[")) {
        advance();
        Node sub;
        sub.kind = NodeKind::Subscript;
        sub.exprs.push_back(std::move(value));
        for (;;) {
          sub.exprs.push_back(subscript_item());
          if (!at_op(",")) break;
          advance();
          if (at_op("]")) break;
        }
        expect_op("]");
        sub.span = span_from(start);
        value = std::move(sub);
      } else if (at_op(".")) {
        advance();
        Node attr;
        attr.kind = NodeKind::Attribute;
        attr.name = expect_name();
        attr.exprs.push_back(std::move(value));
        attr.span = span_from(start);
        value = std::move(attr);
      } else {
        break;
      }
    }
    return value;
  }

  Node subscript_item() {
    std::size_t start = pos_;
    if (at_op("*")) return starred(false);
    Node lower;
    bool has_lower = !at_op(":");
    if (has_lower) lower = namedexpr_test();
    if (!at_op(":")) return lower;
    Node slice;
    slice.kind = NodeKind::Slice;
    if (has_lower) slice.exprs.push_back(std::move(lower));
    while (at_op(":")) {
      advance();
      if (!at_op(":") && !at_op(",") && !at_op("]")) slice.exprs.push_back(test());
    }
    slice.span = span_from(start);
    return slice;
  }

  void call_arguments(std::vector<Node>& out) {
    while (!at_op(")")) {
      std::size_t start = pos_;
      if (at_op("*") || at_op("**")) {
        out.push_back(starred(true));
      } else if (at(TokenKind::Name) && peek(1).is_op("=")) {
        Node kw;
        kw.kind = NodeKind::Keyword;
        kw.name = advance().text;
        advance();
        kw.exprs.push_back(test());
        kw.span = span_from(start);
        out.push_back(std::move(kw));
      } else {
        Node arg = namedexpr_test();
        if (at_kw("for") || (at_kw("async") && peek(1).is_kw("for"))) {
          std::vector<Node> elements;
          elements.push_back(std::move(arg));
          arg = comprehension("generator", std::move(elements), start);
        }
        out.push_back(std::move(arg));
      }
      if (!at_op(",")) break;
      advance();
    }
  }

  Node comprehension(const char* kind, std::vector<Node> elements, std::size_t start) {
    Node n;
    n.kind = NodeKind::Comprehension;
    n.name = kind;
    n.exprs = std::move(elements);
    while (at_kw("for") || (at_kw("async") && peek(1).is_kw("for"))) {
      std::size_t s = pos_;
      if (at_kw("async")) advance();
      advance();
      Node f;
      f.kind = NodeKind::ComprehensionFor;
      Node target = exprlist();
      mark_store(target, f.names);
      f.exprs.push_back(std::move(target));
      expect_kw("in");
      f.exprs.push_back(or_test());
      f.span = span_from(s);
      n.exprs.push_back(std::move(f));
      while (at_kw("if")) {
        std::size_t gs = pos_;
        advance();
        Node g;
        g.kind = NodeKind::ComprehensionIf;
        g.exprs.push_back(or_test());
        g.span = span_from(gs);
        n.exprs.push_back(std::move(g));
      }
    }
    n.span = span_from(start);
    return n;
  }

  Node yield_expr() {
    std::size_t start = pos_;
    expect_kw("yield");
    Node n;
    n.kind = NodeKind::Yield;
    if (at_kw("from")) {
      advance();
      n.name = "from";
      n.exprs.push_back(test());
    } else if (starts_expression(peek())) {
      n.exprs.push_back(testlist_star());
    }
    n.span = span_from(start);
    return n;
  }

  Node atom() {
    DepthGuard guard(depth_);
    std::size_t start = pos_;
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Name: {
        Node n;
        n.kind = NodeKind::Name;
        n.name = advance().text;
        n.span = span_from(start);
        return n;
      }
      case TokenKind::Number: {
        advance();
        return make(NodeKind::Literal, start);
      }
      case TokenKind::String: {
        while (at(TokenKind::String)) advance();
        return make(NodeKind::Literal, start);
      }
      case TokenKind::Keyword:
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          advance();
          return make(NodeKind::Literal, start);
        }
        throw SyntaxFail{};
      case TokenKind::Operator:
        break;
      default:
        throw SyntaxFail{};
    }
    if (t.text == "...") {
      advance();
      return make(NodeKind::Literal, start);
    }
    if (t.text == "(") {
      advance();
      if (at_op(")")) {
        advance();
        return tuple_of({}, start);
      }
      if (at_kw("yield")) {
        Node y = yield_expr();
        expect_op(")");
        return y;
      }
      Node first = star_or_namedexpr();
      if (at_kw("for") || (at_kw("async") && peek(1).is_kw("for"))) {
        std::vector<Node> elements;
        elements.push_back(std::move(first));
        Node c = comprehension("generator", std::move(elements), start);
        expect_op(")");
        c.span = span_from(start);
        return c;
      }
      if (!at_op(",")) {
        expect_op(")");
        return first;
      }
      std::vector<Node> items;
      items.push_back(std::move(first));
      while (at_op(",")) {
        advance();
        if (at_op(")")) break;
        items.push_back(star_or_namedexpr());
      }
      expect_op(")");
      return tuple_of(std::move(items), start);
    }
    if (t.text == "[") {
      advance();
      std::vector<Node> items;
      if (!at_op("]")) {
        items.push_back(star_or_namedexpr());
        if (at_kw("for") || (at_kw("async") && peek(1).is_kw("for"))) {
          Node c = comprehension("list", std::move(items), start);
          expect_op("]");
          c.span = span_from(start);
          return c;
        }
        while (at_op(",")) {
          advance();
          if (at_op("]")) break;
          items.push_back(star_or_namedexpr());
        }
      }
      expect_op("]");
      Node d;
      d.kind = NodeKind::Display;
      d.name = "list";
      d.exprs = std::move(items);
      d.span = span_from(start);
      return d;
    }
    if (t.text == "{") {
      advance();
      Node d;
      d.kind = NodeKind::Display;
      d.name = "dict";
      if (at_op("}")) {
        advance();
        d.span = span_from(start);
        return d;
      }
      bool is_dict = false;
      std::vector<Node> items;
      auto dict_entry = [&]() {
        if (at_op("**")) {
          items.push_back(starred(false));
          return;
        }
        items.push_back(test());
        expect_op(":");
        items.push_back(test());
      };
      if (at_op("**")) {
        is_dict = true;
        dict_entry();
      } else {
        Node first = star_or_namedexpr();
        if (at_op(":")) {
          is_dict = true;
          advance();
          items.push_back(std::move(first));
          items.push_back(test());
        } else {
          items.push_back(std::move(first));
        }
      }
      if (at_kw("for") || (at_kw("async") && peek(1).is_kw("for"))) {
        Node c = comprehension(is_dict ? "dict" : "set", std::move(items), start);
        expect_op("}");
        c.span = span_from(start);
        return c;
      }
      while (at_op(",")) {
        advance();
        if (at_op("}")) break;
        if (is_dict) {
          dict_entry();
        } else {
          items.push_back(star_or_namedexpr());
        }
      }
      expect_op("}");
      d.name = is_dict ? "dict" : "set";
      d.exprs = std::move(items);
      d.span = span_from(start);
      return d;
    }
    throw SyntaxFail{};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t last_real_ = 0;
  int depth_ = 0;
  int block_depth_ = 0;
};

// ---- dump -------------------------------------------------------------------

void quote_into(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
}

void dump_into(std::string& out, const Node& n, int indent) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += "(";
  out += to_string(n.kind);
  out += " " + std::to_string(n.span.start_line) + ":" + std::to_string(n.span.start_col) + "-" +
         std::to_string(n.span.end_line) + ":" + std::to_string(n.span.end_col);
  if (!n.name.empty()) {
    out += " name=";
    quote_into(out, n.name);
  }
  if (!n.params.empty()) {
    out += " params=[";
    for (std::size_t i = 0; i < n.params.size(); ++i) {
      if (i) out += " ";
      const Param& p = n.params[i];
      if (p.kind == Param::Kind::VarArgs) out += "*";
      if (p.kind == Param::Kind::KwArgs) out += "**";
      out += p.name;
      if (p.default_index >= 0) out += "=";
    }
    out += "]";
  }
  if (!n.names.empty()) {
    out += " names=[";
    for (std::size_t i = 0; i < n.names.size(); ++i) {
      if (i) out += " ";
      out += n.names[i];
    }
    out += "]";
  }
  if (n.flag) {
    switch (n.kind) {
      case NodeKind::If: out += " elif-chain"; break;
      case NodeKind::ExceptHandler: out += " bare"; break;
      case NodeKind::Name: out += " store"; break;
      default: out += " flag"; break;
    }
  }
  if (n.kind == NodeKind::BoolSequence) out += " length=" + std::to_string(n.length);
  auto children = [&](const std::vector<Node>& v) {
    for (const auto& c : v) {
      out += "\n";
      dump_into(out, c, indent + 1);
    }
  };
  children(n.exprs);
  children(n.body);
  children(n.branches);
  out += ")";
}

}  // namespace

StructureTree parse(const std::vector<Token>& tokens) {
  StructureTree tree;
  std::vector<Token> code;
  code.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Comment) {
      tree.comments.push_back(t);
    } else {
      code.push_back(t);
    }
  }
  if (!code.empty()) {
    const Token& eof = code.back();
    tree.line_count = eof.column == 0 ? eof.line - 1 : eof.line;
  }
  tree.root = Parser(std::move(code)).module();
  return tree;
}

StructureTree parse_source(std::string_view source) { return parse(tokenize(source)); }

std::string dump_tree(const Node& node) {
  std::string out;
  dump_into(out, node, 0);
  out += "\n";
  return out;
}

}  // namespace codebench::pysyntax
