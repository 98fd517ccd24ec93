#include "codebench/repair/imports.hpp"

#include <algorithm>
#include <deque>

#include "codebench/common/embedded_data.hpp"
#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"
#include "codebench/metrics/smells.hpp"

namespace codebench::imports {

using pysyntax::Node;
using pysyntax::NodeKind;
using pysyntax::Token;
using pysyntax::TokenKind;

ImportMapping ImportMapping::from_json(const nlohmann::json& j) {
  ImportMapping m;
  try {
    for (const auto& [name, stmt] : j.at("entries").items()) {
      std::string text = stmt.get<std::string>();
      pysyntax::StructureTree tree;
      try {
        tree = pysyntax::parse_source(text);
      } catch (const LexError& e) {
        throw ConfigError("import for '" + name + "': " + e.what());
      }
      const auto& body = tree.root.body;
      bool ok = body.size() == 1 && body[0].kind == NodeKind::Import &&
                std::find(body[0].names.begin(), body[0].names.end(), name) != body[0].names.end();
      if (!ok) throw ConfigError("import for '" + name + "' must be one import statement binding it: " + text);
      m.entries.emplace(name, std::string(text::trim(text)));
    }
    if (j.contains("provided")) {
      for (const auto& p : j.at("provided")) m.provided.insert(p.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("import mapping: ") + e.what());
  }
  return m;
}

const ImportMapping& ImportMapping::defaults() {
  static const ImportMapping m = from_json(nlohmann::json::parse(embedded::import_mapping_json()));
  return m;
}

namespace {

struct Scope {
  enum class Kind { Module, Class, Function } kind;
  Scope* parent = nullptr;
  std::set<std::string> bound;
  bool star = false;
};

class Binder {
 public:
  explicit Binder(const std::vector<Token>* tokens) : tokens_(tokens) {
    module_ = &scopes_.emplace_back(Scope{Scope::Kind::Module, nullptr, {}, false});
  }

  void run(const Node& root) {
    for (const auto& s : root.body) visit(s, module_);
  }

  std::set<std::string> undefined() const {
    const auto& builtins = metrics::python_builtins();
    std::set<std::string> out;
    for (const auto& [name, scope] : refs_) {
      if (builtins.count(name) || resolves(name, scope)) continue;
      out.insert(name);
    }
    return out;
  }

 private:
  static bool binds(const Scope* s, const std::string& name) { return s->star || s->bound.count(name) > 0; }

  static bool resolves(const std::string& name, const Scope* s) {
    if (binds(s, name)) return true;
    for (const Scope* p = s->parent; p; p = p->parent) {
      if (p->kind != Scope::Kind::Class && binds(p, name)) return true;
    }
    return false;
  }

  Scope* child(Scope::Kind kind, Scope* parent) { return &scopes_.emplace_back(Scope{kind, parent, {}, false}); }

  void bind_all(const std::vector<std::string>& names, Scope* s) {
    for (const auto& n : names) {
      if (n == "*") {
        s->star = true;
      } else if (!n.empty()) {
        s->bound.insert(n);
      }
    }
  }

  void visit_children(const Node& n, Scope* s) {
    for (const auto& c : n.exprs) visit(c, s);
    for (const auto& c : n.body) visit(c, s);
    for (const auto& c : n.branches) visit(c, s);
  }

  void visit_function(const Node& n, Scope* outer, Scope::Kind kind) {
    Scope* inner = child(kind, outer);
    for (const auto& p : n.params) inner->bound.insert(p.name);
    if (n.kind == NodeKind::Lambda) {
      for (const auto& c : n.exprs) visit(c, inner);
      return;
    }
    for (const auto& c : n.exprs) visit(c, outer);
    for (const auto& c : n.body) visit(c, inner);
  }

  void visit(const Node& n, Scope* s) {
    switch (n.kind) {
      case NodeKind::FunctionDef:
        s->bound.insert(n.name);
        visit_function(n, s, Scope::Kind::Function);
        return;
      case NodeKind::Lambda:
        visit_function(n, s, Scope::Kind::Function);
        return;
      case NodeKind::ClassDef: {
        s->bound.insert(n.name);
        for (const auto& c : n.exprs) visit(c, s);
        Scope* inner = child(Scope::Kind::Class, s);
        for (const auto& c : n.body) visit(c, inner);
        return;
      }
      case NodeKind::Import:
      case NodeKind::Assign:
      case NodeKind::For:
      case NodeKind::With:
      case NodeKind::ComprehensionFor:
      case NodeKind::ExceptHandler:
      case NodeKind::NamedExpr:
        bind_all(n.names, s);
        break;
      case NodeKind::Name:
        if (n.flag) {
          s->bound.insert(n.name);
        } else {
          refs_.emplace_back(n.name, s);
        }
        return;
      case NodeKind::OpaqueLine:
        if (n.name == "global") bind_all(n.names, module_);
        if (n.name == "nonlocal") bind_all(n.names, s);
        scan_decorator(n, s);
        break;
      default:
        break;
    }
    visit_children(n, s);
  }

  void scan_decorator(const Node& n, Scope* s) {
    if (!tokens_) return;
    const auto& toks = *tokens_;
    auto it = std::find_if(toks.begin(), toks.end(), [&](const Token& t) {
      return t.line == n.span.start_line && t.column == n.span.start_col && t.kind == TokenKind::Operator;
    });
    if (it == toks.end() || !it->is_op("@")) return;
    for (auto t = it + 1; t != toks.end() && t->kind != TokenKind::Newline && t->kind != TokenKind::EndOfFile; ++t) {
      if (t->kind != TokenKind::Name) continue;
      if ((t - 1)->is_op(".")) continue;
      if (t + 1 != toks.end() && (t + 1)->is_op("=")) continue;
      refs_.emplace_back(t->text, s);
    }
  }

  const std::vector<Token>* tokens_;
  std::deque<Scope> scopes_;
  Scope* module_;
  std::vector<std::pair<std::string, const Scope*>> refs_;
};

}  // namespace

std::set<std::string> find_undefined(const pysyntax::StructureTree& tree, const std::vector<Token>* tokens) {
  Binder b(tokens);
  b.run(tree.root);
  return b.undefined();
}

std::set<std::string> find_undefined(std::string_view source) {
  std::vector<Token> tokens = pysyntax::tokenize(source);
  return find_undefined(pysyntax::parse(tokens), &tokens);
}

std::set<int> RepairResult::inserted_lines() const {
  std::set<int> out;
  for (int i = 0; i < static_cast<int>(inserted.size()); ++i) out.insert(first_inserted_line + i);
  return out;
}

namespace {

bool is_decorator_line(const Node& n, const std::vector<std::string_view>& lines) {
  if (n.kind != NodeKind::OpaqueLine) return false;
  std::size_t idx = static_cast<std::size_t>(n.span.start_line - 1);
  return idx < lines.size() && text::ltrim(lines[idx]).substr(0, 1) == "@";
}

bool is_future_import(const Node& n) { return n.kind == NodeKind::Import && n.name == "__future__"; }

// 1-based line the imports go above.
int insertion_line(const Node& root, const std::vector<std::string_view>& lines) {
  const auto& body = root.body;
  auto def = std::find_if(body.begin(), body.end(), [](const Node& n) {
    return n.kind == NodeKind::FunctionDef || n.kind == NodeKind::ClassDef;
  });
  if (def != body.end()) {
    while (def != body.begin() && is_decorator_line(*(def - 1), lines)) --def;
    return def->span.start_line;
  }
  auto first = std::find_if_not(body.begin(), body.end(), is_future_import);
  if (first != body.end()) return first->span.start_line;
  if (!body.empty()) return body.back().span.end_line + 1;
  return 1;
}

}  // namespace

RepairResult repair_detailed(std::string_view source, const ImportMapping& mapping) {
  RepairResult r;
  std::vector<Token> tokens = pysyntax::tokenize(source);
  pysyntax::StructureTree tree = pysyntax::parse(tokens);
  std::set<std::string> undefined = find_undefined(tree, &tokens);
  for (const auto& p : mapping.provided) undefined.erase(p);

  std::set<std::string> missing;
  std::set<std::string> statements;
  for (const auto& name : undefined) {
    auto it = mapping.entries.find(name);
    if (it == mapping.entries.end()) {
      missing.insert(name);
    } else {
      statements.insert(it->second);
    }
  }
  if (!missing.empty()) throw UnresolvedName(missing);
  if (statements.empty()) {
    r.text = std::string(source);
    return r;
  }

  bool crlf = source.find("\r\n") != std::string_view::npos;
  std::string norm = text::normalize_newlines(source);
  std::vector<std::string_view> lines = text::split_lines(norm);
  int at = insertion_line(tree.root, lines);
  std::string block;
  for (const auto& s : statements) block += s + "\n";

  std::size_t offset = norm.size();
  if (at <= static_cast<int>(lines.size())) {
    offset = static_cast<std::size_t>(lines[static_cast<std::size_t>(at - 1)].data() - norm.data());
  } else {
    at = static_cast<int>(lines.size()) + 1;
    if (!norm.empty() && norm.back() != '\n') block.insert(block.begin(), '\n');
  }
  std::string out = norm.substr(0, offset) + block + norm.substr(offset);
  if (crlf) {
    std::string converted;
    converted.reserve(out.size() + lines.size() + statements.size());
    for (char c : out) {
      if (c == '\n') converted.push_back('\r');
      converted.push_back(c);
    }
    out = std::move(converted);
  }
  r.text = std::move(out);
  r.inserted.assign(statements.begin(), statements.end());
  r.first_inserted_line = at;
  return r;
}

std::string repair(std::string_view source, const ImportMapping& mapping) {
  return repair_detailed(source, mapping).text;
}

}  // namespace codebench::imports
