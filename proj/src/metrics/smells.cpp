#include "codebench/metrics/smells.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "codebench/common/embedded_data.hpp"
#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"
#include "codebench/metrics/complexity.hpp"

namespace codebench::metrics {

using pysyntax::Node;
using pysyntax::NodeKind;
using pysyntax::Span;
using pysyntax::Token;
using pysyntax::TokenKind;

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Low: return "low";
    case Severity::Medium: return "medium";
    case Severity::High: return "high";
  }
  return "?";
}

const std::set<std::string>& python_builtins() {
  static const std::set<std::string> names = [] {
    std::set<std::string> out;
    for (auto line : text::split_lines(embedded::python_builtins_txt())) {
      auto name = text::trim(line);
      if (!name.empty() && name.front() != '#') out.emplace(name);
    }
    return out;
  }();
  return names;
}

namespace {

bool before(int line_a, int col_a, int line_b, int col_b) {
  return std::tie(line_a, col_a) < std::tie(line_b, col_b);
}

bool token_in(const Token& t, const Span& s) {
  return !before(t.line, t.column, s.start_line, s.start_col) && before(t.line, t.column, s.end_line, s.end_col);
}

bool is_layout(const Token& t) {
  return t.kind == TokenKind::Newline || t.kind == TokenKind::Indent || t.kind == TokenKind::Dedent ||
         t.kind == TokenKind::Comment || t.kind == TokenKind::EndOfFile;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens, const Span& s) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!is_layout(t) && token_in(t, s)) out.push_back(t.text);
  }
  return out;
}

Span block_span(const std::vector<Node>& body) {
  if (body.empty()) return Span{};
  const Span& a = body.front().span;
  const Span& b = body.back().span;
  return Span{a.start_line, a.start_col, b.end_line, b.end_col};
}

void for_each_node(const Node& root, NodeKind kind, const std::function<void(const Node&)>& fn) {
  pysyntax::walk(root, [&](const Node& n) {
    if (n.kind == kind) fn(n);
    return true;
  });
}

// Visits the nodes of a function's own scope: nested defs, classes and
// lambdas are not entered.
void walk_scope(const Node& fn, const std::function<void(const Node&)>& visit) {
  for (const auto& s : fn.body) {
    pysyntax::walk(s, [&](const Node& n) {
      visit(n);
      return n.kind != NodeKind::FunctionDef && n.kind != NodeKind::ClassDef && n.kind != NodeKind::Lambda;
    });
  }
}

// Names bound in a function's own scope, with the node that first binds them.
std::vector<std::pair<std::string, const Node*>> scope_bindings(const Node& fn) {
  std::vector<std::pair<std::string, const Node*>> out;
  std::set<std::string> seen;
  auto bind = [&](const std::string& name, const Node& at) {
    if (seen.insert(name).second) out.emplace_back(name, &at);
  };
  walk_scope(fn, [&](const Node& n) {
    switch (n.kind) {
      case NodeKind::Assign:
        if (n.name == "=" || n.name == ":") {
          for (const auto& name : n.names) bind(name, n);
        }
        break;
      case NodeKind::For:
      case NodeKind::With:
      case NodeKind::ComprehensionFor:
      case NodeKind::ExceptHandler:
        for (const auto& name : n.names) bind(name, n);
        break;
      default:
        break;
    }
  });
  return out;
}

std::set<std::string> declared_nonlocal(const Node& fn) {
  std::set<std::string> out;
  walk_scope(fn, [&](const Node& n) {
    if (n.kind == NodeKind::OpaqueLine && (n.name == "global" || n.name == "nonlocal")) {
      out.insert(n.names.begin(), n.names.end());
    }
  });
  return out;
}

std::vector<std::string> param_names(const Node& fn) {
  std::vector<std::string> out;
  for (const auto& p : fn.params) out.push_back(p.name);
  return out;
}

void shadowed_builtin(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::FunctionDef, [&](const Node& fn) {
    std::set<std::string> reported;
    for (const auto& p : fn.params) {
      if (ctx.builtins.count(p.name) && p.name.front() != '_' && reported.insert(p.name).second) {
        out.push_back({"shadowed-builtin", fn.span, "parameter '" + p.name + "' shadows a builtin"});
      }
    }
    for (const auto& [name, node] : scope_bindings(fn)) {
      if (ctx.builtins.count(name) && name.front() != '_' && reported.insert(name).second) {
        out.push_back({"shadowed-builtin", node->span, "local '" + name + "' shadows a builtin"});
      }
    }
  });
}

void empty_function(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::FunctionDef, [&](const Node& fn) {
    if (fn.body.empty()) return;
    for (const auto& s : fn.body) {
      if (s.kind != NodeKind::Pass) return;
    }
    for (const auto& c : ctx.tree.comments) {
      if (c.line >= fn.span.start_line && c.line <= fn.span.end_line) return;
    }
    out.push_back({"empty-function", fn.span, "function '" + fn.name + "' is empty"});
  });
}

// Counts Name tokens in `span` minus plain store occurrences. Any leftover
// occurrence (a load, an augmented assignment, an attribute member with the
// same spelling) counts as a use.
void unused_local(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::FunctionDef, [&](const Node& fn) {
    std::map<std::string, const Node*> candidates;
    walk_scope(fn, [&](const Node& n) {
      if (n.kind != NodeKind::Assign || n.name != "=") return;
      for (std::size_t i = 0; i + 1 < n.exprs.size(); ++i) {
        const Node& target = n.exprs[i];
        if (target.kind == NodeKind::Name && target.name.front() != '_') candidates.emplace(target.name, &n);
      }
    });
    if (candidates.empty()) return;
    std::vector<std::string> params = param_names(fn);
    std::set<std::string> outer = declared_nonlocal(fn);
    std::map<std::string, int> occurrences;
    for (const auto& t : ctx.tokens) {
      if (t.kind == TokenKind::Name && candidates.count(t.text) && token_in(t, fn.span)) ++occurrences[t.text];
    }
    std::map<std::string, int> stores;
    for (const auto& s : fn.body) {
      pysyntax::walk(s, [&](const Node& n) {
        if (n.kind == NodeKind::Assign && n.name != "=" && n.name != ":") return false;
        if (n.kind == NodeKind::Name && n.flag && candidates.count(n.name)) ++stores[n.name];
        return true;
      });
    }
    for (const auto& [name, node] : candidates) {
      if (std::find(params.begin(), params.end(), name) != params.end() || outer.count(name)) continue;
      if (occurrences[name] - stores[name] <= 0) {
        out.push_back({"unused-local", node->span, "local '" + name + "' is assigned but never used"});
      }
    }
  });
}

void unused_import(const SmellContext& ctx, std::vector<Finding>& out) {
  std::vector<const Node*> imports;
  for_each_node(ctx.tree.root, NodeKind::Import, [&](const Node& n) { imports.push_back(&n); });
  if (imports.empty()) return;
  std::set<std::string> used;
  for (const auto& t : ctx.tokens) {
    if (t.kind != TokenKind::Name) continue;
    bool inside = std::any_of(imports.begin(), imports.end(), [&](const Node* n) { return token_in(t, n->span); });
    if (!inside) used.insert(t.text);
  }
  for (const Node* n : imports) {
    if (n->name == "__future__") continue;
    for (const auto& name : n->names) {
      if (name == "*" || used.count(name)) continue;
      out.push_back({"unused-import", n->span, "import '" + name + "' is never used"});
    }
  }
}

void bare_except(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::ExceptHandler, [&](const Node& h) {
    if (h.flag) out.push_back({"bare-except", h.span, "bare 'except:' catches every exception"});
  });
}

bool is_mutable_default(const Node& e) {
  switch (e.kind) {
    case NodeKind::Display:
      return e.name == "list" || e.name == "dict" || e.name == "set";
    case NodeKind::Comprehension:
      return e.name != "generator";
    case NodeKind::Call:
      return e.name == "list" || e.name == "dict" || e.name == "set";
    default:
      return false;
  }
}

void mutable_default(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::FunctionDef, [&](const Node& fn) {
    for (const auto& p : fn.params) {
      if (p.default_index >= 0 && is_mutable_default(fn.exprs.at(static_cast<std::size_t>(p.default_index)))) {
        out.push_back({"mutable-default-parameter", fn.span, "parameter '" + p.name + "' has a mutable default"});
      }
    }
  });
}

void too_many_parameters(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::FunctionDef, [&](const Node& fn) {
    int n = static_cast<int>(fn.params.size());
    if (!fn.params.empty() && (fn.params[0].name == "self" || fn.params[0].name == "cls")) --n;
    if (n > ctx.config.max_parameters) {
      out.push_back({"too-many-parameters", fn.span,
                     "function '" + fn.name + "' has " + std::to_string(n) + " parameters (limit " +
                         std::to_string(ctx.config.max_parameters) + ")"});
    }
  });
}

void identical_branches(const SmellContext& ctx, std::vector<Finding>& out) {
  for_each_node(ctx.tree.root, NodeKind::If, [&](const Node& n) {
    if (n.branches.empty() || n.branches.back().kind != NodeKind::Else || n.body.empty()) return;
    std::vector<std::string> first = token_texts(ctx.tokens, block_span(n.body));
    for (const auto& b : n.branches) {
      if (b.body.empty() || token_texts(ctx.tokens, block_span(b.body)) != first) return;
    }
    out.push_back({"identical-if-else-branches", n.span, "all branches of this 'if' are identical"});
  });
}

// Functions that are not nested in another function: top-level defs and
// methods of top-level classes.
void outer_functions(const std::vector<Node>& body, std::vector<const Node*>& out) {
  for (const auto& s : body) {
    if (s.kind == NodeKind::FunctionDef) {
      out.push_back(&s);
    } else {
      outer_functions(s.body, out);
      for (const auto& b : s.branches) outer_functions(b.body, out);
    }
  }
}

void function_too_complex(const SmellContext& ctx, std::vector<Finding>& out) {
  std::vector<const Node*> fns;
  outer_functions(ctx.tree.root.body, fns);
  for (const Node* fn : fns) {
    int cc = function_complexity(*fn).total;
    if (cc > ctx.config.max_complexity) {
      out.push_back({"function-too-complex", fn->span,
                     "function '" + fn->name + "' has cognitive complexity " + std::to_string(cc) + " (limit " +
                         std::to_string(ctx.config.max_complexity) + ")"});
    }
  }
}

bool is_jump(NodeKind k) {
  return k == NodeKind::Return || k == NodeKind::Raise || k == NodeKind::Break || k == NodeKind::Continue;
}

void check_block(const std::vector<Node>& body, std::vector<Finding>& out) {
  for (std::size_t i = 0; i + 1 < body.size(); ++i) {
    if (is_jump(body[i].kind)) {
      out.push_back({"unreachable-code-after-return", body[i + 1].span, "statement can never be reached"});
      break;
    }
  }
}

void unreachable_code(const SmellContext& ctx, std::vector<Finding>& out) {
  pysyntax::walk(ctx.tree.root, [&](const Node& n) {
    if (n.is_statement()) check_block(n.body, out);
    return true;
  });
}

const std::vector<SmellRule> kRegistry = {
    {"shadowed-builtin", Severity::Medium, "Builtins should not be shadowed by local variables", shadowed_builtin},
    {"empty-function", Severity::High, "Functions and methods should not be empty", empty_function},
    {"unused-local", Severity::Low, "Unused local variables should be removed", unused_local},
    {"unused-import", Severity::Low, "Unused imports should be removed", unused_import},
    {"bare-except", Severity::Medium, "Bare except clauses should name an exception type", bare_except},
    {"mutable-default-parameter", Severity::High, "Parameter defaults should not be mutable", mutable_default},
    {"too-many-parameters", Severity::Medium, "Functions should not have too many parameters", too_many_parameters},
    {"identical-if-else-branches", Severity::High, "Conditional branches should not all be identical",
     identical_branches},
    {"function-too-complex", Severity::High, "Cognitive complexity of functions should not be too high",
     function_too_complex},
    {"unreachable-code-after-return", Severity::High, "Code after a jump statement is unreachable",
     unreachable_code},
};

}  // namespace

const std::vector<SmellRule>& smell_registry() { return kRegistry; }

SmellConfig SmellConfig::from_json(const nlohmann::json& j) {
  SmellConfig c;
  if (!j.is_object()) throw ConfigError("smell config must be an object");
  auto read_limit = [&](const char* key, int& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<int>() < 0) {
      throw ConfigError(std::string("smell config '") + key + "' must be a non-negative integer");
    }
    field = j[key].get<int>();
  };
  read_limit("max_parameters", c.max_parameters);
  read_limit("max_complexity", c.max_complexity);
  if (j.contains("disabled")) {
    if (!j["disabled"].is_array()) throw ConfigError("smell config 'disabled' must be a list");
    for (const auto& id : j["disabled"]) {
      if (!id.is_string()) throw ConfigError("smell config 'disabled' entries must be strings");
      std::string s = id.get<std::string>();
      bool known = std::any_of(kRegistry.begin(), kRegistry.end(), [&](const SmellRule& r) { return r.id == s; });
      if (!known) throw ConfigError("unknown smell rule '" + s + "'");
      c.disabled.insert(s);
    }
  }
  return c;
}

SmellReport count_smells_with(const std::vector<SmellRule>& rules, const pysyntax::StructureTree& tree,
                              std::string_view source, const SmellConfig& config) {
  std::vector<Token> tokens;
  try {
    tokens = pysyntax::tokenize(source);
  } catch (const LexError&) {
  }
  SmellContext ctx{tree, tokens, python_builtins(), config};
  SmellReport report;
  for (const auto& rule : rules) {
    if (!config.disabled.count(rule.id)) rule.check(ctx, report.findings);
  }
  std::sort(report.findings.begin(), report.findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.span.start_line, a.span.start_col, a.span.end_line, a.span.end_col, a.rule_id, a.message) <
           std::tie(b.span.start_line, b.span.start_col, b.span.end_line, b.span.end_col, b.rule_id, b.message);
  });
  report.count = static_cast<int>(report.findings.size());
  return report;
}

SmellReport count_smells(const pysyntax::StructureTree& tree, std::string_view source, const SmellConfig& config) {
  return count_smells_with(smell_registry(), tree, source, config);
}

}  // namespace codebench::metrics
