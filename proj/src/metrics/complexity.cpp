#include "codebench/metrics/complexity.hpp"

#include <string>

namespace codebench::metrics {

using pysyntax::Node;
using pysyntax::NodeKind;

std::string_view to_string(ComplexityReason reason) {
  switch (reason) {
    case ComplexityReason::If: return "if";
    case ComplexityReason::Elif: return "elif";
    case ComplexityReason::Else: return "else";
    case ComplexityReason::Loop: return "loop";
    case ComplexityReason::Except: return "except";
    case ComplexityReason::Ternary: return "ternary";
    case ComplexityReason::ComprehensionGuard: return "comprehension-guard";
    case ComplexityReason::BoolSequence: return "boolean-sequence";
    case ComplexityReason::Recursion: return "recursion";
  }
  return "?";
}

namespace {

class Scorer {
 public:
  ComplexityScore result;

  void statements(const std::vector<Node>& body, int nesting, bool in_function) {
    for (const auto& s : body) statement(s, nesting, in_function);
  }

  void function(const Node& fn, int nesting, bool nested) {
    exprs(fn.exprs, nesting);
    if (calls_itself(fn)) add(fn, 0, ComplexityReason::Recursion);
    statements(fn.body, nested ? nesting + 1 : nesting, true);
  }

 private:
  void add(const Node& n, int penalty, ComplexityReason reason) {
    result.contributions.push_back(Contribution{n.span, 1, penalty, reason});
    result.total += 1 + penalty;
  }

  void statement(const Node& n, int nesting, bool in_function) {
    switch (n.kind) {
      case NodeKind::FunctionDef:
        function(n, nesting, in_function);
        return;
      case NodeKind::ClassDef:
        exprs(n.exprs, nesting);
        statements(n.body, nesting, in_function);
        return;
      case NodeKind::If:
        add(n, nesting, ComplexityReason::If);
        exprs(n.exprs, nesting);
        statements(n.body, nesting + 1, in_function);
        break;
      case NodeKind::For:
      case NodeKind::While:
        add(n, nesting, ComplexityReason::Loop);
        exprs(n.exprs, nesting);
        statements(n.body, nesting + 1, in_function);
        break;
      default:
        exprs(n.exprs, nesting);
        statements(n.body, nesting, in_function);
        break;
    }
    for (const auto& b : n.branches) {
      switch (b.kind) {
        case NodeKind::Elif:
          add(b, 0, ComplexityReason::Elif);
          exprs(b.exprs, nesting);
          statements(b.body, nesting + 1, in_function);
          break;
        case NodeKind::Else:
          add(b, 0, ComplexityReason::Else);
          statements(b.body, nesting + 1, in_function);
          break;
        case NodeKind::ExceptHandler:
          add(b, nesting, ComplexityReason::Except);
          exprs(b.exprs, nesting);
          statements(b.body, nesting + 1, in_function);
          break;
        default:
          exprs(b.exprs, nesting);
          statements(b.body, nesting, in_function);
          break;
      }
    }
  }

  void exprs(const std::vector<Node>& list, int nesting) {
    for (const auto& e : list) expr(e, nesting);
  }

  void expr(const Node& e, int nesting) {
    switch (e.kind) {
      case NodeKind::BoolSequence:
        add(e, 0, ComplexityReason::BoolSequence);
        exprs(e.exprs, nesting);
        return;
      case NodeKind::Conditional:
        add(e, nesting, ComplexityReason::Ternary);
        exprs(e.exprs, nesting + 1);
        return;
      case NodeKind::ComprehensionIf:
        add(e, nesting, ComplexityReason::ComprehensionGuard);
        exprs(e.exprs, nesting + 1);
        return;
      case NodeKind::Lambda:
        exprs(e.exprs, nesting + 1);
        return;
      default:
        exprs(e.exprs, nesting);
        return;
    }
  }

  // Looks for a call to `fn` in its own scope; nested defs are skipped since
  // their calls belong to the inner function.
  static bool calls_itself(const Node& fn) {
    const std::string self_name = "self." + fn.name;
    const std::string cls_name = "cls." + fn.name;
    bool found = false;
    auto visit = [&](const Node& n) {
      if (found) return false;
      if (n.kind == NodeKind::Call && (n.name == fn.name || n.name == self_name || n.name == cls_name)) {
        found = true;
        return false;
      }
      return n.kind != NodeKind::FunctionDef && n.kind != NodeKind::ClassDef;
    };
    for (const auto& s : fn.body) pysyntax::walk(s, visit);
    return found;
  }
};

}  // namespace

ComplexityScore cognitive_complexity(const pysyntax::StructureTree& tree) {
  Scorer s;
  s.statements(tree.root.body, 0, false);
  return std::move(s.result);
}

ComplexityScore function_complexity(const Node& function_def) {
  Scorer s;
  s.function(function_def, 0, false);
  return std::move(s.result);
}

}  // namespace codebench::metrics
