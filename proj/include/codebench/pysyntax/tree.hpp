#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "codebench/pysyntax/token.hpp"

namespace codebench::pysyntax {

enum class NodeKind {
  // statements
  Module,
  FunctionDef,
  ClassDef,
  If,
  Elif,
  Else,
  For,
  While,
  Try,
  ExceptHandler,
  Finally,
  With,
  Return,
  Raise,
  Assign,
  Import,
  ExpressionStmt,
  Pass,
  Break,
  Continue,
  OpaqueLine,
  // expressions
  Name,
  Attribute,
  Subscript,
  Call,
  Keyword,
  BoolSequence,
  Conditional,
  Lambda,
  Comprehension,
  ComprehensionFor,
  ComprehensionIf,
  Compare,
  BinaryOp,
  UnaryOp,
  Display,
  Literal,
  Starred,
  Slice,
  NamedExpr,
  Yield,
  Await,
};

std::string_view to_string(NodeKind kind);

struct Span {
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;  // exclusive

  bool contains(const Span& other) const;
  bool operator==(const Span&) const = default;
};

struct Param {
  enum class Kind { Positional, VarArgs, KwOnly, KwArgs };
  std::string name;
  Kind kind = Kind::Positional;
  int default_index = -1;     // index into the owning node's `exprs`, or -1
  int annotation_index = -1;  // index into the owning node's `exprs`, or -1
};

// One node of the structure tree. Field usage by kind:
//   name    FunctionDef/ClassDef name, Call callee ("self.dfs" for attribute
//           callees, empty when not a plain dotted name), Name identifier,
//           Attribute member, BoolSequence operator, Assign operator ("=",
//           "+=", ":"), Import module, Keyword argument name, Display kind
//           ("list", "tuple", "set", "dict"), ExceptHandler alias,
//           ExpressionStmt flavour ("", "del", "assert"), operator text for
//           BinaryOp/UnaryOp/Compare.
//   names   Assign bound targets, Import bound names, For/With/Comprehension
//           targets.
//   flag    If: has_elif_chain. ExceptHandler: is_bare. Name: store context.
//   length  BoolSequence operand count.
//   exprs   header expressions (tests, targets, defaults, call arguments).
//   body    nested statements of a block.
//   branches  Elif/Else/ExceptHandler/Finally clauses attached to a compound.
struct Node {
  NodeKind kind = NodeKind::OpaqueLine;
  Span span;
  std::string name;
  std::vector<std::string> names;
  std::vector<Param> params;
  bool flag = false;
  int length = 0;
  std::vector<Node> exprs;
  std::vector<Node> body;
  std::vector<Node> branches;

  bool is_statement() const;
};

struct StructureTree {
  Node root;
  std::vector<Token> comments;
  int line_count = 0;  // physical lines in the normalized source
};

// Pre-order traversal over exprs, body and branches (in that order). Return
// false from `fn` to skip a node's children.
void walk(const Node& node, const std::function<bool(const Node&)>& fn);

// Tolerant parse. Statements outside the recognized grammar subset become
// OpaqueLine nodes spanning the statement; never throws on a token stream
// produced by `tokenize`.
StructureTree parse(const std::vector<Token>& tokens);

// tokenize + parse. Propagates LexError.
StructureTree parse_source(std::string_view source);

// Stable, documented s-expression rendering used by `parse --dump-tree`.
std::string dump_tree(const Node& node);

}  // namespace codebench::pysyntax
