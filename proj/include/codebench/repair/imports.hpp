#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/pysyntax/tree.hpp"

namespace codebench::imports {

struct ImportMapping {
  std::map<std::string, std::string> entries;  // bare name -> import statement
  std::set<std::string> provided;              // names the judge harness defines

  std::size_t size() const { return entries.size(); }

  // Throws ConfigError when a statement does not parse as a single import
  // that binds its name.
  static ImportMapping from_json(const nlohmann::json& j);
  static const ImportMapping& defaults();
};

// Names referenced but never bound. Bindings come from assignments,
// parameters, def and class names, imports, loop, with and comprehension
// targets, except aliases, walrus targets, global/nonlocal declarations and
// the builtin table. Scopes are lexical: module, class and function, where
// class bodies are not visible from nested functions and binding order is
// ignored. Opaque statements are skipped, except decorator lines, which are
// scanned for names when `tokens` is given.
std::set<std::string> find_undefined(const pysyntax::StructureTree& tree,
                                     const std::vector<pysyntax::Token>* tokens = nullptr);

std::set<std::string> find_undefined(std::string_view source);

struct RepairResult {
  std::string text;
  std::vector<std::string> inserted;  // statements, in inserted order
  int first_inserted_line = 0;        // 1-based, 0 when nothing was inserted

  // 1-based line numbers of the inserted statements in `text`.
  std::set<int> inserted_lines() const;
};

// Inserts one import per line for every undefined name, sorted and
// deduplicated, directly above the first top-level def or class (above its
// decorators). Without a top-level definition the imports go above the
// first statement, after any __future__ imports. A source without undefined
// names is returned unchanged. Throws UnresolvedName listing the undefined
// names that have no mapping entry; propagates LexError.
RepairResult repair_detailed(std::string_view source, const ImportMapping& mapping = ImportMapping::defaults());

std::string repair(std::string_view source, const ImportMapping& mapping = ImportMapping::defaults());

}  // namespace codebench::imports
