#pragma once

#include <string_view>
#include <vector>

#include "codebench/pysyntax/tree.hpp"

namespace codebench::metrics {

enum class ComplexityReason { If, Elif, Else, Loop, Except, Ternary, ComprehensionGuard, BoolSequence, Recursion };

std::string_view to_string(ComplexityReason reason);

struct Contribution {
  pysyntax::Span span;
  int base = 1;
  int nesting_penalty = 0;
  ComplexityReason reason = ComplexityReason::If;
};

struct ComplexityScore {
  int total = 0;
  std::vector<Contribution> contributions;  // in tree pre-order
};

// Scores a whole module according to docs/complexity_rules.md.
ComplexityScore cognitive_complexity(const pysyntax::StructureTree& tree);

// Scores a single FunctionDef as if it were top level (used by the
// function-too-complex smell).
ComplexityScore function_complexity(const pysyntax::Node& function_def);

}  // namespace codebench::metrics
