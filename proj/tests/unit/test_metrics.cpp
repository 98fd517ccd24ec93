#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "codebench/common/errors.hpp"
#include "codebench/metrics/complexity.hpp"
#include "codebench/metrics/record.hpp"
#include "codebench/metrics/smells.hpp"
#include "codebench/pysyntax/tree.hpp"

using namespace codebench;
using namespace codebench::metrics;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CODEBENCH_FIXTURES;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cc(std::string_view src) { return cognitive_complexity(pysyntax::parse_source(src)).total; }

std::vector<std::string> rule_ids(std::string_view src, const SmellConfig& config = {}) {
  SmellReport r = count_smells(pysyntax::parse_source(src), src, config);
  std::vector<std::string> out;
  for (const auto& f : r.findings) out.push_back(f.rule_id);
  return out;
}

// Renames every identifier except builtins by prefixing it, rebuilding the
// source from token offsets.
std::string rename_identifiers(const std::string& src) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& t : pysyntax::tokenize(src)) {
    if (t.kind != pysyntax::TokenKind::Name || python_builtins().count(t.text) || t.text == "self") continue;
    out.append(src, cursor, t.offset - cursor);
    out += "zz_" + t.text;
    cursor = t.offset + t.text.size();
  }
  out.append(src, cursor, std::string::npos);
  return out;
}

// Inserts a comment line and a blank line before random physical lines that
// are not inside a bracket or string continuation.
std::string sprinkle_comments(const std::string& src, std::mt19937& rng) {
  std::vector<pysyntax::Token> toks = pysyntax::tokenize(src);
  std::set<int> starts;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i == 0 || toks[i - 1].kind == pysyntax::TokenKind::Newline) starts.insert(toks[i].line);
  }
  std::istringstream in(src);
  std::string line;
  std::string out;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (starts.count(n) && rng() % 2 == 0) out += (rng() % 2 ? "  # inserted\n" : "\n");
    out += line + "\n";
  }
  out += "# trailing\n";
  return out;
}

std::vector<fs::path> complexity_fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kFixtures / "complexity")) {
    if (e.path().extension() == ".py") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("cognitive_complexity") {
  TEST_CASE("straight line") { CHECK(cc("def f(a):\n    b = a + 1\n    return b\n") == 0); }

  TEST_CASE("nested condition inside a loop") { CHECK(cc("for x in xs:\n    if x:\n        y()\n") == 3); }

  TEST_CASE("three levels") { CHECK(cc("for x in xs:\n    if x:\n        if y:\n            z()\n") == 6); }

  TEST_CASE("boolean sequence in a top-level if") { CHECK(cc("if a and b and c:\n    go()\n") == 2); }

  TEST_CASE("operator alternation adds per run") {
    CHECK(cc("x = a and b\n") == 1);
    CHECK(cc("x = a and b or c\n") == 2);
    CHECK(cc("x = a or b and c or d\n") == 2);
    CHECK(cc("x = a and not b and c\n") == 1);
  }

  TEST_CASE("hand-scored fixture table") {
    nlohmann::json expected = nlohmann::json::parse(slurp(kFixtures / "complexity" / "expected.json"));
    auto files = complexity_fixtures();
    REQUIRE(files.size() == 20);
    REQUIRE(expected.size() == 20);
    for (const auto& p : files) {
      INFO(p.filename().string());
      CHECK(cc(slurp(p)) == expected.at(p.filename().string()).get<int>());
    }
  }

  TEST_CASE("total equals the sum of contributions") {
    for (const auto& p : complexity_fixtures()) {
      ComplexityScore s = cognitive_complexity(pysyntax::parse_source(slurp(p)));
      int sum = 0;
      for (const auto& c : s.contributions) {
        CHECK(c.base == 1);
        CHECK(c.nesting_penalty >= 0);
        sum += c.base + c.nesting_penalty;
      }
      CHECK(sum == s.total);
    }
  }

  TEST_CASE("contribution reasons") {
    ComplexityScore s = cognitive_complexity(pysyntax::parse_source("def f(n):\n    return f(n - 1) if n else 0\n"));
    REQUIRE(s.contributions.size() == 2);
    CHECK(s.contributions[0].reason == ComplexityReason::Recursion);
    CHECK(s.contributions[1].reason == ComplexityReason::Ternary);
    CHECK(s.contributions[1].nesting_penalty == 0);
  }

  TEST_CASE("recursion counts once and only in the defining scope") {
    CHECK(cc("def f(n):\n    f(1)\n    f(2)\n") == 1);
    CHECK(cc("def f(n):\n    def g():\n        f(1)\n    return g\n") == 0);
    CHECK(cc("def f(n):\n    return g(n)\n") == 0);
  }

  TEST_CASE("opaque statements keep their block score") {
    CHECK(cc("@cache\ndef f(x):\n    if x:\n        return 1\n") == 1);
    CHECK(cc("match v:\n    case 1:\n        pass\n") == 0);
  }

  TEST_CASE("invariant under comments, blank lines and renaming") {
    std::mt19937 rng(3);
    for (const auto& p : complexity_fixtures()) {
      std::string src = slurp(p);
      int base = cc(src);
      INFO(p.filename().string());
      for (int k = 0; k < 5; ++k) CHECK(cc(sprinkle_comments(src, rng)) == base);
      CHECK(cc(rename_identifiers(src)) == base);
    }
  }

  TEST_CASE("wrapping a flat block in an if adds one plus the nesting level") {
    std::mt19937 rng(5);
    const std::vector<std::string> flat = {"x = a and b", "y = f(x)", "return x or y", "z = [v for v in w]",
                                           "print(a, b)", "n += 1", "q = a or b and c"};
    for (int trial = 0; trial < 200; ++trial) {
      int depth = static_cast<int>(rng() % 4);
      std::string prefix;
      std::string indent;
      for (int d = 0; d < depth; ++d) {
        prefix += indent + "for i" + std::to_string(d) + " in r:\n";
        indent += "    ";
      }
      std::vector<std::string> block;
      int len = 1 + static_cast<int>(rng() % 4);
      for (int k = 0; k < len; ++k) block.push_back(flat[rng() % flat.size()]);
      const std::string fn_indent = "    ";
      std::string plain = "def f(a, b, c, w, r):\n";
      std::istringstream in(prefix);
      for (std::string l; std::getline(in, l);) plain += fn_indent + l + "\n";
      std::string wrapped = plain;
      wrapped += fn_indent + indent + "if cond:\n";
      for (const auto& s : block) {
        plain += fn_indent + indent + s + "\n";
        wrapped += fn_indent + indent + "    " + s + "\n";
      }
      INFO(wrapped);
      CHECK(cc(wrapped) - cc(plain) == 1 + depth);
    }
  }

  TEST_CASE("function_complexity scores one function") {
    pysyntax::StructureTree t = pysyntax::parse_source("def a(x):\n    if x:\n        pass\ndef b(y):\n    while y:\n        pass\n");
    CHECK(function_complexity(t.root.body.at(0)).total == 1);
    CHECK(function_complexity(t.root.body.at(1)).total == 1);
  }
}

TEST_SUITE("count_smells") {
  TEST_CASE("empty function") { CHECK(rule_ids("def f():\n    pass") == std::vector<std::string>{"empty-function"}); }

  TEST_CASE("shadowed builtin parameter") {
    SmellReport r = count_smells(pysyntax::parse_source("def f(list):\n    return list"), "def f(list):\n    return list");
    REQUIRE(r.count == 1);
    CHECK(r.findings[0].rule_id == "shadowed-builtin");
    CHECK(r.findings[0].message.find("'list'") != std::string::npos);
  }

  TEST_CASE("clean snippet") { CHECK(rule_ids("def f(x):\n    return x + 1").empty()); }

  TEST_CASE("commented pass is not empty") { CHECK(rule_ids("def f():\n    pass  # later\n").empty()); }

  TEST_CASE("shadowed builtin local, once per name") {
    CHECK(rule_ids("def f(a):\n    max = a\n    max = a + 1\n    return max\n") ==
          std::vector<std::string>{"shadowed-builtin"});
    CHECK(rule_ids("list = [1]\nprint(list)\n").empty());
    CHECK(rule_ids("def f(xs):\n    for id in xs:\n        print(id)\n") == std::vector<std::string>{"shadowed-builtin"});
  }

  TEST_CASE("unused local") {
    CHECK(rule_ids("def f(a):\n    b = a\n    return a\n") == std::vector<std::string>{"unused-local"});
    CHECK(rule_ids("def f(a):\n    b = a\n    return b\n").empty());
    CHECK(rule_ids("def f(a):\n    _tmp = a\n    return a\n").empty());
    CHECK(rule_ids("def f(a):\n    b = 0\n    b += a\n    return a\n").empty());
    CHECK(rule_ids("def f(a):\n    b = a\n    def g():\n        return b\n    return g\n").empty());
    CHECK(rule_ids("def f(a):\n    global b\n    b = a\n").empty());
    CHECK(rule_ids("x = 1\n").empty());
  }

  TEST_CASE("unused import") {
    CHECK(rule_ids("import os\nimport sys\nprint(sys.argv)\n") == std::vector<std::string>{"unused-import"});
    CHECK(rule_ids("from typing import List, Dict\ndef f(x: List[int]):\n    return x\n") ==
          std::vector<std::string>{"unused-import"});
    CHECK(rule_ids("from __future__ import annotations\nfrom math import *\n").empty());
    CHECK(rule_ids("import numpy as np\nnp.zeros(3)\n").empty());
  }

  TEST_CASE("bare except") {
    CHECK(rule_ids("try:\n    a()\nexcept:\n    b()\n") == std::vector<std::string>{"bare-except"});
    CHECK(rule_ids("try:\n    a()\nexcept Exception:\n    b()\n").empty());
  }

  TEST_CASE("mutable default parameter") {
    CHECK(rule_ids("def f(a=[]):\n    return a\n") == std::vector<std::string>{"mutable-default-parameter"});
    CHECK(rule_ids("def f(a={}):\n    return a\n") == std::vector<std::string>{"mutable-default-parameter"});
    CHECK(rule_ids("def f(a=set()):\n    return a\n") == std::vector<std::string>{"mutable-default-parameter"});
    CHECK(rule_ids("def f(a=[x for x in y]):\n    return a\n") ==
          std::vector<std::string>{"mutable-default-parameter"});
    CHECK(rule_ids("def f(a=(), b=None, c=0):\n    return a, b, c\n").empty());
  }

  TEST_CASE("too many parameters honours self and the configured limit") {
    std::string eight = "def f(a, b, c, d, e, g, h, i):\n    return a, b, c, d, e, g, h, i\n";
    std::string method = "class K:\n    def m(self, a, b, c, d, e, g, h):\n        return a, b, c, d, e, g, h\n";
    CHECK(rule_ids(eight) == std::vector<std::string>{"too-many-parameters"});
    CHECK(rule_ids(method).empty());
    SmellConfig strict;
    strict.max_parameters = 3;
    CHECK(rule_ids(method, strict) == std::vector<std::string>{"too-many-parameters"});
  }

  TEST_CASE("identical branches") {
    CHECK(rule_ids("if a:\n    x(1)\nelse:\n    x(1)\n") == std::vector<std::string>{"identical-if-else-branches"});
    CHECK(rule_ids("if a:\n    x(1)\nelif b:\n    x(1)\nelse:\n    x(1)\n") ==
          std::vector<std::string>{"identical-if-else-branches"});
    CHECK(rule_ids("if a:\n    x(1)\nelse:\n    x(2)\n").empty());
    CHECK(rule_ids("if a:\n    x(1)\n").empty());
  }

  TEST_CASE("function too complex") {
    std::string src = "def f(a):\n";
    std::string indent = "    ";
    for (int i = 0; i < 5; ++i) {
      src += indent + "if a:\n";
      indent += "    ";
    }
    src += indent + "pass  # deep\n";
    // 1 + 2 + 3 + 4 + 5 = 15 is at the limit.
    CHECK(rule_ids(src).empty());
    src = "def f(a):\n    if a and b:\n" + src.substr(src.find('\n') + 1);
    CHECK(rule_ids(src) == std::vector<std::string>{"function-too-complex"});
  }

  TEST_CASE("unreachable code reported once per block") {
    CHECK(rule_ids("def f():\n    return 1\n    x()\n    y()\n") ==
          std::vector<std::string>{"unreachable-code-after-return"});
    CHECK(rule_ids("for i in r:\n    break\n    p()\n") == std::vector<std::string>{"unreachable-code-after-return"});
    CHECK(rule_ids("def f(a):\n    if a:\n        return 1\n    return 2\n").empty());
  }

  TEST_CASE("disabled rules are skipped and unknown ids rejected") {
    SmellConfig c = SmellConfig::from_json(nlohmann::json::parse(R"({"disabled": ["empty-function"]})"));
    CHECK(rule_ids("def f():\n    pass", c).empty());
    CHECK_THROWS_AS(SmellConfig::from_json(nlohmann::json::parse(R"({"disabled": ["nope"]})")), ConfigError);
    CHECK_THROWS_AS(SmellConfig::from_json(nlohmann::json::parse(R"({"max_complexity": -1})")), ConfigError);
  }

  TEST_CASE("registry holds ten distinct rules and every finding is registered") {
    const auto& reg = smell_registry();
    std::set<std::string> ids;
    for (const auto& r : reg) ids.insert(r.id);
    CHECK(ids.size() == 10);
    std::string src =
        "import os\n"
        "def f(list, a=[]):\n"
        "    unused = 1\n"
        "    try:\n"
        "        return list\n"
        "        print(a)\n"
        "    except:\n"
        "        pass\n"
        "def g():\n"
        "    pass\n";
    SmellReport r = count_smells(pysyntax::parse_source(src), src);
    CHECK(r.count == static_cast<int>(r.findings.size()));
    CHECK(r.count == 7);
    for (const auto& f : r.findings) CHECK(ids.count(f.rule_id));
  }

  TEST_CASE("findings are independent of registration order") {
    std::string src =
        "import os\n"
        "def f(list, a=[]):\n"
        "    unused = 1\n"
        "    if a:\n"
        "        return 1\n"
        "    else:\n"
        "        return 1\n"
        "    try:\n"
        "        pass\n"
        "    except:\n"
        "        pass\n";
    pysyntax::StructureTree tree = pysyntax::parse_source(src);
    SmellReport reference = count_smells(tree, src);
    std::vector<SmellRule> rules = smell_registry();
    std::mt19937 rng(9);
    for (int i = 0; i < 20; ++i) {
      std::shuffle(rules.begin(), rules.end(), rng);
      CHECK(count_smells_with(rules, tree, src).findings == reference.findings);
    }
    for (std::size_t i = 1; i < reference.findings.size(); ++i) {
      const auto& a = reference.findings[i - 1].span;
      const auto& b = reference.findings[i].span;
      CHECK(std::tie(a.start_line, a.start_col) <= std::tie(b.start_line, b.start_col));
    }
  }
}

TEST_SUITE("line_counts") {
  TEST_CASE("five lines with one blank and one comment") {
    CHECK(line_counts("x = 1\n\n# note\ny = 2\nz = 3\n") == LineCounts{5, 3});
  }

  TEST_CASE("empty source") { CHECK(line_counts("") == LineCounts{0, 0}); }

  TEST_CASE("excluded lines are not code") { CHECK(line_counts("import a\nx = a\n", {1}) == LineCounts{2, 1}); }

  TEST_CASE("fixture set matches the independent oracle") {
    nlohmann::json expected = nlohmann::json::parse(slurp(kFixtures / "lines" / "expected.json"));
    int sloc = 0;
    int ncloc = 0;
    for (auto& [name, counts] : expected["files"].items()) {
      LineCounts c = line_counts(slurp(kFixtures / "lines" / name));
      INFO(name);
      CHECK(c.sloc == counts["sloc"].get<int>());
      CHECK(c.ncloc == counts["ncloc"].get<int>());
      CHECK(c.ncloc <= c.sloc);
      sloc += c.sloc;
      ncloc += c.ncloc;
    }
    CHECK(expected["files"].size() == 20);
    CHECK(sloc == expected["total"]["sloc"].get<int>());
    CHECK(ncloc == expected["total"]["ncloc"].get<int>());
  }
}

TEST_SUITE("per_kloc") {
  TEST_CASE("smells per kLOC of the generated corpus") { CHECK(per_kloc(2906, 35029) == doctest::Approx(82.96).epsilon(0.0001)); }

  TEST_CASE("complexity per kLOC of the generated corpus") {
    CHECK(per_kloc(15774, 35029) == doctest::Approx(450.31).epsilon(0.00002));
  }

  TEST_CASE("zero count") { CHECK(per_kloc(0, 17) == 0.0); }

  TEST_CASE("zero lines") { CHECK_THROWS_AS(per_kloc(3, 0), ZeroLines); }

  TEST_CASE("linearity") {
    std::mt19937 rng(1);
    for (int i = 0; i < 500; ++i) {
      long long a = rng() % 10000;
      long long b = rng() % 10000;
      long long n = 1 + rng() % 100000;
      CHECK(per_kloc(a + b, n) == doctest::Approx(per_kloc(a, n) + per_kloc(b, n)));
    }
  }
}

TEST_SUITE("measure") {
  TEST_CASE("fills static fields and round-trips through JSON") {
    MeasureOptions opt;
    opt.excluded_lines = {1};
    MetricRecord r = measure("gen:two-sum", "two-sum", Origin::Generated,
                             "from typing import List\ndef f(x: List[int]):\n    if x:\n        return 1\n", opt);
    CHECK(r.lines == LineCounts{4, 3});
    CHECK(r.complexity_total == 1);
    CHECK(r.smell_count == 0);
    REQUIRE(r.complexity_per_kloc);
    CHECK(*r.complexity_per_kloc == doctest::Approx(1000.0 / 3));
    nlohmann::json j = r;
    MetricRecord back = j.get<MetricRecord>();
    CHECK(back.solution_id == r.solution_id);
    CHECK(back.lines == r.lines);
    CHECK(back.complexity_per_kloc == r.complexity_per_kloc);
    CHECK_FALSE(back.runtime_rank);
  }

  TEST_CASE("comment-only source has no per-kLOC values") {
    MetricRecord r = measure("user:1", "p", Origin::User, "# nothing\n");
    CHECK_FALSE(r.smells_per_kloc);
    CHECK_FALSE(r.complexity_per_kloc);
    nlohmann::json j = r;
    CHECK_FALSE(j.contains("smells_per_kloc"));
  }
}
