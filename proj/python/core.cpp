#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/common/errors.hpp"
#include "codebench/corpus/corpus.hpp"
#include "codebench/lang/detect.hpp"
#include "codebench/metrics/complexity.hpp"
#include "codebench/metrics/record.hpp"
#include "codebench/metrics/smells.hpp"
#include "codebench/pipeline/pipeline.hpp"
#include "codebench/pipeline/report.hpp"
#include "codebench/pysyntax/tree.hpp"
#include "codebench/repair/imports.hpp"
#include "codebench/stats/battery.hpp"
#include "codebench/stats/tests.hpp"

namespace py = pybind11;
using namespace codebench;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

stats::Computation computation(const std::string& s) {
  if (s == "auto") return stats::Computation::Auto;
  if (s == "exact") return stats::Computation::Exact;
  if (s == "approximate") return stats::Computation::Approximate;
  throw InvalidArgument("unknown computation: " + s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Static metrics, import repair, statistics and the study pipeline";

  auto& base = py::register_exception<Error>(m, "CodebenchError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<LexError>(m, "LexError", base.ptr());
  py::register_exception<UnresolvedName>(m, "UnresolvedName", base.ptr());
  py::register_exception<StageFailure>(m, "StageFailure", base.ptr());

  m.def(
      "dump_tree", [](const std::string& source) { return pysyntax::dump_tree(pysyntax::parse_source(source).root); },
      py::arg("source"), "S-expression rendering of the structure tree.");

  m.def(
      "cognitive_complexity",
      [](const std::string& source) { return metrics::cognitive_complexity(pysyntax::parse_source(source)).total; },
      py::arg("source"));

  m.def(
      "line_counts",
      [](const std::string& source) {
        auto c = metrics::line_counts(source);
        return py::dict(py::arg("sloc") = c.sloc, py::arg("ncloc") = c.ncloc);
      },
      py::arg("source"));

  m.def(
      "smells",
      [](const std::string& source) {
        auto report = metrics::count_smells(pysyntax::parse_source(source), source);
        py::list out;
        for (const auto& f : report.findings) {
          out.append(py::dict(py::arg("rule_id") = f.rule_id, py::arg("line") = f.span.start_line,
                              py::arg("message") = f.message));
        }
        return out;
      },
      py::arg("source"), "Code smell findings ordered by position.");

  m.def(
      "measure",
      [](const std::string& source, const std::string& solution_id, const std::string& problem_slug,
         const std::string& origin) {
        nlohmann::json j = metrics::measure(solution_id, problem_slug, metrics::origin_from_string(origin), source);
        return to_python(j);
      },
      py::arg("source"), py::arg("solution_id") = "", py::arg("problem_slug") = "", py::arg("origin") = "generated");

  m.def("per_kloc", &metrics::per_kloc, py::arg("count"), py::arg("ncloc"));

  m.def(
      "find_undefined", [](const std::string& source) { return imports::find_undefined(source); }, py::arg("source"));

  m.def(
      "repair_imports", [](const std::string& source) { return imports::repair(source); }, py::arg("source"),
      "Inserts the imports for undefined names above the first definition.");

  m.def(
      "detect_language",
      [](const std::string& code, std::optional<std::string> hint, const std::string& title,
         const std::vector<std::string>& tags) {
        corpus::Snippet s;
        s.raw_text = code;
        s.fence_language_hint = std::move(hint);
        corpus::Post p;
        p.title = title;
        p.tags = tags;
        auto r = lang::LanguageDetector::default_instance().detect(s, p);
        return py::dict(py::arg("language") = r.language, py::arg("source") = lang::to_string(r.source),
                        py::arg("score") = r.score, py::arg("runner_up_score") = r.runner_up_score);
      },
      py::arg("code"), py::arg("hint") = py::none(), py::arg("title") = "",
      py::arg("tags") = std::vector<std::string>{});

  m.def(
      "extract_code_blocks",
      [](const std::string& body, int min_lines) {
        auto ex = corpus::extract_code_blocks(0, body, min_lines);
        nlohmann::json snippets = ex.snippets;
        return py::dict(py::arg("flagged") = ex.flagged, py::arg("fences_consumed") = ex.fences_consumed,
                        py::arg("snippets") = to_python(snippets));
      },
      py::arg("body"), py::arg("min_lines") = 3);

  m.def(
      "mann_whitney_u",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& alternative,
         const std::string& how) {
        nlohmann::json j = stats::mann_whitney_u(a, b, stats::alternative_from_string(alternative), computation(how));
        return to_python(j);
      },
      py::arg("a"), py::arg("b"), py::arg("alternative") = "two-sided", py::arg("computation") = "auto");

  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& sample, double mu0, const std::string& alternative, const std::string& how) {
        nlohmann::json j =
            stats::wilcoxon_signed_rank(sample, mu0, stats::alternative_from_string(alternative), computation(how));
        return to_python(j);
      },
      py::arg("sample"), py::arg("mu0") = 50.0, py::arg("alternative") = "two-sided",
      py::arg("computation") = "auto");

  m.def(
      "spearman_rho",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& alternative,
         const std::string& how) {
        nlohmann::json j = stats::spearman_rho(x, y, stats::alternative_from_string(alternative), computation(how));
        return to_python(j);
      },
      py::arg("x"), py::arg("y"), py::arg("alternative") = "two-sided", py::arg("computation") = "auto");

  m.def("bonferroni", &stats::bonferroni, py::arg("alpha"), py::arg("hypotheses"));
  m.def("rate", &pipeline::rate, py::arg("part"), py::arg("whole"), "Percentage rounded to two decimals.");

  m.def(
      "run_all",
      [](const std::string& config, std::optional<std::string> work_dir, std::optional<std::string> report_dir,
         std::optional<int> workers) {
        auto cfg = pipeline::PipelineConfig::load(config);
        if (work_dir) cfg.work_dir = *work_dir;
        if (report_dir) cfg.report_dir = *report_dir;
        if (workers) cfg.workers = *workers;
        cfg.validate();
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          pipeline::PipelineOptions opts;
          opts.log = [](std::string_view) {};
          pipeline::Pipeline p(cfg, opts);
          j = pipeline::to_json(p.run_all());
        }
        return to_python(j);
      },
      py::arg("config"), py::arg("work_dir") = py::none(), py::arg("report_dir") = py::none(),
      py::arg("workers") = py::none(), "Runs every stage and returns the report.");
}
