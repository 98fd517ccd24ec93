#include <CLI11.hpp>

#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "codebench/common/errors.hpp"
#include "codebench/common/jsonl.hpp"
#include "codebench/lang/detect.hpp"
#include "codebench/metrics/record.hpp"
#include "codebench/pipeline/pipeline.hpp"
#include "codebench/pysyntax/tree.hpp"
#include "codebench/repair/imports.hpp"

namespace {

using namespace codebench;

constexpr int kExitFailure = 1;
constexpr int kExitStage = 2;
constexpr int kExitConfig = 3;

struct StageArgs {
  std::string config;
  std::optional<std::string> problems;
  std::optional<std::string> posts;
  std::optional<int> min_upvotes;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  bool count_inserted = false;
  bool quiet = false;
};

void add_stage_options(CLI::App* cmd, StageArgs& args) {
  cmd->add_option("-c,--config", args.config, "pipeline config file");
  cmd->add_option("--problems", args.problems, "problem dump (overrides the config)");
  cmd->add_option("--posts", args.posts, "post dump (overrides the config)");
  cmd->add_option("--min-upvotes", args.min_upvotes, "override the post upvote threshold");
  cmd->add_option("-w,--workers", args.workers, "override the worker count");
  cmd->add_option("--seed", args.seed, "override the seed");
  cmd->add_flag("--count-inserted", args.count_inserted, "keep repaired import lines in user line counts");
  cmd->add_flag("-q,--quiet", args.quiet, "suppress progress lines");
}

// Without --config both dumps must be given; other settings keep their
// defaults and paths resolve against the working directory.
pipeline::Pipeline make_pipeline(const StageArgs& args) {
  pipeline::PipelineConfig cfg;
  if (!args.config.empty()) {
    cfg = pipeline::PipelineConfig::load(args.config);
  } else if (!args.problems || !args.posts) {
    throw ConfigError("--config, or both --problems and --posts, is required");
  }
  if (args.problems) cfg.problems_dump = *args.problems;
  if (args.posts) cfg.posts_dump = *args.posts;
  if (args.min_upvotes) cfg.min_upvotes = *args.min_upvotes;
  if (args.workers) cfg.workers = *args.workers;
  if (args.seed) cfg.seed = *args.seed;
  if (args.count_inserted) cfg.count_inserted = true;
  pipeline::PipelineOptions opts;
  if (!args.quiet) opts.log = [](std::string_view line) { std::cerr << line << '\n'; };
  return pipeline::Pipeline(std::move(cfg), std::move(opts));
}

void print_summary(const pipeline::ReportBundle& b, const pipeline::PipelineConfig& cfg) {
  const auto& p = b.partition;
  std::cout << "problems: " << p.overall.total << ", solved by generation: " << p.overall.solved << " ("
            << p.overall.solved_rate << "%)\n";
  std::cout << "user solutions: " << (b.sample_counts.size() > 1 ? b.sample_counts[1].valid : 0) << "\n";
  for (const auto& h : b.hypothesis_table)
    std::cout << h.hypothesis << ": " << (h.accepted ? "accepted" : "rejected") << (h.note.empty() ? "" : " (" + h.note + ")")
              << "\n";
  std::cout << "report written to " << cfg.report_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codebench: benchmark generated solutions against user solutions"};
  app.require_subcommand(1);

  StageArgs stage_args;
  std::vector<std::pair<CLI::App*, pipeline::Stage>> stage_cmds;
  const std::pair<pipeline::Stage, const char*> stages[] = {
      {pipeline::Stage::Import, "import the problem and post dumps"},
      {pipeline::Stage::Extract, "extract code blocks from posts"},
      {pipeline::Stage::Detect, "detect the language of each code block"},
      {pipeline::Stage::Repair, "insert missing imports into subject-language blocks"},
      {pipeline::Stage::Judge, "judge the repaired user solutions"},
      {pipeline::Stage::Generate, "run the generation loop for every problem"},
      {pipeline::Stage::Analyze, "compute metrics and ranks"},
      {pipeline::Stage::Stats, "run the hypothesis tests"},
      {pipeline::Stage::Report, "write the report tables"},
  };
  std::string file, out_file;
  for (const auto& [stage, help] : stages) {
    auto* cmd = app.add_subcommand(pipeline::to_string(stage), help);
    add_stage_options(cmd, stage_args);
    stage_cmds.emplace_back(cmd, stage);
    if (stage == pipeline::Stage::Detect) {
      cmd->add_option("--snippet", file, "score one file instead of running the stage")->check(CLI::ExistingFile);
    } else if (stage == pipeline::Stage::Repair) {
      cmd->add_option("--in", file, "repair one file instead of running the stage")->check(CLI::ExistingFile);
      cmd->add_option("--out", out_file, "where --in writes the repaired source (default: stdout)");
    }
  }
  auto* run_all = app.add_subcommand("run-all", "run every stage and write the report");
  add_stage_options(run_all, stage_args);

  std::string token;
  auto* resume = app.add_subcommand("resume", "continue a failed run from its resume token");
  add_stage_options(resume, stage_args);
  resume->add_option("token", token, "token printed by the failed stage")->required();

  bool dump_tree = false;
  auto* parse = app.add_subcommand("parse", "tokenize and parse a Python file");
  parse->add_option("file", file)->required()->check(CLI::ExistingFile);
  parse->add_flag("--dump-tree", dump_tree, "print the structure tree");

  auto* measure = app.add_subcommand("metrics", "print the static metrics of a Python file");
  measure->add_option("file", file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [cmd, stage] : stage_cmds) {
      if (!cmd->parsed()) continue;
      if (!file.empty()) {
        std::string source = jsonl::read_file(file);
        if (stage == pipeline::Stage::Detect) {
          const auto& det = lang::LanguageDetector::default_instance();
          auto d = det.detect_lexical(source);
          nlohmann::json j{{"language", d.language},
                           {"score", d.score},
                           {"runner_up_score", d.runner_up_score},
                           {"scores", det.score_all(source)}};
          std::cout << j.dump(2) << "\n";
        } else if (out_file.empty()) {
          std::cout << imports::repair(source);
        } else {
          jsonl::write_file(out_file, imports::repair(source));
        }
        return 0;
      }
      auto p = make_pipeline(stage_args);
      p.run(stage);
      std::cout << p.output(stage).string() << "\n";
      return 0;
    }
    if (run_all->parsed() || resume->parsed()) {
      auto p = make_pipeline(stage_args);
      if (resume->parsed()) p.check_resume_token(token);
      print_summary(p.run_all(), p.config());
      return 0;
    }
    std::string source = jsonl::read_file(file);
    if (parse->parsed()) {
      auto tree = pysyntax::parse_source(source);
      if (dump_tree) {
        std::cout << pysyntax::dump_tree(tree.root);
      } else {
        std::cout << "ok: " << tree.line_count << " lines\n";
      }
    } else if (measure->parsed()) {
      std::cout << nlohmann::json(metrics::measure(file, "", metrics::Origin::User, source)).dump(2) << "\n";
    }
    return 0;
  } catch (const StageFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
