#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/common/date.hpp"
#include "codebench/gen/client.hpp"
#include "codebench/gen/prompt.hpp"
#include "codebench/judge/verdict.hpp"
#include "codebench/pipeline/report.hpp"
#include "codebench/stats/battery.hpp"

namespace codebench::pipeline {

enum class Stage { Import, Extract, Detect, Repair, Judge, Generate, Analyze, Stats, Report };

inline constexpr Stage kStages[] = {Stage::Import,   Stage::Extract, Stage::Detect, Stage::Repair, Stage::Judge,
                                    Stage::Generate, Stage::Analyze, Stage::Stats,  Stage::Report};

std::string to_string(Stage s);           // "import", "extract", ...
Stage stage_from_string(std::string_view s);  // throws InvalidArgument

// Bumped whenever a stage changes the bytes it writes.
inline constexpr int kStageVersion = 1;

struct ClientSettings {
  std::string kind = "mock";              // "mock" or "http"
  std::filesystem::path transcripts;      // mock replies, JSONL
  double requests_per_minute = 0;         // 0 disables the limiter
};

struct JudgeSettings {
  std::string kind = "canned";            // "canned" or "shim"
  std::vector<std::string> command;       // runner argv for "shim"
  std::filesystem::path table;            // optional verdict table for "canned"
  judge::Limits limits;
};

// Relative paths in the config file resolve against the file's directory.
struct PipelineConfig {
  std::filesystem::path problems_dump;
  std::filesystem::path posts_dump;
  std::filesystem::path work_dir = "work";
  std::filesystem::path report_dir = "report";
  Date cutoff{2023, 10, 1};
  int workers = 1;
  int min_upvotes = 2;
  std::uint64_t seed = 0;
  bool count_inserted = false;  // keep repaired import lines in user line counts
  gen::GenerationConfig generation;
  ClientSettings client;
  JudgeSettings judge;
  stats::BatteryConfig stats;

  // Throws ConfigError for missing or mistyped fields and unknown kinds.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& file);

  // Throws ConfigError when an input path does not exist or a count is out
  // of range.
  void validate() const;
};

struct PipelineOptions {
  std::function<void(std::string_view)> log;  // called from one thread at a time
  // Replace the configured client or judge. The stage keys still come from
  // the config, so callers are responsible for consistency.
  std::shared_ptr<gen::ChatClient> client;
  std::shared_ptr<judge::VerdictSource> judge;
};

// Runs the stages and persists each output under
//   <work_dir>/<stage>/<key>.jsonl   (import: <work_dir>/import/<key>/)
// where the key hashes the stage name, kStageVersion, the upstream keys and
// the config fields the stage reads. A stage whose output exists is not run
// again, so an interrupted run resumes where it stopped and a repeated
// command does no work. Worker counts and the seed never enter a key.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, PipelineOptions options = {});
  ~Pipeline();

  const PipelineConfig& config() const { return config_; }

  std::string key(Stage s) const;
  std::string resume_token(Stage s) const;  // "<stage>:<key>"
  std::filesystem::path output(Stage s) const;
  bool done(Stage s) const;

  // Runs `s` after its missing upstream stages. Throws StageFailure naming
  // the first stage that failed and its resume token.
  void run(Stage s);

  // Runs every stage, writes report.json and the CSV tables to report_dir
  // and returns the bundle.
  ReportBundle run_all();

  // Assembles the report from persisted stage outputs. Requires Stats.
  ReportBundle assemble() const;

  // Checks that a resume token names a stage whose key matches the current
  // config. Throws ConfigError otherwise.
  Stage check_resume_token(std::string_view token) const;

 private:
  void execute(Stage s);
  void run_import();
  void run_extract();
  void run_detect();
  void run_repair();
  void run_judge();
  void run_generate();
  void run_analyze();
  void run_stats();
  void run_report();
  void write_report_dir(const ReportBundle& bundle) const;
  void log(const std::string& line) const;
  gen::ChatClient& client();
  judge::VerdictSource& judge();

  PipelineConfig config_;
  PipelineOptions options_;
  std::map<Stage, std::string> keys_;
  std::shared_ptr<gen::ChatClient> client_;
  std::shared_ptr<judge::VerdictSource> judge_;
  mutable std::mutex log_mu_;
};

}  // namespace codebench::pipeline
