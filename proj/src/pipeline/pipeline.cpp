#include "codebench/pipeline/pipeline.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "codebench/common/embedded_data.hpp"
#include "codebench/common/errors.hpp"
#include "codebench/common/hash.hpp"
#include "codebench/common/jsonl.hpp"
#include "codebench/corpus/corpus.hpp"
#include "codebench/gen/loop.hpp"
#include "codebench/judge/canned.hpp"
#include "codebench/judge/shim.hpp"
#include "codebench/lang/detect.hpp"
#include "codebench/metrics/record.hpp"
#include "codebench/repair/imports.hpp"

namespace codebench::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<Stage, std::vector<Stage>>& dependencies() {
  static const std::map<Stage, std::vector<Stage>> deps{
      {Stage::Import, {}},
      {Stage::Extract, {Stage::Import}},
      {Stage::Detect, {Stage::Extract}},
      {Stage::Repair, {Stage::Detect}},
      {Stage::Judge, {Stage::Repair}},
      {Stage::Generate, {Stage::Import}},
      {Stage::Analyze, {Stage::Judge, Stage::Generate}},
      {Stage::Stats, {Stage::Analyze}},
      {Stage::Report, {Stage::Stats}},
  };
  return deps;
}

std::string file_hash(const fs::path& p) { return sha256_hex(jsonl::read_file(p)); }

fs::path temp_sibling(const fs::path& target) {
  return target.parent_path() / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
}

void write_atomic(const fs::path& target, std::string_view content) {
  fs::create_directories(target.parent_path());
  fs::path tmp = temp_sibling(target);
  jsonl::write_file(tmp, content);
  fs::rename(tmp, target);
}

void write_records(const fs::path& target, const std::vector<json>& records) {
  fs::create_directories(target.parent_path());
  fs::path tmp = temp_sibling(target);
  jsonl::write_all(tmp, records);
  fs::rename(tmp, target);
}

// Calls fn(i) for i in [0, n) on up to `workers` threads. The first
// exception stops the remaining work and is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (count <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < count; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

json judge_settings_json(const JudgeSettings& j, const std::string& table_hash) {
  return {{"kind", j.kind},
          {"command", j.command},
          {"table", table_hash},
          {"time_ms", j.limits.time_ms},
          {"memory_mb", j.limits.memory_mb}};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

void require_known_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

std::map<long long, corpus::Post> posts_by_id(const std::vector<corpus::Post>& posts) {
  std::map<long long, corpus::Post> out;
  for (const auto& p : posts) out.emplace(p.post_id, p);
  return out;
}

std::map<std::string, corpus::Problem> problems_by_slug(const std::vector<corpus::Problem>& problems) {
  std::map<std::string, corpus::Problem> out;
  for (const auto& p : problems) out.emplace(p.slug, p);
  return out;
}

bool usable(const json& repaired) {
  const auto status = repaired.at("status").get<std::string>();
  return status == "repaired" || status == "unchanged";
}

}  // namespace

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Import: return "import";
    case Stage::Extract: return "extract";
    case Stage::Detect: return "detect";
    case Stage::Repair: return "repair";
    case Stage::Judge: return "judge";
    case Stage::Generate: return "generate";
    case Stage::Analyze: return "analyze";
    case Stage::Stats: return "stats";
    case Stage::Report: return "report";
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (Stage st : kStages) {
    if (to_string(st) == s) return st;
  }
  throw InvalidArgument("unknown stage '" + std::string(s) + "'");
}

// ---- config ----------------------------------------------------------------

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    require_known_keys(j, {"corpus", "work_dir", "report_dir", "cutoff_date", "workers", "min_upvotes", "seed",
                           "count_inserted", "generation", "judge", "stats"},
                       "config");
    const json& corpus = j.at("corpus");
    require_known_keys(corpus, {"problems", "posts"}, "corpus");
    c.problems_dump = resolve(base_dir, corpus.at("problems").get<std::string>());
    c.posts_dump = resolve(base_dir, corpus.at("posts").get<std::string>());
    c.work_dir = resolve(base_dir, j.value("work_dir", std::string("work")));
    c.report_dir = resolve(base_dir, j.value("report_dir", std::string("report")));
    if (j.contains("cutoff_date")) c.cutoff = Date::parse(j["cutoff_date"].get<std::string>());
    c.workers = j.value("workers", c.workers);
    c.min_upvotes = j.value("min_upvotes", c.min_upvotes);
    c.seed = j.value("seed", c.seed);
    c.count_inserted = j.value("count_inserted", c.count_inserted);

    if (j.contains("generation")) {
      json g = j["generation"];
      require_known_keys(g, {"model_name", "temperature", "samples_per_call", "max_total_tokens", "max_attempts",
                             "endpoint", "api_key_env", "client", "transcripts", "requests_per_minute"},
                         "generation");
      c.client.kind = g.value("client", c.client.kind);
      if (g.contains("transcripts")) c.client.transcripts = resolve(base_dir, g["transcripts"].get<std::string>());
      c.client.requests_per_minute = g.value("requests_per_minute", c.client.requests_per_minute);
      for (const char* k : {"client", "transcripts", "requests_per_minute"}) g.erase(k);
      c.generation = g.get<gen::GenerationConfig>();
    }
    if (j.contains("judge")) {
      const json& jj = j["judge"];
      require_known_keys(jj, {"kind", "command", "table", "time_ms", "memory_mb"}, "judge");
      c.judge.kind = jj.value("kind", c.judge.kind);
      c.judge.command = jj.value("command", c.judge.command);
      if (jj.contains("table")) c.judge.table = resolve(base_dir, jj["table"].get<std::string>());
      c.judge.limits.time_ms = jj.value("time_ms", c.judge.limits.time_ms);
      c.judge.limits.memory_mb = jj.value("memory_mb", c.judge.limits.memory_mb);
    }
    if (j.contains("stats")) {
      const json& s = j["stats"];
      require_known_keys(s, {"alpha", "hypotheses", "two_sided", "rank_null"}, "stats");
      c.stats.alpha = s.value("alpha", c.stats.alpha);
      c.stats.hypotheses = s.value("hypotheses", c.stats.hypotheses);
      c.stats.two_sided = s.value("two_sided", c.stats.two_sided);
      c.stats.rank_null = s.value("rank_null", c.stats.rank_null);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.client.kind != "mock" && c.client.kind != "http")
    throw ConfigError("generation.client must be \"mock\" or \"http\"");
  if (c.judge.kind != "canned" && c.judge.kind != "shim") throw ConfigError("judge.kind must be \"canned\" or \"shim\"");
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  json j;
  try {
    j = json::parse(jsonl::read_file(file));
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + file.string() + ": " + e.what());
  }
  return from_json(j, fs::absolute(file).parent_path());
}

void PipelineConfig::validate() const {
  auto exists = [](const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw ConfigError(what + " does not exist: " + p.string());
  };
  exists(problems_dump, "problem dump");
  exists(posts_dump, "post dump");
  if (!client.transcripts.empty()) exists(client.transcripts, "transcript file");
  if (!judge.table.empty()) exists(judge.table, "verdict table");
  if (judge.kind == "shim" && judge.command.empty()) throw ConfigError("judge.command is required for the shim judge");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (min_upvotes < 0) throw ConfigError("min_upvotes must be non-negative");
  if (!(judge.limits.time_ms > 0) || !(judge.limits.memory_mb > 0)) throw ConfigError("judge limits must be positive");
  if (client.requests_per_minute < 0) throw ConfigError("requests_per_minute must be non-negative");
  if (!(stats.alpha > 0 && stats.alpha < 1)) throw ConfigError("stats.alpha must lie in (0, 1)");
  if (stats.hypotheses < 1) throw ConfigError("stats.hypotheses must be positive");
  generation.validate();
}

// ---- pipeline ----------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(std::move(options)), client_(options_.client), judge_(options_.judge) {
  config_.validate();
  const std::string v = std::to_string(kStageVersion);
  const std::string table_hash = config_.judge.table.empty() ? "" : file_hash(config_.judge.table);
  const std::string judge_json = judge_settings_json(config_.judge, table_hash).dump();
  auto key_of = [&](Stage s, std::initializer_list<std::string_view> parts) {
    ContentHasher h;
    h.add(to_string(s)).add(v);
    for (auto p : parts) h.add(p);
    keys_[s] = h.hex();
  };
  key_of(Stage::Import, {file_hash(config_.problems_dump), file_hash(config_.posts_dump), config_.cutoff.to_string()});
  key_of(Stage::Extract, {keys_[Stage::Import], std::to_string(config_.min_upvotes)});
  key_of(Stage::Detect, {keys_[Stage::Extract], embedded::language_profiles_json()});
  key_of(Stage::Repair,
         {keys_[Stage::Detect], embedded::import_mapping_json(), embedded::python_builtins_txt()});
  key_of(Stage::Judge, {keys_[Stage::Repair], judge_json});
  json client_json{{"kind", config_.client.kind},
                   {"transcripts", config_.client.transcripts.empty() ? "" : file_hash(config_.client.transcripts)}};
  key_of(Stage::Generate, {keys_[Stage::Import], json(config_.generation).dump(), client_json.dump(), judge_json});
  key_of(Stage::Analyze, {keys_[Stage::Judge], keys_[Stage::Generate], config_.count_inserted ? "1" : "0"});
  json stats_json{{"alpha", config_.stats.alpha},
                  {"hypotheses", config_.stats.hypotheses},
                  {"two_sided", config_.stats.two_sided},
                  {"rank_null", config_.stats.rank_null}};
  key_of(Stage::Stats, {keys_[Stage::Analyze], stats_json.dump()});
  key_of(Stage::Report, {keys_[Stage::Stats], config_.cutoff.to_string(), std::to_string(config_.generation.max_attempts)});
}

Pipeline::~Pipeline() = default;

std::string Pipeline::key(Stage s) const { return keys_.at(s); }

std::string Pipeline::resume_token(Stage s) const { return to_string(s) + ":" + key(s); }

fs::path Pipeline::output(Stage s) const {
  fs::path dir = config_.work_dir / to_string(s);
  switch (s) {
    case Stage::Import: return dir / key(s);
    case Stage::Report: return dir / (key(s) + ".json");
    default: return dir / (key(s) + ".jsonl");
  }
}

bool Pipeline::done(Stage s) const { return fs::exists(output(s)); }

Stage Pipeline::check_resume_token(std::string_view token) const {
  auto colon = token.find(':');
  if (colon == std::string_view::npos) throw ConfigError("malformed resume token '" + std::string(token) + "'");
  Stage s;
  try {
    s = stage_from_string(token.substr(0, colon));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (token.substr(colon + 1) != key(s))
    throw ConfigError("resume token " + std::string(token) + " does not match the current config (expected " +
                      resume_token(s) + ")");
  return s;
}

void Pipeline::log(const std::string& line) const {
  if (!options_.log) return;
  std::lock_guard lock(log_mu_);
  options_.log(line);
}

gen::ChatClient& Pipeline::client() {
  if (!client_) {
    if (config_.client.kind == "mock") {
      if (config_.client.transcripts.empty()) throw ConfigError("generation.transcripts is required for the mock client");
      client_ = std::make_shared<gen::MockChatClient>(gen::MockChatClient::load_script(config_.client.transcripts));
    } else {
      gen::HttpClientOptions o;
      o.endpoint = config_.generation.endpoint;
      o.api_key = gen::api_key_from_env(config_.generation.api_key_env);
      if (config_.client.requests_per_minute > 0)
        o.bucket = std::make_shared<gen::TokenBucket>(config_.client.requests_per_minute);
      client_ = std::make_shared<gen::HttpChatClient>(std::move(o));
    }
  }
  return *client_;
}

judge::VerdictSource& Pipeline::judge() {
  if (!judge_) {
    if (config_.judge.kind == "canned") {
      auto canned = std::make_shared<judge::CannedJudge>();
      if (!config_.judge.table.empty()) canned->load(json::parse(jsonl::read_file(config_.judge.table)));
      judge_ = canned;
    } else {
      judge_ = std::make_shared<judge::ShimJudge>(config_.judge.command, config_.workers);
    }
  }
  return *judge_;
}

void Pipeline::run(Stage s) {
  for (Stage dep : dependencies().at(s)) run(dep);
  if (done(s)) {
    log("stage " + to_string(s) + ": up to date (" + key(s).substr(0, 12) + ")");
  } else {
    auto start = std::chrono::steady_clock::now();
    try {
      execute(s);
    } catch (const StageFailure&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageFailure(to_string(s), resume_token(s), e.what());
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    log("stage " + to_string(s) + ": done in " + std::to_string(ms) + " ms (" + key(s).substr(0, 12) + ")");
  }
  if (s == Stage::Report) {
    try {
      write_report_dir(assemble());
    } catch (const std::exception& e) {
      throw StageFailure(to_string(s), resume_token(s), e.what());
    }
  }
}

ReportBundle Pipeline::run_all() {
  run(Stage::Report);
  return assemble();
}

void Pipeline::execute(Stage s) {
  switch (s) {
    case Stage::Import: return run_import();
    case Stage::Extract: return run_extract();
    case Stage::Detect: return run_detect();
    case Stage::Repair: return run_repair();
    case Stage::Judge: return run_judge();
    case Stage::Generate: return run_generate();
    case Stage::Analyze: return run_analyze();
    case Stage::Stats: return run_stats();
    case Stage::Report: return run_report();
  }
}

// ---- stages ------------------------------------------------------------------

void Pipeline::run_import() {
  corpus::ImportStats stats;
  auto problems = corpus::import_problems(config_.problems_dump, {}, &stats);
  std::set<std::string> slugs;
  for (const auto& p : problems) slugs.insert(p.slug);
  int dropped = 0;
  auto posts = corpus::import_posts(config_.posts_dump, slugs, &dropped);

  fs::path target = output(Stage::Import);
  fs::path tmp = temp_sibling(target);
  fs::remove_all(tmp);
  corpus::CorpusStore store(tmp);
  store.save_problems(problems);
  store.save_posts(posts);
  store.save_manifest(store.recount(config_.cutoff));
  jsonl::write_file(tmp / "import_stats.json", json{{"total", stats.total},
                                                    {"premium", stats.premium},
                                                    {"non_subject", stats.non_subject},
                                                    {"retained", stats.retained},
                                                    {"dropped_posts", dropped}}
                                                       .dump() +
                                                   "\n");
  fs::rename(tmp, target);
  log("import: " + std::to_string(problems.size()) + " problems, " + std::to_string(posts.size()) + " posts");
}

void Pipeline::run_extract() {
  corpus::CorpusStore store(output(Stage::Import));
  auto posts = corpus::filter_posts(store.load_posts(), config_.min_upvotes);
  std::vector<json> records(posts.size());
  parallel_for(posts.size(), config_.workers, [&](std::size_t i) {
    const auto& post = posts[i];
    json rec{{"post_id", post.post_id}, {"problem_slug", post.problem_slug}};
    try {
      auto ex = corpus::extract_code_blocks(post.post_id, post.body);
      rec["flagged"] = ex.flagged;
      rec["snippets"] = ex.snippets;
    } catch (const UnrepairableMarkdown& e) {
      rec["flagged"] = true;
      rec["snippets"] = json::array();
      rec["error"] = e.what();
    }
    records[i] = std::move(rec);
  });
  write_records(output(Stage::Extract), records);
}

void Pipeline::run_detect() {
  corpus::CorpusStore store(output(Stage::Import));
  auto posts = posts_by_id(store.load_posts());
  auto extracted = jsonl::read_all(output(Stage::Extract));
  const auto& detector = lang::LanguageDetector::default_instance();
  std::vector<json> records(extracted.size());
  parallel_for(extracted.size(), config_.workers, [&](std::size_t i) {
    const json& rec = extracted[i];
    const corpus::Post& post = posts.at(rec.at("post_id").get<long long>());
    json out{{"post_id", post.post_id}, {"problem_slug", post.problem_slug}, {"snippets", json::array()}};
    for (const auto& sj : rec.at("snippets")) {
      auto snippet = sj.get<corpus::Snippet>();
      auto d = detector.detect(snippet, post);
      out["snippets"].push_back({{"ordinal", snippet.ordinal},
                                 {"language", d.language},
                                 {"source", lang::to_string(d.source)},
                                 {"score", d.score},
                                 {"runner_up_score", d.runner_up_score}});
    }
    records[i] = std::move(out);
  });
  write_records(output(Stage::Detect), records);
}

void Pipeline::run_repair() {
  auto extracted = jsonl::read_all(output(Stage::Extract));
  auto detected = jsonl::read_all(output(Stage::Detect));
  const std::string subject = lang::LanguageDetector::default_instance().table().subject_language;
  std::vector<json> slots(extracted.size());
  parallel_for(extracted.size(), config_.workers, [&](std::size_t i) {
    const json& ex = extracted[i];
    const json& det = detected.at(i);
    json out{{"post_id", ex.at("post_id")}, {"problem_slug", ex.at("problem_slug")}, {"snippets", json::array()}};
    const json& snippets = ex.at("snippets");
    for (std::size_t k = 0; k < snippets.size(); ++k) {
      if (det.at("snippets").at(k).at("language").get<std::string>() != subject) continue;
      auto snippet = snippets[k].get<corpus::Snippet>();
      json r{{"ordinal", snippet.ordinal}};
      try {
        auto fixed = imports::repair_detailed(snippet.raw_text + "\n");
        r["status"] = fixed.inserted.empty() ? "unchanged" : "repaired";
        r["text"] = fixed.text;
        r["inserted"] = fixed.inserted;
        r["inserted_lines"] = fixed.inserted_lines();
      } catch (const UnresolvedName& e) {
        r["status"] = "unresolved";
        r["names"] = e.names();
      } catch (const LexError& e) {
        r["status"] = "lex_error";
        r["detail"] = e.what();
      }
      out["snippets"].push_back(std::move(r));
    }
    if (!out["snippets"].empty()) slots[i] = std::move(out);
  });
  std::vector<json> records;
  for (auto& s : slots) {
    if (!s.is_null()) records.push_back(std::move(s));
  }
  write_records(output(Stage::Repair), records);
}

void Pipeline::run_judge() {
  corpus::CorpusStore store(output(Stage::Import));
  auto problems = problems_by_slug(store.load_problems());
  auto repaired = jsonl::read_all(output(Stage::Repair));
  auto& source = judge();
  std::vector<json> records(repaired.size());
  parallel_for(repaired.size(), config_.workers, [&](std::size_t i) {
    const json& rec = repaired[i];
    const auto& problem = problems.at(rec.at("problem_slug").get<std::string>());
    json out{{"post_id", rec.at("post_id")},
             {"problem_slug", problem.slug},
             {"tried", json::array()},
             {"accepted_ordinal", nullptr}};
    const json& snippets = rec.at("snippets");
    for (auto it = snippets.rbegin(); it != snippets.rend(); ++it) {
      if (!usable(*it)) continue;
      judge::Verdict v = source.submit(it->at("text").get<std::string>(), problem, config_.judge.limits);
      out["tried"].push_back({{"ordinal", it->at("ordinal")}, {"verdict", v}});
      if (v.accepted()) {
        out["accepted_ordinal"] = it->at("ordinal");
        break;
      }
    }
    records[i] = std::move(out);
  });
  write_records(output(Stage::Judge), records);
}

void Pipeline::run_generate() {
  corpus::CorpusStore store(output(Stage::Import));
  auto problems = store.load_problems();
  auto& chat = client();
  auto& source = judge();
  std::vector<json> records(problems.size());
  std::atomic<int> finished{0};
  parallel_for(problems.size(), config_.workers, [&](std::size_t i) {
    const auto& p = problems[i];
    json rec{{"slug", p.slug}};
    try {
      rec["outcome"] = gen::generate_solution(p, chat, source, config_.generation, config_.judge.limits);
    } catch (const ClientError& e) {
      rec["error"] = e.what();
      rec["kind"] = "client";
    } catch (const MissingFramework& e) {
      rec["error"] = e.what();
      rec["kind"] = "prompt";
    } catch (const PromptBudgetExceeded& e) {
      rec["error"] = e.what();
      rec["kind"] = "prompt";
    } catch (const InvalidArgument& e) {
      rec["error"] = e.what();
      rec["kind"] = "prompt";
    }
    records[i] = std::move(rec);
    int n = ++finished;
    if (n % 25 == 0 || n == static_cast<int>(problems.size()))
      log("generate: " + std::to_string(n) + "/" + std::to_string(problems.size()) + " problems");
  });
  write_records(output(Stage::Generate), records);
}

void Pipeline::run_analyze() {
  auto repaired = jsonl::read_all(output(Stage::Repair));
  auto judged = jsonl::read_all(output(Stage::Judge));
  auto generated = jsonl::read_all(output(Stage::Generate));

  std::map<std::string, std::vector<judge::Verdict>> population;
  for (const auto& rec : judged) {
    if (rec.at("accepted_ordinal").is_null()) continue;
    population[rec.at("problem_slug").get<std::string>()].push_back(
        rec.at("tried").back().at("verdict").get<judge::Verdict>());
  }
  auto ranked = [&](metrics::MetricRecord& r, const judge::Verdict& v) {
    auto it = population.find(r.problem_slug);
    if (it == population.end()) return;
    auto pair = judge::rank_verdict(v, it->second);
    r.runtime_rank = pair.runtime_rank;
    r.memory_rank = pair.memory_rank;
  };

  std::vector<json> gen_slots(generated.size());
  parallel_for(generated.size(), config_.workers, [&](std::size_t i) {
    const json& rec = generated[i];
    if (!rec.contains("outcome")) return;
    auto o = rec["outcome"].get<gen::GenerationOutcome>();
    if (o.status != gen::GenerationStatus::Accepted || !o.final_code) return;
    try {
      auto r = metrics::measure("gen:" + o.problem_slug, o.problem_slug, metrics::Origin::Generated, *o.final_code);
      ranked(r, o.attempt_log.back().verdict);
      gen_slots[i] = r;
    } catch (const LexError& e) {
      log("analyze: skipping generated " + o.problem_slug + ": " + e.what());
    }
  });

  std::vector<json> user_slots(judged.size());
  parallel_for(judged.size(), config_.workers, [&](std::size_t i) {
    const json& rec = judged[i];
    const json& repair = repaired.at(i);
    if (rec.at("accepted_ordinal").is_null()) return;
    int ordinal = rec["accepted_ordinal"].get<int>();
    for (const auto& s : repair.at("snippets")) {
      if (s.at("ordinal").get<int>() != ordinal) continue;
      std::string slug = rec.at("problem_slug").get<std::string>();
      metrics::MeasureOptions opts;
      if (!config_.count_inserted) opts.excluded_lines = s.at("inserted_lines").get<std::set<int>>();
      std::string id = "user:" + std::to_string(rec.at("post_id").get<long long>()) + ":" + std::to_string(ordinal);
      try {
        auto r = metrics::measure(id, slug, metrics::Origin::User, s.at("text").get<std::string>(), opts);
        ranked(r, rec.at("tried").back().at("verdict").get<judge::Verdict>());
        user_slots[i] = r;
      } catch (const LexError& e) {
        log("analyze: skipping " + id + ": " + e.what());
      }
    }
  });

  std::vector<json> records;
  for (auto* slots : {&gen_slots, &user_slots}) {
    for (auto& s : *slots) {
      if (!s.is_null()) records.push_back(std::move(s));
    }
  }
  write_records(output(Stage::Analyze), records);
}

void Pipeline::run_stats() {
  std::vector<metrics::MetricRecord> generated, user;
  for (const auto& j : jsonl::read_all(output(Stage::Analyze))) {
    auto r = j.get<metrics::MetricRecord>();
    (r.origin == metrics::Origin::Generated ? generated : user).push_back(std::move(r));
  }
  json out{{"hypotheses", json::array()}, {"note", ""}};
  try {
    out["hypotheses"] = stats::run_battery(generated, user, config_.stats);
  } catch (const EmptyPopulation& e) {
    out["note"] = e.what();
  } catch (const EmptyIntersection& e) {
    out["note"] = e.what();
  }
  write_records(output(Stage::Stats), {out});
}

void Pipeline::run_report() { write_atomic(output(Stage::Report), to_json(assemble()).dump(2) + "\n"); }

ReportBundle Pipeline::assemble() const {
  ReportInputs in;
  corpus::CorpusStore store(output(Stage::Import));
  in.problems = store.load_problems();
  for (const auto& rec : jsonl::read_all(output(Stage::Generate))) {
    if (rec.contains("outcome")) {
      in.outcomes.push_back(rec["outcome"].get<gen::GenerationOutcome>());
    } else {
      in.generation_failures.push_back(rec.at("slug").get<std::string>());
    }
  }
  in.user_candidates = static_cast<long long>(jsonl::read_all(output(Stage::Judge)).size());
  for (const auto& j : jsonl::read_all(output(Stage::Analyze))) {
    auto r = j.get<metrics::MetricRecord>();
    (r.origin == metrics::Origin::Generated ? in.generated : in.user).push_back(std::move(r));
  }
  auto stats = jsonl::read_all(output(Stage::Stats)).at(0);
  in.hypotheses = stats.at("hypotheses").get<std::vector<stats::HypothesisOutcome>>();
  in.hypotheses_note = stats.value("note", std::string());
  in.battery = config_.stats;
  in.cutoff = config_.cutoff;
  in.max_attempts = config_.generation.max_attempts;
  return build_report(in);
}

void Pipeline::write_report_dir(const ReportBundle& bundle) const {
  write_atomic(config_.report_dir / "report.json", to_json(bundle).dump(2) + "\n");
  for (const auto& [name, csv] : to_csv(bundle)) write_atomic(config_.report_dir / name, csv);
}

}  // namespace codebench::pipeline
