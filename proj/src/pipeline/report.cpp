#include "codebench/pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"
#include "codebench/stats/battery.hpp"
#include "codebench/stats/tests.hpp"

namespace codebench::pipeline {

using nlohmann::json;

namespace {

constexpr const char* kDifficulties[] = {"Easy", "Medium", "Hard"};

std::size_t index_of(corpus::Difficulty d) { return static_cast<std::size_t>(d); }

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::map<std::string, const corpus::Problem*> by_slug(const std::vector<corpus::Problem>& problems) {
  std::map<std::string, const corpus::Problem*> out;
  for (const auto& p : problems) out[p.slug] = &p;
  return out;
}

std::vector<double> values(const std::vector<metrics::MetricRecord>& rs, stats::MetricField f) {
  std::vector<double> out;
  for (const auto& r : rs) {
    if (r.*f) out.push_back(*(r.*f));
  }
  return out;
}

MetricTableRow metric_row(std::string samples, const std::vector<metrics::MetricRecord>& records,
                          const std::set<std::string>& shared, const std::vector<double>& per_problem,
                          int metrics::MetricRecord::*count) {
  MetricTableRow row;
  row.samples = std::move(samples);
  row.problems = static_cast<long long>(shared.size());
  for (const auto& r : records) {
    if (!shared.count(r.problem_slug)) continue;
    ++row.solutions;
    row.count += r.*count;
    row.loc += r.lines.ncloc;
  }
  Summary s = summarize(per_problem);
  row.mean = s.mean;
  row.median = s.median;
  return row;
}

void metric_tables(const ReportInputs& in, stats::MetricField field, int metrics::MetricRecord::*count,
                   std::vector<MetricTableRow>& out) {
  stats::PairedSamples pairs = stats::pair_by_problem(in.generated, in.user, field);
  std::set<std::string> shared(pairs.slugs.begin(), pairs.slugs.end());
  out.push_back(metric_row("Generated", in.generated, shared, pairs.generated, count));
  out.push_back(metric_row("User", in.user, shared, pairs.user, count));
}

std::vector<RankTableRow> rank_table(const ReportInputs& in, stats::MetricField field) {
  auto problems = by_slug(in.problems);
  std::vector<RankTableRow> out;
  auto add = [&](const std::string& scope, auto keep) {
    std::vector<double> vals;
    for (const auto& r : in.generated) {
      auto it = problems.find(r.problem_slug);
      if (it == problems.end() || !(r.*field) || !keep(*it->second)) continue;
      vals.push_back(*(r.*field));
    }
    Summary s = summarize(vals);
    out.push_back({scope, s.n, s.mean, s.median});
  };
  add("All", [](const corpus::Problem&) { return true; });
  for (auto d : {corpus::Difficulty::Easy, corpus::Difficulty::Medium, corpus::Difficulty::Hard})
    add(std::string(corpus::to_string(d)), [d](const corpus::Problem& p) { return p.difficulty == d; });
  return out;
}

CorrelationRow correlate(std::string name, const std::vector<double>& x, const std::vector<double>& y) {
  CorrelationRow row;
  row.name = std::move(name);
  row.n = static_cast<long long>(x.size());
  try {
    auto r = stats::spearman_rho(x, y, stats::Alternative::TwoSided);
    row.rho = r.statistic;
    row.p_value = r.p_value;
  } catch (const Error& e) {
    row.note = e.what();
  }
  return row;
}

std::vector<CorrelationRow> correlations(const ReportInputs& in) {
  auto problems = by_slug(in.problems);
  std::vector<CorrelationRow> out;
  std::vector<double> smells, level;
  for (const auto& r : in.user) {
    auto it = problems.find(r.problem_slug);
    if (it == problems.end() || !r.smells_per_kloc) continue;
    smells.push_back(*r.smells_per_kloc);
    level.push_back(static_cast<double>(index_of(it->second->difficulty)) + 1);
  }
  out.push_back(correlate("user smells_per_kloc ~ difficulty", smells, level));
  for (auto [name, field] : {std::pair{"generated smells_per_kloc ~ question_id", &metrics::MetricRecord::smells_per_kloc},
                             std::pair{"generated complexity_per_kloc ~ question_id",
                                       &metrics::MetricRecord::complexity_per_kloc}}) {
    std::vector<double> v, id;
    for (const auto& r : in.generated) {
      auto it = problems.find(r.problem_slug);
      if (it == problems.end() || !(r.*field)) continue;
      v.push_back(*(r.*field));
      id.push_back(it->second->question_id);
    }
    out.push_back(correlate(name, v, id));
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("report consistency: " + what);
}

json summary_json(const Summary& s) { return {{"n", s.n}, {"mean", s.mean}, {"median", s.median}}; }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string num(double v) { return text::fixed(v, 2); }
std::string num(const std::optional<double>& v, int decimals = 6) {
  if (!v) return "";
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(decimals);
  ss << *v;
  return ss.str();
}

}  // namespace

double rate(long long part, long long whole) {
  if (whole == 0) return 0;
  return round2(100.0 * static_cast<double>(part) / static_cast<double>(whole));
}

DifficultyRow make_row(std::string label, const std::array<long long, 3>& counts) {
  DifficultyRow row;
  row.label = std::move(label);
  row.counts = counts;
  row.total = counts[0] + counts[1] + counts[2];
  for (std::size_t i = 0; i < 3; ++i) row.percent[i] = rate(counts[i], row.total);
  return row;
}

Partition partition_by_cutoff(const std::vector<corpus::Problem>& problems, const std::vector<std::string>& solved,
                              const Date& cutoff) {
  auto index = by_slug(problems);
  std::set<std::string> solved_set;
  for (const auto& s : solved) {
    if (!index.count(s)) throw InvalidArgument("solved slug '" + s + "' names no problem");
    solved_set.insert(s);
  }
  Partition out;
  out.before.label = "before";
  out.after.label = "after";
  out.overall.label = "total";
  for (const auto& p : problems) {
    PartitionStats& side = p.released_at < cutoff ? out.before : out.after;
    for (PartitionStats* s : {&side, &out.overall}) {
      ++s->problems[index_of(p.difficulty)];
      ++s->total;
      if (solved_set.count(p.slug)) ++s->solved;
    }
  }
  for (PartitionStats* s : {&out.before, &out.after, &out.overall}) s->solved_rate = rate(s->solved, s->total);
  return out;
}

Summary summarize(std::vector<double> v) {
  Summary s;
  s.n = static_cast<long long>(v.size());
  if (v.empty()) return s;
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  s.median = v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
  return s;
}

std::vector<AggregateRow> aggregate_metrics(const std::vector<metrics::MetricRecord>& records,
                                            const std::vector<corpus::Problem>& problems) {
  auto index = by_slug(problems);
  std::vector<AggregateRow> out;
  for (auto origin : {metrics::Origin::Generated, metrics::Origin::User}) {
    std::array<std::vector<metrics::MetricRecord>, 4> groups;
    for (const auto& r : records) {
      auto it = index.find(r.problem_slug);
      if (r.origin != origin || it == index.end()) continue;
      groups[index_of(it->second->difficulty)].push_back(r);
      groups[3].push_back(r);
    }
    for (std::size_t g = 0; g < 4; ++g) {
      AggregateRow row;
      row.origin = origin;
      row.difficulty = g < 3 ? kDifficulties[g] : "Total";
      row.smells_per_kloc = summarize(values(groups[g], &metrics::MetricRecord::smells_per_kloc));
      row.complexity_per_kloc = summarize(values(groups[g], &metrics::MetricRecord::complexity_per_kloc));
      row.runtime_rank = summarize(values(groups[g], &metrics::MetricRecord::runtime_rank));
      row.memory_rank = summarize(values(groups[g], &metrics::MetricRecord::memory_rank));
      out.push_back(row);
    }
  }
  return out;
}

ReportBundle build_report(const ReportInputs& in) {
  ReportBundle b;
  auto index = by_slug(in.problems);

  std::set<std::string> gen_solved, user_solved;
  for (const auto& o : in.outcomes) {
    if (o.status == gen::GenerationStatus::Accepted) gen_solved.insert(o.problem_slug);
  }
  for (const auto& r : in.user) user_solved.insert(r.problem_slug);

  auto count_by_difficulty = [&](auto keep) {
    std::array<long long, 3> c{};
    for (const auto& p : in.problems) {
      if (keep(p)) ++c[index_of(p.difficulty)];
    }
    return c;
  };
  b.problem_overview = {
      make_row("Generated solved", count_by_difficulty([&](const corpus::Problem& p) { return gen_solved.count(p.slug) > 0; })),
      make_row("User solved", count_by_difficulty([&](const corpus::Problem& p) { return user_solved.count(p.slug) > 0; })),
      make_row("Total", count_by_difficulty([](const corpus::Problem&) { return true; }))};

  auto acceptance = [&](std::string label, const std::set<std::string>* keep) {
    AcceptanceRow row;
    row.label = std::move(label);
    std::array<std::vector<double>, 3> per;
    std::vector<double> all;
    for (const auto& p : in.problems) {
      if (keep && !keep->count(p.slug)) continue;
      per[index_of(p.difficulty)].push_back(100 * p.acceptance_rate);
      all.push_back(100 * p.acceptance_rate);
    }
    for (std::size_t i = 0; i < 3; ++i) row.by_difficulty[i] = summarize(per[i]);
    row.total = summarize(all);
    return row;
  };
  b.acceptance_rates = {acceptance("Generated solved", &gen_solved), acceptance("User solved", &user_solved),
                        acceptance("Total", nullptr)};

  auto lines = [](const std::vector<metrics::MetricRecord>& rs, long long& sloc, long long& loc) {
    for (const auto& r : rs) {
      sloc += r.lines.sloc;
      loc += r.lines.ncloc;
    }
  };
  SampleRow g{"Generated", static_cast<long long>(in.outcomes.size() + in.generation_failures.size()),
              static_cast<long long>(in.generated.size()), 0, 0};
  lines(in.generated, g.sloc, g.loc);
  SampleRow u{"User", in.user_candidates, static_cast<long long>(in.user.size()), 0, 0};
  lines(in.user, u.sloc, u.loc);
  b.sample_counts = {g, u, {"Total", g.solutions + u.solutions, g.valid + u.valid, g.sloc + u.sloc, g.loc + u.loc}};

  auto solutions_by_difficulty = [&](const std::vector<metrics::MetricRecord>& rs) {
    std::array<long long, 3> c{};
    for (const auto& r : rs) {
      auto it = index.find(r.problem_slug);
      if (it != index.end()) ++c[index_of(it->second->difficulty)];
    }
    return c;
  };
  b.solution_counts = {make_row("Generated", solutions_by_difficulty(in.generated)),
                       make_row("User", solutions_by_difficulty(in.user))};

  b.partition = partition_by_cutoff(in.problems, std::vector<std::string>(gen_solved.begin(), gen_solved.end()),
                                    in.cutoff);

  metric_tables(in, &metrics::MetricRecord::smells_per_kloc, &metrics::MetricRecord::smell_count, b.smells_table);
  metric_tables(in, &metrics::MetricRecord::complexity_per_kloc, &metrics::MetricRecord::complexity_total,
                b.complexity_table);
  b.memory_rank_table = rank_table(in, &metrics::MetricRecord::memory_rank);
  b.runtime_rank_table = rank_table(in, &metrics::MetricRecord::runtime_rank);

  std::vector<metrics::MetricRecord> all = in.generated;
  all.insert(all.end(), in.user.begin(), in.user.end());
  b.metric_summary = aggregate_metrics(all, in.problems);

  if (in.hypotheses.empty()) {
    for (auto h : {stats::Hypothesis::H1Quality, stats::Hypothesis::H2Understandability, stats::Hypothesis::H3Resources,
                   stats::Hypothesis::H4Time}) {
      HypothesisRow row;
      row.hypothesis = stats::to_string(h);
      row.description = stats::description(h);
      row.alpha_adjusted = stats::bonferroni(in.battery.alpha, in.battery.hypotheses);
      row.note = in.hypotheses_note;
      b.hypothesis_table.push_back(row);
    }
  }
  for (const auto& o : in.hypotheses) {
    HypothesisRow row;
    row.hypothesis = stats::to_string(o.hypothesis);
    row.description = stats::description(o.hypothesis);
    row.test = stats::to_string(o.test.method);
    row.statistic = o.test.statistic;
    row.p_value = o.test.p_value;
    row.effect_size_d = o.effect_size_d;
    row.alpha_adjusted = o.alpha_adjusted;
    row.accepted = o.accepted;
    if (o.test.degenerate) row.note = "degenerate sample";
    b.hypothesis_table.push_back(row);
  }

  b.correlations = correlations(in);

  b.retry_histogram.assign(static_cast<std::size_t>(in.max_attempts) + 1, 0);
  for (const auto& o : in.outcomes) {
    auto it = index.find(o.problem_slug);
    b.retry_points.push_back(
        {it == index.end() ? 0 : it->second->question_id, o.problem_slug, o.attempts_used,
         o.status == gen::GenerationStatus::Accepted});
    std::size_t slot = o.status == gen::GenerationStatus::Accepted
                           ? static_cast<std::size_t>(std::clamp(o.attempts_used, 1, in.max_attempts)) - 1
                           : static_cast<std::size_t>(in.max_attempts);
    ++b.retry_histogram[slot];
  }
  std::sort(b.retry_points.begin(), b.retry_points.end(),
            [](const RetryPoint& a, const RetryPoint& c) { return std::tie(a.question_id, a.slug) < std::tie(c.question_id, c.slug); });
  b.generation_failures = in.generation_failures;
  std::sort(b.generation_failures.begin(), b.generation_failures.end());

  check_consistency(b);
  return b;
}

void check_consistency(const ReportBundle& b) {
  auto check_row = [](const DifficultyRow& r, const std::string& table) {
    require(r.counts[0] + r.counts[1] + r.counts[2] == r.total, table + "/" + r.label + " total");
    for (std::size_t i = 0; i < 3; ++i) {
      double expect = r.total ? 100.0 * static_cast<double>(r.counts[i]) / static_cast<double>(r.total) : 0;
      require(std::abs(expect - r.percent[i]) <= 0.01, table + "/" + r.label + " percentage");
    }
  };
  for (const auto& r : b.problem_overview) check_row(r, "problem_overview");
  for (const auto& r : b.solution_counts) check_row(r, "solution_counts");
  if (!b.problem_overview.empty()) {
    const auto& total = b.problem_overview.back();
    for (const auto& r : b.problem_overview) {
      for (std::size_t i = 0; i < 3; ++i) require(r.counts[i] <= total.counts[i], "problem_overview/" + r.label + " exceeds total");
    }
  }
  if (b.sample_counts.size() == 3) {
    const auto &g = b.sample_counts[0], &u = b.sample_counts[1], &t = b.sample_counts[2];
    require(t.solutions == g.solutions + u.solutions && t.valid == g.valid + u.valid && t.sloc == g.sloc + u.sloc &&
                t.loc == g.loc + u.loc,
            "sample_counts total");
    require(g.valid <= g.solutions && u.valid <= u.solutions, "sample_counts valid exceeds solutions");
  }
  const auto& p = b.partition;
  require(p.before.total + p.after.total == p.overall.total, "partition total");
  require(p.before.solved + p.after.solved == p.overall.solved, "partition solved");
  for (const auto* s : {&p.before, &p.after, &p.overall}) {
    require(s->problems[0] + s->problems[1] + s->problems[2] == s->total, "partition/" + s->label + " difficulty sum");
    double expect = s->total ? 100.0 * static_cast<double>(s->solved) / static_cast<double>(s->total) : 0;
    require(std::abs(expect - s->solved_rate) <= 0.01, "partition/" + s->label + " rate");
  }
  for (std::size_t i = 0; i < 3; ++i)
    require(p.before.problems[i] + p.after.problems[i] == p.overall.problems[i], "partition difficulty columns");
  long long hist = 0;
  for (long long c : b.retry_histogram) hist += c;
  require(hist == static_cast<long long>(b.retry_points.size()), "retry histogram total");
}

json to_json(const ReportBundle& b) {
  auto row_json = [](const DifficultyRow& r) {
    return json{{"label", r.label}, {"counts", r.counts}, {"percent", r.percent}, {"total", r.total}};
  };
  auto part_json = [](const PartitionStats& s) {
    return json{{"label", s.label}, {"problems", s.problems}, {"total", s.total}, {"solved", s.solved},
                {"solved_rate", s.solved_rate}};
  };
  auto metric_json = [](const MetricTableRow& r) {
    return json{{"samples", r.samples}, {"problems", r.problems}, {"solutions", r.solutions}, {"count", r.count},
                {"loc", r.loc}, {"mean", r.mean}, {"median", r.median}};
  };
  json j;
  j["problem_overview"] = json::array();
  for (const auto& r : b.problem_overview) j["problem_overview"].push_back(row_json(r));
  j["acceptance_rates"] = json::array();
  for (const auto& r : b.acceptance_rates) {
    json row{{"label", r.label}, {"total", summary_json(r.total)}};
    for (std::size_t i = 0; i < 3; ++i) row[kDifficulties[i]] = summary_json(r.by_difficulty[i]);
    j["acceptance_rates"].push_back(row);
  }
  j["sample_counts"] = json::array();
  for (const auto& r : b.sample_counts)
    j["sample_counts"].push_back(
        {{"label", r.label}, {"solutions", r.solutions}, {"valid", r.valid}, {"sloc", r.sloc}, {"loc", r.loc}});
  j["solution_counts"] = json::array();
  for (const auto& r : b.solution_counts) j["solution_counts"].push_back(row_json(r));
  j["partition"] = {part_json(b.partition.before), part_json(b.partition.after), part_json(b.partition.overall)};
  for (auto [key, rows] : {std::pair{"smells_table", &b.smells_table}, std::pair{"complexity_table", &b.complexity_table}}) {
    j[key] = json::array();
    for (const auto& r : *rows) j[key].push_back(metric_json(r));
  }
  for (auto [key, rows] :
       {std::pair{"memory_rank_table", &b.memory_rank_table}, std::pair{"runtime_rank_table", &b.runtime_rank_table}}) {
    j[key] = json::array();
    for (const auto& r : *rows)
      j[key].push_back({{"scope", r.scope}, {"problems", r.problems}, {"mean", r.mean}, {"median", r.median}});
  }
  j["metric_summary"] = json::array();
  for (const auto& r : b.metric_summary)
    j["metric_summary"].push_back({{"origin", metrics::to_string(r.origin)},
                                   {"difficulty", r.difficulty},
                                   {"smells_per_kloc", summary_json(r.smells_per_kloc)},
                                   {"complexity_per_kloc", summary_json(r.complexity_per_kloc)},
                                   {"runtime_rank", summary_json(r.runtime_rank)},
                                   {"memory_rank", summary_json(r.memory_rank)}});
  j["hypothesis_table"] = json::array();
  for (const auto& r : b.hypothesis_table)
    j["hypothesis_table"].push_back({{"hypothesis", r.hypothesis},
                                     {"description", r.description},
                                     {"test", r.test},
                                     {"statistic", opt(r.statistic)},
                                     {"p_value", opt(r.p_value)},
                                     {"effect_size_d", opt(r.effect_size_d)},
                                     {"alpha_adjusted", r.alpha_adjusted},
                                     {"accepted", r.accepted},
                                     {"note", r.note}});
  j["correlations"] = json::array();
  for (const auto& r : b.correlations)
    j["correlations"].push_back(
        {{"name", r.name}, {"n", r.n}, {"rho", opt(r.rho)}, {"p_value", opt(r.p_value)}, {"note", r.note}});
  j["retry_points"] = json::array();
  for (const auto& r : b.retry_points)
    j["retry_points"].push_back(
        {{"question_id", r.question_id}, {"slug", r.slug}, {"attempts", r.attempts}, {"accepted", r.accepted}});
  j["retry_histogram"] = b.retry_histogram;
  j["generation_failures"] = b.generation_failures;
  return j;
}

std::vector<std::pair<std::string, std::string>> to_csv(const ReportBundle& b) {
  std::vector<std::pair<std::string, std::string>> out;
  auto difficulty_csv = [](const std::vector<DifficultyRow>& rows) {
    std::string s = "label,easy,easy_pct,medium,medium_pct,hard,hard_pct,total\n";
    for (const auto& r : rows) {
      s += csv_field(r.label);
      for (std::size_t i = 0; i < 3; ++i) s += "," + std::to_string(r.counts[i]) + "," + num(r.percent[i]);
      s += "," + std::to_string(r.total) + "\n";
    }
    return s;
  };
  out.emplace_back("problem_overview.csv", difficulty_csv(b.problem_overview));
  {
    std::string s = "label,easy_mean,easy_median,medium_mean,medium_median,hard_mean,hard_median,total_mean,total_median\n";
    for (const auto& r : b.acceptance_rates) {
      s += csv_field(r.label);
      for (const auto& sm : r.by_difficulty) s += "," + num(sm.mean) + "," + num(sm.median);
      s += "," + num(r.total.mean) + "," + num(r.total.median) + "\n";
    }
    out.emplace_back("acceptance_rates.csv", s);
  }
  {
    std::string s = "label,solutions,valid,sloc,loc\n";
    for (const auto& r : b.sample_counts)
      s += r.label + "," + std::to_string(r.solutions) + "," + std::to_string(r.valid) + "," + std::to_string(r.sloc) +
           "," + std::to_string(r.loc) + "\n";
    out.emplace_back("sample_counts.csv", s);
  }
  out.emplace_back("solution_counts.csv", difficulty_csv(b.solution_counts));
  {
    std::string s = "partition,easy,medium,hard,total,solved,solved_rate\n";
    for (const auto* p : {&b.partition.before, &b.partition.after, &b.partition.overall})
      s += p->label + "," + std::to_string(p->problems[0]) + "," + std::to_string(p->problems[1]) + "," +
           std::to_string(p->problems[2]) + "," + std::to_string(p->total) + "," + std::to_string(p->solved) + "," +
           num(p->solved_rate) + "\n";
    out.emplace_back("partition.csv", s);
  }
  for (auto [name, rows] : {std::pair{"smells_table.csv", &b.smells_table},
                            std::pair{"complexity_table.csv", &b.complexity_table}}) {
    std::string s = "samples,problems,solutions,count,loc,mean,median\n";
    for (const auto& r : *rows)
      s += r.samples + "," + std::to_string(r.problems) + "," + std::to_string(r.solutions) + "," +
           std::to_string(r.count) + "," + std::to_string(r.loc) + "," + num(r.mean) + "," + num(r.median) + "\n";
    out.emplace_back(name, s);
  }
  for (auto [name, rows] : {std::pair{"memory_rank_table.csv", &b.memory_rank_table},
                            std::pair{"runtime_rank_table.csv", &b.runtime_rank_table}}) {
    std::string s = "scope,problems,mean,median\n";
    for (const auto& r : *rows) s += r.scope + "," + std::to_string(r.problems) + "," + num(r.mean) + "," + num(r.median) + "\n";
    out.emplace_back(name, s);
  }
  {
    std::string s = "origin,difficulty,metric,n,mean,median\n";
    for (const auto& r : b.metric_summary) {
      for (auto [metric, sm] : {std::pair{"smells_per_kloc", &r.smells_per_kloc},
                                std::pair{"complexity_per_kloc", &r.complexity_per_kloc},
                                std::pair{"runtime_rank", &r.runtime_rank}, std::pair{"memory_rank", &r.memory_rank}})
        s += std::string(metrics::to_string(r.origin)) + "," + r.difficulty + "," + metric + "," +
             std::to_string(sm->n) + "," + num(sm->mean) + "," + num(sm->median) + "\n";
    }
    out.emplace_back("metric_summary.csv", s);
  }
  {
    std::string s = "hypothesis,test,statistic,p_value,effect_size_d,alpha_adjusted,accepted,note\n";
    for (const auto& r : b.hypothesis_table)
      s += r.hypothesis + "," + r.test + "," + num(r.statistic, 10) + "," + num(r.p_value) + "," +
           num(r.effect_size_d) + "," + num(std::optional<double>(r.alpha_adjusted)) + "," +
           (r.accepted ? "yes" : "no") + "," + csv_field(r.note) + "\n";
    out.emplace_back("hypothesis_table.csv", s);
  }
  {
    std::string s = "name,n,rho,p_value,note\n";
    for (const auto& r : b.correlations)
      s += csv_field(r.name) + "," + std::to_string(r.n) + "," + num(r.rho) + "," + num(r.p_value) + "," +
           csv_field(r.note) + "\n";
    out.emplace_back("correlations.csv", s);
  }
  {
    std::string s = "question_id,slug,attempts,accepted\n";
    for (const auto& r : b.retry_points)
      s += std::to_string(r.question_id) + "," + r.slug + "," + std::to_string(r.attempts) + "," +
           (r.accepted ? "yes" : "no") + "\n";
    out.emplace_back("retry_points.csv", s);
  }
  return out;
}

}  // namespace codebench::pipeline
