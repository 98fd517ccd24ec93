"""Recomputes the report tables of a finished pipeline run.

    report_aggregates.py PROBLEMS_DUMP WORK_DIR REPORT_JSON

Reads the problem dump and the persisted stage outputs, derives every
aggregate with the standard library (and scipy for the tests), and compares
with REPORT_JSON. Exits non-zero listing each mismatch.
"""
import glob
import json
import math
import statistics
import sys
from datetime import date

from scipy import stats

DIFFS = ["Easy", "Medium", "Hard"]
problems_path, work, report_path = sys.argv[1:4]
report = json.load(open(report_path))
errors = []


def close(a, b, what, tol=1e-9):
    if a is None or b is None:
        if a is not b:
            errors.append("%s: %r != %r" % (what, a, b))
        return
    if isinstance(a, (list, tuple)):
        if len(a) != len(b):
            errors.append("%s: length %d != %d" % (what, len(a), len(b)))
            return
        for i, (x, y) in enumerate(zip(a, b)):
            close(x, y, "%s[%d]" % (what, i), tol)
        return
    if isinstance(a, str) or isinstance(a, bool):
        if a != b:
            errors.append("%s: %r != %r" % (what, a, b))
        return
    if not math.isclose(a, b, rel_tol=tol, abs_tol=tol):
        errors.append("%s: %r != %r" % (what, a, b))


def records(stage):
    (path,) = glob.glob("%s/%s/*.jsonl" % (work, stage))
    return [json.loads(l) for l in open(path) if l.strip()]


def rate(part, whole):
    return 0.0 if whole == 0 else round(100.0 * part / whole, 2)


def summary(values):
    if not values:
        return {"n": 0, "mean": 0.0, "median": 0.0}
    return {"n": len(values), "mean": statistics.fmean(values), "median": statistics.median(values)}


problems = [json.loads(l) for l in open(problems_path) if l.strip()]
problems = [p for p in problems if not p.get("premium") and not set(p["categories"]) <= {"Database", "Shell"}]
by_slug = {p["slug"]: p for p in problems}
generated = records("generate")
outcomes = [g["outcome"] for g in generated if "outcome" in g]
failures = sorted(g["slug"] for g in generated if "outcome" not in g)
metrics = records("analyze")
gen_m = [m for m in metrics if m["origin"] == "generated"]
user_m = [m for m in metrics if m["origin"] == "user"]
judged = records("judge")

gen_solved = {o["problem_slug"] for o in outcomes if o["status"] == "Accepted"}
user_solved = {m["problem_slug"] for m in user_m}


def diff_counts(keep):
    c = [0, 0, 0]
    for p in problems:
        if keep(p):
            c[DIFFS.index(p["difficulty"])] += 1
    return c


def check_row(row, label, counts, what):
    close(row["label"], label, what + ".label")
    close(row["counts"], counts, what + ".counts")
    close(row["total"], sum(counts), what + ".total")
    close(row["percent"], [rate(c, sum(counts)) for c in counts], what + ".percent")


rows = report["problem_overview"]
check_row(rows[0], "Generated solved", diff_counts(lambda p: p["slug"] in gen_solved), "overview[0]")
check_row(rows[1], "User solved", diff_counts(lambda p: p["slug"] in user_solved), "overview[1]")
check_row(rows[2], "Total", diff_counts(lambda p: True), "overview[2]")

for row, keep in zip(report["acceptance_rates"], [gen_solved, user_solved, None]):
    sel = [p for p in problems if keep is None or p["slug"] in keep]
    for d in DIFFS:
        s = summary([100 * p["acceptance_rate"] for p in sel if p["difficulty"] == d])
        close([row[d]["n"], row[d]["mean"], row[d]["median"]], [s["n"], s["mean"], s["median"]], "acceptance." + d)
    s = summary([100 * p["acceptance_rate"] for p in sel])
    close([row["total"]["mean"], row["total"]["median"]], [s["mean"], s["median"]], "acceptance.total")


def lines(ms):
    return sum(m["sloc"] for m in ms), sum(m["ncloc"] for m in ms)


g_sloc, g_loc = lines(gen_m)
u_sloc, u_loc = lines(user_m)
sc = report["sample_counts"]
close([sc[0]["solutions"], sc[0]["valid"], sc[0]["sloc"], sc[0]["loc"]],
      [len(outcomes) + len(failures), len(gen_m), g_sloc, g_loc], "sample_counts.generated")
close([sc[1]["solutions"], sc[1]["valid"], sc[1]["sloc"], sc[1]["loc"]],
      [len(judged), len(user_m), u_sloc, u_loc], "sample_counts.user")


def sol_counts(ms):
    c = [0, 0, 0]
    for m in ms:
        c[DIFFS.index(by_slug[m["problem_slug"]]["difficulty"])] += 1
    return c


check_row(report["solution_counts"][0], "Generated", sol_counts(gen_m), "solution_counts[0]")
check_row(report["solution_counts"][1], "User", sol_counts(user_m), "solution_counts[1]")

cutoff = date(2023, 10, 1)
parts = {"before": [], "after": []}
for p in problems:
    parts["before" if date.fromisoformat(p["released_at"]) < cutoff else "after"].append(p)
parts["total"] = problems
for got in report["partition"]:
    ps = parts[got["label"]]
    solved = sum(p["slug"] in gen_solved for p in ps)
    close([got["total"], got["solved"], got["solved_rate"]], [len(ps), solved, rate(solved, len(ps))],
          "partition." + got["label"])
    close(got["problems"], [sum(p["difficulty"] == d for p in ps) for d in DIFFS], "partition.problems")


def per_problem(ms, field):
    acc = {}
    for m in ms:
        if m.get(field) is not None:
            acc.setdefault(m["problem_slug"], []).append(m[field])
    return {k: statistics.fmean(v) for k, v in acc.items()}


pairs = {}
for table, field, count in [("smells_table", "smells_per_kloc", "smell_count"),
                            ("complexity_table", "complexity_per_kloc", "complexity_total")]:
    g, u = per_problem(gen_m, field), per_problem(user_m, field)
    shared = sorted(set(g) & set(u))
    pairs[field] = ([g[s] for s in shared], [u[s] for s in shared])
    for row, ms, vals in [(report[table][0], gen_m, pairs[field][0]), (report[table][1], user_m, pairs[field][1])]:
        inside = [m for m in ms if m["problem_slug"] in shared]
        s = summary(vals)
        close([row["problems"], row["solutions"], row["count"], row["loc"], row["mean"], row["median"]],
              [len(shared), len(inside), sum(m[count] for m in inside), sum(m["ncloc"] for m in inside),
               s["mean"], s["median"]], table + "." + row["samples"])

for table, field in [("memory_rank_table", "memory_rank"), ("runtime_rank_table", "runtime_rank")]:
    for row in report[table]:
        vals = [m[field] for m in gen_m if m.get(field) is not None and
                (row["scope"] == "All" or by_slug[m["problem_slug"]]["difficulty"] == row["scope"])]
        s = summary(vals)
        close([row["problems"], row["mean"], row["median"]], [s["n"], s["mean"], s["median"]], table + "." + row["scope"])

for row in report["metric_summary"]:
    ms = gen_m if row["origin"] == "generated" else user_m
    if row["difficulty"] != "Total":
        ms = [m for m in ms if by_slug[m["problem_slug"]]["difficulty"] == row["difficulty"]]
    for field in ["smells_per_kloc", "complexity_per_kloc", "runtime_rank", "memory_rank"]:
        s = summary([m[field] for m in ms if m.get(field) is not None])
        close([row[field]["n"], row[field]["mean"], row[field]["median"]], [s["n"], s["mean"], s["median"]],
              "metric_summary.%s.%s.%s" % (row["origin"], row["difficulty"], field))

hyp = report["hypothesis_table"]
alpha = 0.05 / 4
for row, field in zip(hyp[:2], ["smells_per_kloc", "complexity_per_kloc"]):
    g, u = pairs[field]
    r = stats.mannwhitneyu(g, u, alternative="less", method="asymptotic", use_continuity=True)
    close([row["statistic"], row["p_value"], row["alpha_adjusted"]], [r.statistic, r.pvalue, alpha],
          "hypothesis." + row["hypothesis"], 1e-7)
    close(row["accepted"], bool(r.pvalue < alpha), "hypothesis.accepted")
for row, field in zip(hyp[2:], ["memory_rank", "runtime_rank"]):
    diffs = [m[field] - 50 for m in gen_m if m.get(field) is not None]
    r = stats.wilcoxon(diffs, alternative="greater", zero_method="wilcox", correction=True, method="approx")
    close([row["statistic"], row["p_value"]], [r.statistic, r.pvalue], "hypothesis." + row["hypothesis"], 1e-7)

corr = report["correlations"]
lvl = {d: i + 1 for i, d in enumerate(DIFFS)}
us = [(m["smells_per_kloc"], lvl[by_slug[m["problem_slug"]]["difficulty"]]) for m in user_m
      if m.get("smells_per_kloc") is not None]
for row, xy in [(corr[0], us),
                (corr[1], [(m["smells_per_kloc"], by_slug[m["problem_slug"]]["question_id"]) for m in gen_m
                           if m.get("smells_per_kloc") is not None]),
                (corr[2], [(m["complexity_per_kloc"], by_slug[m["problem_slug"]]["question_id"]) for m in gen_m
                           if m.get("complexity_per_kloc") is not None])]:
    x, y = zip(*xy)
    r = stats.spearmanr(x, y)
    close([row["n"], row["rho"], row["p_value"]], [len(x), r.correlation, r.pvalue], "correlation " + row["name"], 1e-7)

hist = [0] * 6
for o in outcomes:
    hist[o["attempts_used"] - 1 if o["status"] == "Accepted" else 5] += 1
close(report["retry_histogram"], hist, "retry_histogram")
close(report["generation_failures"], failures, "generation_failures")
points = sorted((by_slug[o["problem_slug"]]["question_id"], o["problem_slug"], o["attempts_used"],
                 o["status"] == "Accepted") for o in outcomes)
close([[p["question_id"], p["slug"], p["attempts"], p["accepted"]] for p in report["retry_points"]],
      [list(p) for p in points], "retry_points")

if errors:
    print("\n".join(errors))
    sys.exit(1)
print("report aggregates agree")
