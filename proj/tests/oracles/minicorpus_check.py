"""End-to-end check of the command line tool on the mini-corpus.

    minicorpus_check.py CODEBENCH_EXE FIXTURE_DIR

Regenerates the fixture files and compares them byte for byte, runs
`run-all` with one and four workers in scratch copies, compares both reports
with the golden file, recomputes the aggregates independently, and checks
the exit codes for a broken config and a failing stage.
"""
import filecmp
import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

exe, fixtures = sys.argv[1], Path(sys.argv[2])
here = Path(__file__).resolve().parent
failures = []


def expect(cond, what):
    if not cond:
        failures.append(what)


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    regen = tmp / "regen"
    regen.mkdir()
    subprocess.run([sys.executable, str(fixtures / "make_corpus.py"), str(regen)], check=True)
    for name in ["problems.jsonl", "posts.jsonl", "transcripts.jsonl", "config.json"]:
        expect(filecmp.cmp(regen / name, fixtures / name, shallow=False), "regenerated %s differs" % name)

    golden = (fixtures / "golden" / "report.json").read_text()
    for workers in ["1", "4"]:
        run = tmp / ("w" + workers)
        shutil.copytree(fixtures, run, ignore=shutil.ignore_patterns("golden", "work", "report", "__pycache__"))
        r = subprocess.run([exe, "run-all", "-q", "-c", str(run / "config.json"), "-w", workers],
                           capture_output=True, text=True)
        expect(r.returncode == 0, "run-all -w %s exited %d: %s" % (workers, r.returncode, r.stderr))
        expect((run / "report" / "report.json").read_text() == golden, "report with %s workers differs" % workers)
        o = subprocess.run([sys.executable, str(here / "report_aggregates.py"), str(run / "problems.jsonl"),
                            str(run / "work"), str(run / "report" / "report.json")], capture_output=True, text=True)
        expect(o.returncode == 0, "aggregate oracle: " + o.stdout + o.stderr)

    run = tmp / "w1"
    r = subprocess.run([exe, "run-all", "-c", str(run / "config.json")], capture_output=True, text=True)
    expect(r.returncode == 0 and "done in" not in r.stderr, "repeated run-all recomputed a stage")

    cfg = json.loads((run / "config.json").read_text())
    cfg["workers"] = 0
    (run / "bad.json").write_text(json.dumps(cfg))
    r = subprocess.run([exe, "run-all", "-c", str(run / "bad.json")], capture_output=True, text=True)
    expect(r.returncode == 3, "config error exit code %d" % r.returncode)

    cfg["workers"] = 1
    cfg["work_dir"] = "work_broken"
    cfg["corpus"]["problems"] = "broken.jsonl"
    (run / "broken.jsonl").write_text("{not json\n")
    (run / "broken.json").write_text(json.dumps(cfg))
    r = subprocess.run([exe, "run-all", "-c", str(run / "broken.json")], capture_output=True, text=True)
    expect(r.returncode == 2 and "resume with: import:" in r.stderr, "stage failure exit code %d" % r.returncode)

    r = subprocess.run([exe, "import", "-q", "--problems", str(run / "problems.jsonl"), "--posts",
                        str(run / "posts.jsonl"), "--min-upvotes", "3"], capture_output=True, text=True, cwd=tmp)
    expect(r.returncode == 0 and (tmp / "work" / "import").is_dir(), "import without a config: " + r.stderr)
    r = subprocess.run([exe, "import", "--posts", str(run / "posts.jsonl")], capture_output=True, text=True, cwd=tmp)
    expect(r.returncode == 3, "import without problems exit code %d" % r.returncode)

    src = tmp / "snippet.py"
    src.write_text("class Solution:\n    def f(self, xs):\n        return Counter(xs).most_common(1)\n")
    r = subprocess.run([exe, "detect", "--snippet", str(src)], capture_output=True, text=True)
    scores = json.loads(r.stdout)
    expect(scores["language"] == "python" and scores["score"] == max(scores["scores"].values()),
           "detect --snippet: " + r.stdout)
    r = subprocess.run([exe, "repair", "--in", str(src), "--out", str(tmp / "fixed.py")], capture_output=True, text=True)
    expect(r.returncode == 0 and (tmp / "fixed.py").read_text().startswith("from collections import Counter\n"),
           "repair --in/--out: " + r.stderr)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("mini-corpus checks passed")
