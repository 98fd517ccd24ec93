"""Independent line counter built on the standard tokenize module.

A physical line is a code line when it is not whitespace-only and some
non-comment token covers it. Prints per-file counts and totals as JSON.
"""
import io
import json
import sys
import tokenize
from pathlib import Path

SKIP = {tokenize.COMMENT, tokenize.NL, tokenize.NEWLINE, tokenize.INDENT,
        tokenize.DEDENT, tokenize.ENDMARKER, tokenize.ENCODING}


def count(text):
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    covered = set()
    for tok in tokenize.generate_tokens(io.StringIO(text).readline):
        if tok.type in SKIP:
            continue
        covered.update(range(tok.start[0], tok.end[0] + 1))
    ncloc = sum(1 for i, line in enumerate(lines, 1) if line.strip() and i in covered)
    return {"sloc": len(lines), "ncloc": ncloc}


def report(paths):
    files = {}
    for p in sorted(paths):
        files[Path(p).name] = count(Path(p).read_bytes().decode("utf-8"))
    total = {"sloc": sum(f["sloc"] for f in files.values()),
             "ncloc": sum(f["ncloc"] for f in files.values())}
    return {"files": files, "total": total}


def main(argv):
    if argv and argv[0] == "--check":
        # --check <dir>: recount <dir>/*.py and compare with <dir>/expected.json
        folder = Path(argv[1])
        got = report(folder.glob("*.py"))
        want = json.loads((folder / "expected.json").read_text())
        if got != want:
            print("oracle counts differ from expected.json", file=sys.stderr)
            return 1
        print("oracle totals:", got["total"])
        return 0
    json.dump(report(argv), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
