"""Undefined-name oracle built on the standard symtable module.

A name is undefined when some scope references it as a global (implicit or
declared) and the module scope never binds it and it is not a builtin.

Usage:
    undefined_names.py FILE...          print {file: [names]} as JSON
    undefined_names.py --check DIR      compare against DIR/expected.json
"""
import builtins
import json
import pathlib
import symtable
import sys


def undefined(source, name="<src>"):
    top = symtable.symtable(source, name, "exec")
    module_bound = {s.get_name() for s in top.get_symbols() if s.is_assigned() or s.is_imported()
                    or s.is_namespace()}
    star = "*" in source and any(line.lstrip().startswith("from ") and line.rstrip().endswith("*")
                                 for line in source.splitlines())
    out = set()

    def visit(table):
        for s in table.get_symbols():
            if not s.is_referenced():
                continue
            # is_global() also reports locals that share a module-level name.
            if table.get_type() == "module" or not (s.is_local() or s.is_free()):
                n = s.get_name()
                if n not in module_bound and not hasattr(builtins, n) and not star:
                    out.add(n)
        for child in table.get_children():
            visit(child)

    visit(top)
    return sorted(out)


def report(paths):
    return {pathlib.Path(p).name: undefined(pathlib.Path(p).read_text(), p) for p in paths}


def main(argv):
    if len(argv) >= 2 and argv[0] == "--check":
        d = pathlib.Path(argv[1])
        expected = json.loads((d / "expected.json").read_text())
        actual = report(sorted(d.glob("*.py")))
        bad = [k for k in sorted(set(expected) | set(actual)) if expected.get(k) != actual.get(k)]
        for k in bad:
            print(f"{k}: expected {expected.get(k)} oracle {actual.get(k)}")
        return 1 if bad else 0
    json.dump(report(argv), sys.stdout, indent=1, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
