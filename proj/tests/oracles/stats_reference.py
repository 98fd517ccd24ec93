"""Reference p-values from scipy.stats for the statistics tests.

Usage:
    stats_reference.py OUT.json     regenerate the reference cases
    stats_reference.py --check IN   recompute and compare to 1e-12
"""
import json
import sys

import numpy as np
from scipy import stats

ALTS = ["less", "greater", "two-sided"]


def cases():
    rng = np.random.default_rng(20240601)
    out = []
    for i in range(60):
        n1, n2 = int(rng.integers(3, 7)), int(rng.integers(3, 7))
        pool = rng.permutation(100)[: n1 + n2]
        a, b = [float(v) for v in pool[:n1]], [float(v) for v in pool[n1:] + (i % 3)]
        alt = ALTS[i % 3]
        # scipy's exact path assumes distinct values
        if len(set(a) | set(b)) != n1 + n2:
            continue
        out.append({"op": "mwu", "computation": "exact", "a": a, "b": b, "alternative": alt,
                    "p": float(stats.mannwhitneyu(a, b, alternative=alt, method="exact").pvalue)})
    for i in range(60):
        n1, n2 = int(rng.integers(5, 30)), int(rng.integers(5, 30))
        a = [float(v) for v in rng.integers(0, 12, n1)]
        b = [float(v) for v in rng.integers(2, 14, n2)]
        alt = ALTS[i % 3]
        out.append({"op": "mwu", "computation": "approximate", "a": a, "b": b, "alternative": alt,
                    "p": float(stats.mannwhitneyu(a, b, alternative=alt, method="asymptotic",
                                                  use_continuity=True).pvalue)})
    for i in range(60):
        n = int(rng.integers(3, 15))
        x = [float(v) for v in rng.permutation(np.arange(1, 40))[:n] + 30]
        alt = ALTS[i % 3]
        d = np.array(x) - 50
        if np.any(d == 0) or len(set(np.abs(d))) != n:
            continue
        out.append({"op": "wilcoxon", "computation": "exact", "sample": x, "mu0": 50.0, "alternative": alt,
                    "p": float(stats.wilcoxon(d, alternative=alt, method="exact").pvalue)})
    for i in range(60):
        n = int(rng.integers(10, 60))
        x = [float(v) for v in rng.integers(20, 90, n)]
        alt = ALTS[i % 3]
        d = np.array(x) - 50
        if np.all(d == 0):
            continue
        out.append({"op": "wilcoxon", "computation": "approximate", "sample": x, "mu0": 50.0, "alternative": alt,
                    "p": float(stats.wilcoxon(d, alternative=alt, method="approx", correction=True,
                                              zero_method="wilcox").pvalue)})
    for i in range(60):
        n = int(rng.integers(4, 40))
        x = [float(v) for v in rng.integers(0, 10, n)]
        y = [float(v) + 0.3 * x[k] for k, v in enumerate(rng.integers(0, 10, n))]
        alt = ALTS[i % 3]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        r = stats.spearmanr(x, y, alternative=alt)
        out.append({"op": "spearman", "computation": "approximate", "x": x, "y": y, "alternative": alt,
                    "rho": float(r.statistic), "p": float(r.pvalue)})
    return out


def main(argv):
    if argv and argv[0] == "--check":
        stored = json.load(open(argv[1]))["cases"]
        fresh = cases()
        bad = [i for i, (s, f) in enumerate(zip(stored, fresh)) if abs(s["p"] - f["p"]) > 1e-12]
        if len(stored) != len(fresh) or bad:
            print("mismatch at", bad[:10], len(stored), len(fresh))
            return 1
        return 0
    json.dump({"cases": cases()}, open(argv[0], "w"), indent=1)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
