"""Rank sweep at fixed N: how assembly, factorization and solve time grow with p.

    python scripts/p_sweep.py --n 100000 --ranks 1,2,4,8,16
"""

import argparse

import numpy as np

from ess.cli import run_case

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=10_000)
parser.add_argument("--ranks", default="1,2,4,8,16")
parser.add_argument("--repeats", type=int, default=5)
args = parser.parse_args()

ranks = [int(r) for r in args.ranks.split(",")]
run_case(100, 1, 0)

rows = []
for p in ranks:
    recs = [run_case(args.n, p, seed) for seed in range(args.repeats)]
    best = [min(getattr(r, k) for r in recs) for k in ("assembly_ms", "factorize_ms", "solve_ms")]
    res = max(r.residual_inf for r in recs)
    rows.append((p, *best, res))
    print(f"p={p:>3}  assembly {best[0]:8.2f} ms  factorize {best[1]:8.2f} ms  solve {best[2]:8.2f} ms  max|Ax-b| {res:.1e}")

if len(rows) > 1:
    logp = np.log([r[0] for r in rows])
    for i, name in enumerate(("assembly", "factorize", "solve"), start=1):
        slope = np.polyfit(logp, np.log([r[i] for r in rows]), 1)[0]
        print(f"log-log slope in p, {name}: {slope:.2f}")
