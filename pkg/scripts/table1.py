"""System-size sweep at fixed rank: timings, residuals and log-det error per N.

    python scripts/table1.py --out table1.jsonl
    python scripts/table1.py --sizes 500,1000,2000 --dense-cap 2000

Dense columns (textbook O(N^3) LU) only appear for N <= --dense-cap.
"""

import argparse
import json

from ess.cli import run_case

parser = argparse.ArgumentParser()
parser.add_argument("--sizes", default="500,1000,2000,5000,10000,20000,50000,100000,200000,500000,1000000")
parser.add_argument("--p", type=int, default=5)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--dense-cap", type=int, default=2000)
parser.add_argument("--out")
args = parser.parse_args()

sizes = [int(float(s)) for s in args.sizes.split(",")]
run_case(100, args.p, args.seed)  # jit warm-up
out = open(args.out, "w") if args.out else None

print(f"{'N':>8} {'asm ms':>9} {'fac ms':>9} {'sol ms':>9} {'|Ax-b|':>9} {'|Aex-b|':>9} {'logdet err':>10}")
for n in sizes:
    rec = run_case(n, args.p, args.seed, verify=True, dense_cap=args.dense_cap)
    err = f"{rec.logdet_rel_err:10.2e}" if rec.logdet_rel_err is not None else f"{'-':>10}"
    print(
        f"{n:>8} {rec.assembly_ms:9.2f} {rec.factorize_ms:9.2f} {rec.solve_ms:9.2f} "
        f"{rec.residual_inf:9.1e} {rec.residual_ex_inf:9.1e} {err}"
    )
    if out:
        out.write(rec.to_json() + "\n")
if out:
    out.close()
