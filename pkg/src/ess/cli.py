"""Command-line front end: ``ess generate | solve | bench``.

Kernel file format (``#`` starts a comment)::

    n: 4
    p: 2
    d: 3.5
    alpha: 0.5, 1.5
    beta: 0.1, 1.0
    t:
    0.0
    1.0
    3.0
    4.5

A right-hand side file holds one value per line. ``solve`` prints one JSON
document; ``bench`` prints one JSON record per line. ``residual_inf`` is
``||A x - b||_inf``, ``residual_ex_inf`` the same for the extended system.
Exit codes: 0 success, 1 numerical failure, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .banded import SingularMatrixError
from .embedding import extended_residual_inf, extract_solution, triplets
from .semiseparable import ExponentialKernelSpec
from .solver import embed, factor_system, logdet, residual_inf, solve_extended

EXIT_NUMERICAL = 1
EXIT_INPUT = 2


class InputError(ValueError):
    def __init__(self, path, line: int, col: int, msg: str):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.line = line
        self.col = col


def random_problem(n: int, p: int, seed: int) -> tuple[ExponentialKernelSpec, np.ndarray]:
    """Benchmark problem: sorted ``t ~ U[0, 20]``, ``alpha, beta ~ U[0, 2]``, ``d = 1 + sum(alpha)``.

    Draws come from ``numpy.random.default_rng(seed)`` (PCG64) in the order
    t, alpha, beta, b, with ``b ~ U[-1, 1]``. Ties in ``t`` are redrawn.
    """
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    rng = np.random.default_rng(seed)
    t = np.sort(rng.uniform(0.0, 20.0, n))
    while np.any(np.diff(t) <= 0):
        t = np.sort(rng.uniform(0.0, 20.0, n))
    alpha = rng.uniform(0.0, 2.0, p)
    beta = rng.uniform(0.0, 2.0, p)
    b = rng.uniform(-1.0, 1.0, n)
    return ExponentialKernelSpec(d=1.0 + alpha.sum(), alpha=alpha, beta=beta, t=t), b


def _fmt(x: float) -> str:
    return repr(float(x))


def format_kernel(spec: ExponentialKernelSpec) -> str:
    lines = [
        f"n: {spec.n}",
        f"p: {spec.p}",
        f"d: {_fmt(spec.d)}",
        "alpha: " + ", ".join(map(_fmt, spec.alpha)),
        "beta: " + ", ".join(map(_fmt, spec.beta)),
        "t:",
    ]
    lines += map(_fmt, spec.t)
    return "\n".join(lines) + "\n"


def format_vector(v) -> str:
    return "".join(_fmt(x) + "\n" for x in v)


def _parse_float(tok: str, path, line: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InputError(path, line, col, f"not a number: {tok!r}") from None


def _parse_list(text: str, path, line: int, col0: int) -> list[float]:
    out = []
    col = col0
    for piece in text.split(","):
        lead = len(piece) - len(piece.lstrip())
        tok = piece.strip()
        if not tok:
            raise InputError(path, line, col + lead, "empty value in comma-separated list")
        out.append(_parse_float(tok, path, line, col + lead))
        col += len(piece) + 1
    return out


def parse_kernel(text: str, path="<kernel>") -> ExponentialKernelSpec:
    header: dict[str, tuple] = {}
    t: list[float] = []
    in_t = False
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip()) + 1
        if in_t:
            t.append(_parse_float(body.strip(), path, lineno, indent))
            continue
        key, sep, rest = body.partition(":")
        key = key.strip()
        if not sep or key not in ("n", "p", "d", "alpha", "beta", "t"):
            raise InputError(path, lineno, indent, f"expected one of n, p, d, alpha, beta, t; got {body.strip()!r}")
        if key in header:
            raise InputError(path, lineno, indent, f"duplicate key {key!r}")
        vcol = len(body) - len(rest) + 1
        if key == "t":
            if rest.strip():
                raise InputError(path, lineno, vcol, "t values go one per line after 't:'")
            header["t"] = (lineno,)
            in_t = True
        elif key in ("n", "p"):
            tok = rest.strip()
            try:
                header[key] = (int(tok), lineno)
            except ValueError:
                raise InputError(path, lineno, vcol, f"{key} must be an integer, got {tok!r}") from None
        elif key == "d":
            header[key] = (_parse_float(rest.strip(), path, lineno, vcol), lineno)
        else:
            header[key] = (_parse_list(rest, path, lineno, vcol), lineno)

    for key in ("n", "p", "d", "alpha", "beta", "t"):
        if key not in header:
            raise InputError(path, last_line + 1, 1, f"missing {key!r}")
    n, nline = header["n"]
    p, pline = header["p"]
    if len(t) != n:
        raise InputError(path, nline, 1, f"n is {n} but {len(t)} t values were given")
    for key in ("alpha", "beta"):
        vals, line = header[key]
        if len(vals) != p:
            raise InputError(path, line, 1, f"p is {p} but {key} has {len(vals)} values")
    try:
        return ExponentialKernelSpec(d=header["d"][0], alpha=header["alpha"][0], beta=header["beta"][0], t=t)
    except ValueError as err:
        raise InputError(path, header["t"][0], 1, str(err)) from None


def parse_vector(text: str, path="<rhs>") -> np.ndarray:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        out.append(_parse_float(body.strip(), path, lineno, len(body) - len(body.lstrip()) + 1))
    return np.array(out)


@dataclass
class BenchmarkRecord:
    n: int
    p: int
    seed: int
    mode: str
    assembly_ms: float
    factorize_ms: float
    solve_ms: float
    residual_inf: float
    residual_ex_inf: float
    logdet: float
    logdet_rel_err: float | None = None
    dense_assembly_ms: float | None = None
    dense_factorize_ms: float | None = None
    dense_solve_ms: float | None = None
    dense_residual_inf: float | None = None
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None})


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1e3


def run_case(n: int, p: int, seed: int, verify: bool = False, dense_cap: int = oracle.DEFAULT_DENSE_CAP) -> BenchmarkRecord:
    spec, b = random_problem(n, p, seed)
    t0 = time.perf_counter()
    sys_ = embed(spec)
    assembly = _ms(t0)
    t0 = time.perf_counter()
    F = factor_system(spec, sys_, consume=True)
    factor = _ms(t0)
    t0 = time.perf_counter()
    x_ex = solve_extended(F, b)
    x = extract_solution(F.sys, x_ex)
    solve_ms = _ms(t0)
    ld, _ = logdet(F)
    rec = BenchmarkRecord(
        n=n, p=p, seed=seed, mode="fast",
        assembly_ms=assembly, factorize_ms=factor, solve_ms=solve_ms,
        residual_inf=residual_inf(spec, x, b),
        residual_ex_inf=extended_residual_inf(spec, x_ex, b),
        logdet=ld,
    )
    if verify and n <= dense_cap:
        t0 = time.perf_counter()
        A = oracle.assemble_dense(spec, cap=dense_cap)
        rec.dense_assembly_ms = _ms(t0)
        t0 = time.perf_counter()
        lu, perm, _ = oracle.dense_lu(A)
        rec.dense_factorize_ms = _ms(t0)
        t0 = time.perf_counter()
        xd = oracle.dense_lu_solve(lu, perm, b)
        rec.dense_solve_ms = _ms(t0)
        rec.dense_residual_inf = float(np.max(np.abs(A @ xd - b)))
        ld_dense = float(np.sum(np.log(np.abs(np.diag(lu)))))
        rec.logdet_rel_err = abs(ld - ld_dense) / abs(ld_dense)
        rec.mode = "both"
    return rec


def _int_list(s: str) -> list[int]:
    try:
        out = [int(float(v)) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return out


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ess", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random benchmark kernel and right-hand side")
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--p", type=_positive, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, help="kernel file (default: stdout)")
    g.add_argument("--rhs", type=Path, help="right-hand side file (default: <out>.rhs)")

    s = sub.add_parser("solve", help="solve A x = b for a kernel file")
    s.add_argument("kernel", type=Path)
    s.add_argument("--rhs", type=Path, help="right-hand side file (default: all ones)")
    s.add_argument("--verify", action="store_true", help="compare against the dense oracle")
    s.add_argument("--dense-cap", type=int, default=oracle.DEFAULT_DENSE_CAP)
    s.add_argument("--out", type=Path, help="write the report here instead of stdout")
    s.add_argument("--triplets", type=Path, help="dump the extended matrix as 'row col value' lines (0-based)")

    b = sub.add_parser("bench", help="timing and accuracy sweep over n, p and seeds")
    b.add_argument("--n", type=_int_list, required=True, help="comma-separated sizes")
    b.add_argument("--p", type=_int_list, required=True, help="comma-separated ranks")
    b.add_argument("--seed", type=_int_list, default=[0], help="comma-separated seeds")
    b.add_argument("--verify", action="store_true", help="add dense timings and log-det error for n <= dense cap")
    b.add_argument("--dense-cap", type=int, default=oracle.DEFAULT_DENSE_CAP)
    b.add_argument("--out", type=Path, help="append records here instead of stdout")
    return parser


def _cmd_generate(args) -> int:
    spec, rhs = random_problem(args.n, args.p, args.seed)
    if args.out is None:
        sys.stdout.write(format_kernel(spec))
    else:
        args.out.write_text(format_kernel(spec))
    rhs_path = args.rhs or (args.out.with_name(args.out.name + ".rhs") if args.out else None)
    if rhs_path is not None:
        rhs_path.write_text(format_vector(rhs))
    return 0


def _cmd_solve(args) -> int:
    try:
        spec = parse_kernel(args.kernel.read_text(), args.kernel)
        if args.rhs is not None:
            b = parse_vector(args.rhs.read_text(), args.rhs)
            if b.shape[0] != spec.n:
                raise InputError(args.rhs, 1, 1, f"expected {spec.n} values, got {b.shape[0]}")
        else:
            b = np.ones(spec.n)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT

    if args.triplets is not None:
        rows, cols, vals = triplets(spec)
        with args.triplets.open("w") as fh:
            for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
                fh.write(f"{r} {c} {v!r}\n")

    timings = {}
    try:
        t0 = time.perf_counter()
        sys_ = embed(spec)
        timings["assembly_ms"] = _ms(t0)
        t0 = time.perf_counter()
        F = factor_system(spec, sys_, consume=True)
        timings["factorize_ms"] = _ms(t0)
    except SingularMatrixError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    t0 = time.perf_counter()
    x_ex = solve_extended(F, b)
    x = extract_solution(F.sys, x_ex)
    timings["solve_ms"] = _ms(t0)
    ld, sign = logdet(F)
    report = {
        "n": spec.n,
        "p": spec.p,
        "x": x.tolist(),
        "residual_inf": residual_inf(spec, x, b),
        "residual_ex_inf": extended_residual_inf(spec, x_ex, b),
        "logdet": ld,
        "logdet_sign_extended": sign,
        **timings,
    }
    if args.verify and spec.n <= args.dense_cap:
        A = oracle.assemble_dense(spec, cap=args.dense_cap)
        xd = oracle.dense_solve(A, b)
        ld_dense, sign_dense = oracle.dense_logdet(A)
        report["verify"] = {
            "max_abs_diff_x": float(np.max(np.abs(x - xd))),
            "dense_logdet": ld_dense,
            "dense_logdet_sign": sign_dense,
            "logdet_rel_err": abs(ld - ld_dense) / abs(ld_dense) if ld_dense else abs(ld),
        }
    text = json.dumps(report) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return 0


def _cmd_bench(args) -> int:
    out = args.out.open("a") if args.out else sys.stdout
    try:
        for n in args.n:
            for p in args.p:
                for seed in args.seed:
                    try:
                        rec = run_case(n, p, seed, verify=args.verify, dense_cap=args.dense_cap)
                    except (SingularMatrixError, ValueError) as err:
                        nan = float("nan")
                        rec = BenchmarkRecord(n, p, seed, "fast", 0.0, 0.0, 0.0, nan, nan, nan, error=str(err))
                    out.write(rec.to_json() + "\n")
                    out.flush()
    finally:
        if args.out:
            out.close()
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    handler = {"generate": _cmd_generate, "solve": _cmd_solve, "bench": _cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
