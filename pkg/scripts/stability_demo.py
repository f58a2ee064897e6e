"""Naive exp(+-beta t) generators versus the decay-factor embedding on a wide time range."""

import numpy as np

from ess import ExponentialKernelSpec, factorize, factorize_naive_unsafe, kernel_to_generators, residual_inf, solve
from ess.banded import SingularMatrixError

rng = np.random.default_rng(0)
n = 100
t = np.sort(rng.uniform(0, 2000, n))
spec = ExponentialKernelSpec(d=2.0, alpha=[1.0], beta=[2.0], t=t)
b = rng.uniform(-1, 1, n)

gen = kernel_to_generators(spec)
print(f"naive generators: {np.count_nonzero(~np.isfinite(gen.U))} infinite u, "
      f"{np.count_nonzero(gen.V == 0)} v underflowed to zero")
try:
    x = solve(factorize_naive_unsafe(spec), b)
    print(f"naive solve: finite={np.all(np.isfinite(x))}, residual={residual_inf(spec, x, b):.2e}")
except SingularMatrixError as err:
    print(f"naive solve: {err}")

x = solve(factorize(spec), b)
print(f"stable solve: residual={residual_inf(spec, x, b):.2e}")
