import numpy as np
import pytest

from ess import ExponentialKernelSpec, SemiSeparableSpec


def random_semisep(rng, n, p, dominance=None):
    """Random generators with a diagonal large enough to keep A well conditioned."""
    U = rng.normal(size=(n, p))
    V = rng.normal(size=(n, p))
    if dominance is None:
        dominance = 1.0 + np.sum(np.abs(U) @ np.abs(V).T, axis=1).max() if n > 1 else 1.0
    diag = dominance + rng.uniform(0, 1, n)
    return SemiSeparableSpec(diag=diag, U=U, V=V)


def random_kernel(rng, n, p, t_max=20.0):
    t = np.sort(rng.uniform(0, t_max, n))
    alpha = rng.uniform(0, 2, p)
    beta = rng.uniform(0, 2, p)
    return ExponentialKernelSpec(d=1 + alpha.sum(), alpha=alpha, beta=beta, t=t)


@pytest.fixture
def rng():
    return np.random.default_rng(20141010)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion (printed in the summary)."""

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
