"""End-to-end solve and log-determinant through the banded embedding."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import banded
from .embedding import ExtendedSystem, embed_rankp, embed_rhs, embed_stable_exponential, extract_solution
from .semiseparable import ExponentialKernelSpec, SemiSeparableSpec, kernel_to_generators, matvec

__all__ = ["EssFactor", "factorize", "factorize_naive_unsafe", "solve", "solve_extended", "logdet", "residual_inf"]


@dataclass(frozen=True, eq=False)
class EssFactor:
    spec: SemiSeparableSpec | ExponentialKernelSpec
    sys: ExtendedSystem
    fac: banded.BandedFactorization

    @property
    def n(self) -> int:
        return self.sys.n

    @property
    def p(self) -> int:
        return self.sys.p


def embed(spec: SemiSeparableSpec | ExponentialKernelSpec) -> ExtendedSystem:
    if isinstance(spec, ExponentialKernelSpec):
        return embed_stable_exponential(spec)
    return embed_rankp(spec)


def factor_system(spec, sys: ExtendedSystem, consume: bool = False) -> EssFactor:
    """Factor an already-embedded system.

    ``consume=True`` lets LAPACK factor the band storage in place (saving a
    copy of the largest array); the stored system then has ``band=None``.
    """
    fac = banded.lu_factor(sys.band, overwrite=consume)
    if consume:
        sys = replace(sys, band=None)
    return EssFactor(spec=spec, sys=sys, fac=fac)


def factorize(spec: SemiSeparableSpec | ExponentialKernelSpec) -> EssFactor:
    """Embed and factor in O(p^3 n) time and O(p^2 n) memory.

    Kernel specs always take the overflow-free decay-factor embedding. Raises
    :class:`ess.banded.SingularMatrixError` if the extended system is singular.
    """
    return factor_system(spec, embed(spec), consume=True)


def factorize_naive_unsafe(spec: ExponentialKernelSpec) -> EssFactor:
    """Factor a kernel through its naive ``exp(+-beta t)`` generators.

    Demonstration only: for wide ``t`` ranges the generators overflow and the
    result is garbage or an error.
    """
    gen = kernel_to_generators(spec)
    return factor_system(gen, embed_rankp(gen), consume=True)


def solve_extended(F: EssFactor, b) -> np.ndarray:
    """Full extended solution: ``x`` interleaved with the auxiliary accumulators."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != F.n or b.ndim > 2:
        raise ValueError(f"b must have leading dimension {F.n}, got shape {b.shape}")
    return banded.lu_solve(F.fac, embed_rhs(F.sys, b))


def solve(F: EssFactor, b) -> np.ndarray:
    """Solve ``A x = b`` in O(p^2 n) per right-hand side; ``b`` may be ``(n,)`` or ``(n, k)``."""
    return extract_solution(F.sys, solve_extended(F, b))


def logdet(F: EssFactor) -> tuple[float, int]:
    """``log|det A|`` and the sign of the *extended* determinant.

    Eliminating the auxiliaries leaves ``A`` as a Schur complement and the
    auxiliary block has unit-magnitude determinant, so ``|det A_ex| = |det A|``.
    The returned sign belongs to ``det A_ex`` and may differ from that of
    ``det A``; for a positive-definite covariance ``det A > 0`` regardless.
    """
    return banded.log_abs_det(F.fac)


def residual_inf(spec: SemiSeparableSpec | ExponentialKernelSpec, x, b) -> float:
    """``||A x - b||_inf`` using the O(pN) product."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (spec.n,):
        raise ValueError(f"b must have shape ({spec.n},), got {b.shape}")
    return float(np.max(np.abs(matvec(spec, x) - b)))
