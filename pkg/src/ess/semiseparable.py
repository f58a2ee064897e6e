"""Problem descriptions for symmetric semi-separable and exponential-sum matrices.

Indices in the public docs are 1-based (``A(1, 1)`` is the top-left entry) but
every function takes 0-based indices, as numpy does.

A rank-``p`` semi-separable matrix is stored in generator form::

    A(i, i) = diag[i]
    A(i, j) = sum_l U[j, l] * V[i, l]    for i > j
    A(i, j) = sum_l U[i, l] * V[j, l]    for i < j

An exponential-sum covariance is described by ``(d, alpha, beta, t)``::

    A(i, i) = d
    A(i, j) = sum_l alpha[l] * exp(-beta[l] * |t[i] - t[j]|)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numba
import numpy as np

__all__ = [
    "SemiSeparableSpec",
    "ExponentialKernelSpec",
    "entry",
    "kernel_entry",
    "kernel_to_generators",
    "kernel_recurrences",
    "matvec",
]


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    if a.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {a.shape}")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SemiSeparableSpec:
    """Symmetric semi-separable matrix of size ``n`` and rank ``p``.

    Parameters
    ----------
    diag : (n,) array
        Diagonal entries.
    U, V : (n, p) arrays
        Generators. ``p = 0`` (shape ``(n, 0)``) gives a diagonal matrix.
    """

    diag: np.ndarray
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        diag = _frozen(self.diag, 1, "diag")
        U = _frozen(self.U, 2, "U")
        V = _frozen(self.V, 2, "V")
        if diag.shape[0] < 1:
            raise ValueError("need n >= 1")
        if U.shape != (diag.shape[0], U.shape[1]) or V.shape != U.shape:
            raise ValueError(
                f"U and V must both have shape (n, p) with n={diag.shape[0]}, "
                f"got {U.shape} and {V.shape}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    @property
    def p(self) -> int:
        return self.U.shape[1]


@dataclass(frozen=True, eq=False)
class ExponentialKernelSpec:
    """Covariance ``d`` on the diagonal, ``sum_l alpha_l exp(-beta_l |t_i - t_j|)`` off it.

    ``t`` must be strictly increasing and every ``beta_l`` non-negative.
    """

    d: float
    alpha: np.ndarray
    beta: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        alpha = _frozen(self.alpha, 1, "alpha")
        beta = _frozen(self.beta, 1, "beta")
        t = _frozen(self.t, 1, "t")
        if alpha.shape[0] < 1:
            raise ValueError("need at least one exponential (p >= 1)")
        if beta.shape != alpha.shape:
            raise ValueError("alpha and beta must have the same length")
        if np.any(beta < 0) or not np.all(np.isfinite(beta)):
            raise ValueError("beta must be finite and non-negative")
        if t.shape[0] < 1:
            raise ValueError("need n >= 1")
        if not np.all(np.diff(t) > 0):
            raise ValueError("t must be strictly increasing")
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.t.shape[0]

    @property
    def p(self) -> int:
        return self.alpha.shape[0]

    def decay_factors(self) -> np.ndarray:
        """``gamma[k, l] = exp(-beta_l (t[k+1] - t[k]))``, shape ``(n-1, p)``, all in (0, 1]."""
        return np.exp(-np.outer(np.diff(self.t), self.beta))


Spec = Union[SemiSeparableSpec, ExponentialKernelSpec]


def _check_index(n: int, i: int, j: int):
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"index ({i}, {j}) out of range for n={n}")


def entry(spec: SemiSeparableSpec, i: int, j: int) -> float:
    _check_index(spec.n, i, j)
    if i == j:
        return float(spec.diag[i])
    lo, hi = min(i, j), max(i, j)
    return float(spec.U[lo] @ spec.V[hi])


def kernel_entry(spec: ExponentialKernelSpec, i: int, j: int) -> float:
    _check_index(spec.n, i, j)
    if i == j:
        return spec.d
    tau = abs(spec.t[i] - spec.t[j])
    return float(np.sum(spec.alpha * np.exp(-spec.beta * tau)))


def kernel_to_generators(spec: ExponentialKernelSpec) -> SemiSeparableSpec:
    """Naive generators ``U = alpha * exp(beta t)``, ``V = exp(-beta t)``.

    Overflows (``inf`` in ``U``, zeros in ``V``) once ``beta * t`` exceeds ~709.
    Only meant for small validation problems and for demonstrating that
    failure; :func:`ess.embedding.embed_stable_exponential` is the safe route.
    """
    bt = np.outer(spec.t, spec.beta)
    with np.errstate(over="ignore", under="ignore"):
        U = spec.alpha * np.exp(bt)
        V = np.exp(-bt)
    return SemiSeparableSpec(diag=np.full(spec.n, spec.d), U=U, V=V)


@numba.njit(cache=True)
def _kernel_sweeps(alpha, gamma, x):
    n = x.shape[0]
    p = alpha.shape[0]
    # fwd[k] = sum_{j<k} exp(-beta (t_k - t_j)) x_j
    # bwd[k] = sum_{j>=k} alpha exp(-beta (t_j - t_k)) x_j
    fwd = np.zeros((n, p))
    bwd = np.zeros((n + 1, p))
    for k in range(1, n):
        for l in range(p):
            fwd[k, l] = gamma[k - 1, l] * (x[k - 1] + fwd[k - 1, l])
    for k in range(n - 1, -1, -1):
        for l in range(p):
            if k < n - 1:
                bwd[k, l] = alpha[l] * x[k] + gamma[k, l] * bwd[k + 1, l]
            else:
                bwd[k, l] = alpha[l] * x[k]
    return fwd, bwd


def kernel_recurrences(spec: ExponentialKernelSpec, x) -> tuple[np.ndarray, np.ndarray]:
    """Forward and backward accumulators of the stable product with ``x``.

    Returns ``(fwd, bwd)`` with shapes ``(n, p)`` and ``(n + 1, p)``. Row ``k``
    of ``fwd`` is the auxiliary ``l`` at site ``k`` (zero for the first site);
    row ``k`` of ``bwd`` is ``r`` at site ``k`` and the last row is the zero
    boundary. Only decay factors in (0, 1] enter, so nothing overflows.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = spec.n
    gamma = spec.decay_factors() if n > 1 else np.zeros((0, spec.p))
    return _kernel_sweeps(np.ascontiguousarray(spec.alpha), np.ascontiguousarray(gamma), x)


def matvec(spec: Spec, x) -> np.ndarray:
    """``A @ x`` in O(pN) without forming ``A``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.n,):
        raise ValueError(f"x must have shape ({spec.n},), got {x.shape}")
    if isinstance(spec, ExponentialKernelSpec):
        fwd, bwd = kernel_recurrences(spec, x)
        out = spec.d * x + fwd @ spec.alpha
        if spec.n > 1:
            gamma = spec.decay_factors()
            out[:-1] += np.einsum("kl,kl->k", gamma, bwd[1:-1])
        return out

    out = spec.diag * x
    if spec.p == 0 or spec.n == 1:
        return out
    # lower[k] = sum_{j<k} U_j x_j ; upper[k] = sum_{j>k} V_j x_j
    ux = spec.U * x[:, None]
    vx = spec.V * x[:, None]
    lower = np.cumsum(ux, axis=0)[:-1]
    upper = np.cumsum(vx[::-1], axis=0)[::-1][1:]
    out[1:] += np.einsum("kl,kl->k", spec.V[1:], lower)
    out[:-1] += np.einsum("kl,kl->k", spec.U[:-1], upper)
    return out
