"""Embedding a dense semi-separable system into a larger banded one.

Every off-diagonal interaction is routed through auxiliary accumulators, one
forward (``l``) and one backward (``r``) vector of length ``p`` per gap between
neighbouring sites. Unknowns are ordered site by site::

    x_1, r_2, l_1, x_2, r_3, l_2, ..., x_n          (generator form)
    x_1, r_2, l_2, x_2, r_3, l_3, ..., x_n          (stable exponential form)

each ``r``/``l`` being a block of ``p`` entries, so the extended dimension is
``(2p + 1) n - 2p``. The row sitting at an ``r`` position holds the defining
equation of the neighbouring ``l`` and vice versa, which keeps every nonzero
within ``p + 1`` of the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banded import BandedMatrix
from .semiseparable import ExponentialKernelSpec, SemiSeparableSpec

__all__ = [
    "ExtendedSystem",
    "extended_dim",
    "embed_rank1",
    "embed_rankp",
    "embed_stable_exponential",
    "embed_rhs",
    "extract_solution",
    "triplets",
    "extended_residual_inf",
]


def extended_dim(n: int, p: int) -> int:
    return (2 * p + 1) * n - 2 * p


@dataclass(frozen=True, eq=False)
class ExtendedSystem:
    """Banded extended matrix plus the map back to the original unknowns.

    ``x_positions[k]`` is the extended index of ``x_k``. For ``k < n - 1`` the
    ``r`` block of site ``k`` occupies ``x_positions[k] + 1 + arange(p)`` and
    the ``l`` block follows it at ``x_positions[k] + 1 + p + arange(p)``.
    ``source`` is ``"generators"`` or ``"stable-exponential"``. ``band`` is
    ``None`` once a solver has factored it in place.
    """

    band: BandedMatrix | None
    x_positions: np.ndarray
    n: int
    p: int
    source: str

    @property
    def dim(self) -> int:
        return extended_dim(self.n, self.p)

    @property
    def r_positions(self) -> np.ndarray:
        return self.x_positions[:-1, None] + 1 + np.arange(self.p)

    @property
    def l_positions(self) -> np.ndarray:
        return self.x_positions[:-1, None] + 1 + self.p + np.arange(self.p)

    def aux_positions(self) -> np.ndarray:
        mask = np.ones(self.dim, dtype=bool)
        mask[self.x_positions] = False
        return np.flatnonzero(mask)


def _layout(n: int, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xpos = np.arange(n) * (2 * p + 1)
    rpos = xpos[:-1, None] + 1 + np.arange(p)
    lpos = rpos + p
    return xpos, rpos, lpos


def _groups(n, p, diag, x_to_r, x_to_l, l_chain, r_chain, x_next_to_l_row):
    """Yield ``(rows, cols, vals)`` groups of the extended matrix.

    Coefficient arrays have shape ``(n-1, p)`` (chains ``(n-2, p)``), indexed by
    the gap ``k`` between sites ``k`` and ``k+1``. At the ``r`` block of gap
    ``k`` sits the equation defining the ``l`` block of the same gap; at the
    ``l`` block sits the one defining the ``r`` block.

      x_k row,     r col:          x_to_r[k]
      r row,       x_k col:        x_to_r[k]
      r row,       own l col:      -1
      r row,       previous l col: l_chain[k-1]
      l row,       own r col:      -1
      l row,       x_{k+1} col:    x_next_to_l_row[k]
      l row,       next r col:     r_chain[k]
      x_{k+1} row, l col:          x_to_l[k]
    """
    xpos, rpos, lpos = _layout(n, p)
    yield xpos, xpos, np.asarray(diag, dtype=np.float64)
    if p == 0 or n == 1:
        return
    xk = np.broadcast_to(xpos[:-1, None], rpos.shape)
    xk1 = np.broadcast_to(xpos[1:, None], rpos.shape)
    rows = [xk, rpos, rpos, rpos[1:], lpos, lpos, lpos[:-1], xk1]
    cols = [rpos, xk, lpos, lpos[:-1], rpos, xk1, rpos[1:], lpos]
    vals = [x_to_r, x_to_r, -1.0, l_chain, -1.0, x_next_to_l_row, r_chain, x_to_l]
    for r, c, v in zip(rows, cols, vals):
        yield r.ravel(), c.ravel(), np.broadcast_to(v, r.shape).ravel()


def _generator_coeffs(spec: SemiSeparableSpec) -> dict:
    U, V = spec.U, spec.V
    ones = np.ones((max(spec.n - 2, 0), spec.p))
    # x_k:  v_k l_{k-1} + a_k x_k + u_k r_{k+1} = b_k
    # l_k = u_k x_k + l_{k-1},  r_{k+1} = v_{k+1} x_{k+1} + r_{k+2}
    return dict(
        diag=spec.diag, x_to_r=U[:-1], x_to_l=V[1:], l_chain=ones, r_chain=ones, x_next_to_l_row=V[1:]
    )


def _stable_coeffs(spec: ExponentialKernelSpec) -> dict:
    gamma = spec.decay_factors() if spec.n > 1 else np.zeros((0, spec.p))
    alpha = np.broadcast_to(spec.alpha, gamma.shape)
    return dict(
        diag=np.full(spec.n, spec.d),
        x_to_r=gamma,
        x_to_l=alpha,
        l_chain=gamma[1:],
        r_chain=gamma[1:],
        x_next_to_l_row=alpha,
    )


def _coeffs(spec, stable: bool) -> tuple[dict, str]:
    if stable:
        return _stable_coeffs(spec), "stable-exponential"
    return _generator_coeffs(spec), "generators"


def _build(spec, stable: bool) -> ExtendedSystem:
    n, p = spec.n, spec.p
    coeffs, source = _coeffs(spec, stable)
    hb = p + 1 if p > 0 and n > 1 else 0
    band = BandedMatrix(extended_dim(n, p), hb, hb)
    for rows, cols, vals in _groups(n, p, **coeffs):
        band.set_many(rows, cols, vals)
    return ExtendedSystem(band=band, x_positions=_layout(n, p)[0], n=n, p=p, source=source)


def embed_rankp(spec: SemiSeparableSpec) -> ExtendedSystem:
    """Extended banded system for generator-form input; ``p = 0`` gives the diagonal."""
    return _build(spec, stable=False)


def embed_rank1(spec: SemiSeparableSpec) -> ExtendedSystem:
    """The ``3n - 2`` dimensional, half-bandwidth 2 system for rank-1 generators."""
    if spec.p != 1:
        raise ValueError(f"embed_rank1 needs p == 1 (got p={spec.p}); use embed_rankp")
    return embed_rankp(spec)


def embed_stable_exponential(spec: ExponentialKernelSpec) -> ExtendedSystem:
    """Extended system built from decay factors only, never ``exp(+beta t)``.

    With ``gamma_k = exp(-beta (t_{k+1} - t_k))`` the auxiliaries satisfy::

        r_k     = alpha * x_k + gamma_k * r_{k+1},      r_{n+1} = 0
        l_{k+1} = gamma_k * (x_k + l_k),                l_1 = 0
        b_k     = alpha . l_k + d x_k + gamma_k . r_{k+1}

    so every stored entry is bounded by ``max(1, |d|, max|alpha|)``.
    """
    return _build(spec, stable=True)


def triplets(spec: SemiSeparableSpec | ExponentialKernelSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(rows, cols, vals)`` of the extended matrix the solver would build."""
    coeffs, _ = _coeffs(spec, isinstance(spec, ExponentialKernelSpec))
    groups = list(_groups(spec.n, spec.p, **coeffs))
    return tuple(np.concatenate(g) for g in zip(*groups))


def extended_residual_inf(spec: SemiSeparableSpec | ExponentialKernelSpec, x_ex, b) -> float:
    """``||A_ex x_ex - b_ex||_inf`` without materializing ``A_ex``."""
    x_ex = np.asarray(x_ex, dtype=np.float64)
    n, p = spec.n, spec.p
    m = extended_dim(n, p)
    if x_ex.shape != (m,):
        raise ValueError(f"x_ex must have shape ({m},), got {x_ex.shape}")
    coeffs, _ = _coeffs(spec, isinstance(spec, ExponentialKernelSpec))
    res = np.zeros(m)
    res[_layout(n, p)[0]] = -np.asarray(b, dtype=np.float64)
    for rows, cols, vals in _groups(n, p, **coeffs):
        res += np.bincount(rows, weights=vals * x_ex[cols], minlength=m)
    return float(np.max(np.abs(res)))


def embed_rhs(sys: ExtendedSystem, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != sys.n or b.ndim > 2:
        raise ValueError(f"b must have leading dimension {sys.n}, got shape {b.shape}")
    out = np.zeros((sys.dim,) + b.shape[1:])
    out[sys.x_positions] = b
    return out


def extract_solution(sys: ExtendedSystem, x_ex) -> np.ndarray:
    x_ex = np.asarray(x_ex)
    if x_ex.shape[0] != sys.dim:
        raise ValueError(f"x_ex must have leading dimension {sys.dim}, got shape {x_ex.shape}")
    return x_ex[sys.x_positions]
