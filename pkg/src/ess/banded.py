"""Band storage, banded LU with partial pivoting, and signed log-determinants.

Storage follows the LAPACK ``gbtrf`` convention: an ``(2*kl + ku + 1, m)``
Fortran-ordered array where ``M[i, j]`` lives at ``data[kl + ku + i - j, j]``.
The top ``kl`` rows are left free for the fill-in that row interchanges create,
so the factorization happens in place with no further allocation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "SingularMatrixError",
    "BandedMatrix",
    "BandedFactorization",
    "lu_factor",
    "lu_solve",
    "log_abs_det",
]

# A pivot column whose largest candidate is below this is treated as singular.
PIVOT_TOL = 1e-300


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, column: int):
        super().__init__(f"matrix is singular: no usable pivot in column {column}")
        self.column = column


class BandedMatrix:
    """Square matrix of size ``dim`` with ``kl`` sub- and ``ku`` super-diagonals."""

    def __init__(self, dim: int, kl: int, ku: int):
        if dim < 1:
            raise ValueError("dim must be positive")
        if kl < 0 or ku < 0:
            raise ValueError("half-bandwidths must be non-negative")
        self.dim = dim
        self.kl = min(kl, dim - 1)
        self.ku = min(ku, dim - 1)
        self.data = np.zeros((2 * self.kl + self.ku + 1, dim), order="F")

    @property
    def _offset(self) -> int:
        return self.kl + self.ku

    def in_band(self, i, j):
        d = np.asarray(i) - np.asarray(j)
        return (d <= self.kl) & (-d <= self.ku)

    def _check(self, i, j):
        i = np.asarray(i)
        j = np.asarray(j)
        if np.any((i < 0) | (i >= self.dim) | (j < 0) | (j >= self.dim)):
            raise IndexError("index out of range")
        if not np.all(self.in_band(i, j)):
            raise IndexError(f"entry outside band (kl={self.kl}, ku={self.ku})")

    def get(self, i: int, j: int) -> float:
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise IndexError("index out of range")
        if not self.in_band(i, j):
            return 0.0
        return float(self.data[self._offset + i - j, j])

    def set(self, i: int, j: int, val: float):
        self._check(i, j)
        self.data[self._offset + i - j, j] = val

    def set_many(self, rows, cols, vals):
        """Vectorized :meth:`set`; later duplicates overwrite earlier ones."""
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        self._check(rows, cols)
        self.data[self._offset + rows - cols, cols] = vals

    def to_dense(self) -> np.ndarray:
        m = self.dim
        out = np.zeros((m, m))
        for d in range(-self.ku, self.kl + 1):
            j = np.arange(max(0, -d), min(m, m - d))
            out[j + d, j] = self.data[self._offset + d, j]
        return out

    @classmethod
    def from_dense(cls, M, kl: int, ku: int) -> BandedMatrix:
        M = np.asarray(M, dtype=np.float64)
        band = cls(M.shape[0], kl, ku)
        i, j = np.nonzero(M)
        band.set_many(i, j, M[i, j])
        return band

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        m = self.dim
        out = np.zeros(m)
        for d in range(-self.ku, self.kl + 1):
            j = np.arange(max(0, -d), min(m, m - d))
            out[j + d] += self.data[self._offset + d, j] * x[j]
        return out

    def max_abs_offset(self) -> tuple[int, int]:
        """Measured (lower, upper) half-bandwidth of the nonzeros actually stored."""
        lower = upper = 0
        for d in range(-self.ku, self.kl + 1):
            if np.any(self.data[self._offset + d]):
                lower = max(lower, d)
                upper = max(upper, -d)
        return lower, upper


@dataclass(frozen=True, eq=False)
class BandedFactorization:
    """Output of :func:`lu_factor`.

    ``lu`` holds U in its top ``kl + ku + 1`` rows and the L multipliers below
    (LAPACK layout). ``pivots[i]`` is the 0-based row swapped with row ``i`` at
    step ``i``.
    """

    lu: np.ndarray
    pivots: np.ndarray
    kl: int
    ku: int

    @property
    def dim(self) -> int:
        return self.lu.shape[1]

    @property
    def swap_parity(self) -> int:
        swaps = np.count_nonzero(self.pivots != np.arange(self.dim))
        return -1 if swaps % 2 else 1

    def u_diagonal(self) -> np.ndarray:
        return self.lu[self.kl + self.ku]

    def factors_dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense ``(P, L, U)`` with ``P @ M = L @ U``; for small checks only."""
        m, kl, ku = self.dim, self.kl, self.ku
        U = np.zeros((m, m))
        for d in range(0, kl + ku + 1):
            j = np.arange(d, m)
            U[j - d, j] = self.lu[kl + ku - d, j]
        # Replay LAPACK's interleaved swaps to get the permuted unit-lower L.
        perm = np.arange(m)
        L = np.eye(m)
        for j in range(m):
            pj = self.pivots[j]
            if pj != j:
                perm[[j, pj]] = perm[[pj, j]]
                L[[j, pj], :j] = L[[pj, j], :j]
            km = min(kl, m - 1 - j)
            L[j + 1 : j + 1 + km, j] = self.lu[kl + ku + 1 : kl + ku + 1 + km, j]
        P = np.eye(m)[perm]
        return P, L, U


def lu_factor(M: BandedMatrix, overwrite: bool = False, check_singular: bool = True) -> BandedFactorization:
    """Partial-pivoted LU of a banded matrix, O((kl + ku) kl m).

    With ``overwrite=True`` the storage of ``M`` is reused and ``M`` must not be
    used afterwards.
    """
    data = M.data if overwrite else M.data.copy(order="F")
    lu, piv, info = lapack.dgbtrf(data, M.kl, M.ku, overwrite_ab=1)
    if info < 0:
        raise ValueError(f"dgbtrf: illegal argument {-info}")
    fac = BandedFactorization(lu=lu, pivots=piv, kl=M.kl, ku=M.ku)
    if check_singular:
        small = np.flatnonzero(np.abs(fac.u_diagonal()) < PIVOT_TOL)
        if small.size:
            raise SingularMatrixError(int(small[0]))
    return fac


def lu_solve(F: BandedFactorization, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != F.dim or rhs.ndim > 2:
        raise ValueError(f"rhs must have leading dimension {F.dim}, got shape {rhs.shape}")
    x, info = lapack.dgbtrs(F.lu, F.kl, F.ku, rhs, F.pivots)
    if info != 0:
        raise ValueError(f"dgbtrs: illegal argument {-info}")
    return x


def log_abs_det(F: BandedFactorization) -> tuple[float, int]:
    """``(log|det M|, sign det M)``; a zero pivot gives ``(-inf, 0)``."""
    u = F.u_diagonal()
    if np.any(u == 0):
        return -np.inf, 0
    sign = F.swap_parity * (-1 if np.count_nonzero(u < 0) % 2 else 1)
    return float(np.sum(np.log(np.abs(u)))), sign
