"""Dense O(n^3) reference implementations.

Kept deliberately plain (one column of Gaussian elimination per step, no
blocking, no LAPACK) so the results can be audited independently of the fast
banded path.
"""

from __future__ import annotations

import numpy as np

from .semiseparable import ExponentialKernelSpec, SemiSeparableSpec

DEFAULT_DENSE_CAP = 5000


def assemble_dense(spec: SemiSeparableSpec | ExponentialKernelSpec, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    n = spec.n
    if n > cap:
        raise ValueError(f"n={n} exceeds the dense cap of {cap}")
    if isinstance(spec, ExponentialKernelSpec):
        tau = np.abs(spec.t[:, None] - spec.t[None, :])
        A = np.zeros((n, n))
        for a, b in zip(spec.alpha, spec.beta):
            A += a * np.exp(-b * tau)
        np.fill_diagonal(A, spec.d)
        return A
    # upper[i, j] = U_i . V_j for i < j; the lower triangle mirrors it
    upper = np.triu(spec.U @ spec.V.T, 1)
    return upper + upper.T + np.diag(spec.diag)


def _lu_inplace(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    n = M.shape[0]
    perm = np.arange(n)
    swaps = 0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(M[k:, k])))
        if M[piv, k] == 0.0:
            continue
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
            swaps += 1
        M[k + 1 :, k] /= M[k, k]
        M[k + 1 :, k + 1 :] -= np.outer(M[k + 1 :, k], M[k, k + 1 :])
    return M, perm, swaps


def dense_lu(M) -> tuple[np.ndarray, np.ndarray, int]:
    """Packed LU of ``M[perm]`` with unit-lower L; also the number of row swaps."""
    M = np.array(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    return _lu_inplace(M)


def dense_lu_solve(lu: np.ndarray, perm: np.ndarray, b) -> np.ndarray:
    n = lu.shape[0]
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != n:
        raise ValueError("dimension mismatch")
    if np.any(np.diag(lu) == 0):
        raise np.linalg.LinAlgError("singular matrix")
    y = b[perm].copy()
    for i in range(n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
    return y


def dense_solve(M, b) -> np.ndarray:
    lu, perm, _ = dense_lu(M)
    return dense_lu_solve(lu, perm, b)


def dense_logdet(M) -> tuple[float, int]:
    lu, _, swaps = dense_lu(M)
    u = np.diag(lu)
    if np.any(u == 0):
        return -np.inf, 0
    sign = (-1) ** (swaps + int(np.count_nonzero(u < 0)))
    return float(np.sum(np.log(np.abs(u)))), sign
