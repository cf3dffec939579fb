"""Small dense kernels: LU with partial pivoting, inverse, determinant, numeric rank.

Matrices here are at most a few hundred on a side, so plain row
operations on numpy arrays are fast enough and keep the pivots visible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from htensor.errors import ShapeMismatchError, SingularError


@dataclass(frozen=True)
class LUFactors:
    """``P A = L U`` packed in one array; ``perm[i]`` is the source row of row ``i``."""

    lu: np.ndarray
    perm: np.ndarray
    sign: float

    @property
    def pivots(self) -> np.ndarray:
        return np.diag(self.lu).copy()


def _square(M) -> np.ndarray:
    M = np.array(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {M.shape}")
    return M


def lu_factor(M) -> LUFactors:
    """Doolittle LU with partial pivoting. Never raises on singular input."""
    a = _square(M)
    n = a.shape[0]
    perm = np.arange(n)
    sign = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        pivot = a[k, k]
        if pivot != 0.0:
            a[k + 1 :, k] /= pivot
            a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return LUFactors(a, perm, sign)


def lu_det(M) -> float:
    f = lu_factor(M)
    return float(f.sign * np.prod(np.diag(f.lu)))


def lu_solve(f: LUFactors, b: np.ndarray) -> np.ndarray:
    lu = f.lu
    n = lu.shape[0]
    x = np.array(b, dtype=np.float64)[f.perm]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1 :] @ x[i + 1 :]) / lu[i, i]
    return x


def lu_inverse(M, pivot_tol: float = 1e-12) -> np.ndarray:
    """Inverse via LU; raises :class:`SingularError` on a collapsed pivot.

    A pivot counts as collapsed when ``|u_kk| < pivot_tol * max|M|``.
    """
    M = _square(M)
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    f = lu_factor(M)
    pivots = np.abs(np.diag(f.lu))
    smallest = float(pivots.min())
    if scale == 0.0 or smallest < pivot_tol * scale:
        raise SingularError(
            f"Singular: smallest pivot {smallest:.3e} below {pivot_tol:g} x scale {scale:.3e}",
            pivot=smallest,
            scale=scale,
        )
    return lu_solve(f, np.eye(M.shape[0]))


def numeric_rank(M, tol: float = 1e-10) -> int:
    """Rank by Gaussian elimination with complete pivoting.

    Elimination stops once the largest remaining entry drops below
    ``tol`` times the first (largest) pivot.
    """
    a = np.array(M, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeMismatchError(f"expected a matrix, got shape {a.shape}")
    if a.size == 0:
        return 0
    first = float(np.max(np.abs(a)))
    if first == 0.0:
        return 0
    rank = 0
    for k in range(min(a.shape)):
        sub = np.abs(a[k:, k:])
        flat = int(np.argmax(sub))
        i, j = divmod(flat, sub.shape[1])
        if sub[i, j] <= tol * first:
            break
        i += k
        j += k
        a[[k, i]] = a[[i, k]]
        a[:, [k, j]] = a[:, [j, k]]
        a[k + 1 :, k:] -= np.outer(a[k + 1 :, k] / a[k, k], a[k, k:])
        rank += 1
    return rank
