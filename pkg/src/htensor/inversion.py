"""Normal unfolding of even-order tensors, NS determinant and tensor inversion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from htensor.core import DenseTensor, as_tensor, identity_tensor
from htensor.errors import ShapeMismatchError
from htensor.linalg import lu_det, lu_factor, lu_inverse


@dataclass(frozen=True)
class NSMatrix:
    """Normal-square matrix of an order-``2k`` tensor of dimension ``n``."""

    n: int
    k: int
    data: np.ndarray

    def __post_init__(self):
        side = self.n**self.k
        if self.data.shape != (side, side):
            raise ShapeMismatchError(
                f"NS matrix for n={self.n}, k={self.k} must be {side}x{side}, got {self.data.shape}"
            )


def _even_hypercubic(A: DenseTensor) -> tuple[int, int]:
    if A.order % 2:
        raise ShapeMismatchError(f"normal unfolding needs even order, got {A.order}")
    if not A.is_hypercubic:
        raise ShapeMismatchError(f"normal unfolding needs a hypercubic tensor, got {A.shape}")
    return A.order // 2, A.shape[0]


def normal_unfold(A) -> NSMatrix:
    """Row index from the first k indices, column from the last k, both row-major."""
    A = as_tensor(A)
    k, n = _even_hypercubic(A)
    side = n**k
    return NSMatrix(n, k, A.data.reshape(side, side).copy())


def normal_fold(M, k: int | None = None, n: int | None = None) -> DenseTensor:
    if isinstance(M, NSMatrix):
        k = M.k if k is None else k
        n = M.n if n is None else n
        M = M.data
    M = np.asarray(M, dtype=np.float64)
    if k is None or n is None:
        raise ValueError("k and n are required when folding a bare array")
    side = n**k
    if M.shape != (side, side):
        raise ShapeMismatchError(f"matrix of shape {M.shape} is not {n}^{k} x {n}^{k}")
    return DenseTensor(M.reshape((n,) * (2 * k)))


def ns_det(A) -> float:
    return lu_det(normal_unfold(A).data)


def ns_pivots(A) -> np.ndarray:
    """Absolute LU pivots of the NS matrix, in elimination order."""
    return np.abs(lu_factor(normal_unfold(A).data).pivots)


def invert(A, pivot_tol: float = 1e-12) -> DenseTensor:
    """Inverse under the contractive product; raises ``SingularError`` if none."""
    ns = normal_unfold(A)
    return normal_fold(lu_inverse(ns.data, pivot_tol=pivot_tol), ns.k, ns.n)


def identity_like(A) -> DenseTensor:
    k, n = _even_hypercubic(as_tensor(A))
    return identity_tensor(k, n)
