"""Tensor multiplications: outer, k-mode, t-product, S-product, contractive, bowtie."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from htensor.core import (
    DenseTensor,
    NormalizationMode,
    as_tensor,
    as_vector,
    lift,
    require_hypercubic,
)
from htensor.errors import ShapeMismatchError


@dataclass(frozen=True)
class ContractionSpec:
    """Which modes of ``A`` and ``B`` are summed, and where survivors land.

    ``pairs`` holds 1-based ``(mode_of_A, mode_of_B)`` pairs. Surviving
    modes are listed A-first then B, each in increasing order;
    ``output_order[k]`` is the 1-based output position of the k-th
    survivor. ``None`` keeps that natural order.
    """

    pairs: tuple[tuple[int, int], ...] = ()
    output_order: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))
        if self.output_order is not None:
            object.__setattr__(self, "output_order", tuple(int(k) for k in self.output_order))

    def validate(self, shape_a: Sequence[int], shape_b: Sequence[int]) -> None:
        p, q = len(shape_a), len(shape_b)
        modes_a = [a for a, _ in self.pairs]
        modes_b = [b for _, b in self.pairs]
        if len(set(modes_a)) != len(modes_a) or len(set(modes_b)) != len(modes_b):
            raise ShapeMismatchError(f"overlapping contraction pairs {self.pairs}")
        for a, b in self.pairs:
            if not (1 <= a <= p and 1 <= b <= q):
                raise ShapeMismatchError(f"pair ({a}, {b}) out of range for orders {p}, {q}")
            if shape_a[a - 1] != shape_b[b - 1]:
                raise ShapeMismatchError(
                    f"pair ({a}, {b}) pairs extents {shape_a[a - 1]} and {shape_b[b - 1]}"
                )
        survivors = p + q - 2 * len(self.pairs)
        if self.output_order is not None and sorted(self.output_order) != list(
            range(1, survivors + 1)
        ):
            raise ShapeMismatchError(
                f"output_order {self.output_order} is not a bijection onto 1..{survivors}"
            )


def outer_product(A, B) -> DenseTensor:
    A, B = as_tensor(A), as_tensor(B)
    return DenseTensor(np.multiply.outer(A.data, B.data))


def outer_chain(vectors) -> DenseTensor:
    """``v1 x v2 x ... x vm`` as an order-m tensor."""
    vectors = [as_vector(v) for v in vectors]
    if not vectors:
        raise ValueError("need at least one vector")
    out = vectors[0]
    for v in vectors[1:]:
        out = np.multiply.outer(out, v)
    return DenseTensor(out)


def mode_product(A, M, k: int) -> DenseTensor:
    """``(A x_k M)[..i_k..] = sum_j A[..j..] M[j, i_k]``; a vector ``M`` drops mode k."""
    A = as_tensor(A)
    M = np.asarray(M.data if isinstance(M, DenseTensor) else M, dtype=np.float64)
    if not 1 <= k <= A.order:
        raise ShapeMismatchError(f"mode {k} out of range for order {A.order}")
    if M.ndim not in (1, 2):
        raise ShapeMismatchError(f"mode product needs a matrix or vector, got shape {M.shape}")
    if M.shape[0] != A.shape[k - 1]:
        raise ShapeMismatchError(
            f"mode {k} has extent {A.shape[k - 1]}, operand has {M.shape[0]} rows"
        )
    out = np.tensordot(A.data, M, axes=([k - 1], [0]))
    if M.ndim == 2:
        out = np.moveaxis(out, -1, k - 1)
    return lift(out)


def t_product(A, B, circular: bool = True) -> DenseTensor:
    """Facewise convolution product of third-order tensors.

    ``C[:, :, i] = sum_j A[:, :, j] @ B[:, :, i - j]``. With
    ``circular=False`` the third index is not wrapped and terms with
    ``i - j < 0`` are dropped.
    """
    A, B = as_tensor(A), as_tensor(B)
    if A.order != 3 or B.order != 3:
        raise ShapeMismatchError("t_product requires two third-order tensors")
    n1, n2, n3 = A.shape
    if B.shape[0] != n2 or B.shape[2] != n3:
        raise ShapeMismatchError(f"t_product shapes {A.shape} and {B.shape} do not chain")
    a, b = A.data, B.data
    out = np.zeros((n1, B.shape[1], n3))
    for i3 in range(n3):
        for j2 in range(n3):
            d = i3 - j2
            if d < 0:
                if not circular:
                    continue
                d += n3
            out[:, :, i3] += a[:, :, j2] @ b[:, :, d]
    return DenseTensor(out)


def s_product(A, B, spec: ContractionSpec) -> DenseTensor:
    A, B = as_tensor(A), as_tensor(B)
    spec.validate(A.shape, B.shape)
    axes_a = [a - 1 for a, _ in spec.pairs]
    axes_b = [b - 1 for _, b in spec.pairs]
    out = np.tensordot(A.data, B.data, axes=(axes_a, axes_b))
    if spec.output_order is not None and out.ndim > 0:
        # survivor k goes to output_order[k]
        inverse = np.argsort(np.asarray(spec.output_order) - 1)
        out = np.transpose(out, inverse)
    return lift(out)


def contract_k(A, B, k: int) -> DenseTensor:
    """Sum the last ``k`` modes of ``A`` against the first ``k`` modes of ``B``."""
    A, B = as_tensor(A), as_tensor(B)
    if not 0 <= k <= min(A.order, B.order):
        raise ShapeMismatchError(f"k={k} exceeds the orders {A.order}, {B.order}")
    if A.shape[A.order - k :] != B.shape[:k]:
        raise ShapeMismatchError(
            f"trailing extents {A.shape[A.order - k:]} != leading extents {B.shape[:k]}"
        )
    return lift(np.tensordot(A.data, B.data, axes=k))


def insert_vector(A, u, j: int) -> DenseTensor:
    """Outer product with ``u``'s index placed at 1-based output position ``j``."""
    A = as_tensor(A)
    u = as_vector(u)
    if not 1 <= j <= A.order + 1:
        raise ShapeMismatchError(f"insert position {j} out of range for order {A.order + 1}")
    return DenseTensor(np.moveaxis(np.multiply.outer(A.data, u), -1, j - 1))


def bowtie(
    A,
    u,
    signed: bool = False,
    normalization: NormalizationMode | str = NormalizationMode.PROJECTOR,
) -> DenseTensor:
    """Lift an order ``p-1`` tensor to order ``p`` by inserting ``u`` at every position.

    Insertion ``j`` is weighted by ``(-1)**(p-j)`` when ``signed``. The
    prefactor is ``factor(p) / factor(p-1)`` of the normalization mode,
    i.e. ``1/p`` for projector normalization, so that the recursion
    rebuilds wedges (signed) or vees (unsigned) in the same mode.
    """
    A = as_tensor(A)
    u = as_vector(u)
    n = require_hypercubic(A, "bowtie")
    if u.shape[0] != n:
        raise ShapeMismatchError(f"vector length {u.shape[0]} != tensor dimension {n}")
    mode = NormalizationMode.parse(normalization)
    p = A.order + 1
    out = np.zeros((n,) * p)
    for j in range(1, p + 1):
        term = insert_vector(A, u, j).data
        if signed and (p - j) % 2:
            out -= term
        else:
            out += term
    return DenseTensor(out * (mode.factor(p) / mode.factor(p - 1)))
