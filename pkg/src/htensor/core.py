"""Dense tensor storage, indexing, elementwise algebra and norms.

Multi-indices are 1-based at the public API (``linearize``,
``delinearize``, :meth:`DenseTensor.entry`); everything below that
boundary is plain 0-based numpy.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, Sequence

import numpy as np

from htensor.errors import ShapeMismatchError


class NormalizationMode(enum.Enum):
    """Scaling applied to a sum over all ``m!`` mode permutations."""

    UNIT = "unit"
    SQRT_FACTORIAL = "sqrt"
    PROJECTOR = "projector"

    def factor(self, m: int) -> float:
        if m < 1:
            raise ValueError(f"order must be >= 1, got {m}")
        if self is NormalizationMode.UNIT:
            return 1.0
        if self is NormalizationMode.SQRT_FACTORIAL:
            return 1.0 / math.sqrt(math.factorial(m))
        return 1.0 / math.factorial(m)

    @classmethod
    def parse(cls, value: "str | NormalizationMode") -> "NormalizationMode":
        if isinstance(value, cls):
            return value
        aliases = {
            "unit": cls.UNIT,
            "1": cls.UNIT,
            "sqrt": cls.SQRT_FACTORIAL,
            "sqrt-factorial": cls.SQRT_FACTORIAL,
            "projector": cls.PROJECTOR,
            "factorial": cls.PROJECTOR,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(
                f"unknown normalization {value!r}; expected one of unit, sqrt, projector"
            ) from None


class DenseTensor:
    """Immutable row-major array of float64 with order >= 1.

    Parameters
    ----------
    data : array_like
        Entries. Copied and converted to float64.
    shape : sequence of int, optional
        Reshape ``data`` (row-major) to this shape.
    """

    __slots__ = ("_data",)

    def __init__(self, data, shape: Sequence[int] | None = None):
        if isinstance(data, DenseTensor):
            data = data._data
        arr = np.array(data, dtype=np.float64)
        if shape is not None:
            shape = tuple(int(d) for d in shape)
            if math.prod(shape) != arr.size:
                raise ShapeMismatchError(
                    f"{arr.size} entries cannot fill shape {shape}"
                )
            arr = arr.reshape(shape)
        if arr.ndim == 0:
            raise ShapeMismatchError("tensor order must be >= 1")
        if any(d < 1 for d in arr.shape):
            raise ShapeMismatchError(f"every extent must be >= 1, got {arr.shape}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        """Read-only ndarray view of the entries."""
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    @property
    def flat(self) -> np.ndarray:
        return self._data.reshape(-1)

    @property
    def is_hypercubic(self) -> bool:
        return len(set(self.shape)) == 1

    @property
    def dim(self) -> int:
        """Common extent of a hypercubic tensor."""
        if not self.is_hypercubic:
            raise ShapeMismatchError(f"tensor of shape {self.shape} is not hypercubic")
        return self.shape[0]

    def entry(self, *index: int) -> float:
        """Entry at a 1-based multi-index."""
        if len(index) == 1 and not isinstance(index[0], (int, np.integer)):
            index = tuple(index[0])
        return float(self.flat[linearize(index, self.shape)])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, c):
        if isinstance(c, DenseTensor):
            return NotImplemented
        return scale(self, c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"DenseTensor(shape={self.shape})"


def as_tensor(x) -> DenseTensor:
    if isinstance(x, DenseTensor):
        return x
    return DenseTensor(x)


def as_vector(x) -> np.ndarray:
    """Return ``x`` as a 1-D float64 array (accepts order-1 tensors)."""
    arr = np.asarray(x.data if isinstance(x, DenseTensor) else x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeMismatchError(f"expected a vector, got shape {arr.shape}")
    return arr


def lift(arr) -> DenseTensor:
    """Wrap a numpy result, promoting a 0-d scalar to a 1-extent order-1 tensor."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    return DenseTensor(arr)


def zeros(shape: Sequence[int]) -> DenseTensor:
    return DenseTensor(np.zeros(tuple(shape)))


def identity_tensor(k: int, n: int) -> DenseTensor:
    """Order-``2k`` tensor with entries ``delta(i1,j1)...delta(ik,jk)``.

    Its normal unfolding is the ``n**k`` identity matrix.
    """
    if k < 1 or n < 1:
        raise ValueError(f"need k >= 1 and n >= 1, got k={k}, n={n}")
    side = n**k
    return DenseTensor(np.eye(side).reshape((n,) * (2 * k)))


def linearize(index: Iterable[int], shape: Sequence[int]) -> int:
    """0-based row-major offset of a 1-based multi-index."""
    index = tuple(int(i) for i in index)
    if len(index) != len(shape):
        raise IndexError(f"index {index} has {len(index)} modes, shape has {len(shape)}")
    offset = 0
    for i, extent in zip(index, shape):
        if not 1 <= i <= extent:
            raise IndexError(f"index {index} out of range for shape {tuple(shape)}")
        offset = offset * extent + (i - 1)
    return offset


def delinearize(offset: int, shape: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`linearize`."""
    total = math.prod(shape)
    if not 0 <= offset < total:
        raise IndexError(f"offset {offset} out of range for shape {tuple(shape)}")
    index = []
    for extent in reversed(shape):
        offset, r = divmod(offset, extent)
        index.append(r + 1)
    return tuple(reversed(index))


def _check_same_shape(A: DenseTensor, B: DenseTensor, what: str):
    if A.shape != B.shape:
        raise ShapeMismatchError(f"{what}: shapes {A.shape} and {B.shape} differ")


def add(A, B) -> DenseTensor:
    A, B = as_tensor(A), as_tensor(B)
    _check_same_shape(A, B, "add")
    return DenseTensor(A.data + B.data)


def scale(A, c: float) -> DenseTensor:
    return DenseTensor(float(c) * as_tensor(A).data)


def max_abs_diff(A, B) -> float:
    A, B = as_tensor(A), as_tensor(B)
    _check_same_shape(A, B, "max_abs_diff")
    return float(np.max(np.abs(A.data - B.data)))


def max_abs(A) -> float:
    return float(np.max(np.abs(as_tensor(A).data)))


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(as_tensor(A).flat))


def inner(A, B) -> float:
    """Full contraction sum of entrywise products."""
    A, B = as_tensor(A), as_tensor(B)
    _check_same_shape(A, B, "inner")
    return float(np.dot(A.flat, B.flat))


def require_hypercubic(A: DenseTensor, what: str) -> int:
    if not A.is_hypercubic:
        raise ShapeMismatchError(f"{what} requires a hypercubic tensor, got shape {A.shape}")
    return A.shape[0]
