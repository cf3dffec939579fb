"""Mode permutations, (anti)symmetrizers, wedge/vee tensors and separability tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from htensor.core import (
    DenseTensor,
    NormalizationMode,
    as_tensor,
    as_vector,
    inner,
    max_abs,
    require_hypercubic,
)
from htensor.errors import NotAntisymmetricError, ShapeMismatchError, SizeLimitError
from htensor.linalg import lu_det, numeric_rank
from htensor.permutation import Permutation, adjacent_transpositions, all_permutations
from htensor.products import outer_chain

_EXPANSION_LIMIT = 50_000_000
PERMANENT_MAX_SIDE = 14


def _as_perm(sigma) -> Permutation:
    return sigma if isinstance(sigma, Permutation) else Permutation(sigma)


def permute_modes(A, sigma) -> DenseTensor:
    """``B[i1..im] = A[i_sigma(1) .. i_sigma(m)]``."""
    A = as_tensor(A)
    sigma = _as_perm(sigma)
    if sigma.m != A.order:
        raise ShapeMismatchError(f"permutation on {sigma.m} points, tensor has order {A.order}")
    return DenseTensor(np.transpose(A.data, sigma.inverse().zero_based()))


@lru_cache(maxsize=64)
def _orbit_table(m: int, n: int):
    """Per flat offset: offset of the sorted index, sorting parity, distinctness."""
    idx = np.indices((n,) * m).reshape(m, -1).T
    order = np.argsort(idx, axis=1, kind="stable")
    srt = np.take_along_axis(idx, order, axis=1)
    rep = np.ravel_multi_index(tuple(srt.T), (n,) * m)
    inv = np.zeros(len(idx), dtype=np.int64)
    for a in range(m):
        for b in range(a + 1, m):
            inv += order[:, a] > order[:, b]
    sign = np.where(inv % 2, -1.0, 1.0)
    distinct = np.all(np.diff(srt, axis=1) > 0, axis=1) if m > 1 else np.ones(len(idx), bool)
    for arr in (rep, sign, distinct):
        arr.setflags(write=False)
    return rep, sign, distinct


def _check_expansion(m: int, n: int):
    if math.factorial(m) * n**m > _EXPANSION_LIMIT:
        raise SizeLimitError(f"{m}! x {n}^{m} permutation expansion is too large")


def symmetrize(
    A,
    norm: NormalizationMode | str = NormalizationMode.PROJECTOR,
    signed: bool = False,
) -> DenseTensor:
    """``factor(m) * sum_sigma (+-1) sigma(A)`` over all mode permutations.

    Every orbit of index tuples is evaluated once (at its sorted
    representative) and copied to the rest with the orbit sign, so the
    output is exactly (anti)symmetric in floating point.
    """
    A = as_tensor(A)
    n = require_hypercubic(A, "symmetrize")
    m = A.order
    _check_expansion(m, n)
    norm = NormalizationMode.parse(norm)
    total = np.zeros(A.shape)
    for sigma in all_permutations(m):
        term = np.transpose(A.data, sigma.inverse().zero_based())
        if signed and sigma.parity < 0:
            total -= term
        else:
            total += term
    rep, sign, distinct = _orbit_table(m, n)
    flat = total.reshape(-1)[rep]
    if signed:
        flat = np.where(distinct, flat * sign, 0.0)
    return DenseTensor((norm.factor(m) * flat).reshape(A.shape))


def _vector_list(vectors) -> list[np.ndarray]:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        vectors = list(vectors.T)
    vectors = [as_vector(v) for v in vectors]
    if not vectors:
        raise ValueError("need at least one vector")
    if len({len(v) for v in vectors}) != 1:
        raise ShapeMismatchError("all vectors must have the same length")
    return vectors


def wedge(vectors, norm: NormalizationMode | str = NormalizationMode.SQRT_FACTORIAL) -> DenseTensor:
    """Antisymmetrized outer product ``v1 ^ ... ^ vm``.

    A 2-D ndarray is read column-wise.
    """
    return symmetrize(outer_chain(_vector_list(vectors)), norm, signed=True)


def vee(vectors, norm: NormalizationMode | str = NormalizationMode.SQRT_FACTORIAL) -> DenseTensor:
    """Symmetrized outer product ``v1 v ... v vm``."""
    return symmetrize(outer_chain(_vector_list(vectors)), norm, signed=False)


@dataclass(frozen=True)
class SymmetryReport:
    """Outcome of a symmetry check: ``holds`` iff ``violation <= tol``."""

    holds: bool
    violation: float
    witness: Permutation | None = None

    def __bool__(self):
        return self.holds


def _violation(A: DenseTensor, sigma: Permutation, sign: float) -> float:
    return float(np.max(np.abs(permute_modes(A, sigma).data - sign * A.data)))


def _check_all(A, perms, signed: bool, tol: float) -> SymmetryReport:
    A = as_tensor(A)
    require_hypercubic(A, "symmetry check")
    worst, witness = 0.0, None
    for sigma in perms:
        v = _violation(A, sigma, sigma.parity if signed else 1.0)
        if v > worst:
            worst, witness = v, sigma
    return SymmetryReport(worst <= tol, worst, witness)


def is_symmetric(A, tol: float = 1e-10) -> SymmetryReport:
    A = as_tensor(A)
    return _check_all(A, adjacent_transpositions(A.order), False, tol)


def is_antisymmetric(A, tol: float = 1e-10) -> SymmetryReport:
    A = as_tensor(A)
    return _check_all(A, adjacent_transpositions(A.order), True, tol)


def is_sigma_symmetric(A, sigma, tol: float = 1e-10) -> SymmetryReport:
    return _check_all(A, [_as_perm(sigma)], False, tol)


def is_sign_symmetric(A, sigma, tol: float = 1e-10) -> SymmetryReport:
    return _check_all(A, [_as_perm(sigma)], True, tol)


def permanent(M) -> float:
    """Ryser's inclusion-exclusion formula, visiting subsets in Gray-code order."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatchError(f"permanent needs a square matrix, got {M.shape}")
    m = M.shape[0]
    if m > PERMANENT_MAX_SIDE:
        raise SizeLimitError(f"permanent of side {m} exceeds the limit {PERMANENT_MAX_SIDE}")
    if m == 0:
        return 1.0
    row_sums = np.zeros(m)
    total = 0.0
    gray = 0
    for k in range(1, 2**m):
        bit = (k & -k).bit_length() - 1
        gray ^= 1 << bit
        if gray >> bit & 1:
            row_sums += M[:, bit]
        else:
            row_sums -= M[:, bit]
        size = bin(gray).count("1")
        term = float(np.prod(row_sums))
        total += -term if size % 2 else term
    return (-1) ** m * total


class GramIdentities(NamedTuple):
    lhs_det: float
    rhs_det: float
    lhs_perm: float
    rhs_perm: float


def gram_matrix(U, V) -> np.ndarray:
    U, V = _vector_list(U), _vector_list(V)
    if len(U) != len(V) or len(U[0]) != len(V[0]):
        raise ShapeMismatchError("U and V need the same count and length of vectors")
    return np.array([[float(np.dot(u, v)) for v in V] for u in U])


def gram_inner_identities(
    U, V, norm: NormalizationMode | str = NormalizationMode.SQRT_FACTORIAL
) -> GramIdentities:
    """Both sides of the wedge/determinant and vee/permanent inner-product identities.

    Exact equality holds for ``SQRT_FACTORIAL``; with ``PROJECTOR`` the
    inner products come out ``m!`` times smaller.
    """
    U, V = _vector_list(U), _vector_list(V)
    G = gram_matrix(U, V)
    return GramIdentities(
        lhs_det=inner(wedge(U, norm), wedge(V, norm)),
        rhs_det=lu_det(G),
        lhs_perm=inner(vee(U, norm), vee(V, norm)),
        rhs_perm=permanent(G),
    )


def wedge_norm(U) -> float:
    """Frobenius norm of ``u1 ^ ... ^ um`` (sqrt-factorial) as ``sqrt(det(U^T U))``."""
    U = _vector_list(U)
    d = lu_det(gram_matrix(U, U))
    return math.sqrt(max(d, 0.0))


def standard_sas(n: int) -> DenseTensor:
    """Order-n tensor holding the parity of ``(i1..in)`` on permutations, zero elsewhere."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > 6:
        raise SizeLimitError(f"standard_sas({n}) would hold {n}^{n} entries; limit is n <= 6")
    Q = np.zeros((n,) * n)
    for sigma in all_permutations(n):
        Q[sigma.zero_based()] = sigma.parity
    return DenseTensor(Q)


@dataclass
class SeparableWitness:
    """``scale * op(v1, ..., vm)`` with ``op`` the wedge (or vee) in ``normalization``."""

    vectors: list[np.ndarray]
    scale: float = 1.0
    mode: str = "antisymmetric"
    normalization: NormalizationMode = NormalizationMode.UNIT
    residual: float = 0.0

    def reconstruct(self) -> DenseTensor:
        build = wedge if self.mode == "antisymmetric" else vee
        return build(self.vectors, self.normalization) * self.scale


@dataclass
class NotDecomposable:
    candidate: SeparableWitness
    residual: float
    threshold: float = field(default=0.0)


def sas_decompose(A, tol: float = 1e-10) -> SeparableWitness | NotDecomposable:
    """Try to write an antisymmetric ``A`` as a scaled wedge of vectors.

    Pivot on the largest entry ``A_I``; the k-th candidate vector is the
    fibre of ``A`` through ``I`` along mode k. For a decomposable tensor
    these fibres span the same subspace and their unit wedge equals
    ``A_I**(m-1) * A``, so one rescale recovers ``A``. Accepts iff the
    residual is at most ``tol * max|A|``.
    """
    A = as_tensor(A)
    n = require_hypercubic(A, "sas_decompose")
    m = A.order
    peak = max_abs(A)
    check = is_antisymmetric(A, tol * max(peak, 1.0))
    if not check.holds:
        raise NotAntisymmetricError(
            f"input is not antisymmetric (violation {check.violation:.3e} under {check.witness})",
            violation=check.violation,
        )
    if peak == 0.0:
        return SeparableWitness([np.zeros(n) for _ in range(m)], 1.0, residual=0.0)

    flat = int(np.argmax(np.abs(A.flat)))
    I = np.unravel_index(flat, A.shape)
    vectors = []
    for k in range(m):
        sl = list(I)
        sl[k] = slice(None)
        vectors.append(A.data[tuple(sl)].copy())
    recon = wedge(vectors, NormalizationMode.UNIT)
    pivot_value = recon.data[I]
    scale = A.data[I] / pivot_value if pivot_value != 0.0 else 0.0
    residual = float(np.max(np.abs(scale * recon.data - A.data)))
    witness = SeparableWitness(vectors, float(scale), residual=residual)
    threshold = tol * peak
    if residual <= threshold:
        return witness
    return NotDecomposable(witness, residual, threshold)


class MatrixSeparability(NamedTuple):
    separable: bool
    rank: int


def antisym_matrix_separability(M, tol: float = 1e-10) -> MatrixSeparability:
    """An antisymmetric matrix is a single wedge iff its rank is 0 or 2."""
    M = as_tensor(M)
    if M.order != 2 or not M.is_hypercubic:
        raise ShapeMismatchError(f"expected a square matrix, got shape {M.shape}")
    a = M.data
    violation = float(np.max(np.abs(a + a.T)))
    if violation > tol * max(max_abs(M), 1.0):
        raise NotAntisymmetricError(
            f"matrix is not antisymmetric (violation {violation:.3e})", violation=violation
        )
    rank = numeric_rank(a, tol)
    return MatrixSeparability(rank in (0, 2), rank)


def fixed_subspace_dim(m: int, n: int, sigma, signed: bool = False) -> int:
    """Dimension of ``{A : sigma(A) = A}`` or ``{A : sigma(A) = parity(sigma) A}``.

    Counts orbits of the cyclic group generated by ``sigma`` on index
    tuples. In the signed case an orbit of length L survives only when
    ``parity**L == 1``.
    """
    sigma = _as_perm(sigma)
    if sigma.m != m:
        raise ShapeMismatchError(f"permutation on {sigma.m} points, order is {m}")
    if n**m > 10**6:
        raise SizeLimitError(f"{n}^{m} index tuples exceed the limit of 10^6")
    shape = (n,) * m
    idx = np.indices(shape).reshape(m, -1)
    step = np.ravel_multi_index(tuple(idx[list(sigma.zero_based())]), shape)
    seen = np.zeros(n**m, dtype=bool)
    dim = 0
    for start in range(n**m):
        if seen[start]:
            continue
        length = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = step[cur]
            length += 1
        if not signed or sigma.parity**length == 1:
            dim += 1
    return dim
