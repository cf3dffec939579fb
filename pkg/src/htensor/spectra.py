"""Tensor-vector products, H-eigenpairs, definiteness probes and permutation tensors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from htensor.core import (
    DenseTensor,
    NormalizationMode,
    as_tensor,
    as_vector,
    frobenius_norm,
    require_hypercubic,
)
from htensor.errors import ShapeMismatchError, SizeLimitError
from htensor.linalg import numeric_rank
from htensor.permutation import Permutation, all_permutations
from htensor.products import contract_k, outer_chain
from htensor.symmetry import is_symmetric, permute_modes, symmetrize


def _check_vector(A: DenseTensor, x) -> np.ndarray:
    n = require_hypercubic(A, "tensor-vector product")
    x = as_vector(x)
    if x.shape[0] != n:
        raise ShapeMismatchError(f"vector length {x.shape[0]} != tensor dimension {n}")
    return x


def tvp(A, x) -> np.ndarray:
    """``(A x^{m-1})_i = sum A[i, i2, ..., im] x[i2] ... x[im]``."""
    A = as_tensor(A)
    if A.order < 2:
        raise ShapeMismatchError("tvp needs order >= 2")
    x = _check_vector(A, x)
    out = A.data
    for _ in range(A.order - 1):
        out = out @ x
    return np.asarray(out, dtype=np.float64)


def poly_eval(A, x) -> float:
    """Homogeneous form ``f_A(x) = sum A[i1..im] x[i1] ... x[im]``."""
    A = as_tensor(A)
    x = _check_vector(A, x)
    out = A.data
    for _ in range(A.order):
        out = out @ x
    return float(out)


def _poly_eval_batch(A: DenseTensor, X: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    S = X.shape[0]
    Y = X @ A.data.reshape(n, -1)
    for _ in range(A.order - 1):
        Y = np.einsum("sij,si->sj", Y.reshape(S, n, -1), X)
    return Y.reshape(S)


def eigen_residual(A, lam: float, u) -> float:
    """``|| A u^{m-1} - lam u^{[m-1]} ||``."""
    A = as_tensor(A)
    u = _check_vector(A, u)
    return float(np.linalg.norm(tvp(A, u) - lam * u ** (A.order - 1)))


@dataclass
class EigenPair:
    lam: float
    u: np.ndarray
    residual: float
    converged: bool = True
    iterations: int = 0


def _signed_root(y: np.ndarray, p: int) -> np.ndarray:
    return np.sign(y) * np.abs(y) ** (1.0 / p)


def _partial_matrix(A: DenseTensor, x: np.ndarray) -> np.ndarray:
    """``A x^{m-2}`` as an n x n matrix."""
    out = A.data
    for _ in range(A.order - 2):
        out = out @ x
    return out


def _unit_pair(A: DenseTensor, x: np.ndarray) -> tuple[float, np.ndarray, float]:
    m = A.order
    u = x / np.linalg.norm(x)
    g = tvp(A, u)
    lam = float(u @ g) / float(np.sum(u**m))
    return lam, u, float(np.linalg.norm(g - lam * u ** (m - 1)))


def _newton_polish(A: DenseTensor, x: np.ndarray, lam: float, tol: float, steps: int = 30):
    """Newton on ``A x^{m-1} - lam x^{[m-1]} = 0, sum(x^m) = 1``; returns the best iterate seen."""
    m = A.order
    n = len(x)
    best = _unit_pair(A, x)
    total = float(np.sum(x**m))
    if total > 0:
        x = x / total ** (1.0 / m)
    for _ in range(steps):
        F = np.append(tvp(A, x) - lam * x ** (m - 1), np.sum(x**m) - 1.0)
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = (m - 1) * (_partial_matrix(A, x) - lam * np.diag(x ** (m - 2)))
        J[:n, n] = -(x ** (m - 1))
        J[n, :n] = m * x ** (m - 1)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        x = x + step[:n]
        lam = lam + float(step[n])
        if not np.any(x):
            break
        cand = _unit_pair(A, x)
        if cand[2] < best[2]:
            best = cand
        if cand[2] <= tol:
            break
    return best


def sshopm(
    A,
    shift: float | None = None,
    seed: int = 0,
    max_iter: int = 5000,
    tol: float = 1e-10,
    x0=None,
    max_restarts: int = 5,
) -> EigenPair:
    """Shifted power-type iteration for an H-eigenpair of a symmetric tensor.

    Even order: monotone ascent (descent for a negative ``shift``) of
    ``f(x) / sum(x_i^m)`` on the unit sphere with Armijo backtracking;
    its stationary points are exactly the H-eigenvectors. Odd order: the
    fixed-point step ``x <- sign(y)|y|^{1/(m-1)}`` with
    ``y = A x^{m-1} + shift x^{[m-1]}``, which may fail to settle (then
    ``converged`` is False). Both finish with Newton steps on the
    eigen-equations once the residual is small. The default shift is
    ``||A||_F``; the returned ``u`` has unit Euclidean norm.
    """
    A = as_tensor(A)
    n = require_hypercubic(A, "sshopm")
    m = A.order
    if m < 2:
        raise ShapeMismatchError("sshopm needs order >= 2")
    peak = float(np.max(np.abs(A.data)))
    if not is_symmetric(A, 1e-10 * max(peak, 1.0)):
        raise ValueError("sshopm requires a symmetric tensor; symmetrize it first")
    alpha = frobenius_norm(A) if shift is None else float(shift)
    direction = -1.0 if alpha < 0 else 1.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) if x0 is None else as_vector(x0).copy()
    restarts = 0
    while not np.any(x):
        restarts += 1
        if restarts > max_restarts:
            raise ValueError("start vector is zero after the allowed restarts")
        x = rng.standard_normal(n)
    polish_at = max(1e-6, tol)

    def finish(lam, u, res, it):
        return EigenPair(lam, u, res, res <= tol, it)

    if m % 2 == 0:
        x = x / np.linalg.norm(x)
        step = 1.0
        for it in range(1, max_iter + 1):
            lam, x, res = _unit_pair(A, x)
            if res <= tol:
                return finish(lam, x, res, it)
            if res <= polish_at:
                best = _newton_polish(A, x, lam, tol)
                if best[2] <= tol:
                    return finish(*best, it)
            s = float(np.sum(x**m))
            d = direction * (tvp(A, x) - lam * x ** (m - 1)) / s
            dd = float(d @ d)
            while True:
                cand = x + step * d
                cand /= np.linalg.norm(cand)
                if direction * _unit_pair(A, cand)[0] >= direction * lam + 1e-4 * step * dd:
                    break
                step *= 0.5
                if step < 1e-30:
                    # no representable ascent left; polish in place
                    return finish(*_newton_polish(A, x, lam, tol), it)
            x = cand
            step = min(2.0 * step, 1e6)
        return finish(*_unit_pair(A, x), max_iter)

    def normalize(v):
        total = np.sum(np.abs(v) ** m) ** (1.0 / m)
        return v / total if total > 0 else v

    x = normalize(x)
    for it in range(1, max_iter + 1):
        y = direction * (tvp(A, x) + alpha * x ** (m - 1))
        if not np.any(y):
            restarts += 1
            if restarts > max_restarts:
                return finish(*_unit_pair(A, x), it)
            x = normalize(rng.standard_normal(n))
            continue
        x = normalize(_signed_root(y, m - 1))
        lam, u, res = _unit_pair(A, x)
        if res <= tol:
            return finish(lam, u, res, it)
        if res <= polish_at:
            best = _newton_polish(A, u, lam, tol)
            if best[2] <= tol:
                return finish(*best, it)
    lam, u, _ = _unit_pair(A, x)
    return finish(*_newton_polish(A, u, lam, tol), max_iter)


VERDICTS = (
    "positive-definite-evidence",
    "negative-definite-evidence",
    "indefinite",
    "inconclusive",
)


@dataclass
class ProbeReport:
    """Sampling evidence about the sign of ``f_A``; never a certificate of definiteness."""

    verdict: str
    witnesses: list[tuple[np.ndarray, float]] = field(default_factory=list)
    f_min: float = math.nan
    f_max: float = math.nan
    samples: int = 0

    @property
    def positive_witness(self):
        return next(((x, f) for x, f in self.witnesses if f > 0), None)

    @property
    def negative_witness(self):
        return next(((x, f) for x, f in self.witnesses if f < 0), None)


def definiteness_probe(A, samples: int = 1000, seed: int = 0) -> ProbeReport:
    """Sample ``f_A`` on seeded unit vectors plus two eigen-solver extremes.

    Values within ``1e-12 * ||A||_F`` of zero count as neither sign.
    """
    A = as_tensor(A)
    n = require_hypercubic(A, "definiteness_probe")
    if A.order % 2:
        raise ShapeMismatchError(f"definiteness needs even order, got {A.order}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)

    S = symmetrize(A, NormalizationMode.PROJECTOR)
    alpha = frobenius_norm(S)
    extremes = []
    if alpha > 0:
        for k, shift in enumerate((alpha, -alpha)):
            pair = sshopm(S, shift=shift, seed=seed + k + 1, max_iter=500)
            extremes.append(pair.u)
    if extremes:
        X = np.vstack([X, np.array(extremes)])
    F = _poly_eval_batch(A, X)

    eps = 1e-12 * max(frobenius_norm(A), np.finfo(float).tiny)
    imax, imin = int(np.argmax(F)), int(np.argmin(F))
    fmax, fmin = float(F[imax]), float(F[imin])
    witnesses = []
    if fmax > eps:
        witnesses.append((X[imax].copy(), poly_eval(A, X[imax])))
    if fmin < -eps:
        witnesses.append((X[imin].copy(), poly_eval(A, X[imin])))

    if fmax > eps and fmin < -eps:
        verdict = "indefinite"
    elif fmin > eps:
        verdict = "positive-definite-evidence"
    elif fmax < -eps:
        verdict = "negative-definite-evidence"
    else:
        verdict = "inconclusive"
    return ProbeReport(verdict, witnesses, fmin, fmax, len(X))


def min_tvp_norm(A, samples: int = 50, seed: int = 0) -> float:
    """Smallest ``||A x^{m-1}||`` over seeded random unit vectors."""
    A = as_tensor(A)
    n = require_hypercubic(A, "min_tvp_norm")
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(samples):
        x = rng.standard_normal(n)
        x /= np.linalg.norm(x)
        best = min(best, float(np.linalg.norm(tvp(A, x))))
    return best


def commutation_tensor(p: int, q: int) -> DenseTensor:
    """``K[i1,i2,i3,i4] = 1`` iff ``i1 == i4`` and ``i2 == i3``; shape ``p x q x q x p``."""
    return DenseTensor(np.einsum("ad,bc->abcd", np.eye(p), np.eye(q)))


def _as_perm(sigma) -> Permutation:
    return sigma if isinstance(sigma, Permutation) else Permutation(sigma)


def permutation_tensor(sigma, n: int) -> DenseTensor:
    """Order-2m (0,1)-tensor with ``K[i.., j..] = 1`` iff ``i_k == j_sigma(k)`` for all k."""
    sigma = _as_perm(sigma)
    m = sigma.m
    if n ** (2 * m) > 10**6:
        raise SizeLimitError(f"permutation tensor with {n}^{2 * m} entries exceeds 10^6")
    shape = (n,) * m
    idx = np.indices(shape).reshape(m, -1)
    # j_l = i_{sigma^{-1}(l)}
    j = idx[list(sigma.inverse().zero_based())]
    rows = np.ravel_multi_index(tuple(idx), shape)
    cols = np.ravel_multi_index(tuple(j), shape)
    K = np.zeros((n**m, n**m))
    K[rows, cols] = 1.0
    return DenseTensor(K.reshape(shape + shape))


def apply_permutation_tensor(sigma, vectors, method: str = "contract") -> DenseTensor:
    """``K^(sigma) (u1 x ... x um) = u_sigma(1) x ... x u_sigma(m)``.

    ``method="contract"`` materializes ``K^(sigma)`` and contracts its last
    m modes against the outer product; ``method="reorder"`` permutes the
    modes of the outer product directly. Both only move entries, so they
    agree bit for bit.
    """
    sigma = _as_perm(sigma)
    U = outer_chain(vectors)
    if U.order != sigma.m:
        raise ShapeMismatchError(f"{U.order} vectors for a permutation on {sigma.m} points")
    if method == "contract":
        return contract_k(permutation_tensor(sigma, U.shape[0]), U, sigma.m)
    if method == "reorder":
        return permute_modes(U, sigma.inverse())
    raise ValueError(f"unknown method {method!r}")


def permuted_family_rank(vectors, tol: float = 1e-10) -> int:
    """Numeric rank of ``{u_sigma(1) x ... x u_sigma(m) : sigma in P_m}``."""
    vectors = [as_vector(v) for v in vectors]
    m = len(vectors)
    if m > 5:
        raise SizeLimitError(f"{m}! family members exceed the m <= 5 guard")
    U = outer_chain(vectors)
    rows = [permute_modes(U, sigma.inverse()).flat for sigma in all_permutations(m)]
    return numeric_rank(np.array(rows), tol)


def permutation_tensor_family_rank(m: int, n: int, tol: float = 1e-10) -> int:
    """Numeric rank of the vectorized family ``{K^(sigma) : sigma in P_m}``."""
    rows = [permutation_tensor(sigma, n).flat for sigma in all_permutations(m)]
    return numeric_rank(np.array(rows), tol)
