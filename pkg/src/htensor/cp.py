"""CP decomposition by alternating least squares, and rank evidence tables."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from htensor.core import DenseTensor, as_tensor
from htensor.linalg import numeric_rank


@dataclass
class CPModel:
    """``sum_r weights[r] * factors[0][:, r] x ... x factors[-1][:, r]`` with unit columns."""

    weights: np.ndarray
    factors: list[np.ndarray]

    @property
    def rank(self) -> int:
        return len(self.weights)

    @property
    def target_shape(self) -> tuple[int, ...]:
        return tuple(F.shape[0] for F in self.factors)

    @property
    def terms(self) -> list[tuple[float, list[np.ndarray]]]:
        return [
            (float(self.weights[r]), [F[:, r].copy() for F in self.factors])
            for r in range(self.rank)
        ]

    def reconstruct(self) -> DenseTensor:
        return DenseTensor(_full(self.weights, self.factors))


@dataclass
class CPResult:
    model: CPModel
    fit: float
    history: list[float]
    best_restart: int
    restart_fits: list[float] = field(default_factory=list)

    @property
    def restarts_used(self) -> int:
        return len(self.restart_fits)


def _full(weights, factors) -> np.ndarray:
    # row-major Khatri-Rao product, summed over components
    kr = factors[0] * weights
    for F in factors[1:]:
        kr = (kr[:, None, :] * F[None, :, :]).reshape(-1, len(weights))
    return kr.sum(axis=1).reshape(tuple(F.shape[0] for F in factors))


def _khatri_rao(mats: list[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for M in mats[1:]:
        out = (out[:, None, :] * M[None, :, :]).reshape(-1, out.shape[1])
    return out


def _normalize_columns(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(F, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return F / safe, norms


def _als_run(X: np.ndarray, R: int, rng: np.random.Generator, iters: int, stall_tol: float):
    shape = X.shape
    m = X.ndim
    normX = float(np.linalg.norm(X))
    factors = [_normalize_columns(rng.uniform(-1.0, 1.0, (d, R)))[0] for d in shape]
    weights = np.ones(R)
    unfoldings = [np.moveaxis(X, k, 0).reshape(shape[k], -1) for k in range(m)]
    history = []
    prev = np.inf
    for _ in range(iters):
        for k in range(m):
            others = [factors[j] for j in range(m) if j != k]
            gram = np.ones((R, R))
            for F in others:
                gram *= F.T @ F
            rhs = unfoldings[k] @ _khatri_rao(others)
            F_new = np.linalg.lstsq(gram, rhs.T, rcond=None)[0].T
            factors[k], weights = _normalize_columns(F_new)
        resid = float(np.linalg.norm(X - _full(weights, factors)))
        fit = resid / normX if normX > 0 else resid
        history.append(fit)
        if fit < 1e-15 or (np.isfinite(prev) and prev - fit <= stall_tol * prev):
            break
        prev = fit
    return CPModel(weights, factors), history


def _thread_count(threads: int | None) -> int:
    if threads is None:
        try:
            threads = int(os.environ.get("HTENSOR_THREADS", "1"))
        except ValueError:
            threads = 1
    return max(1, threads)


def cp_als(
    A,
    R: int,
    restarts: int = 1,
    iters: int = 500,
    seed: int = 0,
    fit_tol: float | None = None,
    stall_tol: float = 1e-9,
    threads: int | None = None,
) -> CPResult:
    """Best of ``restarts`` seeded ALS runs for a rank-``R`` CP model.

    ``fit = ||A - model|| / ||A||``. Restart ``r`` draws its initial
    factors from ``default_rng([seed, r])`` (uniform on (-1, 1), columns
    normalized). If ``fit_tol`` is given, restarts stop after the first
    one whose fit reaches it; with several threads, restarts past that
    index are discarded so the result does not depend on the thread count.
    Ties go to the lowest restart index.
    """
    X = as_tensor(A).data
    if R < 1:
        raise ValueError(f"rank must be >= 1, got {R}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")

    def run(r):
        return _als_run(X, R, np.random.default_rng([seed, r]), iters, stall_tol)

    nthreads = _thread_count(threads)
    results = []
    r = 0
    with ThreadPoolExecutor(max_workers=nthreads) if nthreads > 1 else _Serial() as pool:
        while r < restarts:
            batch = list(range(r, min(restarts, r + nthreads)))
            for res in pool.map(run, batch):
                results.append(res)
                if fit_tol is not None and res[1][-1] <= fit_tol:
                    break
            r = batch[-1] + 1
            if fit_tol is not None and results[-1][1][-1] <= fit_tol:
                break

    fits = [h[-1] for _, h in results]
    best = int(np.argmin(fits))
    model, history = results[best]
    return CPResult(model, fits[best], history, best, fits)


class _Serial:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    @staticmethod
    def map(fn, items):
        for item in items:
            yield fn(item)


def matricization_rank_bound(A, tol: float = 1e-10) -> int:
    """Largest numeric rank over the mode-k unfoldings; a lower bound on CP rank."""
    X = as_tensor(A).data
    return max(
        numeric_rank(np.moveaxis(X, k, 0).reshape(X.shape[k], -1), tol) for k in range(X.ndim)
    )


@dataclass
class RankRow:
    rank: int
    best_fit: float
    best_restart: int
    restarts_used: int
    reached: bool


@dataclass
class RankEvidence:
    rows: list[RankRow]
    lower_bound: int
    fit_tol: float
    seed: int
    restarts: int
    iters: int

    @property
    def estimate(self) -> int | None:
        """Smallest ``R`` whose best fit reached ``fit_tol``."""
        return next((row.rank for row in self.rows if row.reached), None)

    def row(self, R: int) -> RankRow:
        return next(row for row in self.rows if row.rank == R)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "restarts": self.restarts,
            "iters": self.iters,
            "fit_tol": self.fit_tol,
            "lower_bound": self.lower_bound,
            "estimate": self.estimate,
            "rows": [
                {
                    "rank": row.rank,
                    "best_fit": row.best_fit,
                    "best_restart": row.best_restart,
                    "restarts_used": row.restarts_used,
                    "reached": row.reached,
                }
                for row in self.rows
            ],
        }


def rank_estimate(
    A,
    R_max: int,
    restarts: int = 10,
    iters: int = 500,
    seed: int = 0,
    fit_tol: float = 1e-8,
    threads: int | None = None,
) -> RankEvidence:
    """ALS evidence table for ``R = 1..R_max`` plus the matricization lower bound.

    Heuristic: a reached row shows a decomposition of that length exists
    (up to ``fit_tol``); an unreached row is only a failure to find one.
    """
    rows = []
    for R in range(1, R_max + 1):
        res = cp_als(A, R, restarts, iters, seed, fit_tol=fit_tol, threads=threads)
        rows.append(RankRow(R, res.fit, res.best_restart, res.restarts_used, res.fit <= fit_tol))
    return RankEvidence(rows, matricization_rank_bound(A), fit_tol, seed, restarts, iters)
