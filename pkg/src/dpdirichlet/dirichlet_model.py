"""Dirichlet data model: datasets, censoring, sufficient statistics, MLE."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConvergenceError, DatasetError, DomainError, RangeError
from .special_math import (
    _digamma_scalar,
    _inverse_digamma_scalar,
    digamma,
    log_gamma,
    log_gamma_draw,
)

ROW_SUM_TOL = 1e-9
MLE_TOL = 1e-10
MLE_MAX_ITER = 2000


@dataclass(frozen=True)
class CompositionalDataset:
    """n x d matrix of strictly positive rows that each sum to one.

    Build through :func:`validate_dataset`; the array is made read-only.
    """

    rows: np.ndarray

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def subset(self, index) -> "CompositionalDataset":
        rows = self.rows[np.asarray(index)]
        rows.flags.writeable = False
        return CompositionalDataset(rows)


def validate_dataset(raw) -> CompositionalDataset:
    """Validate an n x d matrix of proportions.

    Raises:
        DatasetError: ragged rows, fewer than one row or two columns, a
            non-positive or non-finite entry, or a row not summing to 1.
            ``err.rows`` lists offending row indices.
    """
    if isinstance(raw, CompositionalDataset):
        return raw
    if not isinstance(raw, np.ndarray):
        raw = list(raw)
        lengths = {len(r) for r in raw}
        if len(lengths) > 1:
            first = len(raw[0])
            bad = [i for i, r in enumerate(raw) if len(r) != first]
            raise DatasetError(f"ragged rows at indices {bad}", bad)
    arr = np.array(raw, dtype=float)
    if arr.ndim != 2:
        raise DatasetError("dataset must be a 2-d matrix")
    n, d = arr.shape
    if n < 1:
        raise DatasetError("dataset has no rows")
    if d < 2:
        raise DatasetError("dataset needs at least two components")
    bad = np.flatnonzero(~np.all(np.isfinite(arr) & (arr > 0), axis=1))
    if bad.size:
        raise DatasetError(f"non-positive entries in rows {bad.tolist()}", bad)
    bad = np.flatnonzero(np.abs(arr.sum(axis=1) - 1.0) > ROW_SUM_TOL)
    if bad.size:
        raise DatasetError(f"rows {bad.tolist()} do not sum to 1", bad)
    arr.flags.writeable = False
    return CompositionalDataset(arr)


@dataclass(frozen=True)
class DirichletParams:
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        if alpha.ndim != 1 or alpha.size < 2:
            raise DomainError("alpha must be a vector with at least two entries")
        if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
            raise DomainError(f"alpha must be positive, got {alpha}")
        alpha.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)

    @property
    def d(self) -> int:
        return self.alpha.size

    def expected_log(self) -> np.ndarray:
        """E[log x_j] = Psi(alpha_j) - Psi(sum alpha)."""
        return digamma(self.alpha) - digamma(self.alpha.sum())


def _as_alpha(alpha) -> np.ndarray:
    if isinstance(alpha, DirichletParams):
        return alpha.alpha
    return DirichletParams(alpha).alpha


@dataclass(frozen=True)
class SufficientStatistic:
    """Componentwise average of log (censored) proportions.

    Attributes:
        values: the d-vector.
        threshold_a: censoring threshold, or ``None`` for the uncensored statistic.
        n_basis: number of records averaged.
        noisy: True for a privatized statistic; noisy values may leave the
            feasible range, exact ones may not be positive.
    """

    values: np.ndarray
    threshold_a: float | None
    n_basis: int
    noisy: bool = False
    scale: float | None = field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if not self.noisy and np.any(values >= 0):
            raise DomainError("an exact sufficient statistic must be negative componentwise")

    @property
    def d(self) -> int:
        return self.values.size

    @property
    def in_range(self) -> bool:
        return in_range(self.values)


def in_range(s) -> bool | np.ndarray:
    """Membership in the feasible set {s < 0, sum exp(s) <= 1}; row-wise for 2-d input."""
    s = np.asarray(s, dtype=float)
    ok = np.all(s < 0, axis=-1) & (np.exp(np.minimum(s, 0.0)).sum(axis=-1) <= 1.0)
    return bool(ok) if ok.ndim == 0 else ok


def censor(D, a: float) -> np.ndarray:
    """Entrywise max(x, a); rows are not renormalized."""
    if not 0 < a < 1:
        raise DomainError(f"threshold must lie in (0, 1), got {a}")
    rows = D.rows if isinstance(D, CompositionalDataset) else np.asarray(D, dtype=float)
    return np.maximum(rows, a)


def sufficient_stat(D, a: float | None = None) -> SufficientStatistic:
    """n^-1 sum_i log max(x_ij, a); ``a=None`` gives the uncensored statistic."""
    rows = D.rows if isinstance(D, CompositionalDataset) else np.asarray(D, dtype=float)
    if a is None:
        values = np.log(rows).mean(axis=0)
    else:
        values = np.log(censor(rows, a)).mean(axis=0)
    return SufficientStatistic(values, a, rows.shape[0])


def log_censored_mean(log_rows: np.ndarray, a: float | None) -> np.ndarray:
    """Sufficient statistic from log proportions, over the second-to-last axis."""
    if a is not None:
        log_rows = np.maximum(log_rows, math.log(a))
    return log_rows.mean(axis=-2)


def dirichlet_logpdf(x, alpha) -> float:
    """Log density of Dirichlet(alpha) at a point strictly inside the simplex."""
    alpha = _as_alpha(alpha)
    x = np.asarray(x, dtype=float)
    if x.shape != alpha.shape:
        raise DomainError("x and alpha have different lengths")
    if np.any(x <= 0) or abs(x.sum() - 1.0) > ROW_SUM_TOL:
        raise DomainError(f"x = {x} is not strictly inside the simplex")
    return float(
        log_gamma(alpha.sum()) - np.sum(log_gamma(alpha)) + np.sum((alpha - 1.0) * np.log(x))
    )


def dirichlet_loglik_from_stat(alpha, sum_log, n: float) -> float:
    """Log-likelihood of n records with total log-proportions ``sum_log``."""
    alpha = np.asarray(alpha, dtype=float)
    return float(
        np.dot(alpha - 1.0, sum_log)
        + n * (math.lgamma(alpha.sum()) - sum(math.lgamma(v) for v in alpha))
    )


def log_dirichlet_sample(alpha, n: int, rng) -> np.ndarray:
    """log of n Dirichlet(alpha) draws, stable for small alpha."""
    alpha = np.asarray(alpha, dtype=float)
    logg = log_gamma_draw(alpha, (n, alpha.size), rng)
    m = logg.max(axis=1, keepdims=True)
    return logg - (m + np.log(np.exp(logg - m).sum(axis=1, keepdims=True)))


def dirichlet_sample(alpha, n: int, rng) -> CompositionalDataset:
    """n independent Dirichlet(alpha) rows via normalized gamma variates."""
    alpha = _as_alpha(alpha)
    if n < 1:
        raise DomainError("n must be at least 1")
    rows = np.exp(log_dirichlet_sample(alpha, n, rng))
    # entries that underflow to 0 are lifted to the smallest normal float
    rows = np.maximum(rows, np.finfo(float).tiny)
    rows /= rows.sum(axis=1, keepdims=True)
    rows.flags.writeable = False
    return CompositionalDataset(rows)


def mean_composition(alpha) -> np.ndarray:
    """E[x | alpha] = alpha / sum(alpha); works row-wise on a matrix of draws."""
    alpha = np.asarray(alpha.alpha if isinstance(alpha, DirichletParams) else alpha, dtype=float)
    return alpha / alpha.sum(axis=-1, keepdims=True)


@njit(cache=True)
def _mle_fixed_point(stats, tol, max_iter):
    """Minka's fixed point, one row of ``stats`` at a time.

    Each sweep sets alpha_j <- Psi^-1(Psi(sum alpha) + s_j), starting from
    alpha = 1. Returns (alpha, iterations); iterations = -1 flags failure.
    """
    B, d = stats.shape
    out = np.ones((B, d))
    iters = np.zeros(B, dtype=np.int64)
    for b in range(B):
        alpha = np.ones(d)
        new = np.empty(d)
        done = False
        for it in range(max_iter):
            psi_total = _digamma_scalar(alpha.sum())
            change = 0.0
            for j in range(d):
                start = alpha[j] if it > 0 else -1.0
                v = _inverse_digamma_scalar(psi_total + stats[b, j], start)
                if v <= 0.0:
                    v = _inverse_digamma_scalar(psi_total + stats[b, j], -1.0)
                new[j] = v
                change = max(change, abs(v - alpha[j]))
            alpha[:] = new
            if change < tol:
                done = True
                iters[b] = it + 1
                break
        if not done:
            iters[b] = -1
        out[b] = alpha
    return out, iters


@njit(cache=True)
def _mle_by_total(stat):
    """Fallback for rows near the boundary, where the fixed point crawls.

    Bisects h(u) = log sum_j Psi^-1(Psi(e^u) + s_j) - u, which is positive for
    small u and negative for large u on the feasible set.
    """
    d = stat.size
    lo, hi = -40.0, 80.0
    alpha = np.empty(d)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        psi_total = _digamma_scalar(math.exp(mid))
        tot = 0.0
        for j in range(d):
            tot += _inverse_digamma_scalar(psi_total + stat[j], -1.0)
        if math.log(tot) > mid:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    psi_total = _digamma_scalar(math.exp(0.5 * (lo + hi)))
    for j in range(d):
        alpha[j] = _inverse_digamma_scalar(psi_total + stat[j], -1.0)
    return alpha


def dirichlet_mle(s, tol: float = MLE_TOL, max_iter: int = MLE_MAX_ITER) -> np.ndarray:
    """Maximum-likelihood alpha from a sufficient statistic.

    Accepts a :class:`SufficientStatistic`, a d-vector, or a B x d matrix
    (fitted row by row). Solves Psi(alpha_j) - Psi(sum alpha) = s_j.

    Raises:
        RangeError: a statistic outside {s < 0, sum exp(s) <= 1}.
        ConvergenceError: neither the fixed point (``max_iter`` sweeps) nor
            the bisection fallback produced a finite positive alpha.
    """
    values = s.values if isinstance(s, SufficientStatistic) else np.asarray(s, dtype=float)
    stats = np.atleast_2d(values).astype(float)
    ok = in_range(stats)
    if not np.all(ok):
        bad = np.flatnonzero(~np.atleast_1d(ok))
        raise RangeError(
            f"statistic outside the Dirichlet range (rows {bad.tolist()[:10]}): "
            f"{stats[bad[0]].tolist()}"
        )
    alpha, iters = _mle_fixed_point(np.ascontiguousarray(stats), tol, max_iter)
    for b in np.flatnonzero(iters < 0):
        alpha[b] = _mle_by_total(stats[b])
    if not np.all(np.isfinite(alpha) & (alpha > 0)):
        raise ConvergenceError(f"Dirichlet MLE did not converge in {max_iter} iterations")
    return alpha[0] if values.ndim == 1 else alpha
