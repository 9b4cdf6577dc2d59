"""Accuracy and convergence metrics for posterior and bootstrap draws."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .dirichlet_model import _as_alpha, dirichlet_sample, mean_composition
from .errors import DomainError, NotPositiveDefiniteError
from .seeding import as_generator

MIN_PRED_ROWS = 500


def _draws_and_truth(draws, alpha_true):
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    alpha_true = np.asarray(alpha_true, dtype=float)
    if draws.shape[0] < 1:
        raise DomainError("need at least one draw")
    if draws.shape[1] != alpha_true.size:
        raise DomainError(f"draws have {draws.shape[1]} components, truth has {alpha_true.size}")
    return draws, alpha_true


def mse_alpha(draws, alpha_true) -> float:
    """Mean over draws of the squared Euclidean distance to the true alpha."""
    draws, alpha_true = _draws_and_truth(draws, alpha_true)
    return float(np.mean(np.sum((draws - alpha_true) ** 2, axis=1)))


def mse_mean(draws, alpha_true) -> float:
    """Same as :func:`mse_alpha` on the mean-composition scale."""
    draws, alpha_true = _draws_and_truth(draws, alpha_true)
    return float(np.mean(np.sum((mean_composition(draws) - mean_composition(alpha_true)) ** 2, axis=1)))


def split_rhat(chains) -> np.ndarray:
    """Split potential scale reduction factor, one value per component.

    ``chains`` is a sequence of arrays of shape (T,) or (T, d) with equal T.
    Each chain is cut in half (the first draw is dropped when T is odd), and
    R-hat = sqrt(((h-1)/h W + B/h) / W) over the 2m half-chains of length h.
    Constant but disagreeing chains give ``inf``.
    """
    chains = [np.asarray(c, dtype=float) for c in chains]
    if len(chains) < 2:
        raise DomainError("split R-hat needs at least two chains")
    chains = [c[:, None] if c.ndim == 1 else c for c in chains]
    T = chains[0].shape[0]
    if any(c.shape != chains[0].shape for c in chains):
        raise DomainError("chains differ in length or dimension")
    if T < 4:
        raise DomainError(f"chains too short for split R-hat (length {T})")
    if T % 2:
        chains = [c[1:] for c in chains]
        T -= 1
    h = T // 2
    halves = np.stack([part for c in chains for part in (c[:h], c[h:])])  # (2m, h, d)
    means = halves.mean(axis=1)
    W = halves.var(axis=1, ddof=1).mean(axis=0)
    B = h * means.var(axis=0, ddof=1)
    var_plus = (h - 1) / h * W + B / h
    with np.errstate(divide="ignore", invalid="ignore"):
        rhat = np.sqrt(var_plus / W)
    rhat = np.where(W > 0, rhat, np.where(B > 0, np.inf, 1.0))
    return rhat


def predictive_coverage(pred, alpha_true, level: float = 0.95, n_truth: int = 100_000, rng=None, drop: int = -1) -> float:
    """Fraction of true-model draws inside the predictive Mahalanobis ellipsoid.

    One coordinate (``drop``) is removed first because simplex data have a
    singular covariance. The radius is the ``level`` quantile of the
    predictive sample's own distances to its mean.
    """
    rows = pred.rows if hasattr(pred, "rows") else np.asarray(pred, dtype=float)
    if rows.shape[0] < MIN_PRED_ROWS:
        raise DomainError(f"predictive sample needs at least {MIN_PRED_ROWS} rows")
    if not 0 < level <= 1:
        raise DomainError(f"level must lie in (0, 1], got {level}")
    alpha_true = _as_alpha(alpha_true)
    keep = np.delete(np.arange(rows.shape[1]), drop)
    x = rows[:, keep]
    mu = x.mean(axis=0)
    cov = np.atleast_2d(np.cov(x, rowvar=False))
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("predictive covariance is singular", cov) from exc

    def dist2(y):
        z = np.linalg.solve(chol, (y - mu).T)
        return np.sum(z * z, axis=0)

    radius = np.quantile(dist2(x), level)
    truth = dirichlet_sample(alpha_true, n_truth, as_generator(rng)).rows[:, keep]
    return float(np.mean(dist2(truth) <= radius))


@dataclass
class MetricReport:
    mse_alpha: float
    mse_mean: float
    split_rhat: list | None = None
    predictive_coverage: float | None = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mse_alpha < 0 or self.mse_mean < 0:
            raise DomainError("MSE cannot be negative")
        if self.predictive_coverage is not None and not 0 <= self.predictive_coverage <= 1:
            raise DomainError("coverage must lie in [0, 1]")

    @property
    def rhat_max(self) -> float | None:
        return None if self.split_rhat is None else float(np.max(self.split_rhat))

    def as_dict(self) -> dict:
        return asdict(self)
