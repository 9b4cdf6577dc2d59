"""Parametric bootstrap from a noisy release, percentile intervals, group comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirichlet_model import SufficientStatistic, dirichlet_mle, in_range, log_censored_mean, log_dirichlet_sample, mean_composition
from .errors import DomainError, RangeError
from .mechanisms import laplace_sample, laplace_scale
from .seeding import TAG_BOOTSTRAP, as_generator, child_seed, stream

DEFAULT_B = 1000
MIN_B_FOR_CI = 100
GATE_MAX_ATTEMPTS = 1_000_000
GATE_MIN_RATE = 1e-4


@dataclass
class BootstrapDraws:
    draws: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float)
        if self.draws.ndim != 2 or self.draws.shape[0] < 1:
            raise DomainError("bootstrap draws must be a non-empty B x d matrix")
        if not np.all(self.draws > 0):
            raise DomainError("bootstrap draws must be positive")

    @property
    def B(self) -> int:
        return self.draws.shape[0]


def _gated_noise(s, scale, rng, budget):
    """Draw Laplace noise until s - noise lands in the feasible set.

    Returns (accepted statistic, rejections). ``budget`` is a two-item list of
    running [attempts, accepted] shared across iterations for the abort rule.
    """
    d = s.size
    chunk = 16
    rejected = 0
    while True:
        cand = s - laplace_sample(scale, (chunk, d), rng)
        ok = np.flatnonzero(in_range(cand))
        if ok.size:
            k = int(ok[0])
            budget[0] += k + 1
            budget[1] += 1
            return cand[k], rejected + k
        rejected += chunk
        budget[0] += chunk
        if budget[0] >= GATE_MAX_ATTEMPTS and budget[1] / budget[0] < GATE_MIN_RATE:
            raise RangeError(
                f"bootstrap gate accepted {budget[1]} of {budget[0]} noise draws; the released "
                f"statistic {s.tolist()} is too far outside the Dirichlet range"
            )
        chunk = min(chunk * 2, 4096)


def dp_bootstrap(
    sL,
    eps1: float,
    a: float | None,
    n: int,
    B: int = DEFAULT_B,
    rng=None,
    censor_refit: bool = False,
    private: bool = True,
) -> BootstrapDraws:
    """Bootstrap distribution of alpha given a noisy censored statistic.

    Iteration b uses its own stream ``(seed, TAG_BOOTSTRAP, b)``:

    1. draw Laplace noise at the release scale and subtract it from ``sL``,
       redrawing until the result is feasible;
    2. fit alpha* by maximum likelihood;
    3. simulate n records from Dirichlet(alpha*);
    4. refit on their statistic; uncensored by default, censored at ``a``
       when ``censor_refit`` is set.

    The censored refit adds the censoring bias a second time on top of the one
    already carried by alpha*, which shifts percentile intervals off target
    whenever a large threshold is selected.

    ``private=False`` gives the non-private benchmark: the noise is drawn (so
    streams stay aligned) but multiplied by zero, and there is no gate.
    ``a=None`` means an uncensored input and refit, only valid then.
    """
    values = np.asarray(sL.values if isinstance(sL, SufficientStatistic) else sL, dtype=float)
    if B < 1:
        raise DomainError("B must be at least 1")
    if a is None and private:
        raise DomainError("a private bootstrap needs the censoring threshold")
    d = values.size
    seed = int(rng) if isinstance(rng, (int, np.integer)) else child_seed(as_generator(rng))
    scale = laplace_scale(a, n, d, eps1) if private else 1.0
    refit_a = a if censor_refit else None

    stats = np.empty((B, d))
    rejections = 0
    gate = [0, 0]
    streams = [stream(seed, TAG_BOOTSTRAP, b) for b in range(B)]
    for b, g in enumerate(streams):
        if private:
            stats[b], r = _gated_noise(values, scale, g, gate)
            rejections += r
        else:
            stats[b] = values - 0.0 * laplace_sample(scale, d, g)
    alpha_star = dirichlet_mle(stats)

    refits = np.empty((B, d))
    for b, g in enumerate(streams):
        logx = log_dirichlet_sample(alpha_star[b], n, g)
        refits[b] = log_censored_mean(logx, refit_a)
    draws = dirichlet_mle(refits)
    meta = {
        "a": a,
        "eps1": eps1,
        "n": n,
        "B": B,
        "rejection_count": rejections,
        "seed": seed,
        "censor_refit": censor_refit,
        "private": private,
    }
    return BootstrapDraws(draws, meta)


def boots(s0, a: float | None, n: int, B: int = DEFAULT_B, rng=None, censor_refit: bool = False) -> BootstrapDraws:
    """Non-private parametric bootstrap from an exact statistic."""
    return dp_bootstrap(s0, math.inf, a, n, B, rng, censor_refit=censor_refit, private=False)


def _transform(draws: BootstrapDraws, target: str, other: BootstrapDraws | None):
    if target == "alpha":
        return draws.draws
    if target == "mean_composition":
        return mean_composition(draws.draws)
    if target == "mean_difference":
        if other is None:
            raise DomainError("mean_difference needs a second set of draws")
        if other.draws.shape[1] != draws.draws.shape[1]:
            raise DomainError("draw sets differ in dimension")
        m = min(draws.B, other.B)
        return mean_composition(draws.draws[:m]) - mean_composition(other.draws[:m])
    raise DomainError(f"unknown target {target!r}")


def percentile_ci(
    draws: BootstrapDraws, level: float = 0.95, target: str = "alpha", other: BootstrapDraws | None = None
) -> np.ndarray:
    """Equal-tailed percentile interval per component, as a d x 2 array.

    With k = ceil(B (1 - level) / 2) the endpoints are the k-th smallest and
    the k-th largest value (B = 1000, level 0.95: order statistics 25 and 976).
    """
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    x = np.sort(_transform(draws, target, other), axis=0)
    B = x.shape[0]
    if B < MIN_B_FOR_CI:
        raise DomainError(f"need at least {MIN_B_FOR_CI} draws for an interval, got {B}")
    # round away float noise in B * tail before taking the ceiling
    k = max(1, math.ceil(round(B * (1.0 - level) / 2.0, 9)))
    return np.column_stack([x[k - 1], x[B - k]])


def test_mean_difference(drawsA, drawsB, margin: float = 0.01, level: float = 0.95) -> np.ndarray:
    """Reject H0_j: |E[x_j|A] - E[x_j|B]| <= margin when the interval avoids [-margin, margin]."""
    ci = percentile_ci(drawsA, level, "mean_difference", drawsB)
    return (ci[:, 0] > margin) | (ci[:, 1] < -margin)


# pytest would otherwise try to collect the function above
test_mean_difference.__test__ = False
