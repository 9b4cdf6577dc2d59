"""Privacy mechanisms and the release pipeline for the censored sufficient statistic.

The release spends ``eps2`` on choosing the censoring threshold from a
candidate list (geometric noise on integer counts) and ``eps1`` on the
statistic itself (Laplace noise).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dirichlet_model import CompositionalDataset, SufficientStatistic, sufficient_stat, validate_dataset
from .errors import DomainError
from .seeding import as_generator

RELEASE_VERSION = 1
UPPER_FRACTION = 0.99
LOWER_FRACTION = 0.01
TAIL_PROB = 0.025
DEFAULT_CANDIDATES = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


# ---------------------------------------------------------------- Laplace

def laplace_scale(a: float, n: int, d: int, eps1: float) -> float:
    """Noise scale -d log(a) / (n eps1) for the censored statistic.

    Each coordinate of log max(x, a) lies in [log a, 0], so replacing one of n
    records moves the average by at most -d log(a) / n in L1.
    """
    if not 0 < a < 1:
        raise DomainError(f"threshold must lie in (0, 1), got {a}")
    if n < 1 or d < 1:
        raise DomainError("n and d must be at least 1")
    if not eps1 > 0:
        raise DomainError(f"eps1 must be positive, got {eps1}")
    return -d * math.log(a) / (n * eps1)


def laplace_sample(scale: float, count, rng) -> np.ndarray:
    """iid Laplace(0, scale) by inverting the CDF of a centred uniform."""
    if not scale > 0:
        raise DomainError(f"Laplace scale must be positive, got {scale}")
    u = as_generator(rng).uniform(-0.5, 0.5, size=count)
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_logpdf(x, loc, scale):
    return -np.abs(np.asarray(x) - loc) / scale - math.log(2.0 * scale)


# ---------------------------------------------------------- geometric

class TwoSidedGeometric:
    """Integer noise with P(k) = t^|k| (1 - t) / (1 + t).

    ``t = 0`` is accepted as the no-noise limit (it is what exp(-eps/2)
    rounds to for astronomically large eps).
    """

    def __init__(self, t: float):
        if not 0 <= t < 1:
            raise DomainError(f"t must lie in (0, 1), got {t}")
        self.t = float(t)

    @classmethod
    def for_epsilon(cls, eps: float, sensitivity: float = 2.0) -> "TwoSidedGeometric":
        if not eps > 0:
            raise DomainError(f"epsilon must be positive, got {eps}")
        return cls(math.exp(-eps / sensitivity))

    def pmf(self, k):
        k = np.abs(np.asarray(k))
        return self.t**k * (1.0 - self.t) / (1.0 + self.t)

    def upper_tail(self, k):
        """P(eps >= k) for integer k >= 0 (and by symmetry P(eps <= -k))."""
        k = np.asarray(k)
        kk = np.abs(k)
        return np.where(k <= 0, 1.0 - self.t ** (kk + 1.0) / (1.0 + self.t), self.t**kk / (1.0 + self.t))

    def cdf(self, k):
        k = np.floor(np.asarray(k, dtype=float))
        # P(eps <= k) = P(eps >= -k) by symmetry
        return self.upper_tail(-k)

    def sample(self, rng, size=None) -> np.ndarray:
        rng = as_generator(rng)
        if self.t == 0.0:
            return np.zeros(size if size is not None else (), dtype=np.int64)
        # numpy's geometric counts trials; the offset of one cancels in the difference
        p = 1.0 - self.t
        return rng.geometric(p, size) - rng.geometric(p, size)

    def quantile_pair(self, tail: float = TAIL_PROB) -> tuple[int, int]:
        """(lower, upper) with upper the largest k where P(eps >= k) >= tail."""
        if self.t == 0.0:
            return 0, 0
        # t^k / (1 + t) >= tail  <=>  k <= log(tail (1 + t)) / log t
        k = max(0, math.floor(math.log(tail * (1.0 + self.t)) / math.log(self.t)))
        # guard the boundary against rounding in the logarithms
        while k > 0 and self.t**k / (1.0 + self.t) < tail:
            k -= 1
        while self.t ** (k + 1) / (1.0 + self.t) >= tail:
            k += 1
        return -k, k


# ---------------------------------------------------------- threshold choice

@dataclass(frozen=True)
class ThresholdCandidates:
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(np.asarray(self.values, dtype=float)))
        if not vals:
            raise DomainError("need at least one threshold candidate")
        if any(not 0 < v < 1 for v in vals):
            raise DomainError(f"candidates must lie in (0, 1): {vals}")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise DomainError(f"candidates must be strictly decreasing: {vals}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def _candidates(cand) -> ThresholdCandidates:
    return cand if isinstance(cand, ThresholdCandidates) else ThresholdCandidates(cand)


def score(D, cand) -> np.ndarray:
    """Number of newly uncensored rows as the threshold steps down the list."""
    cand = _candidates(cand)
    rows = D.rows if isinstance(D, CompositionalDataset) else np.asarray(D, dtype=float)
    row_min = np.sort(rows.min(axis=1))
    # u_m = #{i : min_j x_ij >= a_m}
    u = row_min.size - np.searchsorted(row_min, np.array(cand.values), side="left")
    return np.diff(np.concatenate(([0], u))).astype(np.int64)


def dp_score(D, cand, eps2: float, rng) -> np.ndarray:
    s = score(D, cand)
    return s + TwoSidedGeometric.for_epsilon(eps2).sample(rng, s.size)


def select_threshold(
    noisy_score,
    n: int,
    eps2: float,
    cand,
    fallback: str = "aM",
    upper: float = UPPER_FRACTION,
    lower: float = LOWER_FRACTION,
) -> float:
    """Choose a censoring threshold from a noisy score.

    Rule:
        a_1 if s_1 + q_hi >= upper * n; otherwise the largest a_m (m >= 2) with
        s_m - q_lo >= lower * n; otherwise the fallback, ``"aM"`` (the last
        candidate) or ``"a1"``.

    (q_lo, q_hi) is :meth:`TwoSidedGeometric.quantile_pair` at t = exp(-eps2/2).
    """
    cand = _candidates(cand)
    s = np.asarray(noisy_score)
    if s.shape != (len(cand),):
        raise DomainError("noisy score and candidate list differ in length")
    if fallback not in ("aM", "a1"):
        raise DomainError(f"unknown fallback {fallback!r}")
    q_lo, q_hi = TwoSidedGeometric.for_epsilon(eps2).quantile_pair()
    if s[0] + q_hi >= upper * n:
        return cand.values[0]
    passing = [a for a, sm in zip(cand.values[1:], s[1:]) if sm - q_lo >= lower * n]
    if passing:
        return max(passing)
    return cand.values[-1] if fallback == "aM" else cand.values[0]


# ---------------------------------------------------------- accounting

SEQUENTIAL = "sequential"
PARALLEL = "parallel"


@dataclass
class LedgerEntry:
    mechanism: str
    epsilon: float
    rule: str = SEQUENTIAL
    group: str | None = None  # entries sharing a parallel group touch disjoint data

    def as_dict(self):
        return {"mechanism": self.mechanism, "epsilon": self.epsilon, "rule": self.rule, "group": self.group}


@dataclass
class PrivacyBudget:
    """Append-only record of privacy spending.

    Sequential entries add up. Entries in one parallel group act on disjoint
    records, so the group costs its maximum. Single writer only.
    """

    epsilon1: float
    epsilon2: float
    ledger: list = field(default_factory=list)

    def spend(self, mechanism: str, epsilon: float, rule: str = SEQUENTIAL, group: str | None = None):
        if not epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {epsilon}")
        if rule not in (SEQUENTIAL, PARALLEL):
            raise DomainError(f"unknown composition rule {rule!r}")
        if rule == PARALLEL and group is None:
            raise DomainError("parallel entries need a group label")
        self.ledger.append(LedgerEntry(mechanism, float(epsilon), rule, group))

    @property
    def total(self) -> float:
        seq = sum(e.epsilon for e in self.ledger if e.rule == SEQUENTIAL)
        groups = {}
        for e in self.ledger:
            if e.rule == PARALLEL:
                groups[e.group] = max(groups.get(e.group, 0.0), e.epsilon)
        return seq + sum(groups.values())

    def as_dict(self) -> dict:
        return {
            "eps1": self.epsilon1,
            "eps2": self.epsilon2,
            "total": self.total,
            "ledger": [e.as_dict() for e in self.ledger],
        }

    @classmethod
    def from_dict(cls, obj) -> "PrivacyBudget":
        b = cls(obj["eps1"], obj["eps2"])
        for e in obj["ledger"]:
            b.ledger.append(LedgerEntry(e["mechanism"], e["epsilon"], e["rule"], e.get("group")))
        return b


def combine_parallel(budgets: dict, group: str = "groups") -> PrivacyBudget:
    """Budget of several releases on disjoint subpopulations, keyed by label."""
    budgets = dict(budgets)
    if not budgets:
        raise DomainError("nothing to combine")
    first = next(iter(budgets.values()))
    out = PrivacyBudget(first.epsilon1, first.epsilon2)
    for label, b in budgets.items():
        out.spend(f"release[{label}]", b.total, PARALLEL, group)
    return out


# ---------------------------------------------------------- release

@dataclass
class DPRelease:
    """Everything published by :func:`release`; downstream inference reads only this."""

    noisy_score: np.ndarray
    candidates: ThresholdCandidates
    selected_a: float
    statistics: list
    budget: PrivacyBudget
    n: int
    d: int
    rng_seed: int | None = None

    def __post_init__(self):
        if len(self.statistics) not in (1, 2):
            raise DomainError("a release carries one statistic or a pair")
        if self.selected_a not in self.candidates.values:
            raise DomainError("selected threshold is not a candidate")

    @property
    def is_split(self) -> bool:
        return len(self.statistics) == 2

    @property
    def eps1(self) -> float:
        return self.budget.epsilon1

    @property
    def eps2(self) -> float:
        return self.budget.epsilon2

    def to_dict(self) -> dict:
        return {
            "version": RELEASE_VERSION,
            "d": self.d,
            "n": self.n,
            "candidates": list(self.candidates.values),
            "noisy_score": [int(v) for v in self.noisy_score],
            "selected_a": self.selected_a,
            "statistics": [
                {"values": s.values.tolist(), "n_basis": s.n_basis, "scale": s.scale} for s in self.statistics
            ],
            "budget": self.budget.as_dict(),
            "rng_seed": self.rng_seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, obj) -> "DPRelease":
        if obj.get("version") != RELEASE_VERSION:
            raise DomainError(f"unsupported release version {obj.get('version')}")
        a = float(obj["selected_a"])
        stats = [
            SufficientStatistic(s["values"], a, int(s["n_basis"]), noisy=True, scale=s["scale"])
            for s in obj["statistics"]
        ]
        return cls(
            noisy_score=np.asarray(obj["noisy_score"], dtype=np.int64),
            candidates=ThresholdCandidates(obj["candidates"]),
            selected_a=a,
            statistics=stats,
            budget=PrivacyBudget.from_dict(obj["budget"]),
            n=int(obj["n"]),
            d=int(obj["d"]),
            rng_seed=obj.get("rng_seed"),
        )

    @classmethod
    def from_json(cls, text: str) -> "DPRelease":
        return cls.from_dict(json.loads(text))


def _noisy_stat(rows, a, eps1, rng) -> SufficientStatistic:
    n, d = rows.shape
    scale = laplace_scale(a, n, d, eps1)
    exact = sufficient_stat(rows, a).values
    return SufficientStatistic(exact + laplace_sample(scale, d, rng), a, n, noisy=True, scale=scale)


def release(
    D,
    cand=DEFAULT_CANDIDATES,
    eps1: float = 0.375,
    eps2: float = 1.125,
    n1: int = 0,
    n2: int | None = None,
    rng=None,
    fallback: str = "aM",
) -> DPRelease:
    """Select a threshold privately, then release the noisy censored statistic.

    With ``n1 = 0`` one statistic on all n rows is released. Otherwise the rows
    are permuted at random and the statistic is released separately for the
    first ``n1`` and remaining ``n2`` rows, each at the scale of its own size.
    Which rows went where is never published.

    ``rng`` may be a Generator or an integer seed; an integer is recorded in
    the release.
    """
    D = validate_dataset(D)
    cand = _candidates(cand)
    n, d = D.n, D.d
    if n2 is None:
        n2 = n - n1 if n1 else n
    if n1 < 0 or (n1 > 0 and (n2 < 1 or n1 + n2 != n)) or (n1 == 0 and n2 != n):
        raise DomainError(f"invalid split sizes n1={n1}, n2={n2} for n={n}")
    seed = int(rng) if isinstance(rng, (int, np.integer)) else None
    gen = as_generator(rng)

    budget = PrivacyBudget(eps1, eps2)
    noisy = dp_score(D, cand, eps2, gen)
    budget.spend("geometric:score", eps2)
    a = select_threshold(noisy, n, eps2, cand, fallback=fallback)

    if n1 == 0:
        stats = [_noisy_stat(D.rows, a, eps1, gen)]
        budget.spend("laplace:S0", eps1)
    else:
        perm = gen.permutation(n)
        parts = (D.rows[perm[:n1]], D.rows[perm[n1:]])
        stats = [_noisy_stat(p, a, eps1, gen) for p in parts]
        for name in ("laplace:S0(D1)", "laplace:S0(D2)"):
            budget.spend(name, eps1, PARALLEL, "partition")
    return DPRelease(noisy, cand, a, stats, budget, n, d, seed)
