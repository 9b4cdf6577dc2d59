"""How much left-censoring at a threshold a distorts Dirichlet data.

The marginal of x_j under Dirichlet(alpha) is Beta(alpha_j, beta_j) with
beta_j = sum(alpha) - alpha_j, so every quantity here is one-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dirichlet_model import _as_alpha
from .errors import DomainError
from .special_math import log_beta, reg_inc_beta

NOT_APPLICABLE = "n/a"


def _check_threshold(a):
    if not 0 < a < 1:
        raise DomainError(f"threshold must lie in (0, 1), got {a}")


def prob_censored(alpha, a: float) -> np.ndarray:
    """P(x_j < a) = I_a(alpha_j, beta_j) for every component."""
    _check_threshold(a)
    alpha = _as_alpha(alpha)
    return reg_inc_beta(alpha, alpha.sum() - alpha, a)


def expected_censored_proportion(alpha, a: float) -> float:
    return float(np.mean(prob_censored(alpha, a)))


def bernstein_bound(alpha, j: int, a: float) -> tuple[float, bool]:
    """Bernstein-type upper bound on P(x_j < a).

    With m = E[x_j], v = Var[x_j] and gap = m - a > 0 the bound is
    exp(-gap^2 / (2 v)) when alpha_j < sum(alpha)/2. A dominant component has a
    heavier lower tail and gets the skewness correction
    exp(-gap^2 / (2 [v + c gap / 3])) with c = 2 (2 alpha_j - sum) / (sum (sum + 2)) >= 0.

    Returns:
        (bound, vacuous). ``vacuous`` is True when a >= E[x_j]; the bound is then 1.
    """
    _check_threshold(a)
    alpha = _as_alpha(alpha)
    total = alpha.sum()
    aj = alpha[j]
    bj = total - aj
    m = aj / total
    if a >= m:
        return 1.0, True
    v = aj * bj / (total**2 * (total + 1.0))
    gap = m - a
    if aj >= total / 2.0:
        c = 2.0 * (2.0 * aj - total) / (total * (total + 2.0))
        denom = 2.0 * (v + c * gap / 3.0)
    else:
        denom = 2.0 * v
    return float(min(1.0, max(0.0, math.exp(-gap * gap / denom)))), False


def _bias_component(p: float, q: float, a: float) -> float:
    # substitute x = a exp(-t): integral of t * Beta(a e^-t | p, q) * a e^-t dt over t > 0
    log_a = math.log(a)
    lb = float(log_beta(p, q))

    def integrand(t):
        logx = log_a - t
        return t * math.exp(p * logx + (q - 1.0) * math.log1p(-math.exp(logx)) - lb)

    # the integrand decays like exp(-p t); split at its bulk for the adaptive rule
    knot = max(1.0, 10.0 / p)
    head, _ = integrate.quad(integrand, 0.0, knot, epsabs=1e-13, epsrel=1e-11, limit=200)
    tail, _ = integrate.quad(integrand, knot, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    return head + tail


def censoring_bias(alpha, a: float) -> np.ndarray:
    """E[log max(x_j, a)] - E[log x_j] = int_0^a (log a - log x) Beta(x | alpha_j, beta_j) dx."""
    _check_threshold(a)
    alpha = _as_alpha(alpha)
    total = alpha.sum()
    return np.array([_bias_component(float(aj), float(total - aj), a) for aj in alpha])


def bias_upper_bound(alpha, j: int, a: float):
    """B(alpha_j - 1, beta_j) / B(alpha_j, beta_j) * P(Beta(alpha_j - 1, beta_j) <= a).

    Only valid for alpha_j > 1; returns ``"n/a"`` otherwise.
    """
    _check_threshold(a)
    alpha = _as_alpha(alpha)
    aj = float(alpha[j])
    if aj <= 1.0:
        return NOT_APPLICABLE
    bj = float(alpha.sum()) - aj
    log_ratio = log_beta(aj - 1.0, bj) - log_beta(aj, bj)
    return float(math.exp(log_ratio) * reg_inc_beta(aj - 1.0, bj, a))


@dataclass
class CensoringReport:
    threshold_a: float
    alpha: list
    per_component_prob: list
    expected_proportion: float
    per_component_bias: list
    bernstein_bounds: list
    bias_upper_bounds: list

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def censoring_report(alpha, a: float) -> CensoringReport:
    alpha = _as_alpha(alpha)
    probs = prob_censored(alpha, a)
    return CensoringReport(
        threshold_a=a,
        alpha=alpha.tolist(),
        per_component_prob=probs.tolist(),
        expected_proportion=float(probs.mean()),
        per_component_bias=censoring_bias(alpha, a).tolist(),
        bernstein_bounds=[bernstein_bound(alpha, j, a)[0] for j in range(alpha.size)],
        bias_upper_bounds=[bias_upper_bound(alpha, j, a) for j in range(alpha.size)],
    )
