"""Special functions and small distribution helpers.

Digamma, trigamma and the regularized incomplete beta function are computed
here directly: the first two by shifting the argument up with the recurrence
and then summing the asymptotic series, the last by a continued fraction.
Everything else (log-gamma, normal and gamma CDFs/quantiles, gamma variates)
is delegated to ``math``, ``scipy.special`` and numpy's generator.

All functions accept scalars or arrays; scalar in, float out.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, vectorize
from scipy import special as sps

from .errors import ConvergenceError, DomainError, NotPositiveDefiniteError

EULER_GAMMA = 0.57721566490153286061


def _check_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")
    return arr


def _scalar_or_array(result, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


def log_gamma(x):
    """Natural log of the gamma function for positive ``x``."""
    arr = _check_positive(x)
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return sps.gammaln(arr)


def log_beta(p, q):
    """log B(p, q)."""
    return log_gamma(p) + log_gamma(q) - log_gamma(np.add(p, q))


# -- digamma / trigamma ------------------------------------------------------


@njit(cache=True)
def _digamma_scalar(x):
    acc = 0.0
    while x < 6.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    # Bernoulli terms B_2k / (2k), Horner form in 1/x^2
    series = (1.0 / 12.0 + inv2 * (-1.0 / 120.0 + inv2 * (1.0 / 252.0 + inv2 * (
        -1.0 / 240.0 + inv2 * (1.0 / 132.0 + inv2 * (-691.0 / 32760.0 + inv2 / 12.0))))))
    return acc + math.log(x) - 0.5 / x - series * inv2


@njit(cache=True)
def _trigamma_scalar(x):
    acc = 0.0
    while x < 6.0:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = (1.0 / 6.0 + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (
        -1.0 / 30.0 + inv2 * (5.0 / 66.0 + inv2 * (-691.0 / 2730.0 + inv2 * 7.0 / 6.0))))))
    return acc + inv + 0.5 * inv2 + series * inv2 * inv


@vectorize(["float64(float64)"], cache=True)
def _digamma_ufunc(x):
    return _digamma_scalar(x)


@vectorize(["float64(float64)"], cache=True)
def _trigamma_ufunc(x):
    return _trigamma_scalar(x)


def digamma(x):
    """Digamma function Psi(x) = d/dx log Gamma(x) for ``x > 0``.

    The argument is shifted up to x >= 6 with Psi(x) = Psi(x + 1) - 1/x and
    the asymptotic series is summed through the x^-14 term.
    """
    arr = _check_positive(x)
    if arr.ndim == 0:
        return float(_digamma_scalar(float(arr)))
    return _digamma_ufunc(arr)


def trigamma(x):
    """Trigamma function Psi_1(x) = d/dx Psi(x) for ``x > 0``."""
    arr = _check_positive(x)
    if arr.ndim == 0:
        return float(_trigamma_scalar(float(arr)))
    return _trigamma_ufunc(arr)


@njit(cache=True)
def _inverse_digamma_scalar(y, x0):
    """Newton solve of Psi(x) = y from ``x0``; ``x0 <= 0`` selects the default start."""
    if x0 <= 0.0:
        if y >= -2.22:
            x0 = math.exp(min(y, 700.0)) + 0.5
        else:
            x0 = -1.0 / (y + 0.57721566490153286061)
    x = x0
    for _ in range(100):
        x_new = x - (_digamma_scalar(x) - y) / _trigamma_scalar(x)
        if x_new <= 0.0:
            # overshoot for very negative y
            x_new = x / 2.0
        if abs(x_new - x) <= 1e-14 * max(1.0, x):
            return x_new
        x = x_new
    return -1.0


def inverse_digamma(y):
    """Solve Psi(x) = y for x > 0 by Newton's method.

    Starts from exp(y) + 1/2 for y >= -2.22 and -1/(y + gamma) otherwise.
    """
    y_arr = np.asarray(y, dtype=float)
    out = np.array([_inverse_digamma_scalar(float(v), -1.0) for v in y_arr.ravel()])
    if np.any(out <= 0):
        raise ConvergenceError("inverse digamma did not converge")
    return float(out[0]) if y_arr.ndim == 0 else out.reshape(y_arr.shape)


# -- incomplete beta ---------------------------------------------------------


def _beta_cf(p: float, q: float, x: float, max_iter: int = 10_000, eps: float = 1e-16) -> float:
    """Continued fraction for I_x(p, q), modified Lentz evaluation."""
    tiny = 1e-300
    qab = p + q
    qap = p + 1.0
    qam = p - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (q - m) * x / ((qam + m2) * (p + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction failed for p={p}, q={q}, x={x}")


def _reg_inc_beta_scalar(p: float, q: float, x: float) -> float:
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(p + q) - math.lgamma(p) - math.lgamma(q)
        + p * math.log(x) + q * math.log1p(-x)
    )
    if x < (p + 1.0) / (p + q + 2.0):
        return math.exp(log_front) * _beta_cf(p, q, x) / p
    return 1.0 - math.exp(log_front) * _beta_cf(q, p, 1.0 - x) / q


def reg_inc_beta(p, q, x):
    """Regularized incomplete beta I_x(p, q) = P(Beta(p, q) <= x)."""
    p_arr = _check_positive(p, "p")
    q_arr = _check_positive(q, "q")
    x_arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x_arr)) or np.any(x_arr < 0) or np.any(x_arr > 1):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    p_b, q_b, x_b = np.broadcast_arrays(p_arr, q_arr, x_arr)
    out = np.empty(p_b.shape)
    for idx in np.ndindex(p_b.shape):
        out[idx] = _reg_inc_beta_scalar(float(p_b[idx]), float(q_b[idx]), float(x_b[idx]))
    if out.ndim == 0:
        return float(out)
    return out


# -- normal ------------------------------------------------------------------


def norm_cdf(x):
    """Standard normal CDF."""
    return _scalar_or_array(sps.ndtr(x), x)


def norm_quantile(p):
    """Standard normal quantile; ``p`` must lie in (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0) or np.any(arr >= 1):
        raise DomainError(f"quantile argument must lie in (0, 1), got {p!r}")
    return _scalar_or_array(sps.ndtri(arr), p)


def correlated_normal_draw(corr, size, rng):
    """Draw ``size`` vectors from N(0, corr) via a Cholesky factor.

    Raises:
        NotPositiveDefiniteError: if ``corr`` is not symmetric positive definite.
    """
    corr = np.asarray(corr, dtype=float)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1] or not np.allclose(corr, corr.T):
        raise NotPositiveDefiniteError(f"correlation matrix must be square and symmetric:\n{corr}", corr)
    try:
        chol = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"correlation matrix is not positive definite:\n{corr}", corr) from None
    z = rng.standard_normal((size, corr.shape[0]))
    return z @ chol.T


# -- gamma -------------------------------------------------------------------


def gamma_logpdf(x, shape, rate):
    """Log density of Gamma(shape, rate) (rate parametrization)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = shape * np.log(rate) - sps.gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x
    out = np.where(x > 0, out, -np.inf)
    return _scalar_or_array(out, x)


def gamma_pdf(x, shape, rate):
    return np.exp(gamma_logpdf(x, shape, rate))


def gamma_cdf(x, shape, rate):
    """P(Gamma(shape, rate) <= x) via the regularized lower incomplete gamma."""
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(sps.gammainc(shape, rate * np.maximum(x, 0.0)), x)


def gamma_sf(x, shape, rate):
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(sps.gammaincc(shape, rate * np.maximum(x, 0.0)), x)


def gamma_quantile(p, shape, rate):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise DomainError(f"probability must lie in [0, 1], got {p!r}")
    return _scalar_or_array(sps.gammaincinv(shape, p) / rate, p)


def gamma_isf(q, shape, rate):
    """Upper-tail quantile: x with P(Gamma(shape, rate) > x) = q."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0) or np.any(q > 1):
        raise DomainError(f"probability must lie in [0, 1], got {q!r}")
    return _scalar_or_array(sps.gammainccinv(shape, q) / rate, q)


def gamma_draw(shape, rate, size, rng):
    """Gamma(shape, rate) variates from ``rng`` (numpy's Marsaglia-Tsang sampler)."""
    return rng.gamma(shape, 1.0 / np.asarray(rate, dtype=float), size=size)


def log_gamma_draw(shape, size, rng):
    """Log of standard Gamma(shape, 1) variates, accurate for tiny shapes.

    Uses log G_k = log G_{k+1} + log(U) / k for k < 1 so that the result
    stays finite where the variate itself would underflow to zero.
    """
    shape = np.asarray(shape, dtype=float)
    small = shape < 1.0
    boosted = np.where(small, shape + 1.0, shape)
    g = rng.standard_gamma(boosted, size=size)
    logg = np.log(g)
    if np.any(small):
        u = rng.random(size=logg.shape)
        logg = np.where(small, logg + np.log(u) / np.where(small, shape, 1.0), logg)
    return logg


def gamma_mle_fit(sample, tol=1e-12, max_iter=200):
    """Maximum-likelihood (shape, rate) for a positive sample.

    Newton iteration on the profile equation log k - Psi(k) = log(mean) - mean(log),
    started from Minka's closed-form approximation.

    Raises:
        DomainError: fewer than two values or a non-positive value.
        ConvergenceError: degenerate (constant) sample or no convergence in ``max_iter``.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("gamma fit needs at least two values")
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise DomainError("gamma fit needs positive finite values")
    mean = x.mean()
    s = math.log(mean) - float(np.mean(np.log(x)))
    if not s > 1e-14:
        raise ConvergenceError("gamma fit failed: sample is (numerically) constant")
    k = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        f = math.log(k) - _digamma_scalar(k) - s
        fprime = 1.0 / k - _trigamma_scalar(k)
        k_new = k - f / fprime
        if k_new <= 0:
            k_new = k / 2.0
        if abs(k_new - k) <= tol * k:
            k = k_new
            break
        k = k_new
    else:
        raise ConvergenceError("gamma fit did not converge in %d iterations" % max_iter)
    return k, k / mean
