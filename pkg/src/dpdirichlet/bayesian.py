"""Priors and posterior samplers for alpha given a noisy censored statistic.

Four engines share the building blocks below:

* ``dpmcmc``    data augmentation over the full latent dataset;
* ``dpremcmc``  the same with b pseudo-records whose likelihood is raised to n/b;
* ``dpabc``     rejection ABC with a quantile tolerance;
* ``dpapprox``  Gibbs on the normal approximation of the statistic, with the
  Laplace noise written as a scale mixture of normals.

``mcmc_benchmark`` is the non-private reference that conditions on the exact
uncensored statistic.
"""

from __future__ import annotations

import ctypes
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from numba.extending import get_cython_function_address

from .diagnostics import split_rhat
from .dirichlet_model import dirichlet_mle, in_range, log_censored_mean, log_dirichlet_sample
from .errors import ConvergenceError, DomainError, NotPositiveDefiniteError
from .frequentist import dp_bootstrap
from .mechanisms import laplace_sample, laplace_scale
from .seeding import TAG_ABC, TAG_CHAIN, TAG_PREDICTIVE, as_generator, child_seed, stream
from .special_math import (
    _digamma_scalar,
    _trigamma_scalar,
    correlated_normal_draw,
    gamma_draw,
    gamma_isf,
    gamma_mle_fit,
    gamma_quantile,
    log_gamma_draw,
    norm_cdf,
)

MIN_POOL = 1000
RHAT_GATE = 1.1
EIG_FLOOR = 1e-6
REFRESH_EVERY = 1000
ABC_CHUNK = 200

# scipy's compiled gamma cdf/sf and normal quantile, callable from numba kernels
_fn2 = ctypes.CFUNCTYPE(ctypes.c_double, ctypes.c_double, ctypes.c_double)
_fn1 = ctypes.CFUNCTYPE(ctypes.c_double, ctypes.c_double)
_gammainc = _fn2(get_cython_function_address("scipy.special.cython_special", "gammainc"))
_gammaincc = _fn2(get_cython_function_address("scipy.special.cython_special", "gammaincc"))
_ndtri = _fn1(get_cython_function_address("scipy.special.cython_special", "ndtri"))


# ------------------------------------------------------------------ priors

@dataclass(frozen=True)
class Prior:
    """One of the five prior constructions.

    p1 and p3 are independent gammas (shape, rate); p4 adds a Gaussian copula
    with correlation ``corr``; p2 and p5 are pools of draws sampled with
    replacement and have no density.
    """

    variant: str
    shape: np.ndarray | None = None
    rate: np.ndarray | None = None
    corr: np.ndarray | None = None
    pool: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.variant not in ("p1", "p2", "p3", "p4", "p5"):
            raise DomainError(f"unknown prior {self.variant!r}")
        if self.variant in ("p1", "p3", "p4"):
            shape = np.array(self.shape, dtype=float)
            rate = np.array(self.rate, dtype=float)
            if shape.shape != rate.shape or shape.ndim != 1 or np.any(shape <= 0) or np.any(rate <= 0):
                raise DomainError("gamma prior needs positive shape and rate vectors of equal length")
            object.__setattr__(self, "shape", shape)
            object.__setattr__(self, "rate", rate)
        if self.variant == "p4":
            corr = np.array(self.corr, dtype=float)
            if corr.shape != (shape.size, shape.size) or not np.allclose(corr, corr.T) or not np.allclose(np.diag(corr), 1.0):
                raise DomainError("copula correlation must be symmetric with unit diagonal")
            try:
                chol = np.linalg.cholesky(corr)
            except np.linalg.LinAlgError:
                raise NotPositiveDefiniteError("copula correlation is not positive definite", corr) from None
            object.__setattr__(self, "corr", corr)
            object.__setattr__(self, "_prec_minus_eye", np.linalg.inv(corr) - np.eye(shape.size))
            object.__setattr__(self, "_half_logdet", float(np.sum(np.log(np.diag(chol)))))
        if self.variant in ("p2", "p5"):
            pool = np.array(self.pool, dtype=float)
            if pool.ndim != 2 or pool.shape[0] < MIN_POOL or np.any(pool <= 0):
                raise DomainError(f"a pool prior needs at least {MIN_POOL} positive draws")
            object.__setattr__(self, "pool", pool)

    @property
    def d(self) -> int:
        return self.pool.shape[1] if self.pool is not None else self.shape.size

    @property
    def analytic(self) -> bool:
        return self.variant in ("p1", "p3", "p4")

    def mean(self) -> np.ndarray:
        if self.analytic:
            return self.shape / self.rate
        return self.pool.mean(axis=0)

    def logpdf(self, alpha) -> float:
        if not self.analytic:
            raise DomainError(f"prior {self.variant} has no density; it can only be sampled")
        alpha = np.asarray(alpha, dtype=float)
        if np.any(alpha <= 0):
            return -math.inf
        if self.variant == "p4":
            return _copula_logpdf(alpha, self.shape, self.rate, self._prec_minus_eye, self._half_logdet)
        return _gamma_logpdf_sum(alpha, self.shape, self.rate)

    def sample(self, size: int, rng) -> np.ndarray:
        rng = as_generator(rng)
        if self.variant in ("p2", "p5"):
            return self.pool[rng.integers(0, self.pool.shape[0], size)]
        if self.variant in ("p1", "p3"):
            return gamma_draw(self.shape, self.rate, (size, self.d), rng)
        z = correlated_normal_draw(self.corr, size, rng)
        # invert each tail separately so extreme scores stay finite
        lower = gamma_quantile(norm_cdf(np.minimum(z, 0.0)), self.shape, self.rate)
        upper = gamma_isf(norm_cdf(-np.maximum(z, 0.0)), self.shape, self.rate)
        return np.where(z < 0, lower, upper)


@njit(cache=True)
def _gamma_logpdf_sum(x, shape, rate):
    out = 0.0
    for j in range(x.size):
        out += shape[j] * math.log(rate[j]) - math.lgamma(shape[j]) + (shape[j] - 1.0) * math.log(x[j]) - rate[j] * x[j]
    return out


@njit  # no cache: holds ctypes pointers
def _normal_scores(x, shape, rate):
    """Phi^-1(F(x)) for gamma F, taking whichever tail keeps precision."""
    z = np.empty(x.size)
    for j in range(x.size):
        lo = _gammainc(shape[j], rate[j] * x[j])
        z[j] = _ndtri(lo) if lo < 0.5 else -_ndtri(_gammaincc(shape[j], rate[j] * x[j]))
    return z


@njit
def _copula_logpdf(x, shape, rate, prec_minus_eye, half_logdet):
    """Gamma marginals joined by a Gaussian copula."""
    for j in range(x.size):
        if not x[j] > 0:
            return -math.inf
    z = _normal_scores(x, shape, rate)
    for j in range(z.size):
        if not math.isfinite(z[j]):
            return -math.inf
    return _gamma_logpdf_sum(x, shape, rate) - half_logdet - 0.5 * (z @ (prec_minus_eye @ z))


def make_p1(d: int, v: float = 1.0, w: float = 0.1) -> Prior:
    if d < 2:
        raise DomainError("dimension must be at least 2")
    if not (v > 0 and w > 0):
        raise DomainError("gamma prior parameters must be positive")
    return Prior("p1", shape=np.full(d, float(v)), rate=np.full(d, float(w)))


def make_p2(sL1, eps1: float, a: float, n1: int, pool_size: int = MIN_POOL, rng=None) -> Prior:
    """Pool of DP bootstrap draws computed from the first partition's release."""
    draws = dp_bootstrap(sL1, eps1, a, n1, pool_size, rng)
    return Prior("p2", pool=draws.draws, meta=draws.meta)


def _require_pool(p2: Prior):
    if p2.pool is None:
        raise DomainError("this construction needs a pool prior")


def make_p3(p2: Prior) -> Prior:
    """Independent gammas fitted by maximum likelihood to each pool column."""
    _require_pool(p2)
    fits = [gamma_mle_fit(p2.pool[:, j]) for j in range(p2.d)]
    return Prior("p3", shape=[f[0] for f in fits], rate=[f[1] for f in fits], meta={"source": p2.variant})


def make_p4(p2: Prior) -> Prior:
    """p3 marginals joined by a Gaussian copula fitted to the pool's normal scores.

    A correlation estimate that is not positive definite is repaired by
    clipping eigenvalues at 1e-6 and rescaling to unit diagonal.
    """
    p3 = make_p3(p2)
    m = p2.pool.shape[0]
    z = np.column_stack([_normal_scores(p2.pool[:, j], np.full(m, p3.shape[j]), np.full(m, p3.rate[j]))
                         for j in range(p2.d)])
    z = np.clip(z, -8.5, 8.5)
    corr = np.corrcoef(z, rowvar=False)
    vals, vecs = np.linalg.eigh(corr)
    repaired = bool(vals.min() < EIG_FLOOR)
    if repaired:
        corr = (vecs * np.maximum(vals, EIG_FLOOR)) @ vecs.T
        s = np.sqrt(np.diag(corr))
        corr = corr / np.outer(s, s)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    return Prior("p4", shape=p3.shape, rate=p3.rate, corr=corr, meta={"source": p2.variant, "repaired": repaired})


def make_p5(sL1, eps1: float, a: float, n1: int, prior_inner: Prior | None = None, settings=None, rng=None) -> Prior:
    """Pool of data-augmentation MCMC draws given the first partition's release.

    Raises:
        ConvergenceError: any component's split R-hat exceeds 1.1.
    """
    d = np.asarray(getattr(sL1, "values", sL1)).size
    prior_inner = prior_inner or make_p1(d)
    settings = settings or SamplerSettings()
    sample = dpmcmc(sL1, a, eps1, n1, prior_inner, settings, rng)
    if sample.rhat is not None and np.max(sample.rhat) > RHAT_GATE:
        raise ConvergenceError(f"p5 chains did not mix: split R-hat {sample.rhat.tolist()}")
    return Prior("p5", pool=sample.draws, meta={"rhat": None if sample.rhat is None else sample.rhat.tolist()})


# ------------------------------------------------------------- containers

@dataclass(frozen=True)
class SamplerSettings:
    chains: int = 5
    iterations: int = 50_000
    burn_in: int = 25_000
    thinning: int | None = None  # None: keep at least ``retain`` draws in total
    b: int = 5
    target_accept_rate: float = 0.1
    master_seed: int = 0
    retain: int = 1000
    slice_width: float = 1.0
    slice_max_steps: int = 50
    scale_move: bool = True  # extra slice step along the common scale of alpha

    def __post_init__(self):
        if self.chains < 1 or self.iterations < 1:
            raise DomainError("need at least one chain and one iteration")
        if not 0 <= self.burn_in < self.iterations:
            raise DomainError("burn-in must be smaller than the number of iterations")
        if self.b < 1:
            raise DomainError("b must be at least 1")
        if self.thinning is not None and self.thinning < 1:
            raise DomainError("thinning must be at least 1")

    @property
    def thin(self) -> int:
        if self.thinning is not None:
            return self.thinning
        # at least ceil(retain / chains) draws from every chain
        per_chain = -(-self.retain // self.chains)
        return max(1, (self.iterations - self.burn_in) // per_chain)

    @property
    def kept_per_chain(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass
class PosteriorSample:
    draws: np.ndarray
    chain_ids: np.ndarray
    method: str
    rhat: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float)
        self.chain_ids = np.asarray(self.chain_ids, dtype=np.int64)
        if self.draws.ndim != 2 or self.draws.shape[0] != self.chain_ids.size:
            raise DomainError("draws and chain ids disagree")
        if not np.all(self.draws > 0):
            raise DomainError("posterior draws must be positive")

    def chains(self) -> list:
        return [self.draws[self.chain_ids == c] for c in np.unique(self.chain_ids)]

    def mean(self) -> np.ndarray:
        return self.draws.mean(axis=0)


def _seed_of(rng, settings) -> int:
    if rng is None:
        return int(settings.master_seed)
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    return child_seed(as_generator(rng))


def _stat_values(s) -> np.ndarray:
    values = np.asarray(getattr(s, "values", s), dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DomainError("statistic must be a vector with at least two components")
    return values


def _finish(kept, method, settings, meta) -> PosteriorSample:
    draws = np.concatenate(kept)
    ids = np.repeat(np.arange(len(kept)), [k.shape[0] for k in kept])
    rhat = split_rhat(kept) if len(kept) >= 2 and kept[0].shape[0] >= 4 else None
    return PosteriorSample(draws, ids, method, rhat, meta)


# ---------------------------------------------------------- slice sampling

def slice_step(logf, x0: float, f0: float, rng, width: float = 1.0, max_steps: int = 50):
    """One stepping-out and shrinkage slice update of a univariate density.

    Returns the new point and its log density.
    """
    y = f0 - rng.exponential()
    left = x0 - width * rng.random()
    right = left + width
    j = int(max_steps * rng.random())
    k = max_steps - 1 - j
    while j > 0 and logf(left) > y:
        left -= width
        j -= 1
    while k > 0 and logf(right) > y:
        right += width
        k -= 1
    while True:
        x1 = left + (right - left) * rng.random()
        f1 = logf(x1)
        if f1 > y:
            return x1, f1
        if x1 < x0:
            left = x1
        else:
            right = x1


def slice_sample(logf, x0: float, size: int, rng, width: float = 1.0, max_steps: int = 50) -> np.ndarray:
    """Run a univariate slice sampler for ``size`` iterations."""
    rng = as_generator(rng)
    out = np.empty(size)
    x, f = x0, logf(x0)
    for t in range(size):
        x, f = slice_step(logf, x, f, rng, width, max_steps)
        out[t] = x
    return out


def _update_alpha(alpha, log_target, rng, settings):
    """Componentwise slice sampling on log alpha_j; the target includes the Jacobian.

    With ``settings.scale_move`` one more slice step shifts every log alpha_j
    by the same amount. The componentwise steps pin the mean composition
    quickly but crawl along the total-concentration ridge; the shared shift
    moves along it directly and leaves the target unchanged.
    """
    theta = np.log(alpha)

    def f_theta(th):
        a = np.exp(th)
        return log_target(a) + th.sum()

    f0 = f_theta(theta)
    for j in range(alpha.size):
        def fj(x, j=j):
            th = theta.copy()
            th[j] = x
            return f_theta(th)

        theta[j], f0 = slice_step(fj, theta[j], f0, rng, settings.slice_width, settings.slice_max_steps)
    if settings.scale_move:
        base = theta.copy()
        u, f0 = slice_step(lambda v: f_theta(base + v), 0.0, f0, rng, settings.slice_width, settings.slice_max_steps)
        theta = base + u
    return np.exp(theta)


@njit(cache=True)
def _dirichlet_loglik(alpha, sumlog, m):
    total = 0.0
    lg = 0.0
    dot = 0.0
    for j in range(alpha.size):
        total += alpha[j]
        lg += math.lgamma(alpha[j])
        dot += (alpha[j] - 1.0) * sumlog[j]
    return dot + m * (math.lgamma(total) - lg)


def _prior_logpdf(prior: Prior):
    if not prior.analytic:
        raise DomainError(f"this sampler needs a prior with a density (p1, p3 or p4), got {prior.variant}")
    shape, rate = prior.shape, prior.rate
    if prior.variant == "p4":
        prec, half = prior._prec_minus_eye, prior._half_logdet
        return lambda a: _copula_logpdf(a, shape, rate, prec, half)
    return lambda a: _gamma_logpdf_sum(a, shape, rate)


# --------------------------------------------------- data augmentation MCMC

@njit(cache=True)
def _record_sweep(logx, prop_logg, log_u, s_l, log_a, scale, csum, sumlog, alpha, temper):
    """Metropolis update of every record with an independent Dirichlet(alpha) proposal.

    The model density cancels against the proposal, so the ratio is the
    Laplace term on the censored mean (plus ``temper`` times the model
    log-ratio when the record likelihood is raised to a power 1 + temper).
    ``csum`` and ``sumlog`` are the censored and raw column sums of ``logx``,
    updated in place.
    """
    n, d = logx.shape
    new = np.empty(d)
    accepted = 0
    for i in range(n):
        m = prop_logg[i, 0]
        for j in range(1, d):
            m = max(m, prop_logg[i, j])
        tot = 0.0
        for j in range(d):
            tot += math.exp(prop_logg[i, j] - m)
        lse = m + math.log(tot)
        log_r = 0.0
        for j in range(d):
            new[j] = prop_logg[i, j] - lse
            c_old = max(logx[i, j], log_a)
            c_new = max(new[j], log_a)
            s_old = csum[j] / n
            s_new = (csum[j] - c_old + c_new) / n
            log_r += (abs(s_old - s_l[j]) - abs(s_new - s_l[j])) / scale
            if temper != 0.0:
                log_r += temper * (alpha[j] - 1.0) * (new[j] - logx[i, j])
        if log_u[i] < log_r:
            accepted += 1
            for j in range(d):
                csum[j] += max(new[j], log_a) - max(logx[i, j], log_a)
                sumlog[j] += new[j] - logx[i, j]
                logx[i, j] = new[j]
    return accepted


def _augmented_chain(s_l, a, scale, n_records, exponent, alpha0, prior_lp, settings, rng, temper=0.0, logx0=None):
    """One chain over (alpha, records). Returns kept draws and bookkeeping.

    Records start as a Dirichlet(alpha0) draw unless ``logx0`` (log rows) is given.
    """
    d = s_l.size
    log_a = math.log(a)
    alpha = alpha0.copy()
    logx = log_dirichlet_sample(alpha, n_records, rng) if logx0 is None else np.array(logx0, dtype=float)
    csum = np.maximum(logx, log_a).sum(axis=0)
    sumlog = logx.sum(axis=0)
    thin, burn = settings.thin, settings.burn_in
    kept = []
    accepted = 0
    drift = 0.0

    def log_target(al):
        return exponent * _dirichlet_loglik(al, sumlog, float(n_records)) + prior_lp(al)

    for t in range(settings.iterations):
        prop = log_gamma_draw(alpha, (n_records, d), rng)
        log_u = np.log(rng.random(n_records))
        accepted += _record_sweep(logx, prop, log_u, s_l, log_a, scale, csum, sumlog, alpha, temper)
        alpha = _update_alpha(alpha, log_target, rng, settings)
        if (t + 1) % REFRESH_EVERY == 0:
            fresh_c = np.maximum(logx, log_a).sum(axis=0)
            fresh_s = logx.sum(axis=0)
            drift = max(drift, float(np.max(np.abs(fresh_c - csum))) / n_records)
            csum, sumlog = fresh_c, fresh_s
        if t >= burn and (t - burn + 1) % thin == 0:
            kept.append(alpha.copy())
    rate = accepted / (settings.iterations * n_records)
    return np.array(kept).reshape(-1, d), rate, drift


def _start_alpha(s_l, prior: Prior, use_mle: bool) -> np.ndarray:
    if use_mle and in_range(s_l):
        try:
            return dirichlet_mle(s_l)
        except ConvergenceError:
            pass
    return prior.mean()


def dpmcmc(sL, a: float, eps1: float, n: int, prior: Prior, settings: SamplerSettings | None = None, rng=None) -> PosteriorSample:
    """Posterior of alpha given a noisy censored statistic of n records.

    The latent dataset is part of the state. Chain c starts at the MLE of the
    release (prior mean if the release is infeasible) times exp(0.1 z), z
    standard normal, and runs on the stream ``(seed, TAG_CHAIN, c)``.
    """
    settings = settings or SamplerSettings()
    s_l = _stat_values(sL)
    scale = laplace_scale(a, n, s_l.size, eps1)
    return _run_augmented("dpmcmc", s_l, a, scale, n, 1.0, prior, settings, rng, use_mle=True)


def dpremcmc(
    sL2, a: float, eps1: float, n2: int, b: int | None, prior: Prior, settings: SamplerSettings | None = None, rng=None,
    tempered_records: bool = False,
) -> PosteriorSample:
    """Posterior with b pseudo-records standing in for the n2 records.

    The alpha update raises the pseudo-records' likelihood to n2/b; the
    pseudo-statistic (their censored mean) enters the Laplace term at the
    scale of an n2-record release. Record moves are accepted on the Laplace
    term alone unless ``tempered_records`` adds the (n2/b - 1) model factor.
    """
    settings = settings or SamplerSettings()
    b = settings.b if b is None else b
    if not 1 <= b <= n2:
        raise DomainError(f"need 1 <= b <= n2, got b={b}, n2={n2}")
    s_l = _stat_values(sL2)
    scale = laplace_scale(a, n2, s_l.size, eps1)
    k = n2 / b
    temper = k - 1.0 if tempered_records else 0.0
    return _run_augmented("dpremcmc", s_l, a, scale, b, k, prior, settings, rng, use_mle=False, temper=temper)


def _run_augmented(method, s_l, a, scale, n_records, exponent, prior, settings, rng, use_mle, temper=0.0):
    if not 0 < a < 1:
        raise DomainError(f"threshold must lie in (0, 1), got {a}")
    prior_lp = _prior_logpdf(prior)
    if prior.d != s_l.size:
        raise DomainError("prior and statistic differ in dimension")
    seed = _seed_of(rng, settings)
    base = _start_alpha(s_l, prior, use_mle)
    kept, rates, drifts = [], [], []
    for c in range(settings.chains):
        g = stream(seed, TAG_CHAIN, c)
        alpha0 = base * np.exp(0.1 * g.standard_normal(base.size))
        draws, rate, drift = _augmented_chain(s_l, a, scale, n_records, exponent, alpha0, prior_lp, settings, g, temper)
        kept.append(draws)
        rates.append(rate)
        drifts.append(drift)
    meta = {"seed": seed, "record_accept_rate": rates, "max_stat_drift": max(drifts), "exponent": exponent,
            "n_records": n_records, "a": a, "scale": scale, "prior": prior.variant}
    return _finish(kept, method, settings, meta)


def mcmc_benchmark(s0, n: int, prior: Prior, settings: SamplerSettings | None = None, rng=None) -> PosteriorSample:
    """Non-private posterior of alpha given the exact uncensored statistic."""
    settings = settings or SamplerSettings()
    s0 = _stat_values(s0)
    prior_lp = _prior_logpdf(prior)
    sumlog = n * s0
    seed = _seed_of(rng, settings)
    base = _start_alpha(s0, prior, True)

    def log_target(al):
        return _dirichlet_loglik(al, sumlog, float(n)) + prior_lp(al)

    kept = []
    for c in range(settings.chains):
        g = stream(seed, TAG_CHAIN, c)
        alpha = base * np.exp(0.1 * g.standard_normal(base.size))
        out = []
        for t in range(settings.iterations):
            alpha = _update_alpha(alpha, log_target, g, settings)
            if t >= settings.burn_in and (t - settings.burn_in + 1) % settings.thin == 0:
                out.append(alpha.copy())
        kept.append(np.array(out))
    return _finish(kept, "mcmc_benchmark", settings, {"seed": seed, "prior": prior.variant, "non_private": True})


# ----------------------------------------------------------------- ABC

def dpabc(sL2, a: float, eps1: float, n2: int, prior_sampler: Prior, N_total: int = 10_000,
          accept_rate: float = 0.1, rng=None):
    """Rejection ABC on the released statistic.

    Simulates N_total (alpha, dataset, noise) triples, keeps the
    round(accept_rate N_total) whose noisy statistic is closest in Euclidean
    distance to the release, and sets the tolerance delta to the largest kept
    distance. Block k of ``ABC_CHUNK`` simulations uses stream
    ``(seed, TAG_ABC, k)``.

    Returns:
        (PosteriorSample, delta)
    """
    s_l = _stat_values(sL2)
    if N_total < 1000:
        raise DomainError("N_total must be at least 1000")
    if not 0 < accept_rate <= 1:
        raise DomainError(f"accept rate must lie in (0, 1], got {accept_rate}")
    if prior_sampler.d != s_l.size:
        raise DomainError("prior and statistic differ in dimension")
    d = s_l.size
    scale = laplace_scale(a, n2, d, eps1)
    seed = int(rng) if isinstance(rng, (int, np.integer)) else child_seed(as_generator(rng))
    alphas = np.empty((N_total, d))
    dist = np.empty(N_total)
    for k, start in enumerate(range(0, N_total, ABC_CHUNK)):
        g = stream(seed, TAG_ABC, k)
        m = min(ABC_CHUNK, N_total - start)
        al = prior_sampler.sample(m, g)
        logg = log_gamma_draw(al[:, None, :], (m, n2, d), g)
        logx = logg - np.logaddexp.reduce(logg, axis=2, keepdims=True)
        sim = log_censored_mean(logx, a) + laplace_sample(scale, (m, d), g)
        alphas[start:start + m] = al
        dist[start:start + m] = np.sqrt(np.sum((sim - s_l) ** 2, axis=1))
    keep = max(1, int(round(accept_rate * N_total)))
    order = np.sort(np.argsort(dist, kind="stable")[:keep])
    delta = float(dist[order].max())
    meta = {"seed": seed, "delta": delta, "realized_accept_rate": keep / N_total, "N_total": N_total, "prior": prior_sampler.variant}
    return PosteriorSample(alphas[order], np.zeros(keep, dtype=np.int64), "dpabc", None, meta), delta


# ------------------------------------------------------ asymptotic Gibbs

def asymptotic_moments(alpha):
    """Mean and covariance of log x under Dirichlet(alpha).

    mu_j = Psi(alpha_j) - Psi(sum), Sigma = diag(Psi1(alpha_j)) - Psi1(sum) 1 1^T.
    The average of n records has covariance Sigma / n.
    """
    alpha = np.asarray(alpha, dtype=float)
    total = alpha.sum()
    mu = np.array([_digamma_scalar(v) for v in alpha]) - _digamma_scalar(total)
    sigma = np.diag([_trigamma_scalar(v) for v in alpha]) - _trigamma_scalar(total)
    return mu, sigma


@njit(cache=True)
def _normal_stat_loglik(alpha, s0, n):
    """log N(s0; mu_alpha, Sigma_alpha / n) via Sherman-Morrison; -inf if singular."""
    d = alpha.size
    total = 0.0
    for j in range(d):
        total += alpha[j]
    psi_t = _digamma_scalar(total)
    c = _trigamma_scalar(total)
    inv_sum = 0.0
    quad = 0.0
    lin = 0.0
    logdet = 0.0
    for j in range(d):
        dj = _trigamma_scalar(alpha[j])
        r = s0[j] - (_digamma_scalar(alpha[j]) - psi_t)
        inv_sum += 1.0 / dj
        quad += r * r / dj
        lin += r / dj
        logdet += math.log(dj)
    gap = 1.0 - c * inv_sum
    if not gap > 0.0:
        return -np.inf
    logdet += math.log(gap) - d * math.log(n)
    quad = n * (quad + c * lin * lin / gap)
    return -0.5 * (d * math.log(2.0 * math.pi) + logdet + quad)


def dpapprox(sL, a: float, eps1: float, n: int, prior: Prior, settings: SamplerSettings | None = None, rng=None) -> PosteriorSample:
    """Gibbs sampler on the normal approximation S0 ~ N(mu_alpha, Sigma_alpha / n).

    The Laplace noise is a scale mixture: e_j | tau_j ~ N(0, tau_j) with
    tau_j ~ Exponential(rate 1 / (2 m^2)). Then 1/tau_j given e_j is inverse
    Gaussian with mean 1 / (m |e_j|) and shape 1 / m^2.

    Raises:
        NotPositiveDefiniteError: Sigma_alpha is numerically singular at the
            current alpha.
    """
    settings = settings or SamplerSettings()
    s_l = _stat_values(sL)
    d = s_l.size
    m = laplace_scale(a, n, d, eps1)
    prior_lp = _prior_logpdf(prior)
    seed = _seed_of(rng, settings)
    base = _start_alpha(s_l, prior, True)
    kept = []
    for c in range(settings.chains):
        g = stream(seed, TAG_CHAIN, c)
        alpha = base * np.exp(0.1 * g.standard_normal(d))
        s0 = asymptotic_moments(alpha)[0]
        tau = np.full(d, 2.0 * m * m)
        out = []
        for t in range(settings.iterations):
            mu, sigma = asymptotic_moments(alpha)
            try:
                prec_model = n * np.linalg.inv(sigma)
                prec = prec_model + np.diag(1.0 / tau)
                chol = np.linalg.cholesky(prec)
            except np.linalg.LinAlgError:
                raise NotPositiveDefiniteError(f"asymptotic covariance is singular at alpha = {alpha.tolist()}", sigma) from None
            rhs = prec_model @ mu + s_l / tau
            mean = np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))
            s0 = mean + np.linalg.solve(chol.T, g.standard_normal(d))
            gap = np.maximum(np.abs(s_l - s0), 1e-300)
            tau = 1.0 / g.wald(1.0 / (m * gap), 1.0 / (m * m))
            s0_now = s0

            def log_target(al):
                return _normal_stat_loglik(al, s0_now, float(n)) + prior_lp(al)

            alpha = _update_alpha(alpha, log_target, g, settings)
            if t >= settings.burn_in and (t - settings.burn_in + 1) % settings.thin == 0:
                out.append(alpha.copy())
        kept.append(np.array(out))
    return _finish(kept, "dpapprox", settings, {"seed": seed, "scale": m, "prior": prior.variant})


# ------------------------------------------------------------ predictive

def posterior_predictive(sample: PosteriorSample, draws_per_alpha: int = 1, rng=None) -> np.ndarray:
    """``draws_per_alpha`` Dirichlet rows for every retained alpha, stacked in order."""
    if sample.draws.shape[0] == 0:
        raise DomainError("empty posterior sample")
    if draws_per_alpha < 1:
        raise DomainError("draws_per_alpha must be at least 1")
    seed = int(rng) if isinstance(rng, (int, np.integer)) else child_seed(as_generator(rng))
    g = stream(seed, TAG_PREDICTIVE)
    alpha = np.repeat(sample.draws, draws_per_alpha, axis=0)
    logg = log_gamma_draw(alpha, alpha.shape, g)
    rows = np.exp(logg - np.logaddexp.reduce(logg, axis=1, keepdims=True))
    rows = np.maximum(rows, np.finfo(float).tiny)
    return rows / rows.sum(axis=1, keepdims=True)
