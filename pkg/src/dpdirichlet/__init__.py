"""Differentially private inference for Dirichlet-distributed compositional data."""

from .bayesian import (
    PosteriorSample,
    Prior,
    SamplerSettings,
    dpabc,
    dpapprox,
    dpmcmc,
    dpremcmc,
    make_p1,
    make_p2,
    make_p3,
    make_p4,
    make_p5,
    mcmc_benchmark,
    posterior_predictive,
)
from .censoring_analytics import censoring_report
from .diagnostics import MetricReport, mse_alpha, mse_mean, predictive_coverage, split_rhat
from .dirichlet_model import (
    CompositionalDataset,
    SufficientStatistic,
    dirichlet_mle,
    dirichlet_sample,
    mean_composition,
    sufficient_stat,
    validate_dataset,
)
from .errors import ConvergenceError, DatasetError, DomainError, NotPositiveDefiniteError, RangeError
from .frequentist import BootstrapDraws, boots, dp_bootstrap, percentile_ci
from .mechanisms import DEFAULT_CANDIDATES, DPRelease, PrivacyBudget, TwoSidedGeometric, combine_parallel, release, select_threshold

__version__ = "0.1.0"
