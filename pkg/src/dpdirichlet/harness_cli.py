"""Command-line interface, CSV ingestion, the simulation grid and the two-group analysis.

Every command is a pure function of its input files, flags and ``--seed``.
Outputs never contain raw input rows; the benchmark modes that read the raw
statistic stamp their outputs with ``"NON-PRIVATE": true``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import bayesian as bay
from .censoring_analytics import censoring_report
from .diagnostics import mse_alpha, mse_mean, predictive_coverage
from .dirichlet_model import CompositionalDataset, dirichlet_sample, mean_composition, sufficient_stat, validate_dataset
from .errors import DatasetError, DomainError
from .frequentist import boots, dp_bootstrap, percentile_ci, test_mean_difference
from .mechanisms import DEFAULT_CANDIDATES, DPRelease, combine_parallel, release
from .seeding import TAG_GROUP, TAG_SIMULATION, stream

CONFIG_VERSION = 1
CSV_SUM_TOL = 1e-6
NON_PRIVATE = "NON-PRIVATE"
MIN_GROUP_SIZE = 10
BENCHMARKS = ("boots", "mcmc_p1")  # run on the unprotected statistic

GRID_ALPHAS = (
    (3.3, 4.4),
    (0.5, 0.5, 0.5),
    (2.2, 3.3, 4.4),
    (2.0, 20.0, 2.0),
    (2.2, 3.3, 4.4, 5.5, 6.6),
)
GRID_NS = (1000, 5000)
GRID_EPS = (0.25, 0.5, 1.5, 1e10)

RESULT_COLUMNS = (
    "alpha_id", "n", "eps", "replicate", "method", "mse_alpha", "mse_mean",
    "rhat_max", "coverage", "runtime_ms", "selected_a",
)


# ------------------------------------------------------------------ input

def ingest_csv(path, drop_zero: bool = False, group_column: str | None = None, component_columns=None):
    """Read a header-first CSV of proportions.

    Rows must sum to one within 1e-6 and are then rescaled exactly. With
    ``drop_zero`` rows holding a zero are removed and counted instead of
    rejected.

    Returns:
        (dataset, group labels or None, report dict)

    Raises:
        DatasetError: unparseable or invalid rows (``rows`` holds 1-based file
            line numbers) or nothing left after dropping.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if group_column is not None and group_column not in header:
            raise DatasetError(f"{path}: no column named {group_column!r}")
        comps = list(component_columns) if component_columns else [h for h in header if h != group_column]
        missing = [c for c in comps if c not in header]
        if missing:
            raise DatasetError(f"{path}: missing component columns {missing}")
        idx = [header.index(c) for c in comps]
        gidx = header.index(group_column) if group_column is not None else None

        rows, groups, bad, zero_lines = [], [], [], []
        for line_no, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            try:
                vals = [float(rec[i]) for i in idx]
            except (ValueError, IndexError):
                bad.append(line_no)
                continue
            if not all(math.isfinite(v) and v >= 0 for v in vals) or abs(sum(vals) - 1.0) > CSV_SUM_TOL:
                bad.append(line_no)
                continue
            if min(vals) == 0.0:
                if drop_zero:
                    zero_lines.append(line_no)
                    continue
                bad.append(line_no)
                continue
            rows.append(vals)
            if gidx is not None:
                groups.append(rec[gidx].strip())
    if bad:
        raise DatasetError(f"{path}: invalid rows at lines {bad[:20]}{' ...' if len(bad) > 20 else ''}", bad)
    if not rows:
        raise DatasetError(f"{path}: no usable rows")
    arr = np.asarray(rows, dtype=float)
    arr /= arr.sum(axis=1, keepdims=True)
    report = {"n_read": len(rows) + len(zero_lines), "n_kept": len(rows), "dropped_zero": len(zero_lines), "columns": comps}
    return validate_dataset(arr), (np.asarray(groups) if gidx is not None else None), report


# ---------------------------------------------------------- method runners

def _split_sizes(n: int, frac: float) -> tuple[int, int]:
    n1 = int(round(frac * n))
    return n1, n - n1


def _prior_from_split(name: str, rel: DPRelease, settings, seed: int):
    """Prior built from the first partition of a split release."""
    d = rel.d
    if name == "p1":
        return bay.make_p1(d)
    if not rel.is_split:
        raise DomainError(f"prior {name} needs a split release (use --split)")
    s1 = rel.statistics[0]
    if name == "p5":
        return bay.make_p5(s1, rel.eps1, rel.selected_a, s1.n_basis, bay.make_p1(d), settings, seed)
    p2 = bay.make_p2(s1, rel.eps1, rel.selected_a, s1.n_basis, max(bay.MIN_POOL, settings.retain), seed)
    if name == "p2":
        return p2
    return bay.make_p3(p2) if name == "p3" else bay.make_p4(p2)


def _target_stat(rel: DPRelease):
    """Statistic used for inference: the whole release, or the second partition."""
    return rel.statistics[-1]


BAYES_ENGINES = ("dpmcmc", "dpremcmc", "dpabc", "dpapprox")


def run_method(method: str, rel: DPRelease, settings, seed: int, B: int = 1000, N: int = 10_000,
               accept_rate: float = 0.1, b: int | None = None):
    """Run one private method on a release; returns (alpha draws, extra info dict)."""
    if method == "dpboots":
        s = _target_stat(rel)
        out = dp_bootstrap(s, rel.eps1, rel.selected_a, s.n_basis, B, seed)
        return out.draws, {"rejection_count": out.meta["rejection_count"]}
    engine, _, prior_name = method.partition("_")
    if engine not in BAYES_ENGINES or prior_name not in ("p1", "p2", "p3", "p4", "p5"):
        raise DomainError(f"unknown method {method!r}")
    prior = _prior_from_split(prior_name, rel, settings, seed)
    s = _target_stat(rel)
    a, eps1, n = rel.selected_a, rel.eps1, s.n_basis
    if engine == "dpmcmc":
        ps = bay.dpmcmc(s, a, eps1, n, prior, settings, seed)
    elif engine == "dpremcmc":
        ps = bay.dpremcmc(s, a, eps1, n, b, prior, settings, seed)
    elif engine == "dpapprox":
        ps = bay.dpapprox(s, a, eps1, n, prior, settings, seed)
    else:
        ps, delta = bay.dpabc(s, a, eps1, n, prior, N, accept_rate, seed)
    return ps.draws, {"rhat": None if ps.rhat is None else ps.rhat.tolist(), "sample": ps}


def _needs_split(method: str) -> bool:
    prior = method.partition("_")[2]
    return prior in ("p2", "p3", "p4", "p5")


# ---------------------------------------------------------- simulation grid

@dataclass
class SimulationConfig:
    alpha_list: list = field(default_factory=lambda: [list(a) for a in GRID_ALPHAS])
    n_list: list = field(default_factory=lambda: list(GRID_NS))
    eps_list: list = field(default_factory=lambda: list(GRID_EPS))
    eps1_frac: float = 0.25
    eps2_frac: float = 0.75
    n1_frac: float = 0.25
    n2_frac: float = 0.75
    candidates: list = field(default_factory=lambda: list(DEFAULT_CANDIDATES))
    replicates: int = 50
    methods: list = field(default_factory=lambda: ["boots", "dpboots", "mcmc_p1", "dpmcmc_p1"])
    chains: int = 5
    iterations: int = 50_000
    burn_in: int = 25_000
    b: int = 5
    B: int = 1000
    N: int = 10_000
    accept_rate: float = 0.1
    n_truth: int = 100_000
    master_seed: int = 0
    record_runtime: bool = True
    version: int = CONFIG_VERSION

    def __post_init__(self):
        for name in ("eps1_frac", "eps2_frac", "n1_frac", "n2_frac"):
            if not 0 < getattr(self, name) < 1:
                raise DomainError(f"{name} must lie in (0, 1)")
        if abs(self.eps1_frac + self.eps2_frac - 1) > 1e-12 or abs(self.n1_frac + self.n2_frac - 1) > 1e-12:
            raise DomainError("budget and sample fractions must each sum to 1")
        if self.replicates < 1:
            raise DomainError("need at least one replicate")

    @property
    def settings(self) -> bay.SamplerSettings:
        return bay.SamplerSettings(chains=self.chains, iterations=self.iterations, burn_in=self.burn_in, b=self.b,
                                   target_accept_rate=self.accept_rate, master_seed=self.master_seed)

    @classmethod
    def from_json(cls, text: str) -> "SimulationConfig":
        obj = json.loads(text)
        if obj.get("version", CONFIG_VERSION) != CONFIG_VERSION:
            raise DomainError(f"unsupported config version {obj.get('version')}")
        return cls(**obj)


def _run_cell_method(method, D, rel_full, rel_split, alpha_true, cfg, seed):
    settings = cfg.settings
    if method == "boots":
        s0 = sufficient_stat(D)
        draws = boots(s0, None, D.n, cfg.B, seed).draws
        return draws, None, None
    if method == "mcmc_p1":
        ps = bay.mcmc_benchmark(sufficient_stat(D), D.n, bay.make_p1(D.d), settings, seed)
        return ps.draws, ps, ps.rhat
    rel = rel_split if _needs_split(method) else rel_full
    draws, info = run_method(method, rel, settings, seed, cfg.B, cfg.N, cfg.accept_rate, cfg.b)
    ps = info.get("sample")
    return draws, ps, None if ps is None else ps.rhat


def run_simulation(cfg: SimulationConfig, out_dir=None, log=None) -> list:
    """Run every (alpha, n, eps, replicate, method) cell.

    Cell (i, j, k, r) draws its data, releases and method seeds from stream
    ``(master_seed, TAG_SIMULATION, i, j, k, r)``, so cells are independent of
    execution order. Failed cells are logged and skipped. With ``out_dir``
    writes ``results.csv``, ``summary.csv`` and ``failures.json``.
    """
    rows, failures = [], []
    for i, alpha in enumerate(cfg.alpha_list):
        alpha = np.asarray(alpha, dtype=float)
        for j, n in enumerate(cfg.n_list):
            for k, eps in enumerate(cfg.eps_list):
                for r in range(cfg.replicates):
                    g = stream(cfg.master_seed, TAG_SIMULATION, i, j, k, r)
                    seeds = [int(v) for v in g.integers(0, 2**62, size=4 + len(cfg.methods))]
                    D = dirichlet_sample(alpha, n, np.random.default_rng(seeds[0]))
                    eps1, eps2 = cfg.eps1_frac * eps, cfg.eps2_frac * eps
                    rel_full = release(D, cfg.candidates, eps1, eps2, rng=seeds[1])
                    n1, n2 = _split_sizes(n, cfg.n1_frac)
                    rel_split = release(D, cfg.candidates, eps1, eps2, n1, n2, rng=seeds[2])
                    for m_idx, method in enumerate(cfg.methods):
                        t0 = time.perf_counter()
                        try:
                            draws, ps, rhat = _run_cell_method(method, D, rel_full, rel_split, alpha, cfg, seeds[4 + m_idx])
                            coverage = None
                            if ps is not None:
                                per = max(1, math.ceil(bay.MIN_POOL / ps.draws.shape[0]))
                                pred = bay.posterior_predictive(ps, per, seeds[3])
                                coverage = predictive_coverage(pred, alpha, 0.95, cfg.n_truth, seeds[3])
                        except Exception as exc:  # a failing cell must not stop the grid
                            failures.append({"alpha_id": i, "n": n, "eps": eps, "replicate": r, "method": method,
                                             "error": f"{type(exc).__name__}: {exc}"})
                            continue
                        runtime = (time.perf_counter() - t0) * 1000.0
                        rel = rel_split if _needs_split(method) else rel_full
                        rows.append({
                            "alpha_id": i, "n": n, "eps": eps, "replicate": r, "method": method,
                            "mse_alpha": mse_alpha(draws, alpha), "mse_mean": mse_mean(draws, alpha),
                            "rhat_max": None if rhat is None else float(np.max(rhat)),
                            "coverage": coverage,
                            "runtime_ms": round(runtime, 1) if cfg.record_runtime else None,
                            "selected_a": None if method in BENCHMARKS else rel.selected_a,
                        })
                        if log:
                            log(f"alpha{i} n={n} eps={eps} rep={r} {method}: mse_alpha={rows[-1]['mse_alpha']:.4g}")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "results.csv", rows, RESULT_COLUMNS)
        summary = summarize(rows)
        _write_csv(out / "summary.csv", summary, list(summary[0].keys()) if summary else [])
        (out / "failures.json").write_text(json.dumps(failures, indent=2))
        info = {"version": cfg.version, "methods": list(cfg.methods), "cells": len(rows), "failures": len(failures)}
        bench = [m for m in cfg.methods if m in BENCHMARKS]
        if bench:
            info[NON_PRIVATE] = bench
        (out / "run_info.json").write_text(json.dumps(info, indent=2))
    return rows


def summarize(rows) -> list:
    """Medians per (alpha_id, n, eps, method) plus MSE medians scaled by their panel maximum.

    A panel is one (alpha_id, n) pair, as in a figure facet.
    """
    cells = {}
    for row in rows:
        cells.setdefault((row["alpha_id"], row["n"], row["eps"], row["method"]), []).append(row)

    def med(vals):
        vals = [v for v in vals if v is not None]
        return statistics.median(vals) if vals else None

    out = []
    for key in sorted(cells, key=lambda k: (k[0], k[1], k[2], k[3])):
        rs = cells[key]
        out.append({
            "alpha_id": key[0], "n": key[1], "eps": key[2], "method": key[3], "replicates": len(rs),
            "median_mse_alpha": med(r["mse_alpha"] for r in rs),
            "median_mse_mean": med(r["mse_mean"] for r in rs),
            "median_coverage": med(r["coverage"] for r in rs),
        })
    for col in ("median_mse_alpha", "median_mse_mean"):
        panel_max = {}
        for s in out:
            k = (s["alpha_id"], s["n"])
            panel_max[k] = max(panel_max.get(k, 0.0), s[col])
        for s in out:
            top = panel_max[(s["alpha_id"], s["n"])]
            s[col + "_scaled"] = s[col] / top if top > 0 else 0.0
    for s in out:
        s[NON_PRIVATE] = s["method"] in BENCHMARKS
    return out


def _write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({c: ("" if row.get(c) is None else row.get(c)) for c in columns})


# ---------------------------------------------------------- group analysis

@dataclass
class GroupAnalysisConfig:
    input: str | None = None
    group_column: str = "group"
    component_columns: list | None = None
    margin: float = 0.01
    epsilon: float = 0.5
    eps1_frac: float = 0.25
    n1_frac: float = 0.25
    runs: int = 10
    methods: list = field(default_factory=lambda: ["dpboots", "dpmcmc_p1", "dpremcmc_p4", "dpabc_p5"])
    candidates: list = field(default_factory=lambda: list(DEFAULT_CANDIDATES))
    chains: int = 5
    iterations: int = 50_000
    burn_in: int = 25_000
    b: int = 5
    B: int = 1000
    N: int = 10_000
    accept_rate: float = 0.1
    level: float = 0.95
    drop_zero: bool = False
    master_seed: int = 0
    # per-method sampler overrides, e.g. {"dpabc_p5": {"iterations": 50000, "burn_in": 25000}}
    method_settings: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.margin > 0:
            raise DomainError("margin must be positive")
        if self.component_columns is not None and len(self.component_columns) < 2:
            raise DomainError("need at least two components")

    @property
    def settings(self) -> bay.SamplerSettings:
        return bay.SamplerSettings(chains=self.chains, iterations=self.iterations, burn_in=self.burn_in, b=self.b,
                                   target_accept_rate=self.accept_rate, master_seed=self.master_seed)

    def settings_for(self, method: str) -> bay.SamplerSettings:
        return replace(self.settings, **self.method_settings.get(method, {}))


def analyze_groups(cfg: GroupAnalysisConfig, data=None, labels=None) -> dict:
    """Test H0_j: |E[x_j | A] - E[x_j | B]| <= margin for two disjoint groups.

    Each group gets its own release and inference at the full epsilon; the
    groups are disjoint so the combined cost is still epsilon. DPBoots rejects
    when its percentile interval for the difference avoids [-margin, margin].
    A Bayesian method rejects when the share of paired posterior draws with
    |difference| <= margin, its posterior probability of H0_j, is below 0.5.
    Run r of method m uses stream ``(master_seed, TAG_GROUP, r, m, group)``.
    A run whose sampler fails (for instance a prior pool that misses its
    mixing gate) is logged under ``failures`` and yields no decision; the
    fractions keep ``runs`` as denominator, so a failed run counts neither
    as a rejection nor as a non-rejection.
    """
    if data is None:
        data, labels, _ = ingest_csv(cfg.input, cfg.drop_zero, cfg.group_column, cfg.component_columns)
    rows = data.rows if isinstance(data, CompositionalDataset) else np.asarray(data, dtype=float)
    labels = np.asarray(labels)
    names = sorted(set(labels.tolist()))
    if len(names) != 2:
        raise DomainError(f"need exactly two groups, found {names}")
    groups = {g: validate_dataset(rows[labels == g]) for g in names}
    for g, D in groups.items():
        if D.n < MIN_GROUP_SIZE:
            raise DomainError(f"group {g!r} has only {D.n} rows; at least {MIN_GROUP_SIZE} are needed")
    d = rows.shape[1]
    eps1, eps2 = cfg.eps1_frac * cfg.epsilon, (1 - cfg.eps1_frac) * cfg.epsilon
    results = {}
    for m_idx, method in enumerate(cfg.methods):
        settings = cfg.settings_for(method)
        rejections, keeps = np.zeros(d), np.zeros(d)
        means = {g: [] for g in names}
        prob_h0 = []
        failures = []
        budget_total = None
        for r in range(cfg.runs):
            draws, budgets = {}, {}
            try:
                for g_idx, g in enumerate(names):
                    gen = stream(cfg.master_seed, TAG_GROUP, r, m_idx, g_idx)
                    seeds = [int(v) for v in gen.integers(0, 2**62, size=2)]
                    D = groups[g]
                    if _needs_split(method):
                        n1, n2 = _split_sizes(D.n, cfg.n1_frac)
                        rel = release(D, cfg.candidates, eps1, eps2, n1, n2, rng=seeds[0])
                    else:
                        rel = release(D, cfg.candidates, eps1, eps2, rng=seeds[0])
                    draws[g], _ = run_method(method, rel, settings, seeds[1], cfg.B, cfg.N, cfg.accept_rate, cfg.b)
                    budgets[g] = rel.budget
            except (ArithmeticError, DomainError) as exc:
                failures.append({"run": r, "error": f"{type(exc).__name__}: {exc}"})
                continue
            budget_total = combine_parallel(budgets).total
            for g in names:
                means[g].append(mean_composition(draws[g]).mean(axis=0))
            A, B = (draws[g] for g in names)
            if method == "dpboots":
                reject = test_mean_difference(_as_boot(A), _as_boot(B), cfg.margin, cfg.level)
            else:
                k = min(A.shape[0], B.shape[0])
                diff = mean_composition(A[:k]) - mean_composition(B[:k])
                p = np.mean(np.abs(diff) <= cfg.margin, axis=0)
                prob_h0.append(p)
                reject = p < 0.5
            rejections += reject
            keeps += ~reject
        done = cfg.runs - len(failures)
        results[method] = {
            "groups": names,
            "mean": {g: np.mean(means[g], axis=0).tolist() if done else None for g in names},
            "reject_fraction": (rejections / cfg.runs).tolist(),
            "keep_fraction": (keeps / cfg.runs).tolist(),
            "prob_h0": np.mean(prob_h0, axis=0).tolist() if prob_h0 else None,
            "budget_total": budget_total,
            "completed_runs": done,
            "failures": failures,
        }
    return {"margin": cfg.margin, "epsilon": cfg.epsilon, "runs": cfg.runs, "methods": results}


def _as_boot(draws):
    from .frequentist import BootstrapDraws

    return BootstrapDraws(draws)


# ------------------------------------------------------------------- CLI

def _candidates(text):
    return [float(v) for v in text.split(",")] if text else list(DEFAULT_CANDIDATES)


def _budget(args):
    if args.eps1 is not None and args.eps2 is not None:
        return args.eps1, args.eps2
    if args.eps is None:
        raise DomainError("give --eps, or both --eps1 and --eps2")
    return 0.25 * args.eps, 0.75 * args.eps


def _load_release(path) -> DPRelease:
    return DPRelease.from_json(Path(path).read_text())


def _settings(args) -> bay.SamplerSettings:
    return bay.SamplerSettings(chains=args.chains, iterations=args.iters, burn_in=args.burnin, b=args.b,
                               master_seed=args.seed)


def _write_draws(path, draws, header_extra=None):
    d = draws.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((header_extra or []) + [f"alpha_{j + 1}" for j in range(d)])
        for row in draws:
            w.writerow([repr(float(v)) for v in row])


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def cmd_release(args):
    D, _, report = ingest_csv(args.input, args.drop_zero)
    eps1, eps2 = _budget(args)
    n1, n2 = _split_sizes(D.n, args.split) if args.split else (0, D.n)
    rel = release(D, _candidates(args.candidates), eps1, eps2, n1, n2, rng=args.seed)
    obj = rel.to_dict()
    obj["ingest"] = {"n_kept": report["n_kept"], "dropped_zero": report["dropped_zero"]}
    _write_json(args.out, obj)


def cmd_bootstrap(args):
    rel = _load_release(args.release)
    s = _target_stat(rel)
    out = dp_bootstrap(s, rel.eps1, rel.selected_a, s.n_basis, args.B, args.seed)
    base = Path(args.out)
    _write_draws(base.with_suffix(".csv"), out.draws)
    summary = {
        "method": "dpboots",
        "meta": out.meta,
        "ci_alpha": percentile_ci(out, 0.95).tolist() if out.B >= 100 else None,
        "ci_mean_composition": percentile_ci(out, 0.95, "mean_composition").tolist() if out.B >= 100 else None,
    }
    _write_json(base.with_suffix(".json"), summary)


def _cmd_bayes(engine, args):
    rel = _load_release(args.release)
    settings = _settings(args)
    method = f"{engine}_{args.prior}"
    draws, info = run_method(method, rel, settings, args.seed, N=args.N, accept_rate=args.accept_rate, b=args.b)
    ps = info["sample"]
    base = Path(args.out)
    _write_draws(base.with_suffix(".csv"), draws)
    diag = {"method": method, "rhat": info["rhat"], "posterior_mean": ps.mean().tolist(),
            "meta": {k: v for k, v in ps.meta.items()}}
    _write_json(base.with_suffix(".json"), diag)


def cmd_censoring_report(args):
    alpha = [float(v) for v in args.alpha.split(",")]
    _write_json(args.out, censoring_report(alpha, args.threshold).as_dict())


def cmd_simulate(args):
    cfg = SimulationConfig.from_json(Path(args.config).read_text()) if args.config else SimulationConfig()
    overrides = {"replicates": args.runs, "master_seed": args.seed, "chains": args.chains_opt,
                 "iterations": args.iters_opt, "burn_in": args.burnin_opt}
    if args.method:
        overrides["methods"] = args.method.split(",")
    if args.no_timing:
        overrides["record_runtime"] = False
    if args.paper_scale:
        overrides.update(replicates=50, chains=5, iterations=50_000, burn_in=25_000)
    data = asdict(cfg)
    data.update({k: v for k, v in overrides.items() if v is not None})
    cfg = SimulationConfig(**data)
    run_simulation(cfg, args.out, log=lambda m: print(m, file=sys.stderr))


def cmd_analyze(args):
    data = json.loads(Path(args.config).read_text()) if args.config else {}
    if data.pop("version", CONFIG_VERSION) != CONFIG_VERSION:
        raise DomainError("unsupported config version")
    flags = {
        "input": args.input, "group_column": args.group_column, "margin": args.margin, "epsilon": args.eps,
        "runs": 100 if args.paper_scale else args.runs, "master_seed": args.seed, "chains": args.chains,
        "iterations": args.iters, "burn_in": args.burnin, "b": args.b, "B": args.B, "N": args.N,
        "accept_rate": args.accept_rate,
        "candidates": _candidates(args.candidates) if args.candidates else None,
        "methods": args.method.split(",") if args.method else None,
        "drop_zero": True if args.drop_zero else None,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    if not data.get("input"):
        raise DomainError("give --input or an input path in the config")
    _write_json(args.out, analyze_groups(GroupAnalysisConfig(**data)))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpdirichlet", description="Private inference for Dirichlet compositional data.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)

    def sampler(sp):
        sp.add_argument("--chains", type=int, default=5)
        sp.add_argument("--iters", type=int, default=50_000)
        sp.add_argument("--burnin", type=int, default=25_000)
        sp.add_argument("--b", type=int, default=5)

    sp = sub.add_parser("release", help="select a threshold and release the noisy statistic")
    sp.add_argument("--input", required=True)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--eps1", type=float)
    sp.add_argument("--eps2", type=float)
    sp.add_argument("--split", type=float, default=0.0, help="fraction of rows in the first partition (0: no split)")
    sp.add_argument("--candidates")
    sp.add_argument("--drop-zero", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_release)

    sp = sub.add_parser("bootstrap", help="DP parametric bootstrap from a release")
    sp.add_argument("--release", required=True)
    sp.add_argument("--B", type=int, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_bootstrap)

    for engine, name in (("dpmcmc", "mcmc"), ("dpremcmc", "remcmc"), ("dpabc", "abc"), ("dpapprox", "approx")):
        sp = sub.add_parser(name, help=f"{engine} posterior from a release")
        sp.add_argument("--release", required=True)
        sp.add_argument("--prior", choices=["p1", "p2", "p3", "p4", "p5"], default="p1")
        sampler(sp)
        sp.add_argument("--accept-rate", type=float, default=0.1)
        sp.add_argument("--N", type=int, default=10_000)
        common(sp)
        sp.set_defaults(func=lambda a, e=engine: _cmd_bayes(e, a))

    sp = sub.add_parser("censoring-report", help="censoring probabilities, bias and bounds for a given alpha")
    sp.add_argument("--alpha", required=True, help="comma-separated alpha")
    sp.add_argument("--threshold", type=float, required=True)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_censoring_report)

    sp = sub.add_parser("simulate", help="run the simulation grid")
    sp.add_argument("--config")
    sp.add_argument("--method")
    sp.add_argument("--runs", type=int)
    sp.add_argument("--chains", dest="chains_opt", type=int)
    sp.add_argument("--iters", dest="iters_opt", type=int)
    sp.add_argument("--burnin", dest="burnin_opt", type=int)
    sp.add_argument("--paper-scale", action="store_true")
    sp.add_argument("--no-timing", action="store_true", help="leave runtime_ms empty so reruns are byte-identical")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analyze", help="two-group mean-difference tests")
    sp.add_argument("--config", help="JSON GroupAnalysisConfig; flags given on the command line win")
    sp.add_argument("--input")
    sp.add_argument("--group-column")
    sp.add_argument("--eps", type=float, help="total budget per group (default 0.5)")
    sp.add_argument("--margin", type=float, help="default 0.01")
    sp.add_argument("--runs", type=int, help="default 10")
    sp.add_argument("--paper-scale", action="store_true", help="100 runs")
    sp.add_argument("--method")
    sp.add_argument("--candidates")
    sp.add_argument("--drop-zero", action="store_true")
    sp.add_argument("--B", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--accept-rate", type=float)
    sp.add_argument("--chains", type=int)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--burnin", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (DomainError, DatasetError, ArithmeticError, OSError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, DatasetError):
            record["rows"] = list(exc.rows)[:100]
        print(json.dumps(record), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
