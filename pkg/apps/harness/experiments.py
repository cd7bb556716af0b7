"""Experiment implementations: each turns a validated config into CSV rows."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from apps.harness.config_schema import ExperimentConfig
from src.ofdm.bounds import (
    BalanceQuery,
    BoundQuery,
    aom_scaling_bound,
    aom_scaling_schedule,
    balance_bound_bpsk,
    balance_bound_general,
    ccdf_bound_function,
    default_mu_grid,
    thm1_bound,
    thm2_bound,
    thm3_bound_min,
    union_chernoff_bound,
)
from src.ofdm.codes import CodeKind, distance_distribution, enumerate_symbols, wcond_constant, weight_distribution
from src.ofdm.hpa import cubic_samples, sel_samples
from src.ofdm.metrics import (
    code_cf,
    ccdf_function,
    effective_cf,
    empirical_ccdf,
    empirical_distortion_tail,
    exact_ccdf,
    exact_distortion_tail,
)
from src.ofdm.signal_core import peak_magnitudes

# threshold grid for effective-CF when the config gives none: 0.01 .. 8.00
DEFAULT_CF_GRID = [round(0.01 * i, 2) for i in range(1, 801)]

Row = tuple


@dataclass(frozen=True)
class RunContext:
    base_dir: Path
    workers: int
    logger: logging.Logger


@dataclass(frozen=True)
class Experiment:
    name: str
    columns: tuple[str, ...]
    description: str
    run: Callable[[ExperimentConfig, RunContext], list[Row]]


def _distortion_fn(cfg: ExperimentConfig, lam: float | None) -> Callable[[np.ndarray], np.ndarray]:
    if cfg.amplifier.model == "sel":
        return lambda s: sel_samples(s, lam)
    a, b = cfg.amplifier.a, cfg.amplifier.b
    return lambda s: cubic_samples(s, a, b)


def _metric_h(cfg: ExperimentConfig, n: int) -> Callable:
    if cfg.h == "aom":
        return lambda d: d * d / n
    return lambda d: d / n


def run_ccdf(cfg: ExperimentConfig, ctx: RunContext) -> list[Row]:
    spec = cfg.code.build(cfg.n, ctx.base_dir)
    thresholds = cfg.threshold_values()
    if cfg.mode == "exact":
        curve = exact_ccdf(spec, cfg.oversampling, thresholds)
    else:
        curve = empirical_ccdf(spec, cfg.oversampling, thresholds, cfg.trials, cfg.seed, ctx.workers)
        unreliable = int(np.count_nonzero(~curve.reliable))
        if unreliable:
            ctx.logger.warning(
                "%d of %d thresholds fall below the MC resolution %.3g", unreliable, len(thresholds), curve.resolution
            )
    return [(x, p, ok) for x, p, ok in zip(curve.thresholds, curve.probabilities, curve.reliable)]


def run_bounds_compare(cfg: ExperimentConfig, ctx: RunContext) -> list[Row]:
    spec = cfg.code.build(cfg.n, ctx.base_dir)
    n, oversampling, k_range = spec.n, cfg.oversampling, cfg.k_range
    thresholds = cfg.threshold_values()
    words = enumerate_symbols(spec)
    exact = exact_ccdf(spec, oversampling, thresholds)
    distances = distance_distribution(words)
    weights = weight_distribution(spec) if spec.is_linear else None
    c_w = wcond_constant(spec) if spec.is_linear else math.nan
    ctx.logger.info("bounds-compare: N=%d L=%d M1=%d C_w=%.6g", n, oversampling, spec.size, c_w)

    rows = []
    for x, p_exact in zip(exact.thresholds, exact.probabilities):
        x = float(x)
        union = (
            union_chernoff_bound(x, n, oversampling, k_range) if spec.kind is CodeKind.UNCODED else math.nan
        )
        thm1 = thm1_bound(BoundQuery(x, n, oversampling, k_range, distribution=distances))
        thm2 = (
            thm2_bound(BoundQuery(x, n, oversampling, k_range, distribution=weights))
            if weights is not None
            else math.nan
        )
        thm3 = thm3_bound_min(x, n, oversampling, k_range, c_w, linear=True) if spec.is_linear else math.nan
        rows.append((x, p_exact, union, thm1, thm2, thm3))
    return rows


def run_effective_cf(cfg: ExperimentConfig, ctx: RunContext) -> list[Row]:
    thresholds = cfg.threshold_values() or DEFAULT_CF_GRID
    rows = []
    for n in cfg.n_list:
        spec = cfg.code.build(n, ctx.base_dir)
        curve = empirical_ccdf(spec, cfg.oversampling, thresholds, cfg.trials, cfg.seed, ctx.workers)
        cf = effective_cf(curve, cfg.epsilon)
        ctx.logger.info("effective-cf: N=%d CF_eff=%.4f", n, cf)
        rows.append((n, cfg.epsilon, cf, cf * cf / math.log(n), cfg.trials))
    return rows


def run_aom_scaling(cfg: ExperimentConfig, ctx: RunContext) -> list[Row]:
    rows = []
    for n in cfg.n_list:
        lam, mu = aom_scaling_schedule(n, cfg.epsilon)
        spec = cfg.code.build(n, ctx.base_dir)
        tail = empirical_distortion_tail(
            spec, cfg.oversampling, _distortion_fn(cfg, lam), [cfg.level], cfg.trials, cfg.seed, ctx.workers
        )
        if cfg.amplifier.model == "sel":
            analytic = min(aom_scaling_bound(n, cfg.level, cfg.epsilon, k) for k in cfg.k_range)
        else:
            analytic = math.nan
        ctx.logger.info("aom-scaling: N=%d lam=%.4f P=%.4g bound=%.4g", n, lam, tail.probabilities[0], analytic)
        rows.append((n, lam, mu, float(tail.probabilities[0]), analytic))
    return rows


def run_balance(cfg: ExperimentConfig, ctx: RunContext) -> list[Row]:
    spec = cfg.code.build(cfg.n, ctx.base_dir)
    n, lam = spec.n, cfg.amplifier.lam
    levels = cfg.threshold_values()
    h = _metric_h(cfg, n)
    distort = _distortion_fn(cfg, lam)
    if cfg.mode == "exact":
        tail = exact_distortion_tail(spec, 1, distort, levels, h)
    else:
        tail = empirical_distortion_tail(spec, 1, distort, levels, cfg.trials, cfg.seed, ctx.workers, h)

    if cfg.ccdf_bound == "exact":
        ccdf = ccdf_function(peak_magnitudes(enumerate_symbols(spec), 1))
    else:
        ccdf = ccdf_bound_function(cfg.ccdf_bound, n, wcond_constant(spec), cfg.k_range)
    grid = default_mu_grid(lam, n)

    rows = []
    for x, p in zip(tail.thresholds, tail.probabilities):
        query = BalanceQuery(lam=lam, x=float(x), mu_grid=grid, ccdf=ccdf, h=h)
        rows.append((float(x), p, balance_bound_bpsk(query), balance_bound_general(query)))
    return rows


def run_code_cf(cfg: ExperimentConfig, ctx: RunContext) -> list[Row]:
    spec = cfg.code.build(cfg.n, ctx.base_dir)
    c_w = wcond_constant(spec)
    rows = []
    for oversampling in cfg.oversampling_list:
        rows.append((oversampling, spec.size, code_cf(spec, oversampling), c_w))
    return rows


EXPERIMENTS: dict[str, Experiment] = {
    exp.name: exp
    for exp in (
        Experiment(
            "ccdf",
            ("x", "ccdf", "reliable"),
            "CCDF of the crest factor, Monte Carlo or exhaustive",
            run_ccdf,
        ),
        Experiment(
            "bounds-compare",
            ("x", "exact", "union_chernoff", "thm1", "thm2", "thm3_linear"),
            "exhaustive CCDF against every analytical bound",
            run_bounds_compare,
        ),
        Experiment(
            "effective-cf",
            ("N", "epsilon", "cf_eff", "cf_eff_sq_over_log_n", "trials"),
            "effective crest factor at a target outage for each N",
            run_effective_cf,
        ),
        Experiment(
            "aom-scaling",
            ("N", "lambda_N", "mu_N", "empirical_prob", "analytic_bound"),
            "AOM tail under the log log N clip-level schedule",
            run_aom_scaling,
        ),
        Experiment(
            "balance",
            ("x", "tail_probability", "balance_bpsk", "balance_general"),
            "distortion-metric tail against the balancing bounds",
            run_balance,
        ),
        Experiment(
            "code-cf",
            ("oversampling", "m1", "code_cf", "c_w"),
            "worst-case crest factor and weight-condition constant of a code",
            run_code_cf,
        ),
    )
}
