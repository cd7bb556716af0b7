"""Log-domain special functions and the 1-D minimizer used by the bound evaluators."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
PHI_RATIO = 2.0 / (1.0 + math.sqrt(5.0))


def log_cosh(t: np.ndarray | float) -> np.ndarray:
    """log cosh t = |t| + log(1 + e^{-2|t|}) - log 2, finite for any finite t."""
    a = np.abs(np.asarray(t, dtype=np.float64))
    return a + np.log1p(np.exp(-2.0 * a)) - LOG2


def log_weighted_sum(log_terms: np.ndarray, log_weights: np.ndarray) -> float:
    """log(sum_k w_k exp(a_k)) given log w_k; entries with log w_k = -inf drop out."""
    log_weights = np.asarray(log_weights, dtype=np.float64)
    keep = np.isfinite(log_weights)
    if not np.any(keep):
        return -math.inf
    terms = np.broadcast_to(np.asarray(log_terms, dtype=np.float64), log_weights.shape)
    return float(logsumexp(terms[keep] + log_weights[keep]))


@dataclass(frozen=True)
class RhoSearch:
    lo: float = 1e-4
    hi: float = 1e2
    tol: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.lo < self.hi):
            raise ValueError(f"rho search interval must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})")
        if self.tol <= 0:
            raise ValueError("rho search tolerance must be positive")


@dataclass
class MinimizeResult:
    argmin: float
    minimum: float
    evaluations: int


def golden_section_minimize(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-6,
    max_iterations: int = 200,
) -> MinimizeResult:
    """Golden-section search for a unimodal function on [lo, hi].

    The best point seen (including both ends) is returned, so a non-unimodal
    objective still yields a value the function actually takes.
    """
    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1 = func(x1)
    f2 = func(x2)
    best_x, best_f = (x1, f1) if f1 <= f2 else (x2, f2)
    for edge in (lo, hi):
        value = func(edge)
        if value < best_f:
            best_x, best_f = edge, value
    evaluations = 4
    scale = max(abs(lo), abs(hi), 1.0)
    while evaluations < max_iterations and (hi - lo) > tol * scale:
        if f2 > f1:
            hi = x2
            x2, f2 = x1, f1
            x1 = hi - PHI_RATIO * (hi - lo)
            f1 = func(x1)
            if f1 < best_f:
                best_x, best_f = x1, f1
        else:
            lo = x1
            x1, f1 = x2, f2
            x2 = lo + PHI_RATIO * (hi - lo)
            f2 = func(x2)
            if f2 < best_f:
                best_x, best_f = x2, f2
        evaluations += 1
    return MinimizeResult(argmin=best_x, minimum=best_f, evaluations=evaluations)


def minimize_log_rho(
    log_objective: Callable[[float], float],
    search: RhoSearch,
    seed_rho: float | None = None,
) -> MinimizeResult:
    """Minimize a log-domain objective of rho by golden search on log(rho).

    ``seed_rho`` (an analytic stationary point) is evaluated as an extra
    candidate when it lies inside the search interval.
    """
    result = golden_section_minimize(
        lambda u: log_objective(math.exp(u)),
        math.log(search.lo),
        math.log(search.hi),
        tol=search.tol,
    )
    rho = math.exp(result.argmin)
    minimum = result.minimum
    if seed_rho is not None and search.lo <= seed_rho <= search.hi:
        seeded = log_objective(seed_rho)
        if seeded < minimum:
            rho, minimum = seed_rho, seeded
    logger.debug("rho search: rho=%.6g log-value=%.6g evals=%d", rho, minimum, result.evaluations)
    return MinimizeResult(argmin=rho, minimum=minimum, evaluations=result.evaluations + 1)
