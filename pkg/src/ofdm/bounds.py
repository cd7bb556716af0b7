"""Analytical upper bounds on the CF distribution and on clipping-distortion tails.

All evaluators work in the log domain (log-cosh, log-sum-exp) so that
arguments such as rho * N^(5/4) never overflow. Raw values may exceed 1;
``clamp_display`` gives the probability-style display value.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from src.ofdm.codes import DistanceDistribution
from src.ofdm.signal_core import Lattice
from src.ofdm.special import RhoSearch, log_cosh, log_weighted_sum, minimize_log_rho

logger = logging.getLogger(__name__)

DEFAULT_K_RANGE: tuple[int, ...] = tuple(range(3, 65))
MU_GRID_POINTS = 64
EXP_LIMIT = 709.0

CCDF_BOUND_SELECTORS = ("thm3-linear", "thm3-nonlinear", "union-chernoff")


def ck(k: int) -> float:
    """Projection penalty C_K = 1 / cos(pi / K)."""
    if k < 3:
        raise ValueError(f"K ≥ 3 required, got {k}")
    return 1.0 / math.cos(math.pi / k)


def clamp_display(value: float) -> float:
    return min(1.0, value)


def _exp(log_value: float) -> float:
    """exp that saturates to inf instead of raising OverflowError."""
    return math.exp(log_value) if log_value < EXP_LIMIT else math.inf


def _k_values(k_range: Sequence[int]) -> np.ndarray:
    ks = np.asarray(list(k_range), dtype=np.int64)
    if ks.size == 0:
        raise ValueError("K range must not be empty")
    if np.any(ks < 3):
        raise ValueError(f"K ≥ 3 required, got {int(ks.min())}")
    return ks


def _ck_values(ks: np.ndarray) -> np.ndarray:
    return 1.0 / np.cos(np.pi / ks)


def _stationary_rho(x: float, n: int, k: int) -> float:
    """rho = 2x / (C_K N), the minimizer used in the closed-form Gaussian bound."""
    return 2.0 * x / (ck(k) * n)


@dataclass(frozen=True)
class BoundQuery:
    x: float
    n: int
    oversampling: int = 1
    k_range: tuple[int, ...] = DEFAULT_K_RANGE
    rho_search: RhoSearch = field(default_factory=RhoSearch)
    c_w: float = 0.0
    distribution: DistanceDistribution | None = None

    def __post_init__(self) -> None:
        if self.x < 0 or not math.isfinite(self.x):
            raise ValueError(f"threshold x must be finite and >= 0, got {self.x}")
        if self.n < 1 or self.oversampling < 1:
            raise ValueError("N and L must be >= 1")
        if self.c_w < 0:
            raise ValueError(f"C_w must be >= 0, got {self.c_w}")
        _k_values(self.k_range)
        if self.distribution is not None and self.distribution.n != self.n:
            raise ValueError(f"distribution length {self.distribution.n} does not match N={self.n}")

    def require_distribution(self, flavor: str) -> DistanceDistribution:
        if self.distribution is None:
            raise ValueError(f"this bound needs a {flavor} distribution")
        if self.distribution.flavor != flavor:
            raise ValueError(f"expected a {flavor} distribution, got {self.distribution.flavor}")
        return self.distribution


# union bound over projections with the exact BPSK moment generating function

# cos(k theta + alpha) is rebuilt per evaluation in blocks of at most this many entries
PHASE_CHUNK_ELEMENTS = 1 << 20
# largest N*L the experiment runner accepts for union-Chernoff evaluation
UNION_CHERNOFF_MAX_SAMPLES = 64


def _lattice_log_cosh_sums(n: int, oversampling: int, k: int, rho: float) -> np.ndarray:
    """sum_k log cosh(rho cos(k theta + alpha) / sqrt N) for every lattice point."""
    lattice = Lattice(n=n, oversampling=oversampling, k=k)
    kk = np.arange(n)
    scaled = rho / math.sqrt(n)
    thetas = lattice.theta_points
    rows = max(1, PHASE_CHUNK_ELEMENTS // (k * n))
    sums = np.empty((thetas.size, k), dtype=np.float64)
    for start in range(0, thetas.size, rows):
        theta = thetas[start : start + rows]
        phases = theta[:, None, None] * kk[None, None, :] + lattice.alpha_points[None, :, None]
        sums[start : start + rows] = np.sum(log_cosh(scaled * np.cos(phases)), axis=2)
    return sums.reshape(-1)


def log_union_chernoff(x: float, n: int, oversampling: int, k: int, rho: float) -> float:
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    per_point = _lattice_log_cosh_sums(n, oversampling, k, rho)
    return float(logsumexp(per_point)) - rho * x / ck(k)


def union_chernoff_bpsk(x: float, n: int, oversampling: int, k: int, rho: float) -> float:
    """Sum over the lattice of exp(-rho x / C_K) prod_k cosh(rho cos(k theta + alpha) / sqrt N)."""
    return _exp(log_union_chernoff(x, n, oversampling, k, rho))


def union_chernoff_bound(
    x: float,
    n: int,
    oversampling: int,
    k_range: Sequence[int] = DEFAULT_K_RANGE,
    rho_search: RhoSearch | None = None,
) -> float:
    search = rho_search or RhoSearch()
    best = math.inf
    for k in _k_values(k_range):
        k = int(k)
        result = minimize_log_rho(
            lambda rho: log_union_chernoff(x, n, oversampling, k, rho),
            search,
            seed_rho=_stationary_rho(x, n, k),
        )
        best = min(best, result.minimum)
    logger.debug("union-chernoff: x=%.4g N=%d L=%d log-value=%.6g", x, n, oversampling, best)
    return _exp(best)


# distance/weight distribution bounds


def _log_f_star_star(rho: float, q: BoundQuery, k: int | None = None) -> float:
    """log of min over K of 2LNK exp(-rho sqrt(N) x / C_K); a single K when ``k`` is given."""
    ks = _k_values(q.k_range) if k is None else np.array([k])
    terms = np.log(2.0 * q.oversampling * q.n * ks) - rho * math.sqrt(q.n) * q.x / _ck_values(ks)
    return float(np.min(terms))


def log_thm1(rho: float, q: BoundQuery, k: int | None = None) -> float:
    dist = q.require_distribution("distance")
    n = q.n
    log_f_star = _log_f_star_star(rho, q, k) + 0.5 * float(log_cosh(rho * n**0.75))
    spread = n - 2.0 * np.arange(n + 1)
    log_inner = log_weighted_sum(log_cosh(rho * n**0.25 * spread), dist.log_weights()) - math.log(dist.m1)
    return 0.5 * (log_f_star + log_inner)


def thm1_value(rho: float, q: BoundQuery) -> float:
    return _exp(log_thm1(rho, q))


def thm1_bound(q: BoundQuery) -> float:
    """Bound for any binary code from its distance distribution, minimized over rho and K."""
    q.require_distribution("distance")
    return _exp(_min_over_k_and_rho(log_thm1, q))


def log_thm2(rho: float, q: BoundQuery, k: int | None = None) -> float:
    dist = q.require_distribution("weight")
    spread = q.n - 2.0 * np.arange(q.n + 1)
    log_inner = log_weighted_sum(log_cosh(rho * spread), dist.log_weights()) - math.log(dist.m1)
    return _log_f_star_star(rho, q, k) + log_inner


def thm2_value(rho: float, q: BoundQuery) -> float:
    return _exp(log_thm2(rho, q))


def thm2_bound(q: BoundQuery) -> float:
    """Bound for linear codes from the weight distribution, minimized over rho and K."""
    q.require_distribution("weight")
    return _exp(_min_over_k_and_rho(log_thm2, q))


def _min_over_k_and_rho(log_objective: Callable[[float, BoundQuery, int], float], q: BoundQuery) -> float:
    # for a fixed K the objective is convex in rho, so the golden search finds its minimum
    best = math.inf
    for k in _k_values(q.k_range):
        k = int(k)
        result = minimize_log_rho(
            lambda rho: log_objective(rho, q, k), q.rho_search, seed_rho=_stationary_rho(q.x, q.n, k)
        )
        best = min(best, result.minimum)
    logger.debug("distribution bound: x=%.4g N=%d log-value=%.6g", q.x, q.n, best)
    return best


def thm3_bound(
    x: float,
    n: int,
    oversampling: int,
    k: int,
    c_w: float,
    linear: bool,
    proof_variant: bool = False,
) -> float:
    """Closed-form Gaussian-tail bound for codes meeting the weight condition.

    ``proof_variant`` uses the exponent x^2 / (C_K^2 sqrt N) for nonlinear
    codes instead of x^2 / (2 C_K^2 sqrt N).
    """
    if x < 0:
        raise ValueError(f"threshold x must be >= 0, got {x}")
    if c_w < 0:
        raise ValueError(f"C_w must be >= 0, got {c_w}")
    c = ck(k)
    if linear:
        exponent = x * x / (2.0 * c * c)
    elif proof_variant:
        exponent = x * x / (c * c * math.sqrt(n))
    else:
        exponent = x * x / (2.0 * c * c * math.sqrt(n))
    return 2.0 * (1.0 + c_w) * oversampling * k * n * math.exp(-exponent)


def thm3_bound_min(
    x: float,
    n: int,
    oversampling: int,
    k_range: Sequence[int] = DEFAULT_K_RANGE,
    c_w: float = 0.0,
    linear: bool = True,
    proof_variant: bool = False,
) -> float:
    return min(
        thm3_bound(x, n, oversampling, int(k), c_w, linear, proof_variant) for k in _k_values(k_range)
    )


# level crossings and the balancing method


def log_crossing_count_bound(lam: float, x: float, n: int, k: int, rho: float) -> float:
    if x <= 0:
        raise ValueError(f"x must be > 0, got {x}")
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    c = ck(k)
    single = math.log(n * k) + rho * rho * n / 2.0 - rho * lam * math.sqrt(n) / c
    if n > 1:
        pairs = math.log(n * (n - 1) * k * k) + rho * rho * n - 2.0 * rho * lam * math.sqrt(n) / c
        total = float(np.logaddexp(single, pairs))
    else:
        total = single
    return total - 2.0 * math.log(x)


def crossing_count_bound(lam: float, x: float, n: int, k: int, rho: float) -> float:
    """Markov bound on Pr(N_c(lam)^2 > x^2) from the first two exponential moments."""
    return _exp(log_crossing_count_bound(lam, x, n, k, rho))


def crossing_count_bound_min(
    lam: float,
    x: float,
    n: int,
    k_range: Sequence[int] = DEFAULT_K_RANGE,
    rho_search: RhoSearch | None = None,
) -> float:
    search = rho_search or RhoSearch()
    best = math.inf
    for k in _k_values(k_range):
        k = int(k)
        # the single-crossing exponent is stationary at rho = lam / (C_K sqrt N)
        seed = lam / (ck(k) * math.sqrt(n)) if lam > 0 else None
        result = minimize_log_rho(lambda rho: log_crossing_count_bound(lam, x, n, k, rho), search, seed)
        best = min(best, result.minimum)
    return _exp(best)


CcdfFn = Callable[[float], float]
MetricFn = Callable[[float], float]


def aom_metric(n: int) -> MetricFn:
    """h(d) = d^2 / N, which turns the per-sample sum into the AOM at L = 1."""
    return lambda d: d * d / n


def default_mu_grid(lam: float, n: int, points: int = MU_GRID_POINTS) -> np.ndarray:
    """Log-spaced mu values in (lam, sqrt N]; above the ceiling the grid spans (lam, 2 lam]."""
    if lam <= 0:
        raise ValueError(f"clip level must be > 0, got {lam}")
    top = math.sqrt(n) if lam < math.sqrt(n) else 2.0 * lam
    return np.geomspace(lam, top, points + 1)[1:]


@dataclass(frozen=True)
class BalanceQuery:
    lam: float
    x: float
    mu_grid: np.ndarray
    ccdf: CcdfFn
    h: MetricFn

    def __post_init__(self) -> None:
        grid = np.asarray(self.mu_grid, dtype=np.float64).reshape(-1)
        if grid.size == 0:
            raise ValueError("mu grid must not be empty")
        if self.lam <= 0:
            raise ValueError(f"clip level must be > 0, got {self.lam}")
        if self.x <= 0:
            raise ValueError(f"x must be > 0, got {self.x}")
        if np.any(grid <= self.lam):
            raise ValueError("every mu must exceed the clip level")
        object.__setattr__(self, "mu_grid", grid)


def balance_bound_bpsk(q: BalanceQuery) -> float:
    """min over mu of B(mu) + (B(lam) + B(lam)^2) h(mu - lam)^2 / x^2 (uncoded BPSK form)."""
    b_lam = q.ccdf(q.lam)
    values = [q.ccdf(mu) + (b_lam + b_lam * b_lam) * q.h(mu - q.lam) ** 2 / (q.x * q.x) for mu in q.mu_grid]
    return float(min(values))


def balance_bound_general(q: BalanceQuery) -> float:
    """min over mu of B(mu) + B(lam) h(mu - lam) / x (any binary code)."""
    b_lam = q.ccdf(q.lam)
    values = [q.ccdf(mu) + b_lam * q.h(mu - q.lam) / q.x for mu in q.mu_grid]
    return float(min(values))


def ccdf_bound_function(
    selector: str,
    n: int,
    c_w: float = 0.0,
    k_range: Sequence[int] = DEFAULT_K_RANGE,
    rho_search: RhoSearch | None = None,
) -> CcdfFn:
    """The B_1(.) upper bound named by ``selector``, as a cached callable."""
    if selector == "thm3-linear":
        func = lambda x: thm3_bound_min(x, n, 1, k_range, c_w, linear=True)  # noqa: E731
    elif selector == "thm3-nonlinear":
        func = lambda x: thm3_bound_min(x, n, 1, k_range, c_w, linear=False)  # noqa: E731
    elif selector == "union-chernoff":
        func = lambda x: union_chernoff_bound(x, n, 1, k_range, rho_search)  # noqa: E731
    else:
        raise ValueError(f"unknown ccdf bound {selector!r}; expected one of {CCDF_BOUND_SELECTORS}")
    return lru_cache(maxsize=None)(func)


# clip-level scaling


def aom_scaling_schedule(n: int, epsilon: float) -> tuple[float, float]:
    """lam_N = sqrt((1+eps) log log N) and mu_N = sqrt((1+eps) log N)."""
    if n < 3:
        raise ValueError(f"N ≥ 3 required for log log N, got {n}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    lam = math.sqrt((1.0 + epsilon) * math.log(math.log(n)))
    mu = math.sqrt((1.0 + epsilon) * math.log(n))
    return lam, mu


def aom_scaling_terms(n: int, x: float, lam: float, mu: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    c2 = ck(k) ** 2
    first = n * k * np.exp(-(mu**2) / (2.0 * c2))
    second = n * k * math.exp(-(lam**2) / (2.0 * c2)) * (mu - lam) ** 2 / (n * x)
    return first, second


def aom_scaling_bound(
    n: int,
    x: float,
    epsilon: float,
    k: int,
    mu_grid: np.ndarray | None = None,
) -> float:
    """min over mu > lam_N of N K e^{-mu^2/(2 C_K^2)} + N K e^{-lam_N^2/(2 C_K^2)} (mu - lam_N)^2 / (N x)."""
    if x <= 0:
        raise ValueError(f"x must be > 0, got {x}")
    lam, mu_n = aom_scaling_schedule(n, epsilon)
    if mu_grid is None:
        grid = np.union1d(default_mu_grid(lam, n), [mu_n])
    else:
        grid = np.asarray(mu_grid, dtype=np.float64)
    grid = grid[grid > lam]
    if grid.size == 0:
        raise ValueError("mu grid has no point above the clip level")
    first, second = aom_scaling_terms(n, x, lam, grid, k)
    return float(np.min(first + second))
