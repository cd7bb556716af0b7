"""Figures of merit: crest factor, code CF, CCDF estimation and inversion, AOM, level crossings."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from src.ofdm.codes import CodeSpec, enumerate_symbols, sample_symbols
from src.ofdm.errors import UnresolvedQuantileError
from src.ofdm.hpa import DistortionRecord
from src.ofdm.signal_core import SampledSignal, peak_magnitudes, synthesize_batch
from src.ofdm.trials import run_trials

logger = logging.getLogger(__name__)

# MC estimates below this many hits per trial budget are flagged unreliable
RELIABLE_HITS = 10


def crest_factor(signal: SampledSignal) -> float:
    return float(np.max(np.abs(signal.samples)))


def code_cf(spec: CodeSpec, oversampling: int) -> float:
    return float(np.max(peak_magnitudes(enumerate_symbols(spec), oversampling)))


@dataclass(frozen=True)
class CcdfCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray
    trials: int
    exact: bool = False

    def __post_init__(self) -> None:
        thresholds = np.asarray(self.thresholds, dtype=np.float64)
        probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if thresholds.shape != probabilities.shape or thresholds.ndim != 1:
            raise ValueError("thresholds and probabilities must be 1-D arrays of equal length")
        if np.any(np.diff(thresholds) <= 0):
            raise ValueError("thresholds must be strictly ascending")
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def resolution(self) -> float:
        """Smallest probability the curve can resolve."""
        if self.exact:
            return 1.0 / self.trials
        return RELIABLE_HITS / self.trials

    @property
    def reliable(self) -> np.ndarray:
        if self.exact:
            return np.ones(self.probabilities.shape, dtype=bool)
        return self.probabilities >= self.resolution

    @property
    def standard_errors(self) -> np.ndarray:
        if self.exact:
            return np.zeros(self.probabilities.shape)
        p = self.probabilities
        return np.sqrt(p * (1.0 - p) / self.trials)


def _check_thresholds(thresholds: Sequence[float]) -> np.ndarray:
    grid = np.asarray(thresholds, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("thresholds must be a non-empty sequence")
    return grid


def exceedance_counts(peaks: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Number of peaks strictly above each threshold."""
    ordered = np.sort(peaks)
    return ordered.size - np.searchsorted(ordered, thresholds, side="right")


def empirical_ccdf(
    spec: CodeSpec,
    oversampling: int,
    thresholds: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> CcdfCurve:
    """Monte Carlo B_L(x) = Pr(CF > x) over uniformly drawn codewords."""
    grid = _check_thresholds(thresholds)

    def kernel(rng: np.random.Generator, count: int) -> np.ndarray:
        peaks = peak_magnitudes(sample_symbols(spec, rng, count), oversampling)
        return exceedance_counts(peaks, grid)

    hits = run_trials(kernel, trials, seed, workers=workers)
    logger.debug("empirical ccdf: N=%d L=%d trials=%d", spec.n, oversampling, trials)
    return CcdfCurve(thresholds=grid, probabilities=hits / trials, trials=trials, exact=False)


def exact_ccdf(spec: CodeSpec, oversampling: int, thresholds: Sequence[float]) -> CcdfCurve:
    """B_L(x) by enumerating every codeword; probabilities are multiples of 1/M1."""
    grid = _check_thresholds(thresholds)
    peaks = peak_magnitudes(enumerate_symbols(spec), oversampling)
    hits = exceedance_counts(peaks, grid)
    return CcdfCurve(thresholds=grid, probabilities=hits / peaks.size, trials=int(peaks.size), exact=True)


def ccdf_function(peaks: np.ndarray) -> Callable[[float], float]:
    """B(x) as the fraction of the given crest factors strictly above x."""
    ordered = np.sort(np.asarray(peaks, dtype=np.float64))

    def ccdf(x: float) -> float:
        return float(ordered.size - np.searchsorted(ordered, x, side="right")) / ordered.size

    return ccdf


def effective_cf(curve: CcdfCurve, epsilon: float) -> float:
    """Smallest x with B(x) <= epsilon, interpolated on (x, log p) between grid points."""
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not curve.exact and epsilon < curve.resolution:
        raise UnresolvedQuantileError(epsilon, curve.resolution)
    p = curve.probabilities
    x = curve.thresholds
    below = np.nonzero(p <= epsilon)[0]
    if below.size == 0:
        raise UnresolvedQuantileError(epsilon, float(np.min(p)))
    i = int(below[0])
    if i == 0:
        return float(x[0])
    p_hi, p_lo = p[i - 1], p[i]
    if p_lo > 0:
        t = (math.log(p_hi) - math.log(epsilon)) / (math.log(p_hi) - math.log(p_lo))
    else:
        t = (p_hi - epsilon) / (p_hi - p_lo)
    return float(x[i - 1] + t * (x[i] - x[i - 1]))


def aom(record: DistortionRecord) -> float:
    """Mean squared distortion magnitude over the LN samples."""
    return float(np.mean(np.abs(record.distortion) ** 2))


def crossing_count(signal: SampledSignal, lam: float) -> int:
    if lam < 0:
        raise ValueError(f"level must be >= 0, got {lam}")
    return int(np.count_nonzero(np.abs(signal.samples) > lam))


DistortionFn = Callable[[np.ndarray], np.ndarray]
MetricFn = Callable[[np.ndarray], np.ndarray]


def distortion_metric(
    symbols: np.ndarray,
    oversampling: int,
    distort: DistortionFn,
    h: MetricFn | None = None,
    chunk: int = 256,
) -> np.ndarray:
    """Per-codeword sum over samples of h(|D|); the default h gives the AOM."""
    rows = np.atleast_2d(np.asarray(symbols, dtype=np.float64))
    values = np.empty(rows.shape[0], dtype=np.float64)
    for start in range(0, rows.shape[0], chunk):
        samples = synthesize_batch(rows[start : start + chunk], oversampling)
        magnitude = np.abs(distort(samples) - samples)
        if h is None:
            values[start : start + chunk] = np.mean(magnitude**2, axis=1)
        else:
            values[start : start + chunk] = np.sum(h(magnitude), axis=1)
    return values


def empirical_distortion_tail(
    spec: CodeSpec,
    oversampling: int,
    distort: DistortionFn,
    levels: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
    h: MetricFn | None = None,
) -> CcdfCurve:
    """Monte Carlo Pr(sum_l h(|D_l|) > x) for each level x (AOM by default)."""
    grid = _check_thresholds(levels)

    def kernel(rng: np.random.Generator, count: int) -> np.ndarray:
        values = distortion_metric(sample_symbols(spec, rng, count), oversampling, distort, h)
        return exceedance_counts(values, grid)

    hits = run_trials(kernel, trials, seed, workers=workers)
    return CcdfCurve(thresholds=grid, probabilities=hits / trials, trials=trials, exact=False)


def exact_distortion_tail(
    spec: CodeSpec,
    oversampling: int,
    distort: DistortionFn,
    levels: Sequence[float],
    h: MetricFn | None = None,
) -> CcdfCurve:
    grid = _check_thresholds(levels)
    values = distortion_metric(enumerate_symbols(spec), oversampling, distort, h)
    hits = exceedance_counts(values, grid)
    return CcdfCurve(thresholds=grid, probabilities=hits / values.size, trials=int(values.size), exact=True)
