"""Memoryless HPA models acting on the oversampled samples."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.ofdm.signal_core import SampledSignal


@dataclass(frozen=True)
class SelParams:
    lam: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.lam) or self.lam <= 0:
            raise ValueError(f"SEL saturation level must be finite and > 0, got {self.lam}")


@dataclass(frozen=True)
class CubicParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"Cubic gains must satisfy a > 0 and b > 0, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class DistortionRecord:
    original: SampledSignal
    clipped: SampledSignal
    distortion: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.distortion.size)


def sel_distortion(samples: np.ndarray, lam: float) -> np.ndarray:
    """SEL distortion D on raw complex samples (any shape); ``samples + D`` is the limiter output."""
    samples = np.asarray(samples, dtype=np.complex128)
    magnitude = np.abs(samples)
    scale = np.ones(samples.shape, dtype=np.float64)
    over = magnitude > lam
    scale[over] = lam / magnitude[over]
    distortion = samples * scale - samples
    # s + D can round an ulp above lam; shrink the scale in doubling ulp steps until it does not
    step = np.spacing(scale)
    spill = np.abs(samples + distortion) > lam
    while np.any(spill):
        scale[spill] -= step[spill]
        step[spill] *= 2.0
        distortion[spill] = samples[spill] * scale[spill] - samples[spill]
        spill = np.abs(samples + distortion) > lam
    return distortion


def sel_samples(samples: np.ndarray, lam: float) -> np.ndarray:
    """SEL on raw complex samples (any shape); |s| <= lam passes unchanged."""
    samples = np.asarray(samples, dtype=np.complex128)
    return samples + sel_distortion(samples, lam)


def cubic_samples(samples: np.ndarray, a: float, b: float) -> np.ndarray:
    samples = np.asarray(samples, dtype=np.complex128)
    return a * samples + b * samples * np.abs(samples) ** 2


def _record(signal: SampledSignal, distortion: np.ndarray) -> DistortionRecord:
    # the output is built from D, so original + distortion == clipped holds bit for bit
    distortion = np.asarray(distortion, dtype=np.complex128)
    clipped = SampledSignal(
        samples=signal.samples + distortion,
        n_subcarriers=signal.n_subcarriers,
        oversampling=signal.oversampling,
    )
    distortion.setflags(write=False)
    return DistortionRecord(original=signal, clipped=clipped, distortion=distortion)


def apply_sel(signal: SampledSignal, params: SelParams) -> DistortionRecord:
    return _record(signal, sel_distortion(signal.samples, params.lam))


def apply_cubic(signal: SampledSignal, params: CubicParams) -> DistortionRecord:
    return _record(signal, cubic_samples(signal.samples, params.a, params.b) - signal.samples)
