"""OFDM baseband synthesis for BPSK codewords on the oversampled half-circle grid."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Codeword:
    symbols: np.ndarray

    def __post_init__(self) -> None:
        symbols = np.array(self.symbols, dtype=np.float64).reshape(-1)
        if symbols.size == 0:
            raise ValueError("Codeword must have at least one symbol")
        if not np.all(np.abs(symbols) == 1.0):
            raise ValueError("Codeword symbols must be +1 or -1")
        symbols.setflags(write=False)
        object.__setattr__(self, "symbols", symbols)

    @property
    def n(self) -> int:
        return int(self.symbols.size)

    def negated(self) -> Codeword:
        return Codeword(-self.symbols)

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> Codeword:
        # bit 0 -> +1, bit 1 -> -1
        return cls(1.0 - 2.0 * np.asarray(bits, dtype=np.float64))


@dataclass(frozen=True)
class SampledSignal:
    samples: np.ndarray
    n_subcarriers: int
    oversampling: int

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.complex128).reshape(-1)
        if self.oversampling < 1:
            raise ValueError(f"Oversampling factor must be >= 1, got {self.oversampling}")
        if samples.size != self.oversampling * self.n_subcarriers:
            raise ValueError(
                f"Expected {self.oversampling * self.n_subcarriers} samples, got {samples.size}"
            )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.samples)

    @property
    def thetas(self) -> np.ndarray:
        return theta_grid(self.n_subcarriers, self.oversampling)


def theta_grid(n: int, oversampling: int) -> np.ndarray:
    """theta_l = 2*pi*l / (2LN) for 0 <= l < LN, i.e. the half circle [0, pi)."""
    count = oversampling * n
    return 2.0 * np.pi * np.arange(count) / (2.0 * count)


def alpha_grid(k: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(k) / k


@dataclass(frozen=True)
class Lattice:
    """The (theta, alpha) projection lattice for a given N, L and K."""

    n: int
    oversampling: int
    k: int
    theta_points: np.ndarray = field(init=False, repr=False)
    alpha_points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("N must be >= 1")
        if self.oversampling < 1:
            raise ValueError(f"Oversampling factor must be >= 1, got {self.oversampling}")
        if self.k < 3:
            raise ValueError(f"K ≥ 3 required, got {self.k}")
        object.__setattr__(self, "theta_points", theta_grid(self.n, self.oversampling))
        object.__setattr__(self, "alpha_points", alpha_grid(self.k))

    def __len__(self) -> int:
        return self.theta_points.size * self.alpha_points.size

    def phase_matrix(self) -> np.ndarray:
        """cos(k*theta + alpha) with rows over lattice points (theta-major) and columns over k."""
        kk = np.arange(self.n)
        phases = (
            self.theta_points[:, None, None] * kk[None, None, :]
            + self.alpha_points[None, :, None]
        )
        return np.cos(phases).reshape(len(self), self.n)

    def projections(self, signal: SampledSignal) -> np.ndarray:
        """Re(S(theta) e^{j alpha}) for every lattice point, shape (LN, K)."""
        if signal.n_subcarriers != self.n or signal.oversampling != self.oversampling:
            raise ValueError("Signal does not live on this lattice")
        rotations = np.exp(1j * self.alpha_points)
        return np.real(signal.samples[:, None] * rotations[None, :])


def _symbol_rows(symbols: np.ndarray) -> np.ndarray:
    rows = np.asarray(symbols, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.shape[-1] == 0:
        raise ValueError("Codeword must have at least one symbol")
    return rows


def synthesize_batch(symbols: np.ndarray, oversampling: int) -> np.ndarray:
    """Samples on the half-circle grid for each row of ``symbols``; shape (M, LN).

    Zero-padded length-2LN inverse transform, keeping the first LN outputs.
    """
    if oversampling < 1:
        raise ValueError(f"Oversampling factor must be >= 1, got {oversampling}")
    rows = _symbol_rows(symbols)
    n = rows.shape[-1]
    size = 2 * oversampling * n
    spectrum = np.fft.ifft(rows, n=size, axis=-1)
    return spectrum[:, : oversampling * n] * (size / math.sqrt(n))


def synthesize(codeword: Codeword, oversampling: int) -> SampledSignal:
    samples = synthesize_batch(codeword.symbols, oversampling)[0]
    return SampledSignal(samples=samples, n_subcarriers=codeword.n, oversampling=oversampling)


def synthesize_full_circle(codeword: Codeword, oversampling: int = 1) -> np.ndarray:
    """All 2LN samples on [0, 2*pi); at L=1 these are the Nyquist-rate points."""
    n = codeword.n
    size = 2 * oversampling * n
    return np.fft.ifft(codeword.symbols, n=size) * (size / math.sqrt(n))


def evaluate(codeword: Codeword, thetas: np.ndarray | float) -> np.ndarray:
    """Direct summation of S_c(theta) at arbitrary angles."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    kk = np.arange(codeword.n)
    kernel = np.exp(1j * thetas[:, None] * kk[None, :])
    return kernel @ codeword.symbols / math.sqrt(codeword.n)


def phase_projection(codeword: Codeword, theta: float, alpha: float) -> float:
    """S_c(theta, alpha) = Re(S_c(theta) e^{j alpha}) = (1/sqrt N) sum_k c_k cos(k theta + alpha)."""
    if not (math.isfinite(theta) and math.isfinite(alpha)):
        raise ValueError("theta and alpha must be finite")
    kk = np.arange(codeword.n)
    return float(np.dot(codeword.symbols, np.cos(kk * theta + alpha)) / math.sqrt(codeword.n))


def psi(theta: float, alpha: float, n: int) -> float:
    """Sum of cos^2(k theta + alpha) over k < N; lies in [0, N]."""
    if n < 1:
        raise ValueError("N must be >= 1")
    kk = np.arange(n)
    return float(np.sum(np.cos(kk * theta + alpha) ** 2))


def peak_magnitudes(symbols: np.ndarray, oversampling: int, chunk: int = 256) -> np.ndarray:
    """max_l |S(theta_l)| for each row of ``symbols``, processed in row chunks."""
    rows = _symbol_rows(symbols)
    peaks = np.empty(rows.shape[0], dtype=np.float64)
    for start in range(0, rows.shape[0], chunk):
        block = synthesize_batch(rows[start : start + chunk], oversampling)
        peaks[start : start + chunk] = np.abs(block).max(axis=1)
    return peaks
