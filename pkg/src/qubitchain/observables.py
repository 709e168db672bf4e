"""Scalar observables, their spectra, and two small SSH formulas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import AmplitudeField

MIN_SPECTRUM_SAMPLES = 16


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = "value"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")

    def __len__(self) -> int:
        return self.times.size

    def window(self, t_start: float, t_stop: float) -> "TimeSeries":
        """Samples with ``t_start <= t < t_stop``."""
        keep = (self.times >= t_start) & (self.times < t_stop)
        return TimeSeries(self.times[keep], self.values[keep], self.label)


@dataclass
class Spectrum:
    frequencies: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        if self.frequencies.shape != self.amplitudes.shape:
            raise ValueError("frequencies and amplitudes differ in length")
        if np.any(self.frequencies < 0) or np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be nonnegative and strictly ascending")
        if np.any(self.amplitudes < 0):
            raise ValueError("amplitudes must be nonnegative")

    def peak(self) -> float:
        """Angular frequency of the largest amplitude."""
        return float(self.frequencies[np.argmax(self.amplitudes)])


def total_norm(state: AmplitudeField) -> float:
    return float(np.sum(np.abs(state.A) ** 2) + np.sum(np.abs(state.B) ** 2))


def block_norms(state: AmplitudeField) -> np.ndarray:
    """Norm of each photon block l (the pair |a, l> and |b, l+1>)."""
    return np.sum(np.abs(state.A) ** 2 + np.abs(state.B) ** 2, axis=(0, 1))


def inversion(state: AmplitudeField, normalized: bool = True) -> float:
    """Integral inversion: summed excited minus ground population.

    By default divided by the instantaneous norm so that relaxation does
    not show up as a decay of the inversion.
    """
    pa = float(np.sum(np.abs(state.A) ** 2))
    pb = float(np.sum(np.abs(state.B) ** 2))
    if pa + pb == 0:
        raise ValueError("inversion of a zero-norm state is undefined")
    w = pa - pb
    return w / (pa + pb) if normalized else w


def series(samples: Iterable[tuple[float, AmplitudeField]], normalized: bool = True):
    """Inversion and norm time series from ``(t, state)`` samples."""
    t, w, nrm = [], [], []
    for ti, s in samples:
        t.append(ti)
        w.append(inversion(s, normalized))
        nrm.append(total_norm(s))
    return TimeSeries(t, w, "inversion"), TimeSeries(t, nrm, "norm")


def _check_uniform(times: np.ndarray) -> float:
    steps = np.diff(times)
    dt = float(np.mean(steps))
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ValueError("spectrum needs uniformly sampled, increasing times")
    return dt


def spectrum(ts: TimeSeries, window: str = "rect") -> Spectrum:
    """One-sided DFT magnitude of the mean-removed series.

    Bin q sits at angular frequency ``2 pi q / (N dt)``.  Amplitudes are
    ``|X_q| * sqrt(w_q / N)`` with ``w_q = 2`` for bins that have a mirror
    partner and 1 for DC and Nyquist, so with the rectangular window the
    squared amplitudes sum to ``N * var(values)``.
    """
    n = len(ts)
    if n < MIN_SPECTRUM_SAMPLES:
        raise ValueError(f"spectrum needs at least {MIN_SPECTRUM_SAMPLES} samples, got {n}")
    dt = _check_uniform(ts.times)
    x = ts.values - ts.values.mean()
    if window == "hann":
        x = x * np.hanning(n)
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}; use 'rect' or 'hann'")
    X = np.fft.rfft(x)
    w = np.full(X.size, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    omega = 2 * np.pi * np.arange(X.size) / (n * dt)
    return Spectrum(omega, np.abs(X) * np.sqrt(w / n))


def soliton_profile(n0: int, xi: float, v: float, t: float, sites, a: float = 1.0) -> np.ndarray:
    """SSH soliton density ``(1/xi) sech^2((n-n0) a/xi - v t) cos(n pi/2)`` per site.

    ``xi`` is the coherence length in the same length unit as ``a``.
    The ``cos(n pi/2)`` factor is kept as written, so odd sites vanish
    and sites with ``n = 2 mod 4`` come out negative.
    """
    if not xi > 0:
        raise ValueError("coherence length must be positive")
    n = np.asarray(sites)
    arg = (n - n0) * a / xi - v * t
    if np.issubdtype(n.dtype, np.integer):
        # exact cos(n pi/2) on integer sites
        phase = np.choose(n % 4, [1.0, 0.0, -1.0, 0.0])
    else:
        phase = np.cos(n * np.pi / 2)
    with np.errstate(over="ignore"):
        return phase / (xi * np.cosh(arg) ** 2)


def coherence_length(gap: float, fermi_velocity: float, hbar: float = 1.0) -> float:
    """BCS-type coherence length ``hbar v_F / gap``."""
    if not gap > 0:
        raise ValueError("gap must be positive")
    if not fermi_velocity > 0:
        raise ValueError("Fermi velocity must be positive")
    return hbar * fermi_velocity / gap
