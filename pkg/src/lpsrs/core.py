"""Domain types and small numeric helpers shared across the package.

All amplitudes are accelerations in m/s^2 and all frequencies are in Hz.
Every type here is frozen; array fields are copied and marked read-only on
construction so instances can be shared freely between threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class LpsrsError(Exception):
    """Base class for errors raised by this package."""


class DomainError(LpsrsError, ValueError):
    """An argument lies outside the domain of an operation."""


class RangeError(DomainError):
    """A frequency lies outside the range covered by a curve."""


class ContractError(LpsrsError, ValueError):
    """Two arguments are individually valid but incompatible."""


class DataError(LpsrsError, ValueError):
    """Input data is malformed (non-finite samples, bad shapes, ...)."""


class InsufficientRateError(DomainError):
    """A record is sampled too slowly for the requested operation."""


class AliasingError(DomainError):
    """A synthesis rate cannot represent the requested content."""


class InconsistencyError(LpsrsError, ValueError):
    """Derived quantities contradict each other."""


class CoverageError(DomainError):
    """A tabulated function does not cover a required frequency band."""


class PlatformQualityWarning(UserWarning):
    """The SRS window used to read a platform is not flat."""


class UndersampledWarning(UserWarning):
    """An oscillator frequency is high relative to the sample rate."""


class ClampWarning(UserWarning):
    """A negative band amplitude was clamped to zero."""


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled acceleration history."""

    sample_rate: float
    samples: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")
        arr = _frozen_array(self.samples, "samples")
        if arr.size < 2:
            raise DataError("a time series needs at least 2 samples")
        if not np.all(np.isfinite(arr)):
            raise DataError("samples contain non-finite values")
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "start_time", float(self.start_time))
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) / self.sample_rate

    @property
    def time(self) -> np.ndarray:
        return self.start_time + np.arange(self.samples.size) / self.sample_rate

    def peak(self) -> float:
        """Maximum absolute sample value."""
        return float(np.max(np.abs(self.samples)))

    def with_samples(self, samples, sample_rate: float | None = None) -> "TimeSeries":
        return TimeSeries(
            sample_rate=self.sample_rate if sample_rate is None else sample_rate,
            samples=samples,
            start_time=self.start_time,
        )

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.start_time == other.start_time
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None


@dataclass(frozen=True)
class SdofParams:
    """Single-degree-of-freedom oscillator (natural frequency in Hz)."""

    natural_frequency: float
    damping_ratio: float = 0.05

    def __post_init__(self):
        if not (math.isfinite(self.natural_frequency) and self.natural_frequency > 0):
            raise DomainError(
                f"natural_frequency must be positive, got {self.natural_frequency}"
            )
        if not (0.0 < self.damping_ratio < 1.0):
            raise DomainError(
                f"damping_ratio must lie in (0, 1), got {self.damping_ratio}"
            )

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.natural_frequency

    @property
    def damped_omega(self) -> float:
        return self.omega * math.sqrt(1.0 - self.damping_ratio**2)

    @property
    def damped_frequency(self) -> float:
        return self.damped_omega / (2.0 * math.pi)


class SpectrumKind(str, enum.Enum):
    ABSOLUTE = "absolute-max"
    POSITIVE = "positive-max"
    NEGATIVE = "negative-max"


@dataclass(frozen=True, eq=False)
class SrsCurve:
    """Shock response spectrum sampled on an increasing frequency grid."""

    frequencies: np.ndarray
    amplitudes: np.ndarray
    damping_ratio: float = 0.05
    kind: SpectrumKind = SpectrumKind.ABSOLUTE

    def __post_init__(self):
        f = _frozen_array(self.frequencies, "frequencies")
        a = _frozen_array(self.amplitudes, "amplitudes")
        if f.size == 0:
            raise DataError("an SRS curve needs at least one point")
        if f.shape != a.shape:
            raise DataError(
                f"frequencies and amplitudes differ in length ({f.size} vs {a.size})"
            )
        if not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise DataError("frequencies must be positive and finite")
        if np.any(np.diff(f) <= 0):
            raise DataError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise DataError("amplitudes must be finite and non-negative")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        object.__setattr__(self, "damping_ratio", float(self.damping_ratio))

    def __len__(self) -> int:
        return self.frequencies.size

    @property
    def f_min(self) -> float:
        return float(self.frequencies[0])

    @property
    def f_max(self) -> float:
        return float(self.frequencies[-1])

    def scaled(self, factor: float) -> "SrsCurve":
        return SrsCurve(self.frequencies, factor * self.amplitudes,
                        self.damping_ratio, self.kind)

    def __call__(self, f):
        return interpolate_curve(self, f)

    def __eq__(self, other):
        if not isinstance(other, SrsCurve):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.damping_ratio == other.damping_ratio
            and np.array_equal(self.frequencies, other.frequencies)
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    __hash__ = None


@dataclass(frozen=True)
class LpsrsSet:
    """Overlaid SRS curves of one record low-pass filtered at rising cut-offs.

    ``platforms[i]`` is the frequency-independent level of ``curves[i]``.
    ``band_curves`` and ``band_peaks`` hold the SRS and the peak of each
    band signal (low-pass ``i`` minus low-pass ``i - 1``); they are optional
    but required by the transmissibility predictor.
    """

    cutoffs: tuple[float, ...]
    curves: tuple[SrsCurve, ...]
    platforms: tuple[float, ...]
    band_curves: tuple[SrsCurve, ...] | None = None
    band_peaks: tuple[float, ...] | None = None
    flat: tuple[bool, ...] | None = None

    def __post_init__(self):
        cutoffs = tuple(float(c) for c in self.cutoffs)
        if not cutoffs:
            raise DataError("an LPSRS needs at least one cut-off")
        if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
            raise DataError("cut-offs must be strictly increasing")
        n = len(cutoffs)
        if len(self.curves) != n or len(self.platforms) != n:
            raise DataError("need exactly one curve and one platform per cut-off")
        for fc, curve in zip(cutoffs, self.curves):
            if curve.f_max < 5.0 * fc * (1 - 1e-9):
                raise DataError(
                    f"curve for cut-off {fc:g} Hz stops at {curve.f_max:g} Hz; "
                    f"needs at least {5 * fc:g} Hz to show its platform"
                )
        if self.band_curves is not None and len(self.band_curves) != n:
            raise DataError("need one band curve per cut-off")
        if self.band_peaks is not None and len(self.band_peaks) != n:
            raise DataError("need one band peak per cut-off")
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "platforms", tuple(float(p) for p in self.platforms))
        if self.band_curves is not None:
            object.__setattr__(self, "band_curves", tuple(self.band_curves))
        if self.band_peaks is not None:
            object.__setattr__(self, "band_peaks", tuple(float(p) for p in self.band_peaks))
        if self.flat is not None:
            object.__setattr__(self, "flat", tuple(bool(v) for v in self.flat))

    def __len__(self) -> int:
        return len(self.cutoffs)

    @property
    def damping_ratio(self) -> float:
        return self.curves[0].damping_ratio

    def scaled(self, factor: float) -> "LpsrsSet":
        return LpsrsSet(
            cutoffs=self.cutoffs,
            curves=tuple(c.scaled(factor) for c in self.curves),
            platforms=tuple(factor * p for p in self.platforms),
            band_curves=None if self.band_curves is None
            else tuple(c.scaled(factor) for c in self.band_curves),
            band_peaks=None if self.band_peaks is None
            else tuple(factor * p for p in self.band_peaks),
            flat=self.flat,
        )


@dataclass(frozen=True)
class Mode:
    order: int
    natural_frequency: float
    participation: float
    mode_shape: float
    effective_mass: float = 0.0

    @property
    def gain(self) -> float:
        """Response-point gain ``participation * mode_shape``."""
        return self.participation * self.mode_shape


@dataclass(frozen=True)
class ModalTable:
    """Modes of a structure ordered by natural frequency."""

    modes: tuple[Mode, ...] = field(default_factory=tuple)

    def __post_init__(self):
        modes = tuple(self.modes)
        freqs = [m.natural_frequency for m in modes]
        if any(not (math.isfinite(f) and f > 0) for f in freqs):
            raise DataError("natural frequencies must be positive and finite")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise DataError("natural frequencies must increase with row order")
        if any(m.effective_mass < 0 for m in modes):
            raise DataError("effective mass must be non-negative")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "ModalTable":
        """Build from ``(order, f_n, P_n, phi_n[, effective_mass])`` rows."""
        return cls(tuple(
            Mode(int(r[0]), float(r[1]), float(r[2]), float(r[3]),
                 float(r[4]) if len(r) > 4 else 0.0)
            for r in rows
        ))

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([m.natural_frequency for m in self.modes])

    @property
    def gains(self) -> np.ndarray:
        return np.array([m.gain for m in self.modes])

    def subset(self, indices) -> "ModalTable":
        return ModalTable(tuple(self.modes[i] for i in sorted(indices)))


@dataclass(frozen=True)
class DampedHarmonic:
    """``amplitude * exp(-xi*w*(t - t0)) * sin(w*(t - t0))`` for t >= t0."""

    amplitude: float
    frequency: float
    damping_ratio: float = 0.0
    onset_time: float = 0.0

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise DomainError(f"amplitude must be non-negative, got {self.amplitude}")
        if not self.frequency > 0:
            raise DomainError(f"frequency must be positive, got {self.frequency}")
        if not self.damping_ratio >= 0:
            raise DomainError(
                f"damping ratio must be non-negative, got {self.damping_ratio}"
            )


def db_ratio(x: float, y: float) -> float:
    """Amplitude ratio ``x / y`` in decibels (20 log10)."""
    if not (x > 0 and y > 0):
        raise DomainError(f"dB ratio needs positive amplitudes, got {x!r}, {y!r}")
    return 20.0 * math.log10(x / y)


def loglog_interp(freqs: np.ndarray, values: np.ndarray, f):
    """Log-log linear interpolation of ``values`` tabulated at ``freqs``.

    Segments touching a zero value cannot be drawn on log axes and fall back
    to linear interpolation in value against log frequency.  ``f`` outside
    ``[freqs[0], freqs[-1]]`` raises :class:`RangeError`.
    """
    f_arr = np.asarray(f, dtype=float)
    lo, hi = freqs[0], freqs[-1]
    # tolerate round-off on the end points of grids built elsewhere
    tol = 1e-9
    outside = (f_arr < lo * (1 - tol)) | (f_arr > hi * (1 + tol))
    if np.any(outside):
        bad = f_arr[outside].ravel()[0]
        raise RangeError(f"{bad:g} Hz lies outside the range [{lo:g}, {hi:g}] Hz")
    f_c = np.clip(f_arr, lo, hi)
    if freqs.size == 1:
        out = np.full(f_c.shape, values[0])
        return float(out) if out.ndim == 0 else out

    logf = np.log(freqs)
    x = np.log(f_c)
    idx = np.clip(np.searchsorted(logf, x, side="right") - 1, 0, freqs.size - 2)
    x0, x1 = logf[idx], logf[idx + 1]
    a0, a1 = values[idx], values[idx + 1]
    w = (x - x0) / (x1 - x0)
    positive = (a0 > 0) & (a1 > 0)
    loglog = np.exp(np.log(np.where(positive, a0, 1.0)) * (1 - w)
                    + np.log(np.where(positive, a1, 1.0)) * w)
    out = np.where(positive, loglog, a0 * (1 - w) + a1 * w)
    # stored values are returned exactly on grid points
    out = np.where(x == x0, a0, out)
    out = np.where(x == x1, a1, out)
    return float(out) if out.ndim == 0 else out


def interpolate_curve(curve: SrsCurve, f):
    """Evaluate ``curve`` at ``f`` (Hz) by log-log interpolation, no extrapolation."""
    return loglog_interp(curve.frequencies, curve.amplitudes, f)


def octave_grid(f_min: float, f_max: float, points_per_octave: int = 12) -> np.ndarray:
    """Geometric frequency grid ``f_min * 2**(k/ppo)`` reaching at least ``f_max``."""
    if not (0 < f_min < f_max) or not math.isfinite(f_max):
        raise DomainError(f"need 0 < f_min < f_max, got ({f_min}, {f_max})")
    if int(points_per_octave) != points_per_octave or points_per_octave < 1:
        raise DomainError(f"points_per_octave must be a positive integer, got {points_per_octave}")
    ppo = int(points_per_octave)
    # round-off guard so that exact octave multiples are not overshot
    n = math.ceil(ppo * math.log2(f_max / f_min) - 1e-9)
    return f_min * 2.0 ** (np.arange(n + 1) / ppo)
