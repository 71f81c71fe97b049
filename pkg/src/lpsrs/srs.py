"""Shock response spectra via the ramp-invariant SDOF recursion.

The recursion (Smallwood's absolute-acceleration filter) is exact for base
accelerations that vary linearly between samples, costs O(n) per oscillator
and runs through :func:`scipy.signal.lfilter`.
"""

from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np
from scipy import signal

from .core import (
    DataError,
    DomainError,
    SdofParams,
    SpectrumKind,
    SrsCurve,
    TimeSeries,
    UndersampledWarning,
)

DEFAULT_DAMPING = 0.05
DEFAULT_PPO = 12
TAIL_DECAYS = 5.0
MIN_SAMPLES_PER_PERIOD = 10.0


def absacc_coefficients(natural_frequency: float, damping_ratio: float, dt: float):
    """``(b, a)`` of the ramp-invariant absolute-acceleration filter."""
    wn = 2.0 * math.pi * natural_frequency
    wd = wn * math.sqrt(1.0 - damping_ratio**2)
    E = math.exp(-damping_ratio * wn * dt)
    K = wd * dt
    C = E * math.cos(K)
    S = E * math.sin(K)
    Sp = S / K
    b = np.array([1.0 - Sp, 2.0 * (Sp - C), E * E - Sp])
    a = np.array([1.0, -2.0 * C, E * E])
    return b, a


def _check_rate(sample_rate: float, f_max: float):
    if sample_rate < MIN_SAMPLES_PER_PERIOD * f_max:
        warnings.warn(
            f"oscillator at {f_max:g} Hz has fewer than "
            f"{MIN_SAMPLES_PER_PERIOD:g} samples per period at {sample_rate:g} Hz",
            UndersampledWarning,
            stacklevel=3,
        )


def sdof_response(base: TimeSeries, p: SdofParams) -> TimeSeries:
    """Absolute acceleration of an oscillator mass driven by ``base`` from rest."""
    if not np.all(np.isfinite(base.samples)):
        raise DataError("base excitation contains non-finite samples")
    _check_rate(base.sample_rate, p.natural_frequency)
    b, a = absacc_coefficients(p.natural_frequency, p.damping_ratio, base.dt)
    return base.with_samples(signal.lfilter(b, a, base.samples))


def tail_length(frequency: float, damping_ratio: float, sample_rate: float) -> int:
    """Samples of free decay appended after a record: ``5/(xi*2*pi*f)`` seconds."""
    return math.ceil(TAIL_DECAYS / (damping_ratio * 2.0 * math.pi * frequency) * sample_rate)


def _peak(resp: np.ndarray, kind: SpectrumKind) -> float:
    if kind is SpectrumKind.ABSOLUTE:
        return float(np.max(np.abs(resp)))
    if kind is SpectrumKind.POSITIVE:
        return max(0.0, float(np.max(resp)))
    return max(0.0, float(-np.min(resp)))


def compute_srs(
    x: TimeSeries,
    grid: Sequence[float],
    damping_ratio: float = DEFAULT_DAMPING,
    kind: SpectrumKind | str = SpectrumKind.ABSOLUTE,
) -> SrsCurve:
    """Shock response spectrum of ``x`` on ``grid``.

    Parameters
    ----------
    x : TimeSeries
        Base acceleration record.
    grid : sequence of float
        Strictly increasing oscillator frequencies in Hz.
    damping_ratio : float
        Oscillator damping ratio, shared by all grid points.
    kind : SpectrumKind or str
        ``"absolute-max"`` (maximax), ``"positive-max"`` or ``"negative-max"``.

    Returns
    -------
    SrsCurve

    Notes
    -----
    Each oscillator sees the record followed by a zero tail of
    ``5/(xi*2*pi*f)`` seconds so that peaks in the residual (free decay)
    response are captured.
    """
    kind = SpectrumKind(kind)
    freqs = np.asarray(grid, dtype=float)
    if freqs.ndim != 1 or freqs.size == 0:
        raise DomainError("SRS grid is empty")
    if np.any(np.diff(freqs) <= 0) or np.any(freqs <= 0):
        raise DomainError("SRS grid must be positive and strictly increasing")
    if not (0.0 < damping_ratio < 1.0):
        raise DomainError(f"damping ratio must lie in (0, 1), got {damping_ratio}")
    _check_rate(x.sample_rate, freqs[-1])

    n = x.samples.size
    padded = np.zeros(n + tail_length(freqs[0], damping_ratio, x.sample_rate))
    padded[:n] = x.samples
    amps = np.empty(freqs.size)
    for j, f in enumerate(freqs):
        stop = n + tail_length(f, damping_ratio, x.sample_rate)
        b, a = absacc_coefficients(f, damping_ratio, x.dt)
        amps[j] = _peak(signal.lfilter(b, a, padded[:stop]), kind)
    return SrsCurve(freqs, amps, damping_ratio, kind)


def damped_harmonic_peak(damping_ratio: float) -> float:
    """``max_t exp(-xi*w*t)*|sin(w*t)|`` for a unit damped harmonic."""
    if damping_ratio == 0:
        return 1.0
    phase = math.atan(1.0 / damping_ratio)
    return math.exp(-damping_ratio * phase) * math.sin(phase)


def dynamic_amplification_record(beta: float, damping_ratio: float, excitation_damping: float,
                                 samples_per_period: int = 200, max_samples: int = 4_000_000):
    """Excitation record and oscillator used by :func:`dynamic_amplification`.

    The oscillator sits at 1 Hz and the damped-harmonic excitation at
    ``beta`` Hz.  The window spans 20 excitation periods or the time for the
    envelope to fall to 1e-4 of its initial value, whichever is longer,
    followed by a free-decay tail of the oscillator.
    """
    if not beta > 0:
        raise DomainError(f"frequency ratio must be positive, got {beta}")
    if not (0.0 < damping_ratio < 1.0):
        raise DomainError(f"damping ratio must lie in (0, 1), got {damping_ratio}")
    if not excitation_damping >= 0:
        raise DomainError("excitation damping must be non-negative")
    p = SdofParams(1.0, damping_ratio)
    f_exc = beta
    fs = samples_per_period * max(1.0, f_exc)
    window = 20.0 / f_exc
    if excitation_damping > 0:
        window = max(window, math.log(1e4) / (excitation_damping * 2.0 * math.pi * f_exc))
    window += TAIL_DECAYS / (damping_ratio * 2.0 * math.pi)
    n = min(max_samples, math.ceil(window * fs) + 1)
    t = np.arange(n) / fs
    w = 2.0 * math.pi * f_exc
    x = np.exp(-excitation_damping * w * t) * np.sin(w * t)
    return TimeSeries(fs, x), p


def dynamic_amplification(beta: float, damping_ratio: float = DEFAULT_DAMPING,
                          excitation_damping: float = DEFAULT_DAMPING) -> float:
    """Peak response over peak excitation for a damped-harmonic base input.

    ``beta`` is the excitation-to-oscillator frequency ratio.
    """
    base, p = dynamic_amplification_record(beta, damping_ratio, excitation_damping)
    resp = sdof_response(base, p)
    return resp.peak() / damped_harmonic_peak(excitation_damping)
