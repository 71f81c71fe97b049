"""Linear-phase FIR filters (Hamming-windowed sinc) with delay compensation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .core import ContractError, DomainError, InsufficientRateError, LpsrsError, TimeSeries

# Half-length of the filter in units of fs/cutoff.  The Hamming main lobe
# spans about 3.3*fs/N, so this puts the transition roughly between 0.85 and
# 1.15 times the cut-off.
TAPS_PER_RATIO = 5.0

SAMPLE_RATE_RATIO = 40.0


class FilterDesignError(LpsrsError):
    """A designed filter misses its band-edge targets."""


@dataclass(frozen=True, eq=False)
class FirFilter:
    taps: np.ndarray
    design_cutoffs: tuple[float, ...]
    design_sample_rate: float

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float, copy=True)
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "design_cutoffs", tuple(float(c) for c in self.design_cutoffs))

    @property
    def numtaps(self) -> int:
        return self.taps.size

    @property
    def group_delay(self) -> int:
        """Delay in samples, ``(N - 1) / 2``."""
        return (self.taps.size - 1) // 2

    @property
    def is_bandpass(self) -> bool:
        return len(self.design_cutoffs) == 2

    def response_db(self, freqs) -> np.ndarray:
        """Magnitude response in dB at ``freqs`` (Hz)."""
        freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
        _, h = signal.freqz(self.taps, worN=freqs, fs=self.design_sample_rate)
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(h))


def _numtaps(cutoff: float, sample_rate: float) -> int:
    return 2 * math.ceil(TAPS_PER_RATIO * sample_rate / cutoff) + 1


def _unit_lowpass(cutoff: float, sample_rate: float, numtaps: int) -> np.ndarray:
    taps = signal.firwin(numtaps, cutoff, window="hamming", fs=sample_rate)
    taps = 0.5 * (taps + taps[::-1])  # exact symmetry, firwin is only symmetric to rounding
    return taps / taps.sum()


def design_lowpass(cutoff: float, sample_rate: float) -> FirFilter:
    """Hamming-windowed sinc low-pass with unit DC gain.

    ``cutoff`` is the -6 dB point.  The design is checked on creation: at
    least -0.1 dB at ``0.8*cutoff`` and at most -40 dB at ``1.5*cutoff``
    (when that frequency is below Nyquist).
    """
    nyquist = sample_rate / 2.0
    if not (0 < cutoff < nyquist):
        raise DomainError(
            f"low-pass cut-off {cutoff:g} Hz must lie in (0, {nyquist:g}) Hz"
        )
    taps = _unit_lowpass(cutoff, sample_rate, _numtaps(cutoff, sample_rate))
    filt = FirFilter(taps, (cutoff,), sample_rate)
    _verify(filt, passband=[0.8 * cutoff], pass_db=-0.1, stopband=[1.5 * cutoff])
    return filt


def design_bandpass(f_lo: float, f_hi: float, sample_rate: float) -> FirFilter:
    """Band-pass formed as the difference of two low-passes of equal length.

    The length follows the lower edge, so both edges are at least as sharp
    as a low-pass at ``f_lo``.  Taps sum to zero.
    """
    nyquist = sample_rate / 2.0
    if not (0 < f_lo < f_hi < nyquist):
        raise DomainError(
            f"band ({f_lo:g}, {f_hi:g}) Hz must satisfy 0 < f_lo < f_hi < {nyquist:g} Hz"
        )
    n = _numtaps(f_lo, sample_rate)
    taps = _unit_lowpass(f_hi, sample_rate, n) - _unit_lowpass(f_lo, sample_rate, n)
    filt = FirFilter(taps, (f_lo, f_hi), sample_rate)
    _verify(filt, passband=[math.sqrt(f_lo * f_hi)], pass_db=-0.5,
            stopband=[f_lo / 1.5, 1.5 * f_hi])
    return filt


def _verify(filt: FirFilter, passband, pass_db, stopband, stop_db=-40.0):
    nyquist = filt.design_sample_rate / 2.0
    if np.any(filt.response_db(passband) < pass_db):
        raise FilterDesignError(f"passband loss exceeds {-pass_db} dB for {filt.design_cutoffs}")
    stopband = [f for f in stopband if f < nyquist]
    if stopband and np.any(filt.response_db(stopband) > stop_db):
        raise FilterDesignError(f"stopband rejection under {-stop_db} dB for {filt.design_cutoffs}")


def apply_compensated(x: TimeSeries, filt: FirFilter) -> TimeSeries:
    """Filter ``x`` and advance the result by the group delay.

    The record is zero-padded at both ends and the output keeps the input
    length, so features line up in time with the input.
    """
    if not math.isclose(x.sample_rate, filt.design_sample_rate, rel_tol=1e-12):
        raise ContractError(
            f"filter designed for {filt.design_sample_rate:g} Hz applied to a "
            f"{x.sample_rate:g} Hz record"
        )
    # 'same' keeps the centre of the full convolution, i.e. drops (N-1)/2
    # samples from the front: exactly the integer group delay for odd N.
    y = signal.fftconvolve(x.samples, filt.taps, mode="same")
    return x.with_samples(y)


def decimation_factor(sample_rate: float, cutoff: float,
                      ratio: float = SAMPLE_RATE_RATIO) -> int:
    """Largest integer factor keeping ``sample_rate / factor >= ratio * cutoff``."""
    if cutoff <= 0 or ratio <= 0:
        raise DomainError("cut-off and ratio must be positive")
    q = sample_rate / (ratio * cutoff)
    if q < 1 - 1e-12:
        raise InsufficientRateError(
            f"{sample_rate:g} Hz is below {ratio:g} x {cutoff:g} Hz; "
            "the record cannot honour the sample-rate ratio"
        )
    return max(1, math.floor(q + 1e-9))


def resample_for_cutoff(x: TimeSeries, cutoff: float,
                        ratio: float = SAMPLE_RATE_RATIO) -> TimeSeries:
    """Anti-alias at ``cutoff`` then decimate so the rate stays >= ``ratio*cutoff``."""
    q = decimation_factor(x.sample_rate, cutoff, ratio)
    filtered = apply_compensated(x, design_lowpass(cutoff, x.sample_rate))
    if q == 1:
        return filtered
    return TimeSeries(x.sample_rate / q, filtered.samples[::q], x.start_time)


def lowpass(x: TimeSeries, cutoff: float) -> TimeSeries:
    """Delay-compensated low-pass at the record's own rate."""
    return apply_compensated(x, design_lowpass(cutoff, x.sample_rate))


def bandpass(x: TimeSeries, f_lo: float, f_hi: float) -> TimeSeries:
    """Delay-compensated band-pass at the record's own rate."""
    return apply_compensated(x, design_bandpass(f_lo, f_hi, x.sample_rate))
