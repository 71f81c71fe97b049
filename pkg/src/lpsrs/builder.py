"""Low-pass-filter-based SRS (LPSRS) construction and band analysis."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import filters
from .core import (
    ClampWarning,
    DomainError,
    LpsrsSet,
    PlatformQualityWarning,
    RangeError,
    SpectrumKind,
    SrsCurve,
    TimeSeries,
    UndersampledWarning,
    db_ratio,
    octave_grid,
)
from .srs import DEFAULT_DAMPING, DEFAULT_PPO, compute_srs

PLATFORM_FACTOR = 5.0
# Curves run to this multiple of their cut-off so the platform window
# [5 fc, f_max] holds a dozen grid points at the default density.
CURVE_SPAN = 8.0
FLATNESS_TOL = 0.10


@dataclass(frozen=True)
class Platform:
    amplitude: float
    spread: float
    flat: bool

    def __float__(self):
        return self.amplitude


def _check_cutoffs(cutoffs: Sequence[float]) -> tuple[float, ...]:
    cutoffs = tuple(float(c) for c in cutoffs)
    if not cutoffs:
        raise DomainError("no cut-off frequencies given")
    if any(c <= 0 for c in cutoffs) or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise DomainError("cut-offs must be positive and strictly increasing")
    return cutoffs


def extract_platform(curve: SrsCurve, cutoff: float,
                     factor: float = PLATFORM_FACTOR,
                     tolerance: float = FLATNESS_TOL) -> Platform:
    """Median SRS level over ``[factor*cutoff, f_max]``.

    A :class:`PlatformQualityWarning` is issued, and ``flat`` is False, when
    the relative spread ``(max - min) / median`` of that window exceeds
    ``tolerance``.
    """
    start = factor * cutoff
    if curve.f_max < start * (1 - 1e-9):
        raise RangeError(
            f"curve ends at {curve.f_max:g} Hz, below {factor:g} x cut-off = {start:g} Hz"
        )
    window = curve.amplitudes[curve.frequencies >= start * (1 - 1e-9)]
    level = float(np.median(window))
    spread = float((window.max() - window.min()) / level) if level > 0 else 0.0
    flat = spread <= tolerance
    if not flat:
        warnings.warn(
            f"SRS for cut-off {cutoff:g} Hz varies by {100 * spread:.1f}% above "
            f"{start:g} Hz; platform reading is unreliable",
            PlatformQualityWarning,
            stacklevel=2,
        )
    return Platform(level, spread, flat)


def pad_record(x: TimeSeries, cutoff: float) -> TimeSeries:
    """Zero-extend ``x`` on both sides by the reach of two filters at ``cutoff``.

    The delay-compensated filters are non-causal; without the extension the
    pre-ringing ahead of an onset at the first sample would be cut off and
    the filtered record would start with a jump.
    """
    n = math.ceil(2 * filters.TAPS_PER_RATIO * x.sample_rate / cutoff) + 1
    samples = np.concatenate([np.zeros(n), x.samples, np.zeros(n)])
    return TimeSeries(x.sample_rate, samples, x.start_time - n / x.sample_rate)


def lowpass_record(x: TimeSeries, cutoff: float, pad: bool = True) -> TimeSeries:
    """Record at (at least) 40x ``cutoff``, low-pass filtered at ``cutoff``."""
    if pad:
        x = pad_record(x, cutoff)
    xr = filters.resample_for_cutoff(x, cutoff)
    return filters.lowpass(xr, cutoff)


def _annotate(err: Exception, cutoff: float) -> Exception:
    new = type(err)(f"cut-off {cutoff:g} Hz: {err}")
    new.__cause__ = err
    return new


def band_decompose(x: TimeSeries, cutoffs: Sequence[float],
                   mode: str = "difference") -> list[TimeSeries]:
    """Split ``x`` into bands ``(0, f_1), (f_1, f_2), ...`` at a common rate.

    The record is zero-extended first (see :func:`pad_record`), so the bands
    are longer than ``x`` and start earlier.  ``mode="difference"`` subtracts successive delay-compensated low-pass
    outputs; ``mode="bandpass"`` uses a band-pass filter per band (a
    low-pass for the first).  Both run at the rate chosen for the highest
    cut-off.
    """
    cutoffs = _check_cutoffs(cutoffs)
    if mode not in ("difference", "bandpass"):
        raise DomainError(f"unknown band mode {mode!r}")
    try:
        base = filters.resample_for_cutoff(pad_record(x, cutoffs[0]), cutoffs[-1])
    except Exception as err:
        raise _annotate(err, cutoffs[-1]) from err

    bands = []
    if mode == "difference":
        previous = np.zeros(base.samples.size)
        for fc in cutoffs:
            try:
                low = filters.lowpass(base, fc).samples
            except Exception as err:
                raise _annotate(err, fc) from err
            bands.append(base.with_samples(low - previous))
            previous = low
    else:
        lo = 0.0
        for fc in cutoffs:
            try:
                if lo == 0.0:
                    band = filters.lowpass(base, fc)
                else:
                    band = filters.bandpass(base, lo, fc)
            except Exception as err:
                raise _annotate(err, fc) from err
            bands.append(band)
            lo = fc
    return bands


def build_lpsrs(
    x: TimeSeries,
    cutoffs: Sequence[float],
    damping_ratio: float = DEFAULT_DAMPING,
    ppo: int = DEFAULT_PPO,
    f_min: float | None = None,
    kind: SpectrumKind | str = SpectrumKind.ABSOLUTE,
    span: float = CURVE_SPAN,
    with_bands: bool = True,
) -> LpsrsSet:
    """LPSRS of ``x``: one SRS per low-pass cut-off, overlaid.

    Each cut-off gets its own record resampled to 40x the cut-off and
    filtered at that cut-off; its SRS runs from ``f_min`` (default: the
    lowest cut-off / 16) to ``span`` times the cut-off on a shared octave
    grid, so curves for different cut-offs line up point for point.

    With ``with_bands`` the band signals (successive low-pass differences)
    and their SRS are stored as well; the transmissibility predictor needs
    them.
    """
    cutoffs = _check_cutoffs(cutoffs)
    if span < PLATFORM_FACTOR:
        raise DomainError(f"curve span must be at least {PLATFORM_FACTOR:g} x cut-off")
    if f_min is None:
        f_min = cutoffs[0] / 16.0
    if not (0 < f_min < cutoffs[0]):
        raise DomainError("f_min must be positive and below the lowest cut-off")

    curves, platforms, flat = [], [], []
    for fc in cutoffs:
        try:
            y = lowpass_record(x, fc)
            grid = octave_grid(f_min, span * fc, ppo)
            with warnings.catch_warnings():
                # the 40x rate puts the top of the platform window at fewer
                # than 10 samples per period by design
                warnings.simplefilter("ignore", UndersampledWarning)
                curve = compute_srs(y, grid, damping_ratio, kind)
        except Exception as err:
            raise _annotate(err, fc) from err
        plat = extract_platform(curve, fc)
        curves.append(curve)
        platforms.append(plat.amplitude)
        flat.append(plat.flat)

    band_curves = band_peaks = None
    if with_bands:
        bands = band_decompose(x, cutoffs, mode="difference")
        grid = octave_grid(f_min, span * cutoffs[-1], ppo)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UndersampledWarning)
            band_curves = [compute_srs(b, grid, damping_ratio, kind) for b in bands]
        band_peaks = [b.peak() for b in bands]

    return LpsrsSet(tuple(cutoffs), tuple(curves), tuple(platforms),
                    None if band_curves is None else tuple(band_curves),
                    None if band_peaks is None else tuple(band_peaks),
                    tuple(flat))


def band_amplitudes(lpsrs: LpsrsSet) -> list[float]:
    """Band amplitudes from neighbouring platform differences.

    The first band spans (0, f_1) and takes the first platform whole.
    Negative differences are clamped to zero with a :class:`ClampWarning`.
    """
    out = []
    previous = 0.0
    for fc, level in zip(lpsrs.cutoffs, lpsrs.platforms):
        diff = level - previous
        if diff < 0:
            warnings.warn(
                f"platform at {fc:g} Hz is below the previous one by {-diff:.4g}; "
                "band amplitude clamped to 0",
                ClampWarning,
                stacklevel=2,
            )
            diff = 0.0
        out.append(diff)
        previous = level
    return out


def default_cutoffs(x: TimeSeries, ratio: float = filters.SAMPLE_RATE_RATIO,
                    threshold: float = 0.01) -> list[float]:
    """One power-of-two cut-off per octave for ``x``.

    The highest is the largest power of two the record can low-pass while
    keeping 40 samples per cut-off period.  Octaves are added downwards while
    the low-passed peak stays above ``threshold`` of the record peak and the
    record still spans two periods of the cut-off.
    """
    top = 2.0 ** math.floor(math.log2(x.sample_rate / ratio))
    floor = 2.0 / max(x.duration, x.dt)
    peak = x.peak()
    cutoffs = [top]
    if peak == 0:
        return cutoffs
    fc = top / 2.0
    while fc >= floor:
        if lowpass_record(x, fc).peak() <= threshold * peak:
            break
        cutoffs.append(fc)
        fc /= 2.0
    return sorted(cutoffs)


@dataclass(frozen=True)
class SuperpositionReport:
    """Peak bookkeeping for the linear superposition check.

    ``band_peaks`` are peaks of band-pass filtered signals,
    ``platform_differences`` the neighbouring LPSRS platform differences and
    ``band_ratio_db`` compares the two band by band.  ``total_db`` compares
    the summed band peaks with the peak of the full low-passed record.
    """

    cutoffs: tuple[float, ...]
    peak: float
    band_peaks: tuple[float, ...]
    platform_differences: tuple[float, ...]
    band_ratio_db: tuple[float, ...]
    band_sum: float
    total_db: float
    peak_times: tuple[float, ...]
    desynchronized: bool

    @property
    def worst_band_db(self) -> float:
        return max(abs(r) for r in self.band_ratio_db)

    def rows(self):
        lo = 0.0
        for fc, a_i, diff, r in zip(self.cutoffs, self.band_peaks,
                                    self.platform_differences, self.band_ratio_db):
            yield (lo, fc, a_i, diff, r)
            lo = fc


def _safe_db(x: float, y: float) -> float:
    if x > 0 and y > 0:
        return db_ratio(x, y)
    if x == y:
        return 0.0
    return math.inf if x > y else -math.inf


def check_superposition(x: TimeSeries, cutoffs: Sequence[float],
                        damping_ratio: float = DEFAULT_DAMPING,
                        ppo: int = DEFAULT_PPO,
                        significance: float = 0.1) -> SuperpositionReport:
    """Compare band-pass peaks against LPSRS platform differences.

    Bands whose peak exceeds ``significance`` times the largest band peak
    count as significant.  The report is flagged as desynchronised when
    their peak times spread over more than one period of the lowest
    significant band's upper cut-off.
    """
    cutoffs = _check_cutoffs(cutoffs)
    top = lowpass_record(x, cutoffs[-1])
    peak = top.peak()
    bands = band_decompose(x, cutoffs, mode="bandpass")
    band_peaks = [b.peak() for b in bands]
    peak_times = [float(b.time[np.argmax(np.abs(b.samples))]) for b in bands]

    lp = build_lpsrs(x, cutoffs, damping_ratio, ppo, with_bands=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClampWarning)
        diffs = band_amplitudes(lp)

    ratios = [_safe_db(a, d) for a, d in zip(band_peaks, diffs)]
    band_sum = float(sum(band_peaks))
    total = _safe_db(band_sum, peak)

    largest = max(band_peaks)
    significant = [i for i, a in enumerate(band_peaks)
                   if largest > 0 and a >= significance * largest]
    desync = False
    if len(significant) > 1:
        times = [peak_times[i] for i in significant]
        period = 1.0 / cutoffs[significant[0]]
        desync = (max(times) - min(times)) > period

    return SuperpositionReport(
        cutoffs=cutoffs,
        peak=peak,
        band_peaks=tuple(band_peaks),
        platform_differences=tuple(diffs),
        band_ratio_db=tuple(ratios),
        band_sum=band_sum,
        total_db=total,
        peak_times=tuple(peak_times),
        desynchronized=desync,
    )
