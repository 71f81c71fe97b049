"""Component-interface shock prediction from an equipment LPSRS and modal data.

Two predictors live here.  The LPSRS predictor scales each band SRS of the
equipment interface by the band's modal gain::

    a_i  = sum_n |phi_n P_n A_in|
    a_if = (a_i / A_i) * A_if
    a_f  = sum_i a_if

The rule-of-thumb predictor multiplies the equipment SRS by a shock
transmissibility derived from a sine-sweep FRF.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    CoverageError,
    DataError,
    DomainError,
    InconsistencyError,
    LpsrsSet,
    ModalTable,
    RangeError,
    SrsCurve,
    interpolate_curve,
    loglog_interp,
)

log = logging.getLogger(__name__)

CORRIDOR_START = 2000.0
CORRIDOR_GAIN = 2.0


class Combiner(str, enum.Enum):
    ABS_SUM = "abs-sum"
    SRSS = "srss"


class FrfSource(str, enum.Enum):
    TEST = "test"
    FEM = "fem"


def upper_bound_abssum(srs_eq: SrsCurve, modal: ModalTable,
                       combiner: Combiner | str = Combiner.ABS_SUM) -> float:
    """Upper bound of the component-interface peak from the equipment SRS.

    ``abs-sum`` adds ``|P_n phi_n A_n|`` over modes; ``srss`` takes the root
    of the summed squares.  ``A_n`` is the SRS at the mode's frequency.
    """
    combiner = Combiner(combiner)
    if len(modal) == 0:
        raise DomainError("modal table is empty")
    terms = []
    for mode in modal:
        try:
            a_n = interpolate_curve(srs_eq, mode.natural_frequency)
        except RangeError as err:
            raise RangeError(f"mode {mode.order} at {mode.natural_frequency:g} Hz: {err}") from err
        terms.append(mode.gain * a_n)
    terms = np.array(terms)
    if combiner is Combiner.ABS_SUM:
        return math.fsum(np.abs(terms))
    return math.sqrt(math.fsum(terms**2))


def _band_curves(lpsrs_eq: LpsrsSet) -> tuple[SrsCurve, ...]:
    if lpsrs_eq.band_curves is None or lpsrs_eq.band_peaks is None:
        raise DataError("the equipment LPSRS carries no band curves; rebuild it with bands")
    return lpsrs_eq.band_curves


def _check_band(lpsrs_eq: LpsrsSet, i: int):
    if not 0 <= i < len(lpsrs_eq):
        raise DomainError(f"band index {i} out of range for {len(lpsrs_eq)} bands")


def modal_band_terms(lpsrs_eq: LpsrsSet, modal: ModalTable, i: int) -> np.ndarray:
    """``|phi_n P_n A_in|`` for every mode (zero for skipped modes)."""
    _check_band(lpsrs_eq, i)
    curve = _band_curves(lpsrs_eq)[i]
    terms = np.zeros(len(modal))
    for k, mode in enumerate(modal):
        f_n = mode.natural_frequency
        if not curve.f_min <= f_n <= curve.f_max:
            log.warning("mode %d at %g Hz is outside band %d curve [%g, %g] Hz; skipped",
                        mode.order, f_n, i, curve.f_min, curve.f_max)
            continue
        terms[k] = abs(mode.gain * interpolate_curve(curve, f_n))
    return terms


def predict_band_amplitude(lpsrs_eq: LpsrsSet, modal: ModalTable, i: int) -> float:
    """Peak of band ``i`` at the component interface, ``sum_n |phi_n P_n A_in|``.

    ``math.fsum`` rounds once, so the total does not depend on summation order.
    """
    return math.fsum(modal_band_terms(lpsrs_eq, modal, i))


def predict_band_srs(lpsrs_eq: LpsrsSet, modal: ModalTable, i: int,
                     grid: Sequence[float], band_amplitude: float | None = None) -> SrsCurve:
    """Band-``i`` equipment SRS scaled by ``a_i / A_i`` on ``grid``.

    ``A_i`` is the peak of the equipment band signal.  A band with no
    equipment content yields a zero curve.
    """
    curves = _band_curves(lpsrs_eq)
    _check_band(lpsrs_eq, i)
    a_i = predict_band_amplitude(lpsrs_eq, modal, i) if band_amplitude is None else band_amplitude
    big_a = lpsrs_eq.band_peaks[i]
    curve = curves[i]
    grid = np.asarray(grid, dtype=float)
    if big_a == 0:
        if a_i > 0:
            raise InconsistencyError(
                f"band {i} has no equipment content but a predicted amplitude of {a_i:g}"
            )
        return SrsCurve(grid, np.zeros(grid.size), curve.damping_ratio, curve.kind)
    return SrsCurve(grid, a_i / big_a * interpolate_curve(curve, grid),
                    curve.damping_ratio, curve.kind)


@dataclass(frozen=True)
class ComponentPrediction:
    srs: SrsCurve
    lpsrs: LpsrsSet
    band_amplitudes: tuple[float, ...]
    band_srs: tuple[SrsCurve, ...]


def predict_component(lpsrs_eq: LpsrsSet, modal: ModalTable,
                      grid: Sequence[float] | None = None) -> ComponentPrediction:
    """Predicted SRS and LPSRS at the component interface.

    ``srs`` is evaluated on ``grid`` (default: the band-curve grid).  The
    predicted LPSRS always uses the band-curve grid so each cumulative
    curve reaches its platform; its platforms are the running sums of the
    band amplitudes.
    """
    curves = _band_curves(lpsrs_eq)
    native = curves[0].frequencies
    grid = native if grid is None else np.asarray(grid, dtype=float)
    n = len(lpsrs_eq)
    a = [predict_band_amplitude(lpsrs_eq, modal, i) for i in range(n)]
    bands_native = [predict_band_srs(lpsrs_eq, modal, i, native, a[i]) for i in range(n)]
    bands_grid = [predict_band_srs(lpsrs_eq, modal, i, grid, a[i]) for i in range(n)]

    total = np.zeros(grid.size)
    for c in bands_grid:
        total += c.amplitudes
    ref = curves[0]
    srs = SrsCurve(grid, total, ref.damping_ratio, ref.kind)

    cumulative = np.zeros(native.size)
    lp_curves, platforms = [], []
    running = 0.0
    for i in range(n):
        cumulative = cumulative + bands_native[i].amplitudes
        running = math.fsum(a[: i + 1])
        lp_curves.append(SrsCurve(native, cumulative, ref.damping_ratio, ref.kind))
        platforms.append(running)
    lpsrs = LpsrsSet(lpsrs_eq.cutoffs, tuple(lp_curves), tuple(platforms),
                     band_curves=tuple(bands_native), band_peaks=tuple(a))
    return ComponentPrediction(srs, lpsrs, tuple(a), tuple(bands_grid))


@dataclass(frozen=True, eq=False)
class FrfCurve:
    """Sine-sweep transmissibility magnitude between the two interfaces."""

    frequencies: np.ndarray
    magnitudes: np.ndarray
    source: FrfSource = FrfSource.TEST

    def __post_init__(self):
        f = np.array(self.frequencies, dtype=float)
        m = np.array(self.magnitudes, dtype=float)
        if f.ndim != 1 or f.shape != m.shape or f.size == 0:
            raise DataError("FRF needs matching, non-empty frequency and magnitude arrays")
        if np.any(f <= 0) or np.any(np.diff(f) <= 0):
            raise DataError("FRF frequencies must be positive and strictly increasing")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise DataError("FRF magnitudes must be finite and non-negative")
        f.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "magnitudes", m)
        object.__setattr__(self, "source", FrfSource(self.source))

    def __call__(self, f):
        return loglog_interp(self.frequencies, self.magnitudes, f)


@dataclass(frozen=True, eq=False)
class TransmissibilityBounds:
    """Lower/upper shock transmissibility, defined from the FRF's first point to the transition."""

    frequencies: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    frf: FrfCurve
    f_transition: float
    corridor_start: float = CORRIDOR_START

    def evaluate(self, f) -> tuple[np.ndarray, np.ndarray]:
        f = np.atleast_1d(np.asarray(f, dtype=float))
        if np.any(f < self.frf.frequencies[0] * (1 - 1e-12)) or np.any(f > self.f_transition * (1 + 1e-12)):
            raise RangeError(
                f"bounds are defined on [{self.frf.frequencies[0]:g}, {self.f_transition:g}] Hz"
            )
        low = np.full(f.shape, CORRIDOR_GAIN)
        up = np.full(f.shape, CORRIDOR_GAIN)
        below = f < self.corridor_start
        if np.any(below):
            lo_b, up_b = _sine_bounds(self.frf(f[below]), self.frf.source)
            low[below] = lo_b
            up[below] = up_b
        return low, up


def _sine_bounds(frf_values, source: FrfSource):
    root = np.sqrt(frf_values)
    if source is FrfSource.TEST:
        return root, np.sqrt(2.0 * frf_values)
    return root, 2.0 * root


def ecss_tf_bounds(frf: FrfCurve, f_transition: float,
                   corridor_start: float = CORRIDOR_START) -> TransmissibilityBounds:
    """Shock transmissibility bounds from a sine-sweep FRF.

    Below ``corridor_start`` (2 kHz): ``sqrt(FRF)`` to ``sqrt(2 FRF)`` for a
    test FRF or ``2 sqrt(FRF)`` for an FE-computed one.  From there to
    ``f_transition`` both bounds are 2 (6 dB).  Nothing is defined past the
    transition frequency and the FRF is not extrapolated below its first
    point.
    """
    if not f_transition > corridor_start:
        raise DomainError(
            f"transition frequency {f_transition:g} Hz must exceed {corridor_start:g} Hz"
        )
    if frf.frequencies[0] >= corridor_start or frf.frequencies[-1] < corridor_start * (1 - 1e-12):
        raise CoverageError(
            f"FRF spans [{frf.frequencies[0]:g}, {frf.frequencies[-1]:g}] Hz and must "
            f"cover the band below {corridor_start:g} Hz"
        )
    below = frf.frequencies[frf.frequencies < corridor_start]
    grid = np.concatenate([below, [corridor_start, f_transition]])
    lo_b, up_b = _sine_bounds(frf.magnitudes[: below.size], frf.source)
    lower = np.concatenate([lo_b, [CORRIDOR_GAIN, CORRIDOR_GAIN]])
    upper = np.concatenate([up_b, [CORRIDOR_GAIN, CORRIDOR_GAIN]])
    for arr in (grid, lower, upper):
        arr.setflags(write=False)
    return TransmissibilityBounds(grid, lower, upper, frf, float(f_transition), corridor_start)


def ecss_predict_srs(srs_eq: SrsCurve, bounds: TransmissibilityBounds) -> tuple[SrsCurve, SrsCurve]:
    """Equipment SRS times the lower and upper transmissibility.

    Evaluated on the equipment grid, restricted to where the bounds exist.
    """
    f = srs_eq.frequencies
    keep = (f >= bounds.frf.frequencies[0] * (1 - 1e-12)) & (f <= bounds.f_transition * (1 + 1e-12))
    if not np.any(keep):
        raise RangeError("equipment SRS grid does not overlap the transmissibility bounds")
    f = f[keep]
    amps = srs_eq.amplitudes[keep]
    low, up = bounds.evaluate(f)
    return (SrsCurve(f, amps * low, srs_eq.damping_ratio, srs_eq.kind),
            SrsCurve(f, amps * up, srs_eq.damping_ratio, srs_eq.kind))
