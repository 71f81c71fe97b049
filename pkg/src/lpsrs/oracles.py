"""Closed-form and brute-force references for the SDOF and modal machinery.

Nothing in here is used by the production SRS path; these functions exist
so the recursive engine and the transmissibility predictor can be checked
against something computed a different way.
"""

from __future__ import annotations

import math
import warnings
from typing import Iterable

import numpy as np
from scipy import signal

from .core import (
    AliasingError,
    DampedHarmonic,
    DomainError,
    ModalTable,
    SdofParams,
    TimeSeries,
)
from .srs import sdof_response


def _check_pulse_args(p0, k, t1):
    if p0 < 0 or k <= 0 or t1 <= 0:
        raise DomainError("need p0 >= 0, k > 0 and t1 > 0")


def rect_pulse_response(p0: float, k: float, p: SdofParams, t1: float, t):
    """Displacement and acceleration of an SDOF under a rectangular force pulse.

    Force ``p0`` acts on a spring of stiffness ``k`` for ``0 <= t <= t1``.
    Returns ``(u, u_ddot)`` evaluated at ``t`` (scalar or array).
    """
    _check_pulse_args(p0, k, t1)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    xi = p.damping_ratio
    w = p.omega
    wd = p.damped_omega
    r = math.sqrt(1.0 - xi**2)

    forced = t <= t1
    tf = np.where(forced, t, 0.0)
    e = np.exp(-xi * w * tf)
    c, s = np.cos(wd * tf), np.sin(wd * tf)
    u_forced = p0 / k * (1.0 - e * (c + xi / r * s))
    # Classical forced-phase acceleration; the leading sign is the one that
    # makes this the second derivative of u_forced.
    a_forced = -1.0 / (k * r) * e * p0 * (
        xi**2 * r * w**2 * c
        - 2 * xi**2 * w * wd * c
        - r * wd**2 * c
        + xi**3 * w**2 * s
        + 2 * xi * r * w * wd * s
        - xi * wd**2 * s
    )

    tr = np.where(forced, t1, t)
    e = np.exp(-tr * xi * w)
    E1 = math.exp(t1 * xi * w)
    c, s = np.cos(tr * wd), np.sin(tr * wd)
    c1, s1 = np.cos((tr - t1) * wd), np.sin((tr - t1) * wd)
    u_free = 1.0 / (k * wd * r) * e * p0 * (
        -r * wd * c + E1 * r * wd * c1 - xi * wd * s + E1 * xi * r * w * s1
    )
    a_free = 1.0 / (k * r * wd) * e * p0 * (
        -(xi**2) * r * w**2 * wd * c
        + 2 * xi**2 * w * wd**2 * c
        + r * wd**3 * c
        - E1 * xi**2 * r * w**2 * wd * c1
        - E1 * r * wd**3 * c1
        - xi**3 * w**2 * wd * s
        - 2 * xi * r * w * wd**2 * s
        + xi * wd**3 * s
        + E1 * xi**3 * r * w**3 * s1
        + E1 * xi * r * w * wd**2 * s1
    )
    u = np.where(forced, u_forced, u_free)
    a = np.where(forced, a_forced, a_free)
    if u.ndim == 0:
        return float(u), float(a)
    return u, a


def rect_pulse_response_lowdamp(p0: float, k: float, p: SdofParams, t1: float, t):
    """Acceleration under a rectangular pulse with ``w_D ~ w`` and ``xi**2 ~ 0``."""
    _check_pulse_args(p0, k, t1)
    xi = p.damping_ratio
    if xi > 0.05:
        warnings.warn(f"low-damping approximation used with xi = {xi:g} > 0.05",
                      stacklevel=2)
    t = np.asarray(t, dtype=float)
    w = p.omega
    scale = p0 * w**2 / k
    first = np.exp(-xi * w * t) * np.cos(w * t)
    late = np.maximum(t - t1, 0.0)
    second = np.exp(-xi * w * late) * np.cos(w * late)
    a = np.where(t <= t1, scale * first, scale * (first - second))
    return float(a) if a.ndim == 0 else a


def absacc_kernel(p: SdofParams, s: np.ndarray) -> np.ndarray:
    """Impulse response of absolute acceleration to base acceleration."""
    xi, w, wd = p.damping_ratio, p.omega, p.damped_omega
    return np.exp(-xi * w * s) / wd * (
        (wd**2 - xi**2 * w**2) * np.sin(wd * s) + 2 * xi * w * wd * np.cos(wd * s)
    )


def duhamel_response(base: TimeSeries, p: SdofParams) -> TimeSeries:
    """Absolute acceleration by trapezoid quadrature of the convolution integral.

    O(n log n) through FFT convolution; the quadrature weights are the plain
    trapezoid rule on the sample grid.
    """
    x = base.samples
    n = x.size
    dt = base.dt
    g = absacc_kernel(p, np.arange(n) * dt)
    full = signal.fftconvolve(x, g)[:n]
    # trapezoid end corrections: half weight on tau = 0 and tau = t
    resp = dt * (full - 0.5 * x[0] * g - 0.5 * x * g[0])
    resp[0] = 0.0
    return base.with_samples(resp)


def synth_shock(components: Iterable[DampedHarmonic], sample_rate: float,
                duration: float, start_time: float = 0.0) -> TimeSeries:
    """Sum of damped harmonics, each silent before its onset."""
    components = list(components)
    if duration <= 0:
        raise DomainError(f"duration must be positive, got {duration}")
    if components:
        f_top = max(c.frequency for c in components)
        if sample_rate <= 4.0 * f_top:
            raise AliasingError(
                f"{sample_rate:g} Hz cannot represent a {f_top:g} Hz component "
                "(need more than 4 samples per period)"
            )
    n = max(2, int(round(duration * sample_rate)) + 1)
    t = np.arange(n) / sample_rate
    x = np.zeros(n)
    for c in components:
        tau = t - c.onset_time
        on = tau >= 0
        w = 2.0 * math.pi * c.frequency
        x[on] += c.amplitude * np.exp(-c.damping_ratio * w * tau[on]) * np.sin(w * tau[on])
    return TimeSeries(sample_rate, x, start_time)


def modal_interface_response(base: TimeSeries, modal: ModalTable,
                             damping_ratio: float = 0.05) -> TimeSeries:
    """Response-point acceleration ``sum_n P_n phi_n zdd_n(t)``.

    Each mode is an SDOF oscillator at its natural frequency driven by the
    base record; summation follows mode order.
    """
    if len(modal) == 0:
        raise DomainError("modal table is empty")
    out = np.zeros(base.samples.size)
    for mode in modal:
        resp = sdof_response(base, SdofParams(mode.natural_frequency, damping_ratio))
        out += mode.gain * resp.samples
    return base.with_samples(out)
