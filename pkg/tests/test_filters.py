import math

import numpy as np
import pytest

from lpsrs import (
    ContractError,
    DomainError,
    InsufficientRateError,
    TimeSeries,
    apply_compensated,
    decimation_factor,
    design_bandpass,
    design_lowpass,
    resample_for_cutoff,
)
from lpsrs.filters import bandpass, lowpass


def sine(fs, f, seconds, amplitude=1.0):
    t = np.arange(int(seconds * fs)) / fs
    return TimeSeries(fs, amplitude * np.sin(2 * math.pi * f * t))


@pytest.mark.parametrize("fc, fs", [(4096, 163_840), (1024, 40_960), (300, 48_000)])
def test_lowpass_unit_gain_and_symmetry(fc, fs):
    filt = design_lowpass(fc, fs)
    assert abs(filt.taps.sum() - 1) < 1e-9
    assert np.array_equal(filt.taps, filt.taps[::-1])
    assert filt.numtaps % 2 == 1
    assert filt.group_delay == (filt.numtaps - 1) // 2


def test_lowpass_stopband_at_1p5_cutoff():
    filt = design_lowpass(4096, 163_840)
    # frozen from the frequency response of the designed filter
    assert filt.response_db([6144.0])[0] <= -40.0
    assert filt.response_db([6144.0])[0] == pytest.approx(-60.7, abs=0.2)
    assert filt.response_db([0.8 * 4096])[0] >= -0.1


def test_lowpass_rejects_cutoff_at_nyquist():
    with pytest.raises(DomainError):
        design_lowpass(5000, 10_000)
    with pytest.raises(DomainError):
        design_lowpass(-1, 10_000)


def test_bandpass_zero_dc_and_passband():
    filt = design_bandpass(1200, 2400, 96_000)
    assert abs(filt.taps.sum()) < 1e-9
    assert np.array_equal(filt.taps, filt.taps[::-1])
    assert filt.is_bandpass
    centre = math.sqrt(1200 * 2400)
    x = sine(96_000, centre, 0.2)
    y = apply_compensated(x, filt)
    mid = slice(x.samples.size // 4, 3 * x.samples.size // 4)
    loss = 20 * math.log10(np.max(np.abs(y.samples[mid])) / np.max(np.abs(x.samples[mid])))
    assert loss >= -0.5


@pytest.mark.parametrize("lo, hi", [(2400, 1200), (1200, 60_000), (0, 100)])
def test_bandpass_rejects_bad_band(lo, hi):
    with pytest.raises(DomainError):
        design_bandpass(lo, hi, 96_000)


def test_apply_zero_in_zero_out():
    x = TimeSeries(40_960, np.zeros(1000))
    assert not np.any(apply_compensated(x, design_lowpass(1024, 40_960)).samples)


def test_apply_rate_mismatch():
    with pytest.raises(ContractError):
        apply_compensated(TimeSeries(1000, np.zeros(10)), design_lowpass(100, 2000))


def test_low_frequency_sine_aligned_and_preserved():
    fs, fc = 40_960, 1024
    x = sine(fs, fc / 10, 0.3)
    y = apply_compensated(x, design_lowpass(fc, fs))
    mid = slice(5000, 7000)
    lags = np.arange(-20, 21)
    corr = [np.dot(x.samples[mid], np.roll(y.samples, -k)[mid]) for k in lags]
    assert lags[int(np.argmax(corr))] == 0
    assert np.max(np.abs(y.samples[mid])) == pytest.approx(1.0, rel=0.01)


def test_sine_in_stopband_removed():
    fs, fc = 163_840, 1024
    x = sine(fs, 4 * fc, 0.1)
    filt = design_lowpass(fc, fs)
    y = apply_compensated(x, filt)
    # away from the abrupt start and end of the truncated sine
    steady = y.samples[filt.numtaps:-filt.numtaps]
    assert np.max(np.abs(steady)) < 0.01 * x.peak()


def test_decimation_examples():
    assert decimation_factor(1_310_720, 1024) == 32
    y = resample_for_cutoff(TimeSeries(1_310_720, np.zeros(4096)), 1024)
    assert y.sample_rate == 40_960
    assert decimation_factor(163_840, 4096) == 1
    assert resample_for_cutoff(TimeSeries(163_840, np.zeros(100)), 4096).sample_rate == 163_840
    with pytest.raises(InsufficientRateError):
        decimation_factor(8192, 1024)


def test_band_reconstruction_within_1db_rms():
    rng = np.random.default_rng(3)
    fs = 163_840
    x = TimeSeries(fs, rng.normal(size=16384))
    edges = [512, 1024, 2048, 4096]
    parts = [lowpass(x, edges[0])] + [bandpass(x, lo, hi) for lo, hi in zip(edges, edges[1:])]
    total = sum(p.samples for p in parts)
    ref = lowpass(x, edges[-1]).samples
    rms_db = 20 * math.log10(np.sqrt(np.mean(total**2)) / np.sqrt(np.mean(ref**2)))
    assert abs(rms_db) < 1.0


def test_lowpass_twice_is_nearly_once():
    fs, fc = 40_960, 1024
    x = sine(fs, 0.5 * fc, 0.3)
    once = lowpass(x, fc)
    twice = lowpass(once, fc)
    mid = slice(3000, 9000)
    diff_db = 20 * math.log10(np.max(np.abs(twice.samples[mid])) / np.max(np.abs(once.samples[mid])))
    assert abs(diff_db) < 0.2
