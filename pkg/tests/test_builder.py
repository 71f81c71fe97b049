import math
import warnings

import numpy as np
import pytest

from lpsrs import (
    ClampWarning,
    DampedHarmonic,
    LpsrsSet,
    PlatformQualityWarning,
    RangeError,
    SrsCurve,
    TimeSeries,
    band_amplitudes,
    band_decompose,
    build_lpsrs,
    check_superposition,
    default_cutoffs,
    extract_platform,
    lowpass_record,
    octave_grid,
    synth_shock,
)

FS = 327_680.0


@pytest.fixture(scope="module")
def two_tone():
    return synth_shock([DampedHarmonic(200, 700, 0.05), DampedHarmonic(800, 3000, 0.05)], FS, 0.03)


def test_six_octave_cutoffs():
    x = synth_shock([DampedHarmonic(100 * 4**k, 724 * 2**k, 0.05) for k in range(6)], 1_310_720, 0.02)
    lp = build_lpsrs(x, [1024 * 2**k for k in range(6)], with_bands=False)
    assert len(lp.curves) == 6 and len(lp.platforms) == 6
    assert all(c.f_max >= 5 * fc for c, fc in zip(lp.curves, lp.cutoffs))
    assert all(np.diff(lp.platforms) > 0)


def test_zero_record():
    lp = build_lpsrs(TimeSeries(FS, np.zeros(4000)), [1024, 2048])
    assert lp.platforms == (0.0, 0.0)
    assert all(not np.any(c.amplitudes) for c in lp.curves)
    assert lp.band_peaks == (0.0, 0.0)


def tone_burst(f, cycles=40, amplitude=500.0, fs=FS):
    """Hann-windowed sine: no net velocity change, spectrum confined near f."""
    n = int(cycles * fs / f)
    t = np.arange(n) / fs
    x = amplitude * np.hanning(n) * np.sin(2 * math.pi * f * t)
    return TimeSeries(fs, np.concatenate([np.zeros(200), x, np.zeros(2000)]))


def test_single_tone_sits_in_its_band():
    lp = build_lpsrs(tone_burst(3000), [2048, 4096], with_bands=False)
    assert lp.platforms[0] <= 0.05 * lp.platforms[1]


def test_sine_onset_harmonic_leaks_its_velocity_change():
    # a sine-onset damped harmonic carries a net velocity change A/w that
    # every low-pass keeps; the lower platform is its filtered peak
    x = synth_shock([DampedHarmonic(500, 3000, 0.05)], FS, 0.03)
    lp = build_lpsrs(x, [2048, 4096], with_bands=False)
    assert lp.platforms[0] == pytest.approx(lowpass_record(x, 2048).peak(), rel=0.05)
    assert 0.2 < lp.platforms[0] / lp.platforms[1] < 0.4


def test_platform_constant_tail():
    grid = octave_grid(100, 8000, 12)
    amps = np.where(grid < 3000, grid / 30, 42.0)
    plat = extract_platform(SrsCurve(grid, amps), 1000)
    assert plat.amplitude == 42.0 and plat.flat and plat.spread == 0.0


def test_platform_matches_filtered_peak(two_tone):
    fc = 4096.0
    lp = build_lpsrs(two_tone, [fc], with_bands=False)
    assert lp.platforms[0] == pytest.approx(lowpass_record(two_tone, fc).peak(), rel=0.05)


def test_platform_needs_five_times_cutoff():
    grid = octave_grid(100, 3000, 12)
    with pytest.raises(RangeError):
        extract_platform(SrsCurve(grid, np.ones(grid.size)), 1000)


def test_platform_flags_non_flat_window():
    grid = octave_grid(100, 8000, 12)
    amps = np.where(grid < 5000, 1.0, 1.0 + (grid - 5000) / 3000)
    with pytest.warns(PlatformQualityWarning):
        plat = extract_platform(SrsCurve(grid, amps), 1000)
    assert not plat.flat


def _set_with_platforms(platforms):
    grid = octave_grid(10, 1000, 3)
    curves = tuple(SrsCurve(grid, np.full(grid.size, p)) for p in platforms)
    return LpsrsSet(tuple(10.0 * 2**k for k in range(len(platforms))), curves, tuple(platforms))


def test_band_amplitudes_telescoping():
    assert band_amplitudes(_set_with_platforms([100, 300, 600])) == [100, 200, 300]


def test_band_amplitudes_clamp_negative():
    with pytest.warns(ClampWarning):
        assert band_amplitudes(_set_with_platforms([100, 90, 150])) == [100, 0.0, 60]


def test_band_decompose_reconstructs_lowpass(two_tone):
    cutoffs = [1024, 2048, 4096]
    diff = band_decompose(two_tone, cutoffs, mode="difference")
    low = sum(b.samples for b in diff)  # telescopes to the top low-pass
    for mode in ("difference", "bandpass"):
        bands = band_decompose(two_tone, cutoffs, mode=mode)
        assert len({b.sample_rate for b in bands}) == 1
        total = sum(b.samples for b in bands)
        rms = 20 * math.log10(np.sqrt(np.mean(total**2)) / np.sqrt(np.mean(low**2)))
        assert abs(rms) < 1.0


def test_band_decompose_isolates_in_band_sine():
    fs = 163_840.0
    t = np.arange(int(0.2 * fs)) / fs
    x = TimeSeries(fs, np.sin(2 * math.pi * 1500 * t))
    bands = band_decompose(x, [1024, 2048, 4096], mode="bandpass")
    peaks = [b.peak() for b in bands]
    # the padded edges carry the onset transient; compare the middle
    mid = [np.max(np.abs(b.samples[b.samples.size // 3: 2 * b.samples.size // 3])) for b in bands]
    assert 20 * math.log10(mid[1] / max(mid[0], mid[2])) > 20
    assert peaks[1] == max(peaks)


def test_band_decompose_zero():
    bands = band_decompose(TimeSeries(FS, np.zeros(3000)), [1024, 2048])
    assert all(not np.any(b.samples) for b in bands)


def test_superposition_single_band():
    rep = check_superposition(tone_burst(3000), [2048, 4096, 8192])
    assert abs(rep.total_db) < 0.5
    assert not rep.desynchronized


def test_superposition_desynchronised():
    x = synth_shock([DampedHarmonic(1000, 1448, 0.02, 0.0), DampedHarmonic(1000, 5793, 0.02, 0.01)],
                    FS, 0.04)
    rep = check_superposition(x, [2048, 4096, 8192])
    assert rep.total_db > 3
    assert rep.desynchronized
    rows = list(rep.rows())
    assert rows[0][0] == 0 and rows[-1][1] == 8192


def test_build_scales_linearly(two_tone):
    a = build_lpsrs(two_tone, [1024, 4096], with_bands=False)
    b = build_lpsrs(two_tone.with_samples(2.5 * two_tone.samples), [1024, 4096], with_bands=False)
    assert np.allclose(b.platforms, 2.5 * np.array(a.platforms), rtol=1e-12)


def test_build_annotates_cutoff():
    x = TimeSeries(8192, np.zeros(1000))
    with pytest.raises(Exception, match="1024"):
        build_lpsrs(x, [1024])


def test_default_cutoffs(two_tone):
    cut = default_cutoffs(two_tone)
    assert cut[-1] == 8192.0
    assert all(b == 2 * a for a, b in zip(cut, cut[1:]))
    assert cut[0] <= 512
