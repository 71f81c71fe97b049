import json
import math

import numpy as np
import pytest

from lpsrs import DataError, TimeSeries
from lpsrs import io as lio
from lpsrs.cli import main, parse_cutoffs

from shocks import COMPONENT_MODES


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("LPSRS_CONFIG", raising=False)
    (tmp_path / "comp.csv").write_text("amplitude,freq_hz,damping\n300,1500,0.05\n900,5000,0.05\n")
    rows = "\n".join(",".join(str(v) for v in r) for r in COMPONENT_MODES[:6])
    (tmp_path / "modal.csv").write_text("order,freq_hz,participation,mode_shape,eff_mass_kg\n" + rows + "\n")
    assert main(["synth", "comp.csv", "--fs", "327680", "--duration", "0.05", "-o", "eq.csv"]) == 0
    return tmp_path


def test_cutoff_spec_expansion():
    assert parse_cutoffs("1024:32768:octave") == [1024, 2048, 4096, 8192, 16384, 32768]
    assert parse_cutoffs("100,200") == [100, 200]


def test_srs_command(work, capsys):
    assert main(["srs", "eq.csv", "--fmin", "100", "--fmax", "20000", "--ppo", "12", "-o", "s.csv"]) == 0
    curve = lio.read_curve(work / "s.csv")
    assert curve.frequencies[0] == 100 and curve.f_max >= 20000
    assert np.allclose(np.diff(np.log2(curve.frequencies)), 1 / 12)
    meta = json.loads((work / "s.csv.json").read_text())
    assert meta["damping_ratio"] == 0.05 and meta["kind"] == "absolute-max"


def test_srs_of_zero_record(work):
    lio.write_timeseries(work / "z.csv", TimeSeries(10_000, np.zeros(100)))
    assert main(["srs", "z.csv", "--fmin", "10", "--fmax", "500", "-o", "zs.csv"]) == 0
    assert not np.any(lio.read_curve(work / "zs.csv").amplitudes)


def test_headerless_input_needs_fs(work):
    (work / "raw.csv").write_text("0\n1\n0\n-1\n0\n")
    assert main(["srs", "raw.csv", "--fmin", "10", "--fmax", "100", "-o", "r.csv"]) == 2
    assert main(["srs", "raw.csv", "--fs", "1000", "--fmin", "10", "--fmax", "100", "-o", "r.csv"]) == 0


def test_malformed_row_reports_line(work, capsys):
    (work / "bad.csv").write_text("time_s,accel_m_s2\n0,1\n0.001,x\n")
    assert main(["srs", "bad.csv", "-o", "o.csv"]) == 2
    assert "bad.csv:3" in capsys.readouterr().err


def test_irregular_time_column(work, capsys):
    (work / "jit.csv").write_text("time_s,accel_m_s2\n0,1\n0.001,2\n0.0025,3\n0.003,1\n")
    assert main(["srs", "jit.csv", "-o", "o.csv"]) == 2
    assert "uniform spacing" in capsys.readouterr().err


def test_lpsrs_command_and_check(work, capsys):
    assert main(["lpsrs", "eq.csv", "--cutoffs", "1024:8192:octave", "--check", "-o", "lp.csv"]) == 0
    out = capsys.readouterr().out
    assert "band_lo_hz,band_hi_hz,band_peak_m_s2,platform_diff_m_s2,ratio_db" in out
    lp = lio.read_lpsrs(work / "lp.csv")
    assert lp.cutoffs == (1024, 2048, 4096, 8192) and len(lp.platforms) == 4


def test_lpsrs_single_cutoff(work, capsys):
    assert main(["lpsrs", "eq.csv", "--cutoffs", "8192", "--json", "-o", "one.csv"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["platforms_m_s2"] == payload["band_amplitudes_m_s2"]


def test_predict_command(work, capsys):
    assert main(["lpsrs", "eq.csv", "--cutoffs", "1024:8192:octave", "-o", "lp.csv"]) == 0
    capsys.readouterr()
    assert main(["predict", "lp.csv", "modal.csv", "--upper-bound", "abs-sum", "--json", "-o", "p.csv"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert (work / "p.csv").exists() and (work / "p_lpsrs.csv").exists()
    assert payload["upper_bound_m_s2"] > 0
    assert math.isclose(payload["platforms_m_s2"][-1], math.fsum(payload["band_amplitudes_m_s2"]))


def test_predict_missing_modal_column(work, capsys):
    assert main(["lpsrs", "eq.csv", "--cutoffs", "2048,4096", "-o", "lp.csv"]) == 0
    (work / "m.csv").write_text("order,freq_hz,participation\n1,100,0.5\n")
    assert main(["predict", "lp.csv", "m.csv", "-o", "p.csv"]) == 2
    assert "mode_shape" in capsys.readouterr().err


def test_ecss_command(work):
    assert main(["srs", "eq.csv", "--fmin", "100", "--fmax", "10000", "-o", "s.csv"]) == 0
    (work / "frf.csv").write_text("freq_hz,magnitude\n50,4\n3000,4\n")
    assert main(["ecss", "s.csv", "frf.csv", "--transition", "8000", "-o", "e.csv"]) == 0
    srs = lio.read_curve(work / "s.csv")
    lo, up = lio.read_curve(work / "e_lower.csv"), lio.read_curve(work / "e_upper.csv")
    below = lo.frequencies < 2000
    ref = srs(lo.frequencies[below])
    assert np.allclose(lo.amplitudes[below], 2 * ref, rtol=1e-8)
    assert np.allclose(up.amplitudes[below], math.sqrt(8) * ref, rtol=1e-8)
    assert main(["ecss", "s.csv", "frf.csv", "--transition", "8000", "--source", "fem", "-o", "f.csv"]) == 0
    assert np.allclose(lio.read_curve(work / "f_upper.csv").amplitudes[below], 4 * ref, rtol=1e-8)
    assert main(["ecss", "s.csv", "frf.csv", "--transition", "2000", "-o", "g.csv"]) == 2


def test_synth_with_modal(work):
    assert main(["synth", "comp.csv", "--fs", "327680", "--duration", "0.02", "--modal", "modal.csv",
                 "-o", "pair.csv"]) == 0
    assert (work / "pair_component.csv").exists()


def test_synth_empty_spec(work):
    (work / "empty.csv").write_text("amplitude,freq_hz\n")
    assert main(["synth", "empty.csv", "--fs", "1000", "--duration", "1", "-o", "y.csv"]) == 2


def test_filter_command(work):
    assert main(["filter", "eq.csv", "--lowpass", "2048", "-o", "lo.csv"]) == 0
    assert main(["filter", "eq.csv", "--bandpass", "2048", "8192", "-o", "bp.csv"]) == 0
    assert main(["filter", "eq.csv", "-o", "none.csv"]) == 2
    lo = lio.read_timeseries(work / "lo.csv")
    assert lo.sample_rate == 327680


def test_check_command(work, capsys):
    assert main(["check", "eq.csv", "--cutoffs", "1024:8192:octave"]) == 0
    out = capsys.readouterr().out
    assert "desynchronized=" in out


def test_numeric_failure_exit_code(work):
    # band with no equipment content but a forced prediction is a numeric inconsistency
    assert main(["lpsrs", "eq.csv", "--cutoffs", "2048,4096", "-o", "lp.csv"]) == 0
    meta = json.loads((work / "lp.csv.json").read_text())
    meta["band_peaks_m_s2"][0] = 0.0
    (work / "lp.csv.json").write_text(json.dumps(meta))
    assert main(["predict", "lp.csv", "modal.csv", "-o", "p.csv"]) == 3


def test_config_file_defaults(work, monkeypatch):
    (work / "cfg.json").write_text(json.dumps({"xi": 0.03, "ppo": 6}))
    monkeypatch.setenv("LPSRS_CONFIG", str(work / "cfg.json"))
    assert main(["srs", "eq.csv", "--fmin", "100", "--fmax", "1000", "-o", "c.csv"]) == 0
    curve = lio.read_curve(work / "c.csv")
    assert curve.damping_ratio == 0.03
    assert np.allclose(np.diff(np.log2(curve.frequencies)), 1 / 6)
    (work / "bad.json").write_text(json.dumps({"colour": 1}))
    monkeypatch.setenv("LPSRS_CONFIG", str(work / "bad.json"))
    assert main(["srs", "eq.csv", "-o", "c.csv"]) == 2


def test_round_trip_values(tmp_path):
    rng = np.random.default_rng(5)
    x = TimeSeries(1_310_720.0, rng.normal(scale=1e4, size=3000), 0.0)
    lio.write_timeseries(tmp_path / "x.csv", x)
    back = lio.read_timeseries(tmp_path / "x.csv")
    assert back.sample_rate == x.sample_rate
    assert np.array_equal(back.samples, [lio.round_sig(v) for v in x.samples])


def test_modal_reader_rejects_fractional_order(tmp_path):
    (tmp_path / "m.csv").write_text("order,freq_hz,participation,mode_shape\n1.5,100,1,1\n")
    with pytest.raises(DataError, match="order"):
        lio.read_modal(tmp_path / "m.csv")
