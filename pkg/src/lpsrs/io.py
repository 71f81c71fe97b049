"""CSV/JSON readers and writers for records, curves, LPSRS sets and modal tables.

Numbers are written with 9 significant digits.  Curve and LPSRS files get a
JSON sidecar (``<file>.json``) carrying damping, spectrum kind, cut-offs,
platforms and the flags that produced them.  Every write goes to a temporary
file in the target directory and is renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DampedHarmonic,
    DataError,
    LpsrsSet,
    ModalTable,
    Mode,
    SpectrumKind,
    SrsCurve,
    TimeSeries,
)
from .transmissibility import FrfCurve, FrfSource

DIGITS = 9
TIME_HEADER = ("time_s", "accel_m_s2")
MODAL_HEADER = ("order", "freq_hz", "participation", "mode_shape", "eff_mass_kg")
FRF_HEADER = ("freq_hz", "magnitude")
SYNTH_HEADER = ("amplitude", "freq_hz", "damping", "onset_s")
JITTER_TOL = 1e-6


def fmt(value: float) -> str:
    return f"{value:.{DIGITS}g}"


def round_sig(value: float) -> float:
    return float(fmt(value))


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_rows(path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def write_json(path, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise DataError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from err


def _float(text: str, path, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{path}:{line}: column {column!r} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}:{line}: column {column!r} is not finite: {text!r}")
    return value


def _read_table(path, required: Sequence[str], optional: Sequence[str] = ()):
    """Rows of a headed CSV as dicts of floats, with 1-based file line numbers."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise DataError(f"{path}: missing column {missing[0]!r}")
        wanted = [c for c in (*required, *optional) if c in header]
        index = {c: header.index(c) for c in wanted}
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            rows.append((line, {c: _float(row[i], path, line, c) for c, i in index.items()}))
    return rows


# -- time series ------------------------------------------------------------

def read_timeseries(path, sample_rate: float | None = None) -> TimeSeries:
    """Read a record.

    Either a ``time_s,accel_m_s2`` CSV with uniform spacing (within 1e-6 of
    the sample interval plus the 9-digit print resolution of the time
    stamp), or a headerless single column when ``sample_rate`` is given.
    """
    with open(path, newline="") as fh:
        first = fh.readline()
    headed = first.strip().lower().startswith(TIME_HEADER[0])
    if not headed:
        if sample_rate is None:
            raise DataError(f"{path}: no '{','.join(TIME_HEADER)}' header; pass --fs for a single column")
        values = []
        with open(path, newline="") as fh:
            for line, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 1:
                    raise DataError(f"{path}:{line}: expected 1 field, got {len(row)}")
                values.append(_float(row[0], path, line, "accel"))
        if not values:
            raise DataError(f"{path}: no samples")
        return TimeSeries(sample_rate, np.array(values))

    rows = _read_table(path, TIME_HEADER)
    if len(rows) < 2:
        raise DataError(f"{path}: need at least two samples")
    t = np.array([r[TIME_HEADER[0]] for _, r in rows])
    x = np.array([r[TIME_HEADER[1]] for _, r in rows])
    k = np.arange(t.size)
    dt_fit, t0 = np.polyfit(k, t, 1)
    if not dt_fit > 0:
        raise DataError(f"{path}: time stamps must increase")
    fs = round_sig(1.0 / dt_fit)
    dt = 1.0 / fs
    t0 = round_sig(t0) if abs(t0) > 0.5 * dt * 1e-3 else 0.0
    ideal = t0 + k * dt
    tol = JITTER_TOL * dt + 10.0 ** (1 - DIGITS) * np.abs(ideal)
    bad = np.flatnonzero(np.abs(t - ideal) > tol)
    if bad.size:
        line = rows[bad[0]][0]
        raise DataError(f"{path}:{line}: time stamp breaks uniform spacing at {fs:g} Hz")
    if sample_rate is not None and abs(sample_rate - fs) > JITTER_TOL * fs:
        raise DataError(f"{path}: --fs {sample_rate:g} disagrees with the time column ({fs:g} Hz)")
    return TimeSeries(fs, x, t0)


def write_timeseries(path, x: TimeSeries) -> None:
    t = x.time
    _write_rows(path, TIME_HEADER, ((fmt(a), fmt(b)) for a, b in zip(t, x.samples)))


# -- curves -----------------------------------------------------------------

def _curve_meta(curve: SrsCurve) -> dict:
    return {"damping_ratio": curve.damping_ratio, "kind": curve.kind.value}


def write_curve(path, curve: SrsCurve, provenance: dict | None = None,
                column: str = "srs_m_s2") -> None:
    _write_rows(path, ("freq_hz", column),
                ((fmt(f), fmt(a)) for f, a in zip(curve.frequencies, curve.amplitudes)))
    meta = {"type": "srs", **_curve_meta(curve), "provenance": provenance or {}}
    write_json(sidecar_path(path), meta)


def read_curve(path, damping_ratio: float | None = None) -> SrsCurve:
    """Read a two-column curve; the sidecar, if present, supplies damping and kind."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if not header or len(header) < 2:
        raise DataError(f"{path}: need a header with a frequency and an amplitude column")
    header = [h.strip() for h in header]
    if header[0] != "freq_hz":
        raise DataError(f"{path}: missing column 'freq_hz'")
    rows = _read_table(path, header[:2])
    if not rows:
        raise DataError(f"{path}: no data rows")
    f = [r[header[0]] for _, r in rows]
    a = [r[header[1]] for _, r in rows]
    meta = read_json(sidecar_path(path)) if sidecar_path(path).exists() else {}
    xi = meta.get("damping_ratio", damping_ratio if damping_ratio is not None else 0.05)
    kind = meta.get("kind", SpectrumKind.ABSOLUTE.value)
    return SrsCurve(np.array(f), np.array(a), xi, kind)


def write_lpsrs(path, lp: LpsrsSet, provenance: dict | None = None) -> None:
    """One frequency column, then one column per LPSRS curve and per band curve.

    Cells past the end of a curve are left blank.
    """
    columns = [(f"lp_{fmt(fc)}", c) for fc, c in zip(lp.cutoffs, lp.curves)]
    if lp.band_curves is not None:
        columns += [(f"band_{fmt(fc)}", c) for fc, c in zip(lp.cutoffs, lp.band_curves)]
    freqs = max((c for _, c in columns), key=len).frequencies
    lookups = [dict(zip(map(fmt, c.frequencies), map(fmt, c.amplitudes))) for _, c in columns]
    rows = []
    for f in freqs:
        key = fmt(f)
        rows.append([key] + [lk.get(key, "") for lk in lookups])
    _write_rows(path, ["freq_hz"] + [name for name, _ in columns], rows)
    meta = {
        "type": "lpsrs",
        **_curve_meta(lp.curves[0]),
        "cutoffs_hz": list(lp.cutoffs),
        "platforms_m_s2": list(lp.platforms),
        "band_peaks_m_s2": None if lp.band_peaks is None else list(lp.band_peaks),
        "flat": None if lp.flat is None else list(lp.flat),
        "provenance": provenance or {},
    }
    write_json(sidecar_path(path), meta)


def read_lpsrs(path) -> LpsrsSet:
    side = sidecar_path(path)
    if not side.exists():
        raise DataError(f"{path}: LPSRS sidecar {side.name} not found")
    meta = read_json(side)
    for key in ("cutoffs_hz", "platforms_m_s2", "damping_ratio", "kind"):
        if key not in meta:
            raise DataError(f"{side}: missing field {key!r}")
    cutoffs = [float(c) for c in meta["cutoffs_hz"]]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if not header or header[0] != "freq_hz":
            raise DataError(f"{path}: missing column 'freq_hz'")
        data = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            data.append((reader.line_num, row))

    def column(name):
        if name not in header:
            raise DataError(f"{path}: missing column {name!r}")
        i = header.index(name)
        f, a = [], []
        for line, row in data:
            if row[i].strip() == "":
                continue
            f.append(_float(row[0], path, line, "freq_hz"))
            a.append(_float(row[i], path, line, name))
        return SrsCurve(np.array(f), np.array(a), meta["damping_ratio"], meta["kind"])

    curves = tuple(column(f"lp_{fmt(fc)}") for fc in cutoffs)
    bands = None
    if meta.get("band_peaks_m_s2") is not None:
        bands = tuple(column(f"band_{fmt(fc)}") for fc in cutoffs)
    return LpsrsSet(tuple(cutoffs), curves, tuple(meta["platforms_m_s2"]),
                    band_curves=bands, band_peaks=meta.get("band_peaks_m_s2"),
                    flat=meta.get("flat"))


# -- modal tables, FRFs, synthesis specs --------------------------------------

def read_modal(path) -> ModalTable:
    rows = _read_table(path, MODAL_HEADER[:4], MODAL_HEADER[4:])
    if not rows:
        raise DataError(f"{path}: modal table has no rows")
    modes = []
    for line, r in rows:
        order = r["order"]
        if order != int(order):
            raise DataError(f"{path}:{line}: column 'order' must be an integer")
        modes.append(Mode(int(order), r["freq_hz"], r["participation"], r["mode_shape"],
                          r.get("eff_mass_kg", 0.0)))
    return ModalTable(tuple(modes))


def write_modal(path, modal: ModalTable) -> None:
    _write_rows(path, MODAL_HEADER, (
        (str(m.order), fmt(m.natural_frequency), fmt(m.participation),
         fmt(m.mode_shape), fmt(m.effective_mass)) for m in modal))


def read_frf(path, source: FrfSource | str = FrfSource.TEST) -> FrfCurve:
    rows = _read_table(path, FRF_HEADER)
    if not rows:
        raise DataError(f"{path}: FRF has no rows")
    return FrfCurve(np.array([r["freq_hz"] for _, r in rows]),
                    np.array([r["magnitude"] for _, r in rows]), source)


def write_frf(path, frf: FrfCurve) -> None:
    _write_rows(path, FRF_HEADER,
                ((fmt(f), fmt(m)) for f, m in zip(frf.frequencies, frf.magnitudes)))


def read_components(path) -> list[DampedHarmonic]:
    """Damped-harmonic components, one per row; ``damping`` and ``onset_s`` are optional."""
    rows = _read_table(path, SYNTH_HEADER[:2], SYNTH_HEADER[2:])
    if not rows:
        raise DataError(f"{path}: component spec has no rows")
    return [DampedHarmonic(r["amplitude"], r["freq_hz"], r.get("damping", 0.0), r.get("onset_s", 0.0))
            for _, r in rows]
