"""Command-line front end.

Exit codes: 0 success, 2 invalid input or options, 3 numeric failure.
Defaults for ``--xi``, ``--ppo`` and ``--kind`` may be set in a JSON file
named by ``LPSRS_CONFIG``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io as lio
from .builder import band_amplitudes, build_lpsrs, check_superposition, default_cutoffs
from .core import (
    DomainError,
    InconsistencyError,
    LpsrsError,
    SpectrumKind,
    octave_grid,
)
from .filters import FilterDesignError, bandpass, lowpass
from .oracles import modal_interface_response, synth_shock
from .srs import compute_srs
from .transmissibility import (
    Combiner,
    FrfSource,
    ecss_predict_srs,
    ecss_tf_bounds,
    predict_component,
    upper_bound_abssum,
)

CONFIG_ENV = "LPSRS_CONFIG"
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("lpsrs")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def load_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    cfg = lio.read_json(path)
    unknown = set(cfg) - {"xi", "ppo", "kind"}
    if unknown:
        raise DomainError(f"{path}: unknown config keys {sorted(unknown)}")
    return cfg


def parse_cutoffs(text: str) -> list[float]:
    """``lo:hi:octave`` or a comma-separated list of cut-offs in Hz."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or parts[2] != "octave":
            raise DomainError(f"cut-off spec {text!r} must look like LO:HI:octave")
        lo, hi = float(parts[0]), float(parts[1])
        if not 0 < lo <= hi:
            raise DomainError(f"cut-off spec {text!r} needs 0 < LO <= HI")
        n = math.floor(math.log2(hi / lo) + 1e-9)
        return [lo * 2.0**k for k in range(n + 1)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"cut-off list {text!r} is not numeric") from None


def _provenance(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func",) or value is None:
            continue
        out[key] = value if isinstance(value, (int, float, str, bool, list)) else str(value)
    return out


def _sibling(path, suffix: str) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


def _emit(args, payload: dict, table: list[list] | None = None, header=None):
    """Print a result summary on stdout as JSON or as CSV rows."""
    if args.json:
        print(json.dumps(payload, sort_keys=True))
        return
    if table is not None:
        print(",".join(header))
        for row in table:
            print(",".join(lio.fmt(v) if isinstance(v, float) else str(v) for v in row))


def _finite(values, what: str):
    if not np.all(np.isfinite(np.asarray(values, dtype=float))):
        raise FloatingPointError(f"{what} contains non-finite values")


# -- subcommands --------------------------------------------------------------

def cmd_srs(args):
    x = lio.read_timeseries(args.input, args.fs)
    fmax = args.fmax if args.fmax is not None else x.sample_rate / 10.0
    curve = compute_srs(x, octave_grid(args.fmin, fmax, args.ppo), args.xi, args.kind)
    _finite(curve.amplitudes, "SRS")
    lio.write_curve(args.output, curve, _provenance(args))
    _emit(args, {"output": str(args.output), "points": len(curve),
                 "peak_m_s2": float(curve.amplitudes.max())})


def _cutoffs_for(args, x):
    return parse_cutoffs(args.cutoffs) if args.cutoffs else default_cutoffs(x)


def _report_rows(rep):
    return [[lo, hi, a, d, r] for lo, hi, a, d, r in rep.rows()]


REPORT_HEADER = ["band_lo_hz", "band_hi_hz", "band_peak_m_s2", "platform_diff_m_s2", "ratio_db"]


def cmd_lpsrs(args):
    x = lio.read_timeseries(args.input, args.fs)
    cutoffs = _cutoffs_for(args, x)
    lp = build_lpsrs(x, cutoffs, args.xi, args.ppo, f_min=args.fmin, kind=args.kind)
    _finite(lp.platforms, "platforms")
    lio.write_lpsrs(args.output, lp, _provenance(args))
    bands = band_amplitudes(lp)
    payload = {"output": str(args.output), "cutoffs_hz": list(lp.cutoffs),
               "platforms_m_s2": list(lp.platforms), "band_amplitudes_m_s2": bands,
               "flat": list(lp.flat)}
    rows = [[fc, p, b, str(fl).lower()] for fc, p, b, fl in zip(lp.cutoffs, lp.platforms, bands, lp.flat)]
    header = ["cutoff_hz", "platform_m_s2", "band_amplitude_m_s2", "flat"]
    if args.check:
        rep = check_superposition(x, cutoffs, args.xi, args.ppo)
        payload["check"] = _report_payload(rep)
        _emit(args, payload, rows, header)
        if not args.json:
            print()
            _emit(args, {}, _report_rows(rep), REPORT_HEADER)
        return
    _emit(args, payload, rows, header)


def _report_payload(rep):
    return {"peak_m_s2": rep.peak, "band_peaks_m_s2": list(rep.band_peaks),
            "platform_differences_m_s2": list(rep.platform_differences),
            "band_ratio_db": list(rep.band_ratio_db), "band_sum_m_s2": rep.band_sum,
            "total_db": rep.total_db, "desynchronized": rep.desynchronized}


def cmd_check(args):
    x = lio.read_timeseries(args.input, args.fs)
    rep = check_superposition(x, _cutoffs_for(args, x), args.xi, args.ppo)
    _emit(args, _report_payload(rep), _report_rows(rep), REPORT_HEADER)
    if not args.json:
        print(f"# total {lio.fmt(rep.band_sum)} vs peak {lio.fmt(rep.peak)}: "
              f"{rep.total_db:.2f} dB; desynchronized={str(rep.desynchronized).lower()}")


def cmd_filter(args):
    x = lio.read_timeseries(args.input, args.fs)
    if (args.lowpass is None) == (args.bandpass is None):
        raise DomainError("give exactly one of --lowpass or --bandpass")
    y = lowpass(x, args.lowpass) if args.lowpass is not None else bandpass(x, *args.bandpass)
    _finite(y.samples, "filtered record")
    lio.write_timeseries(args.output, y)
    _emit(args, {"output": str(args.output), "peak_m_s2": y.peak()})


def cmd_predict(args):
    lp = lio.read_lpsrs(args.lpsrs)
    modal = lio.read_modal(args.modal)
    grid = None
    if args.fmin is not None or args.fmax is not None:
        native = lp.band_curves[0].frequencies if lp.band_curves else lp.curves[-1].frequencies
        lo = args.fmin if args.fmin is not None else native[0]
        hi = args.fmax if args.fmax is not None else native[-1]
        grid = octave_grid(lo, hi, args.ppo)
    pred = predict_component(lp, modal, grid)
    _finite(pred.srs.amplitudes, "predicted SRS")
    lp_out = args.lpsrs_output or _sibling(args.output, "lpsrs")
    lio.write_curve(args.output, pred.srs, _provenance(args))
    lio.write_lpsrs(lp_out, pred.lpsrs, _provenance(args))
    payload = {"srs_output": str(args.output), "lpsrs_output": str(lp_out),
               "band_amplitudes_m_s2": list(pred.band_amplitudes),
               "platforms_m_s2": list(pred.lpsrs.platforms)}
    rows = [[fc, a, p] for fc, a, p in zip(lp.cutoffs, pred.band_amplitudes, pred.lpsrs.platforms)]
    if args.upper_bound:
        payload["upper_bound_m_s2"] = upper_bound_abssum(lp.curves[-1], modal, args.upper_bound)
    _emit(args, payload, rows, ["cutoff_hz", "band_amplitude_m_s2", "platform_m_s2"])
    if args.upper_bound and not args.json:
        print(f"# upper bound ({args.upper_bound}): {lio.fmt(payload['upper_bound_m_s2'])} m/s^2")


def cmd_ecss(args):
    srs = lio.read_curve(args.srs, args.xi)
    frf = lio.read_frf(args.frf, args.source)
    bounds = ecss_tf_bounds(frf, args.transition)
    lower, upper = ecss_predict_srs(srs, bounds)
    lo_path, up_path = _sibling(args.output, "lower"), _sibling(args.output, "upper")
    lio.write_curve(lo_path, lower, _provenance(args))
    lio.write_curve(up_path, upper, _provenance(args))
    _emit(args, {"lower_output": str(lo_path), "upper_output": str(up_path),
                 "points": len(lower)})


def cmd_synth(args):
    comps = lio.read_components(args.spec)
    x = synth_shock(comps, args.fs, args.duration)
    lio.write_timeseries(args.output, x)
    payload = {"output": str(args.output), "samples": len(x), "peak_m_s2": x.peak()}
    if args.modal:
        modal = lio.read_modal(args.modal)
        y = modal_interface_response(x, modal, args.xi)
        _finite(y.samples, "component record")
        out = _sibling(args.output, "component")
        lio.write_timeseries(out, y)
        payload["component_output"] = str(out)
    _emit(args, payload)


# -- parser -------------------------------------------------------------------

def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    config = config or {}
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--xi", type=float, default=config.get("xi", 0.05),
                        help="oscillator damping ratio (default 0.05)")
    common.add_argument("--ppo", type=int, default=config.get("ppo", 12),
                        help="grid points per octave (default 12)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print the summary as JSON")
    fmt.add_argument("--csv", action="store_true", help="print the summary as CSV (default)")
    common.add_argument("-v", "--verbose", action="store_true")

    record = argparse.ArgumentParser(add_help=False)
    record.add_argument("input", help="time-series CSV")
    record.add_argument("--fs", type=float, help="sample rate for a headerless single-column file")

    kind = argparse.ArgumentParser(add_help=False)
    kind.add_argument("--kind", choices=[k.value for k in SpectrumKind],
                      default=config.get("kind", SpectrumKind.ABSOLUTE.value))

    p = _Parser(prog="lpsrs", description="Shock response spectra, LPSRS and shock transmissibility.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("srs", parents=[common, record, kind], help="shock response spectrum")
    s.add_argument("--fmin", type=float, default=100.0)
    s.add_argument("--fmax", type=float, help="default: sample rate / 10")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_srs)

    s = sub.add_parser("lpsrs", parents=[common, record, kind], help="low-pass-filtered SRS set")
    s.add_argument("--cutoffs", help="LO:HI:octave or a comma list (default: chosen from the record)")
    s.add_argument("--fmin", type=float, help="lowest SRS frequency (default: lowest cut-off / 16)")
    s.add_argument("--check", action="store_true", help="also print the superposition report")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_lpsrs)

    s = sub.add_parser("check", parents=[common, record], help="linear superposition report")
    s.add_argument("--cutoffs")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("filter", parents=[common, record], help="delay-compensated FIR filter")
    s.add_argument("--lowpass", type=float, metavar="FC")
    s.add_argument("--bandpass", type=float, nargs=2, metavar=("LO", "HI"))
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("predict", parents=[common], help="component-interface prediction")
    s.add_argument("lpsrs", help="equipment LPSRS CSV (with sidecar and band curves)")
    s.add_argument("modal", help="modal table CSV")
    s.add_argument("--fmin", type=float)
    s.add_argument("--fmax", type=float)
    s.add_argument("--upper-bound", choices=[c.value for c in Combiner])
    s.add_argument("-o", "--output", required=True, help="predicted SRS CSV")
    s.add_argument("--lpsrs-output", help="predicted LPSRS CSV (default: <output>_lpsrs.csv)")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("ecss", parents=[common], help="rule-of-thumb transmissibility prediction")
    s.add_argument("srs", help="equipment SRS CSV")
    s.add_argument("frf", help="sine-sweep FRF CSV (freq_hz,magnitude)")
    s.add_argument("--transition", type=float, required=True, help="transition frequency in Hz")
    s.add_argument("--source", choices=[c.value for c in FrfSource], default=FrfSource.TEST.value)
    s.add_argument("-o", "--output", required=True, help="stem; writes <stem>_lower and <stem>_upper")
    s.set_defaults(func=cmd_ecss)

    s = sub.add_parser("synth", parents=[common], help="synthesize a damped-harmonic shock")
    s.add_argument("spec", help="component CSV (amplitude,freq_hz[,damping][,onset_s])")
    s.add_argument("--fs", type=float, required=True)
    s.add_argument("--duration", type=float, required=True)
    s.add_argument("--modal", help="also write the modal-oracle component record")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser(load_config())
        args = parser.parse_args(argv)
    except UsageError as err:
        print(f"lpsrs: error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (LpsrsError, ValueError, OSError) as err:
        print(f"lpsrs: error: {err}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="lpsrs: %(levelname)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except (InconsistencyError, FilterDesignError, FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"lpsrs: numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LpsrsError, ValueError, OSError) as err:
        print(f"lpsrs: error: {err}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
