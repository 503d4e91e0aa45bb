"""Command-line interface: ``cvesd classify | sweep | region-map | estimate``.

Exit codes
----------
0  success (for ``estimate``: the estimate is entangled beyond its error band)
2  usage or input error (bad flags, unreadable or malformed files)
3  unphysical state
4  too few samples
5  ``estimate`` only: PPT eigenvalue within its error band of 1
6  ``estimate`` only: estimate separable beyond its error band
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .channels import ChannelSpec, attenuate
from .criteria import SEPARABILITY_TOL, duan_sum, ppt_min_eigenvalue
from .cv_core import (
    PHYSICAL_TOL,
    NotTwinBeamError,
    TwinBeamVariances,
    UnphysicalStateError,
    embed,
    extract,
    purity,
    require_physical,
)
from .esd import DEFAULT_GRID, Classification, Region, classify, region_map, transmission_sweep
from .ingest import TooFewSamplesError, estimate_covariance, gaussianity_check, read_record
from .statefile import StateFileError, load_state, state_document

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNPHYSICAL = 3
EXIT_TOO_FEW = 4
EXIT_BOUNDARY = 5
EXIT_SEPARABLE = 6


class InputError(Exception):
    pass


def _num(x):
    """JSON/CSV-safe float: NaN and infinities become None."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------- input


def _inline_state(args):
    values = [args.p_minus, args.p_plus, args.q_plus, args.q_minus]
    if all(v is None for v in values):
        return None
    if any(v is None for v in values):
        raise InputError("inline state needs all of --p-minus, --p-plus, --q-plus, --q-minus")
    return TwinBeamVariances(*values)


def _states(args):
    """Return a list of ``(state, label)`` from --input or inline flags."""
    inline = _inline_state(args)
    inputs = args.input or []
    if inline is not None and inputs:
        raise InputError("give either --input or inline variance flags, not both")
    if inline is None and not inputs:
        raise InputError("no state given: use --input PATH or the inline variance flags")
    if inline is not None:
        return [(inline, "inline")]
    try:
        return [load_state(p) for p in inputs]
    except StateFileError as exc:
        raise InputError(str(exc)) from None


def _channel(args):
    try:
        return ChannelSpec(args.t1, args.t2)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _prepare(state, channel, tol):
    """Apply the channel and return ``(matrix, variances_or_None)``."""
    lossless = (channel.t1, channel.t2) == (1.0, 1.0)
    if isinstance(state, TwinBeamVariances):
        V = embed(state, tol)
        if lossless:
            return V, state
    else:
        V = require_physical(state, tol)
    if not lossless:
        V = attenuate(V, channel)
    try:
        return V, extract(V)
    except NotTwinBeamError:
        return V, None


# ---------------------------------------------------------------- output


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _dump_json(doc):
    return json.dumps(doc, indent=2) + "\n"


def _dump_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if x is None else (repr(x) if isinstance(x, float) else x) for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def classification_report(V, v, mode=1, n_points=DEFAULT_GRID, tol=PHYSICAL_TOL,
                          sep_tol=SEPARABILITY_TOL):
    """Everything ``classify`` prints about one state, as a flat dict."""
    result = classify(v if v is not None else V, mode=mode, n_points=n_points, tol=tol)
    duan = duan_sum(V)
    ppt = ppt_min_eigenvalue(V, sep_tol)
    report = {
        "region": result.region.label,
        "region_code": int(result.region),
        "decided_by": result.decided_by,
        "analytic_indeterminate": result.indeterminate,
        "duan_value": duan.value,
        "duan_violated": duan.violated,
        "nu_min": ppt.nu_min,
        "ppt_status": ppt.status,
        "purity": purity(V),
        "critical_t": result.critical_t,
        "mode": mode,
    }
    for key in ("w_sum", "w_bar_sum", "w_prod", "w_bar_prod", "esd_quantity"):
        report[key] = getattr(result.w, key) if result.w is not None else None
    return report


def cmd_classify(args):
    (state, label), = _states(args)
    channel = _channel(args)
    V, v = _prepare(state, channel, args.tol)
    report = {"label": label, "t1": channel.t1, "t2": channel.t2}
    report.update(classification_report(V, v, args.mode, args.grid, args.tol))
    report = {k: (_num(x) if isinstance(x, float) else x) for k, x in report.items()}
    if args.format == "csv":
        text = _dump_csv(list(report), [list(report.values())])
    else:
        text = _dump_json(report)
    _emit(text, _out_path(args.out))
    return EXIT_OK


def _out_path(out):
    return None if out in (None, "-") else Path(out)


def _sweep_text(curve, label, fmt):
    if fmt == "json":
        return _dump_json({
            "label": label,
            "mode": curve.mode,
            "n_points": curve.n_points,
            "crossings": curve.crossings(),
            "t": curve.t.tolist(),
            "nu_min": curve.nu_min.tolist(),
        })
    return _dump_csv(["T", "nu_min"], curve.rows())


def cmd_sweep(args):
    if args.grid < 2:
        raise InputError("--grid must be at least 2 for a sweep")
    states = _states(args)
    channel = _channel(args)
    curves, labels = [], []
    for state, label in states:
        V, _ = _prepare(state, channel, args.tol)
        curves.append(transmission_sweep(V, args.mode, args.grid, args.spacing))
        labels.append(label)
    if len(states) == 1:
        _emit(_sweep_text(curves[0], labels[0], args.format), _out_path(args.out))
    else:
        if args.out in (None, "-"):
            raise InputError("batch sweeps need --out DIRECTORY")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        seen = set()
        for curve, label in zip(curves, labels):
            name = label or "state"
            if name in seen:
                raise InputError(f"duplicate state label {name!r} in batch")
            seen.add(name)
            (outdir / f"{name}.{args.format}").write_text(_sweep_text(curve, label, args.format))
    if args.plot:
        from .plotting import plot_sweeps

        plot_sweeps(curves, labels, args.plot)
    return EXIT_OK


_MAP_COLUMNS = ["p_minus", "q_plus", "region_code", "region", "duan_violated", "decided_by",
                "nu_min", "w_prod", "esd_quantity", "critical_t"]


def _cell_row(pm, qp, cell, duan):
    w = cell.w
    return [pm, qp, int(cell.region), cell.region.label, int(duan), cell.decided_by,
            _num(cell.nu_min), _num(w.w_prod) if w else None,
            _num(w.esd_quantity) if w else None, _num(cell.critical_t)]


def cmd_region_map(args):
    n = args.grid
    m = args.grid_m if args.grid_m is not None else n
    try:
        rmap = region_map(tuple(args.p_minus_range), tuple(args.q_plus_range), tuple(args.fixed),
                          (n, m), args.mode, args.oracle_grid, args.tol)
    except UnphysicalStateError:
        raise
    except ValueError as exc:
        # bad ranges or grid sizes
        raise InputError(str(exc)) from None
    rows = [_cell_row(*r) for r in rmap.rows()]
    if args.format == "json":
        text = _dump_json({
            "fixed": {"p_plus": rmap.fixed[0], "q_minus": rmap.fixed[1]},
            "p_minus": rmap.p_minus.tolist(),
            "q_plus": rmap.q_plus.tolist(),
            "region_codes": {r.label: int(r) for r in Region},
            "codes": rmap.codes.tolist(),
            "cells": [dict(zip(_MAP_COLUMNS, row)) for row in rows],
        })
    else:
        text = _dump_csv(_MAP_COLUMNS, rows)
    _emit(text, _out_path(args.out))
    if args.plot:
        from .plotting import plot_region_map

        plot_region_map(rmap, args.plot)
    return EXIT_OK


def _band(nu, se, k):
    if not math.isfinite(se):
        se = 0.0
    if nu + k * se < 1:
        return "entangled"
    if nu - k * se >= 1:
        return "separable"
    return "boundary"


def cmd_estimate(args):
    if not args.input or len(args.input) != 1:
        raise InputError("estimate needs exactly one --input sample CSV")
    try:
        record = read_record(args.input[0])
    except OSError as exc:
        raise InputError(f"{args.input[0]}: {exc.strerror}") from None
    est = estimate_covariance(record, n_resamples=args.resamples, seed=args.seed,
                              min_samples=args.min_samples)
    tol = args.tol if args.tol is not None else max(1e-3, args.band_sigma * _num_or0(est.nu_phys_stderr))
    physical = est.is_physical(tol)
    gauss = gaussianity_check(record) if len(record) >= 100 else None
    band = _band(est.nu_min, est.nu_min_stderr, args.band_sigma)
    classification = None
    if physical:
        if band == "entangled":
            result = classify(est.matrix, mode=args.mode, n_points=args.grid, tol=tol)
        else:
            result = Classification(Region.SEPARABLE, "bootstrap-band", nu_min=est.nu_min)
        classification = result.as_dict()
    doc = state_document(est.matrix, record.label)
    doc.update({
        "stderr": [[_num(x) for x in row] for row in est.stderr],
        "n_samples": est.n_samples,
        "seed": args.seed,
        "resamples": args.resamples,
        "physical": bool(physical),
        "physical_tol": tol,
        "nu_symplectic_min": est.nu_phys,
        "nu_min": est.nu_min,
        "nu_min_stderr": _num(est.nu_min_stderr),
        "band": band,
        "band_sigma": args.band_sigma,
        "duan_value": duan_sum(est.matrix).value,
        "gaussianity": gauss.as_dict() if gauss is not None else None,
        "classification": classification,
    })
    if args.format == "csv":
        rows = [[i, j, float(est.matrix[i, j]), _num(est.stderr[i, j])]
                for i in range(4) for j in range(4)]
        text = _dump_csv(["row", "col", "value", "stderr"], rows)
    else:
        text = _dump_json(doc)
    _emit(text, _out_path(args.out))
    if not physical:
        print(f"unphysical estimate: smallest symplectic eigenvalue {est.nu_phys:.6g}",
              file=sys.stderr)
        return EXIT_UNPHYSICAL
    return {"entangled": EXIT_OK, "boundary": EXIT_BOUNDARY, "separable": EXIT_SEPARABLE}[band]


def _num_or0(x):
    return x if x is not None and math.isfinite(x) else 0.0


# ---------------------------------------------------------------- parser


def _add_state_flags(p, multiple=False):
    p.add_argument("--input", action="append", metavar="PATH",
                   help="state file (JSON)" + ("; repeat for a batch" if multiple else ""))
    for flag in ("p-minus", "p-plus", "q-plus", "q-minus"):
        p.add_argument(f"--{flag}", type=float, metavar="VAR")
    p.add_argument("--t1", type=float, default=1.0, help="transmission applied to mode 1 first")
    p.add_argument("--t2", type=float, default=1.0, help="transmission applied to mode 2 first")


def _add_common(p, fmt, grid=DEFAULT_GRID, tol=PHYSICAL_TOL):
    p.add_argument("--mode", type=int, choices=(1, 2), default=1, help="beam under attenuation")
    p.add_argument("--out", default="-", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--grid", type=int, default=grid)
    p.add_argument("--tol", type=float, default=tol, help="physicality tolerance")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvesd",
        description="Entanglement sudden death of two-mode Gaussian states in lossy channels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one state")
    _add_state_flags(p)
    _add_common(p, "json")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="PPT eigenvalue against single-beam transmission")
    _add_state_flags(p, multiple=True)
    _add_common(p, "csv")
    p.add_argument("--spacing", choices=("uniform", "mixed"), default="uniform")
    p.add_argument("--plot", metavar="PNG", help="also render the curve(s) to this file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("region-map", help="classify a grid of (p_minus, q_plus)")
    _add_common(p, "csv", grid=81)
    p.add_argument("--grid-m", type=int, help="q_plus points (default: same as --grid)")
    p.add_argument("--p-minus-range", type=float, nargs=2, default=(0.4, 0.8), metavar=("LO", "HI"))
    p.add_argument("--q-plus-range", type=float, nargs=2, default=(0.4, 2.4), metavar=("LO", "HI"))
    p.add_argument("--fixed", type=float, nargs=2, default=(2.1, 2.05),
                   metavar=("P_PLUS", "Q_MINUS"))
    p.add_argument("--oracle-grid", type=int, default=DEFAULT_GRID,
                   help="transmission points for oracle arbitration")
    p.add_argument("--plot", metavar="PNG", help="also render the map to this file")
    p.set_defaults(func=cmd_region_map)

    p = sub.add_parser("estimate", help="estimate and classify a state from quadrature samples")
    p.add_argument("--input", action="append", metavar="CSV", help="sample file p1,q1,p2,q2")
    _add_common(p, "json", tol=None)
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.add_argument("--resamples", type=int, default=200)
    p.add_argument("--min-samples", type=int, default=16)
    p.add_argument("--band-sigma", type=float, default=3.0,
                   help="error-band width in bootstrap standard errors")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnphysicalStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except TooFewSamplesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_FEW
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
