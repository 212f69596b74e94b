"""
Command-line front end.

    nonrad analyze   --source src.json --out DIR [--degree N] [--format csv|json]
    nonrad classify  --source src.json --out DIR [--rprime R'] [--tol t]
    nonrad farfield  --source src.json --out DIR [--ntheta 13 --nphi 24]
    nonrad fieldscan --source src.json --out DIR [--method direct|series]
    nonrad verify    [--out DIR]

Exit codes: 0 nonradiating / success, 1 radiating, 2 unreadable or
invalid input, 3 numerical failure or an inconsistent classification.
NONRAD_THREADS caps the worker threads of the field kernels.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .classify import ClassifyParams, classify
from .fields import farfield_csv, farfield_direct, field_direct, field_scan_csv, field_series
from .greens import WaveContext
from .multipole import coeff_table
from .sources import SOURCE_KINDS, default_descriptor, from_descriptor, source_rule

__all__ = ["main", "build_parser"]

log = logging.getLogger("nonrad")

EXIT_OK = 0
EXIT_RADIATING = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_EXPECTED = {
    "bessel_pair": "nonradiating",
    "bessel_single": "nonradiating",
    "curlcurl": "nonradiating",
    "gradient": "nonradiating",
    "dipole_ball": "radiating",
}


class InputError(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="nonrad", description="Nonradiating-source analysis")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, source_required=True):
        sp.add_argument("--source", required=source_required, help="JSON source descriptor")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--degree", type=int, default=None, help="truncation degree N")
        sp.add_argument("--tol", type=float, default=None, help="relative zero threshold")
        sp.add_argument("--rprime", type=float, default=None, help="near-field sphere radius")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("analyze", help="multipole coefficient table"))
    common(sub.add_parser("classify", help="run every characterization test"))
    ff = sub.add_parser("farfield", help="far-field pattern on a (theta, phi) grid")
    common(ff)
    ff.add_argument("--ntheta", type=int, default=13)
    ff.add_argument("--nphi", type=int, default=24)
    fs = sub.add_parser("fieldscan", help="exterior field on a Cartesian grid")
    common(fs)
    fs.add_argument("--extent", type=float, default=3.0, help="half-width of the grid in units of R")
    fs.add_argument("--points", type=int, default=7, help="grid points per axis")
    fs.add_argument("--method", choices=("direct", "series"), default="direct")
    common(sub.add_parser("verify", help="run the built-in example suite"), source_required=False)
    return p


def _load(args):
    try:
        with open(args.source) as fh:
            desc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.source}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {args.source}: {exc}") from None
    return _context(args, desc)


def _context(args, desc):
    try:
        ctx, src = from_descriptor(desc)
        N = ctx.N if args.degree is None else args.degree
        tol = ctx.tol if args.tol is None else args.tol
        ctx = WaveContext(ctx.kappa, ctx.R, N, tol)
        if args.rprime is not None and args.rprime <= ctx.R:
            raise ValueError("--rprime must exceed R")
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    return ctx, src


def _write(args, name, text):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    log.info("wrote %s", path)
    return path


def _json_dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_analyze(args):
    ctx, src = _load(args)
    table = coeff_table(src, ctx)
    if args.format == "csv":
        _write(args, "coefficients.csv", table.to_csv())
    else:
        rows = []
        for n in range(table.N + 1):
            for m in range(-n, n + 1):
                row = {"n": n, "m": m}
                for fam in ("alpha", "gamma", "zeta", "eta", "beta"):
                    arr = table.family(fam)
                    if arr is not None:
                        v = table.get(fam, n, m)
                        row[fam] = [[float(c.real), float(c.imag)] for c in v]
                rows.append(row)
        payload = {
            "N": table.N, "pairing": table.pairing, "source_scale": table.source_scale,
            "regularity": table.regularity.value, "coefficients": rows,
        }
        _write(args, "coefficients.json", _json_dump(payload))
    print(f"{src.name}: max|beta|/scale = {table.relative('beta'):.3e} (N={table.N})")
    return EXIT_OK


def _classify(args, ctx, src):
    params = ClassifyParams(Rprime=args.rprime)
    return classify(src, ctx, params)


def cmd_classify(args):
    ctx, src = _load(args)
    report = _classify(args, ctx, src)
    _write(args, "report.json", report.to_json())
    for name, t in report.tests().items():
        res = "-" if t.residual is None else f"{t.residual:.3e}"
        print(f"{name:15s} {res:>10s}  {t.verdict}")
    print(f"overall: {report.overall}")
    return {"nonradiating": EXIT_OK, "radiating": EXIT_RADIATING}.get(report.overall, EXIT_NUMERIC)


def cmd_farfield(args):
    ctx, src = _load(args)
    if args.ntheta < 1 or args.nphi < 1:
        raise InputError("--ntheta and --nphi must be positive")
    theta = np.linspace(0.0, math.pi, args.ntheta)
    phi = 2.0 * math.pi * np.arange(args.nphi) / args.nphi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    E = farfield_direct(src, ctx, source_rule(src, ctx), dirs)
    if args.format == "csv":
        _write(args, "farfield.csv", farfield_csv(T.ravel(), P.ravel(), E))
    else:
        rows = [{"theta": float(t), "phi": float(p), "E_inf": [[float(c.real), float(c.imag)] for c in e]}
                for t, p, e in zip(T.ravel(), P.ravel(), E)]
        _write(args, "farfield.json", _json_dump(rows))
    scale = max(float(np.max(np.linalg.norm(E, axis=1))), 0.0)
    print(f"{src.name}: max|E_inf| = {scale:.3e} over {len(dirs)} directions")
    return EXIT_OK


def cmd_fieldscan(args):
    ctx, src = _load(args)
    if args.points < 2 or args.extent <= 0:
        raise InputError("--points must be >= 2 and --extent positive")
    ax = np.linspace(-args.extent * ctx.R, args.extent * ctx.R, args.points)
    X = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    r = np.linalg.norm(X, axis=1)
    limit = ctx.R if args.method == "series" else src.support_radius
    X = X[r > limit + 0.05 * ctx.R]
    if args.method == "direct":
        E = field_direct(src, ctx, None, X)
    else:
        E = field_series(coeff_table(src, ctx), ctx, X)
    if args.format == "csv":
        _write(args, "fieldscan.csv", field_scan_csv(X, E, args.method))
    else:
        rows = [{"x": [float(c) for c in x], "E": [[float(c.real), float(c.imag)] for c in e],
                 "method": args.method} for x, e in zip(X, E)]
        _write(args, "fieldscan.json", _json_dump(rows))
    print(f"{src.name}: {len(X)} exterior samples, max|E| = {np.max(np.linalg.norm(E, axis=1)):.3e}")
    return EXIT_OK


def cmd_verify(args):
    rows = []
    ok = True
    for kind in SOURCE_KINDS:
        ctx, src = _context(args, default_descriptor(kind))
        report = _classify(args, ctx, src)
        want = _EXPECTED[kind]
        good = report.overall == want
        ok &= good
        rows.append((kind, report, want, good))
    names = list(rows[0][1].tests())
    short = {n: n.replace("nullspace_", "").replace("nearfield_", "")[:8] for n in names}
    print(f"{'source':14s} " + " ".join(f"{short[n]:>8s}" for n in names) + "  overall        expected")
    marks = {"pass": "pass", "fail": "FAIL", "not_applicable": "n/a"}
    summary = {}
    for kind, report, want, good in rows:
        cells = " ".join(f"{marks[t.verdict]:>8s}" for t in report.tests().values())
        flag = "ok" if good else "MISMATCH"
        print(f"{kind:14s} {cells}  {report.overall:13s}  {want} {flag}")
        summary[kind] = {"report": report.to_dict(), "expected": want, "ok": good}
    if args.out:
        _write(args, "verify.json", _json_dump(summary))
    return EXIT_OK if ok else EXIT_NUMERIC


_COMMANDS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "farfield": cmd_farfield,
    "fieldscan": cmd_fieldscan,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FloatingPointError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
