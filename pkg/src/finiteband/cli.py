"""Command-line front end.

Every subcommand reads JSON, writes JSON (and CSV for plot-ready grids),
and exits with 0 on success, 2 on invalid input, 3 on numerical failure.
All randomness derives from ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .covering import ContinuationError, PathError, RationalMap, monodromy
from .ergodic_operator import (
    ErgodicSystem,
    ValidationError,
    build_section,
    constant_system,
    symbol_curve_residual,
    symbol_matrix,
)
from .floquet import (
    BandSet,
    PeriodicJacobi,
    discriminant,
    dos_band_check,
    floquet_multipliers,
    spectrum_bands,
)
from .green_model import TModel, green_grid, trivial_basis_matrix
from .inverse_spectral import (
    FitError,
    TargetError,
    fit_discriminant,
    fit_residual,
    magic_formula_deviation,
    open_gaps,
    validate_target,
)
from .numerics import Poly

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


def _read_json(path):
    try:
        text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj, path):
    text = _dump(obj)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([v if isinstance(v, (int, str)) else f"{v:.17g}" for v in row])


def _parse_range(spec: str):
    try:
        lo, hi, n = spec.split(":")
        return float(lo), float(hi), int(n)
    except ValueError as exc:
        raise InputError(f"bad range {spec!r}, expected lo:hi:n") from exc


def _parse_complex(spec: str) -> complex:
    try:
        parts = [float(x) for x in spec.split(",")]
    except ValueError as exc:
        raise InputError(f"bad complex number {spec!r}") from exc
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise InputError(f"bad complex number {spec!r}")


def _load_operator(data):
    """Jacobi JSON ``{"a", "b"}`` or system JSON ``{"p", "d", "q"}``."""
    if isinstance(data, dict) and "a" in data:
        return PeriodicJacobi.from_json(data)
    if isinstance(data, dict) and "q" in data:
        return ErgodicSystem.from_json(data)
    raise InputError("expected a Jacobi {a, b} or system {p, d, q} object")


def _load_poly(data) -> Poly:
    try:
        return Poly.from_json(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_bands(args):
    op = _load_operator(_read_json(args.input))
    bands = spectrum_bands(op)
    _emit(bands.to_json(), args.out)
    report = {}
    if args.csv:
        lo, hi, n = _parse_range(args.grid) if args.grid else (bands.intervals[0][0] - 1, bands.intervals[-1][1] + 1, 401)
        zs = np.linspace(lo, hi, n)
        if isinstance(op, PeriodicJacobi) or (op.d == 1 and np.all(op.q.imag == 0)):
            J0 = op if isinstance(op, PeriodicJacobi) else PeriodicJacobi(op.q[1].real, op.q[0].real)
            delta = discriminant(J0)
            rows = [(z, delta(z).real, int(bands.contains(z))) for z in zs]
            _write_csv(args.csv, ["z", "delta", "in_band"], rows)
        else:
            sys_ = op
            rows = []
            for z in zs:
                beta = floquet_multipliers(sys_, z)
                rows.append((z, float(np.min(np.abs(np.log(np.abs(beta))))), int(bands.contains(z))))
            _write_csv(args.csv, ["z", "min_abs_log_multiplier", "in_band"], rows)
    if args.dos:
        report["dos_hausdorff"] = dos_band_check(op, args.dos)
    if args.compare:
        other = BandSet.from_json(_read_json(args.compare))
        report["max_endpoint_deviation"] = bands.max_endpoint_deviation(other)
    if report:
        sys.stderr.write(_dump(report))
    return EXIT_OK


def cmd_discriminant(args):
    J0 = PeriodicJacobi.from_json(_read_json(args.input))
    _emit(discriminant(J0).to_json(), args.out)
    return EXIT_OK


def cmd_fit(args):
    T = _load_poly(_read_json(args.target or args.input))
    problem = validate_target(T)
    tol = args.tol if args.tol is not None else 1e-10
    J0 = fit_discriminant(problem, seed=args.seed, tol=tol)
    _emit(J0.to_json(), args.out)
    d = T.degree
    margin = d * d
    N = max(args.N, 2 * margin + 10)
    dev, witness = magic_formula_deviation(J0, problem.T, N, margin)
    gaps = open_gaps(problem.T)
    report = {
        "residual": fit_residual(J0, problem.T),
        "magic_deviation": dev,
        "witness": list(witness),
        "N": N,
        "margin": margin,
        "open_gaps": [list(g) for g in gaps],
        "torus_dimension": len(gaps),
    }
    if args.report:
        _emit(report, args.report)
    else:
        sys.stderr.write(_dump(report))
    return EXIT_OK


def cmd_monodromy(args):
    f = RationalMap.from_json(_read_json(args.input))
    if f.degree < 2:
        raise InputError("map must have degree >= 2")
    h = monodromy(f, rng=args.seed)
    _emit(h.to_json(), args.out)
    if args.paths_csv:
        _write_csv(args.paths_csv, ["branch", "re", "im"], h.paths_csv_rows())
    return EXIT_OK


def cmd_model_check(args):
    d, n = args.d, args.window
    if d < 1 or n < 2 * d + 1:
        raise InputError("need d >= 1 and window >= 2d + 1")
    M = trivial_basis_matrix(d, n)
    J = build_section(constant_system(d, [0] * d + [1]), 0, n).entries
    dev = np.abs(M - J)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    _emit({"d": d, "window": [0, n], "max_deviation": float(dev[i, j]), "witness": [int(i), int(j)]}, args.out)
    return EXIT_OK


def cmd_green(args):
    T = _load_poly(_read_json(args.target or args.input))
    model = TModel(validate_target(T).T)
    report = {"degree": model.d}
    if args.grid:
        try:
            xs, ys = args.grid.split(",")
        except ValueError as exc:
            raise InputError("green --grid expects x0:x1:nx,y0:y1:ny") from exc
        xr, yr = _parse_range(xs), _parse_range(ys)
        re = np.linspace(*xr)
        im = np.linspace(*yr)
        G = green_grid(model.T, re, im)
        if args.csv:
            rows = ((re[i], im[j], G[j, i]) for j in range(im.size) for i in range(re.size))
            _write_csv(args.csv, ["re_u", "im_u", "G"], rows)
        report["grid_max"] = float(G.max())
        report["grid_shape"] = [int(im.size), int(re.size)]
    if args.at:
        u = _parse_complex(args.at)
        pts = [TModel(model.T, l).eval(u) for l in range(model.d)]
        report["branches"] = [
            {"l": l, "z": [p.z.real, p.z.imag], "b": [p.b.real, p.b.imag], "w": [p.w.real, p.w.imag],
             "G": -float(np.log(abs(p.b)))}
            for l, p in enumerate(pts)
        ]
    _emit(report, args.out)
    return EXIT_OK


def cmd_symbol_check(args):
    op = _load_operator(_read_json(args.input))
    sys_ = op.to_system() if isinstance(op, PeriodicJacobi) else op
    if args.b is not None and args.z is not None:
        res = symbol_curve_residual(sys_, _parse_complex(args.b), _parse_complex(args.z))
        _emit({"residual": res}, args.out)
        return EXIT_OK
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        b = args.radius * np.exp(2j * np.pi * rng.random())
        for ev in np.linalg.eigvals(symbol_matrix(sys_, b)):
            worst = max(worst, symbol_curve_residual(sys_, b, np.conj(ev)))
    tol = args.tol if args.tol is not None else 1e-10
    _emit({"samples": args.samples, "radius": args.radius, "max_residual": worst, "ok": worst < tol}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finiteband", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", help="input JSON file ('-' for stdin)")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--grid", help="grid spec lo:hi:n (green: x0:x1:nx,y0:y1:ny)")
        return p

    p = common(sub.add_parser("bands", help="band set of a periodic operator"))
    p.add_argument("--csv", help="write per-z sweep (z, Delta(z), in_band)")
    p.add_argument("--dos", type=int, help="compare with eigenvalues of an N x N section")
    p.add_argument("--compare", help="bands JSON to compare endpoints with")
    p.set_defaults(func=cmd_bands)

    p = common(sub.add_parser("discriminant", help="discriminant polynomial of a Jacobi matrix"))
    p.set_defaults(func=cmd_discriminant)

    p = common(sub.add_parser("fit", help="periodic Jacobi matrix with a given discriminant"))
    p.add_argument("--target", help="target polynomial JSON")
    p.add_argument("--report", help="write fit/magic-formula report here (default stderr)")
    p.add_argument("--N", type=int, default=300, help="truncation size for T(J0)")
    p.set_defaults(func=cmd_fit)

    p = common(sub.add_parser("monodromy", help="Hurwitz data of a rational map"))
    p.add_argument("--paths-csv", help="write loop polylines as CSV")
    p.set_defaults(func=cmd_monodromy)

    p = common(sub.add_parser("model-check", help="trivial functional model vs S^d + S^-d"))
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--window", type=int, default=20)
    p.set_defaults(func=cmd_model_check)

    p = common(sub.add_parser("green", help="Green's function grid and branch data for z = T(u)"))
    p.add_argument("--target", help="polynomial T JSON")
    p.add_argument("--csv", help="write (Re u, Im u, G) grid")
    p.add_argument("--at", help="evaluate all branches at u = re,im")
    p.set_defaults(func=cmd_green)

    p = common(sub.add_parser("symbol-check", help="residual of the symbol eigencondition"))
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--radius", type=float, default=0.7)
    p.add_argument("--b", help="b = re,im (with --z: single residual)")
    p.add_argument("--z", help="z = re,im")
    p.set_defaults(func=cmd_symbol_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValidationError, TargetError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (FitError, ContinuationError, PathError, np.linalg.LinAlgError, ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
