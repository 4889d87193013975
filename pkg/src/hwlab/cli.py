"""Command-line front end.

Exit codes: 0 success, 2 residual above tolerance, 3 mathematically
inadmissible input (not an eigenvalue, chain outside L^2, kernel not
triangular), 64 usage error, 65 malformed data file, 73 output not writable.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import (
    HWLabError,
    IndexUndefined,
    InvalidArgument,
    KernelFormatError,
    NotInAlgLat,
    NotInL2,
    WordSyntaxError,
)

EXIT_OK, EXIT_RESIDUAL, EXIT_INADMISSIBLE = 0, 2, 3
EXIT_USAGE, EXIT_DATA, EXIT_CANTCREAT = 64, 65, 73

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>[+-]?{_NUM})?(?:(?P<im>[+-]?(?:{_NUM})?)i)?$")


class UsageError(Exception):
    def __init__(self, message, usage=None):
        super().__init__(message)
        self.usage = usage


def parse_complex(text):
    """``a+bi`` with optional signs and no whitespace: ``1``, ``-0.5``, ``1-0.7i``, ``i``."""
    m = _COMPLEX.match(text or "")
    if not text or not m or (m.group("re") is None and m.group("im") is None):
        raise UsageError(f"cannot parse complex number {text!r}")
    re_, im = m.group("re"), m.group("im")
    if re_ is not None and im == "":
        re_, im = None, re_  # "2i": the coefficient was taken as a real part
    if im in ("", "+"):
        im = "1"
    elif im == "-":
        im = "-1"
    return complex(float(re_ or 0.0), float(im or 0.0))


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


# ------------------------------------------------------------------ output


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(float(obj.real)), _plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def dumps(obj):
    """Deterministic JSON: sorted keys, complex as ``[re, im]``, fractions as strings."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{float(v.real)!r}{float(v.imag):+.17g}i"
    return str(v)


def _emit(args, payload, header=None, rows=None):
    if getattr(args, "format", "json") == "csv" and header is not None:
        text = _csv(header, rows)
    else:
        text = dumps(payload)
    _write(text, getattr(args, "out", None))


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _CantCreate(f"cannot write {path}: {exc.strerror}") from exc


class _CantCreate(Exception):
    pass


# ---------------------------------------------------------------- commands


def _eigen_grid(form, order, grading):
    from .quadrature import CompositeGraded, GeometricGraded, make_grid

    if grading == "tanh_sinh":
        return form.default_grid(order)
    if grading == "geometric":
        return make_grid(order, GeometricGraded(endpoint=form.singular_point))
    return make_grid(order, CompositeGraded(endpoint=form.singular_point))


def cmd_eigencheck(args):
    from .eigen import classify, eigenfunction
    from .operators import OperatorId, residual

    lam = parse_complex(args.lam)
    verdict = classify(lam)
    if verdict == "none":
        _emit(args, {"lambda": lam, "verdict": "none", "reason": "not-an-eigenvalue"})
        return EXIT_INADMISSIBLE
    f = eigenfunction(lam)
    grid = _eigen_grid(f, args.order, args.grading)
    res = residual(OperatorId("Z", lam), f, grid=grid)
    ok = res < args.tol
    payload = {
        "lambda": lam,
        "verdict": verdict,
        "eigenfunction": repr(f),
        "residual": res,
        "tolerance": args.tol,
        "pass": ok,
        "grid": {"scheme": grid.scheme.name, "order": grid.order, "anchor": f.singular_point},
    }
    _emit(args, payload, ["lambda", "verdict", "residual", "scheme", "order", "pass"],
          [[lam, verdict, res, grid.scheme.name, grid.order, ok]])
    return EXIT_OK if ok else EXIT_RESIDUAL


def cmd_chain(args):
    from .eigen import chain_numeric, chain_zero, chain_zero_family, growth_bound_check

    lam = parse_complex(args.lam)
    if args.m < 0:
        raise UsageError("--m must be non-negative")
    if lam == 0:
        polys = chain_zero(args.m)
        res = chain_zero_family(args.m).residuals()
        rows = []
        for n, (p, r) in enumerate(zip(polys, res)):
            rows.append({
                "n": n, "p": str(p), "coefficients": {str(k): c for k, c in p.coeffs},
                "degree": p.degree, "valuation": p.valuation, "residual": r,
            })
        ok = max(res) < args.tol
        _emit(args, {"lambda": lam, "m": args.m, "members": rows, "tolerance": args.tol, "pass": ok},
              ["n", "p", "degree", "valuation", "residual"],
              [[r["n"], r["p"], r["degree"], r["valuation"], r["residual"]] for r in rows])
        return EXIT_OK if ok else EXIT_RESIDUAL
    if args.m < 1:
        raise UsageError("--m must be at least 1 away from lambda = 0")
    try:
        fam = chain_numeric(lam, args.m)
    except NotInL2 as exc:
        print(f"hwlab chain: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except InvalidArgument as exc:
        print(f"hwlab chain: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    res = fam.residuals()
    growth = growth_bound_check(fam)
    rows = [{"n": n, "residual": r, "growth": g, "bound": b, "within_bound": g <= b}
            for (n, g, b), r in zip(growth, res)]
    ok = max(res) < args.tol and all(r["within_bound"] for r in rows)
    _emit(args, {"lambda": lam, "m": args.m, "members": rows, "tolerance": args.tol, "pass": ok},
          ["n", "residual", "growth", "bound"],
          [[r["n"], r["residual"], r["growth"], r["bound"]] for r in rows])
    return EXIT_OK if ok else EXIT_RESIDUAL


def cmd_symbol(args):
    from .calkin import essential_spectrum, fredholm_index, symbol_of
    from .words import parse_word

    word = parse_word(args.word)
    f = symbol_of(word)
    index = {}
    for text in args.index_at or []:
        lam = parse_complex(text)
        try:
            index[text] = fredholm_index(f, lam)
        except IndexUndefined:
            index[text] = "undefined: essential"
    ess = essential_spectrum(f, args.samples)
    payload = {"word": str(word), "symbol": f.as_json(), "index": index,
               "essential_spectrum": [complex(z) for z in ess]}
    _emit(args, payload)
    return EXIT_OK


def _svg(result, grid):
    (x0, x1), (y0, y1) = grid.re_range, grid.im_range
    dx = (x1 - x0) / (grid.nx - 1)
    dy = (y1 - y0) / (grid.ny - 1)
    logs = np.log10(np.maximum(result.sigma_min, 1e-16))
    lo, hi = -4.0, max(0.5, float(logs.max()))
    shade = np.clip((logs - lo) / (hi - lo), 0.0, 1.0)
    w, h = x1 - x0 + dx, y1 - y0 + dy
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{int(200 * w)}" height="{int(200 * h)}" '
        f'viewBox="{x0 - dx / 2:.6g} {-(y1 + dy / 2):.6g} {w:.6g} {h:.6g}">',
        f"<title>sigma_min(A_N - lambda), N={result.N}</title>",
        '<g transform="scale(1,-1)">',
        '<g stroke="none">',
    ]
    for z, v in zip(result.points, shade):
        g = int(round(255 * v))
        out.append(
            f'<rect x="{z.real - dx / 2:.6g}" y="{z.imag - dy / 2:.6g}" width="{dx:.6g}" '
            f'height="{dy:.6g}" fill="rgb({g},{g},255)"/>'
        )
    out += [
        "</g>",
        '<g fill="none" stroke="black" stroke-width="0.02">',
        '<circle cx="1" cy="0" r="1"/>',
        '<line x1="-1" y1="0" x2="0" y2="0"/>',
        "</g>",
        "</g>",
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def cmd_scan(args):
    from .scan import ScanGrid, pseudospectrum

    try:
        grid = ScanGrid((args.re_min, args.re_max), (args.im_min, args.im_max), args.nx, args.ny)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from exc
    fmt = args.format or ("svg" if (args.out or "").endswith(".svg") else "csv")
    result = pseudospectrum(args.word, grid, args.N)
    if fmt == "svg":
        text = _svg(result, grid)
    elif fmt == "json":
        text = dumps({"N": result.N, "basis": result.basis, "word": args.word,
                      "points": [[r, i, s] for r, i, s in result.as_rows()]})
    else:
        text = _csv(["re", "im", "sigma_min"], result.as_rows())
    _write(text, args.out)
    return EXIT_OK


def cmd_compact_approx(args):
    from .alglat import KernelFunction, dyadic_approximation, load_kernel_csv, volterra_kernel

    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    if args.kernel:
        kernel = load_kernel_csv(args.kernel)
        N = kernel.samples.shape[0]
    elif args.builtin == "volterra":
        kernel, N = volterra_kernel(), args.N
    elif args.builtin == "ones":
        kernel, N = KernelFunction(lambda x, s: np.ones_like(x * s)), args.N
    else:
        raise UsageError("give --kernel FILE or --builtin NAME")
    if N % 2**args.levels:
        raise UsageError(f"kernel side {N} is not a multiple of 2^{args.levels}")
    try:
        result = dyadic_approximation(kernel, args.levels, N=N, eps=args.eps)
    except NotInAlgLat as exc:
        print(f"hwlab compact-approx: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    rows = [{"level": l + 1, "bound": b, "truncation": t}
            for l, (b, t) in enumerate(zip(result.bounds, result.truncation))]
    payload = {"N": N, "levels": rows, "rank": result.rank, "error": result.error,
               "error_within_bound": result.error <= result.bound + 1e-6}
    _emit(args, payload, ["level", "bound", "truncation"],
          [[r["level"], r["bound"], r["truncation"]] for r in rows])
    return EXIT_OK


def cmd_witness(args):
    from .calkin import fit_exponent, spike_rows, upsilon_rows

    if args.kind == "spike":
        ns = _int_list(args.n)
        rows = spike_rows(args.s, ns)
        table = [{"n": r.param, "value": r.value, "predicted": r.predicted, "error": r.error,
                  "H_norm": r.extra} for r in rows]
        payload = {"kind": "spike", "s": args.s, "g": "x^2", "rows": table,
                   "error_exponent": fit_exponent(ns, [r.error for r in rows]) if len(ns) > 1 else None}
        header = ["n", "value", "predicted", "error", "H_norm"]
    else:
        tau = parse_complex(args.tau)
        rows = upsilon_rows(tau, _float_list(args.radii), args.rho)
        table = [{"alpha": r.param, "value": r.value, "predicted": r.predicted, "error": r.error,
                  "eigen_residual": r.extra} for r in rows]
        payload = {"kind": "upsilon", "tau": tau, "rho": args.rho, "rows": table}
        header = ["alpha", "value", "predicted", "error", "eigen_residual"]
    _emit(args, payload, header, [[row[k] for k in header] for row in table])
    return EXIT_OK


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


KERNEL_HELP = (
    "CSV kernel file: N rows of N comma-separated reals; row i is x_i and "
    "column j is s_j on the midpoint grid (k + 1/2)/N, so entry (i, j) is "
    "k(x_i, s_j) for the operator (Tf)(x) = int k(x, s) f(s) ds."
)


def build_parser():
    p = _Parser(prog="hwlab", description="Numerical experiments on the Hardy and Volterra operators.")
    p.add_argument("--version", action="version", version=f"hwlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("json", "csv")):
        sp.add_argument("--format", choices=formats, default=None if "svg" in formats else "json")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    e = sub.add_parser("eigencheck", help="eigenfunction residual at lambda")
    e.add_argument("--lambda", dest="lam", required=True, help="complex a+bi")
    e.add_argument("--order", type=int, default=240)
    e.add_argument("--grading", choices=("tanh_sinh", "geometric", "composite_graded"), default="tanh_sinh")
    e.add_argument("--tol", type=float, default=1e-6)
    common(e)
    e.set_defaults(func=cmd_eigencheck)

    c = sub.add_parser("chain", help="generalized eigenvector chain")
    c.add_argument("--lambda", dest="lam", required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--tol", type=float, default=1e-6)
    common(c)
    c.set_defaults(func=cmd_chain)

    s = sub.add_parser("symbol", help="symbol, essential spectrum and index of a word")
    s.add_argument("--word", required=True, help="e.g. 'H - Mx', '2*H^2 - (1+1i)*V'")
    s.add_argument("--index-at", nargs="*", default=[], help="complex points")
    s.add_argument("--samples", type=int, default=64, help="essential-spectrum samples per piece")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_symbol)

    sc = sub.add_parser("scan", help="pseudospectrum scan (CSV, JSON or SVG)")
    sc.add_argument("--word", default="H - Mx")
    sc.add_argument("--nx", type=int, default=121)
    sc.add_argument("--ny", type=int, default=91)
    sc.add_argument("--N", type=int, default=64)
    sc.add_argument("--re-min", type=float, default=-1.5)
    sc.add_argument("--re-max", type=float, default=2.5)
    sc.add_argument("--im-min", type=float, default=-1.5)
    sc.add_argument("--im-max", type=float, default=1.5)
    common(sc, ("csv", "json", "svg"))
    sc.set_defaults(func=cmd_scan)

    k = sub.add_parser("compact-approx", help="dyadic finite-rank approximation", description=KERNEL_HELP)
    k.add_argument("--kernel", help=KERNEL_HELP)
    k.add_argument("--builtin", choices=("volterra", "ones"))
    k.add_argument("--N", type=int, default=256, help="sampling size for --builtin")
    k.add_argument("--levels", type=int, required=True)
    k.add_argument("--eps", type=float, default=1e-8)
    common(k)
    k.set_defaults(func=cmd_compact_approx)

    w = sub.add_parser("witness", help="witness-vector limit tables")
    w.add_argument("--kind", choices=("spike", "upsilon"), required=True)
    w.add_argument("--s", type=float, default=0.3)
    w.add_argument("--n", default="8,16,32,64")
    w.add_argument("--tau", default="1")
    w.add_argument("--rho", type=float, default=1.0)
    w.add_argument("--radii", default="0,0.5,0.9,0.99")
    common(w)
    w.set_defaults(func=cmd_witness)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except WordSyntaxError as exc:
        print(f"hwlab: {exc.caret()}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        sys.stderr.write(exc.usage or parser.format_usage())
        print(f"hwlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KernelFormatError as exc:
        print(f"hwlab: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _CantCreate as exc:
        print(f"hwlab: {exc}", file=sys.stderr)
        return EXIT_CANTCREAT
    except (InvalidArgument, HWLabError) as exc:
        print(f"hwlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
