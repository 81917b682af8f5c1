"""Command-line surface: mgf / density / verify / cumulants subcommands.

Conventions shared by all subcommands:

* ``--precision-bits`` (default: env JUE_PRECISION_BITS or 256) and ``--tol``
  select the numeric context; every output embeds the resolved configuration
  as '#'-prefixed metadata lines (CSV) or a "config" block (JSON).
* CSV is RFC-4180-style with '.' decimals and a header row after the
  metadata; JSON documents carry "schema": 1 and serialize exact rationals
  as "p/q" strings.
* exit codes: 0 success, 1 numeric/verification failure, 2 usage error.
* identical configuration and seed produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np
from mpmath import mp

from . import __version__
from .asymptotics import (b_closed_form, b_extracted, cumulants, fluid_data,
                          mgf_fluid)
from .density import (DensityGrid, edgeworth_density, exact_piecewise,
                      fourier_inversion_with_tail, grid_to_csv, grid_to_json,
                      tabulated_cases)
from .numkit import NumericsError, make_context
from .orthopoly import EnsembleParams, hankel_det_log
from .sampler import (ks_distance_exact, matrix_model_sample, mcmc_sample,
                      KS_99_COEFF)
from .verify import SUITES, format_row, run_suite

USAGE_ERROR = 2
NUMERIC_ERROR = 1


def _default_bits():
    try:
        return int(os.environ.get("JUE_PRECISION_BITS", "256"))
    except ValueError:
        return 256


def _add_common(p):
    p.add_argument("--precision-bits", type=int, default=_default_bits())
    p.add_argument("--tol", type=float, default=1e-30)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--output", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)


def _config_dict(args, extra=None):
    cfg = {
        "subcommand": args.command,
        "precision_bits": args.precision_bits,
        "tol": args.tol,
        "seed": args.seed,
        "version": __version__,
    }
    for key in ("n", "alpha", "beta"):
        if hasattr(args, key) and getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    if extra:
        cfg.update(extra)
    return cfg


def _emit(args, text):
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _csv_doc(cfg, columns, rows):
    lines = ["# %s: %s" % (k, cfg[k]) for k in sorted(cfg)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, Fraction):
        return "%d/%d" % (v.numerator, v.denominator)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, str)):
        return str(v)
    return repr(float(v))


def _json_doc(cfg, columns, rows):
    def jval(v):
        if isinstance(v, Fraction):
            return "%d/%d" % (v.numerator, v.denominator)
        if isinstance(v, (int, str)):
            return v
        return float(v)

    return json.dumps({"schema": 1, "config": cfg, "columns": columns,
                       "rows": [[jval(v) for v in row] for row in rows]},
                      sort_keys=True, indent=1) + "\n"


def _parse_grid(spec):
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except Exception:
        raise ValueError("grid must be start:stop:step")
    if step <= 0 or stop < start:
        raise ValueError("need step > 0 and stop >= start")
    out = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-12:
            break
        out.append(round(v, 12))
        k += 1
    return out


def cmd_mgf(args) -> int:
    ctx = make_context(args.precision_bits, args.tol)
    params = EnsembleParams(args.n, args.alpha, args.beta)
    lams = _parse_grid(args.lambda_grid)
    columns = ["lambda", "mgf_exact"]
    want_fluid = args.compare in ("fluid", "all")
    want_series = args.compare in ("series", "all")
    if want_fluid:
        columns += ["mgf_fluid_printed", "mgf_fluid_corrected"]
    if want_series:
        columns += ["mgf_series"]
    d0 = hankel_det_log(args.n, 0.0, params, ctx)
    fl = fluid_data(args.alpha / args.n, args.beta / args.n, args.n, ctx) \
        if want_fluid else None
    bvals = None
    if want_series:
        ms = range(1, args.mmax + 1)
        bvals = {}
        for m in ms:
            try:
                bvals[m] = b_closed_form(args.n, args.alpha, args.beta, m, ctx)
            except (ZeroDivisionError, ValueError):
                pass
    rows = []
    for lam in lams:
        with ctx.guard():
            exact = mp.exp(hankel_det_log(args.n, lam, params, ctx) - d0)
            row = [lam, float(exact)]
            if want_fluid:
                row.append(float(mgf_fluid(lam, params, fl, "printed")))
                row.append(float(mgf_fluid(lam, params, fl, "corrected")))
            if want_series:
                expo = mp.mpf(0)
                for m, bm in bvals.items():
                    expo += bm * mp.mpf(lam) ** m / m
                row.append(float(mp.exp(expo)))
        rows.append(row)
    cfg = _config_dict(args, {"lambda_grid": args.lambda_grid,
                              "compare": args.compare or "none"})
    doc = _csv_doc(cfg, columns, rows) if args.format == "csv" \
        else _json_doc(cfg, columns, rows)
    _emit(args, doc)
    return 0


def _c_grid(args):
    lo = args.cmin if args.cmin is not None else 0.0
    hi = args.cmax if args.cmax is not None else float(args.n)
    pts = args.points
    return [lo + (hi - lo) * i / (pts - 1) for i in range(pts)]


def cmd_density(args) -> int:
    ctx = make_context(args.precision_bits, args.tol)
    meta = _config_dict(args, {"method": args.method})
    if args.method == "exact":
        try:
            poly = exact_piecewise(args.n, args.alpha, args.beta)
        except KeyError as exc:
            sys.stderr.write("error: %s\n" % exc)
            return USAGE_ERROR
        cs = _c_grid(args)
        grid = DensityGrid(c_values=tuple(cs),
                           values=tuple(poly.evaluate(c) for c in cs),
                           method="exact", meta=meta)
        doc = grid_to_csv(grid) if args.format == "csv" \
            else grid_to_json(grid, poly)
        _emit(args, doc)
        return 0
    if args.method == "edgeworth":
        cs = _c_grid(args)
        vals = [float(edgeworth_density(c, args.n, args.alpha, args.beta,
                                        args.order, ctx)) for c in cs]
        grid = DensityGrid(tuple(cs), tuple(vals), "edgeworth",
                           {**meta, "order": args.order})
        _emit(args, grid_to_csv(grid) if args.format == "csv"
              else grid_to_json(grid))
        return 0
    if args.method == "fourier":
        cs = _c_grid(args)
        vals = []
        tail = None
        for c in cs:
            v, tail = fourier_inversion_with_tail(c, args.n, args.alpha,
                                                  args.beta, args.lam_max)
            vals.append(float(v))
        grid = DensityGrid(tuple(cs), tuple(vals), "fourier",
                           {**meta, "lam_max": args.lam_max or 40 * args.n,
                            "tail_bound": float(tail)})
        _emit(args, grid_to_csv(grid) if args.format == "csv"
              else grid_to_json(grid))
        return 0
    # Monte Carlo histogram
    batch = mcmc_sample(args.n, args.alpha, args.beta, args.count, args.seed)
    edges = np.linspace(0.0, args.n, args.points + 1)
    hist, _ = np.histogram(batch.values, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    extra = {"count": args.count,
             "acceptance_rate": round(batch.diagnostics["acceptance_rate"], 6)}
    try:
        poly = exact_piecewise(args.n, args.alpha, args.beta)
        d = ks_distance_exact(batch, poly)
        extra["ks_distance"] = round(d, 8)
        extra["ks_threshold_99"] = round(KS_99_COEFF / args.count ** 0.5, 8)
    except KeyError:
        pass
    grid = DensityGrid(tuple(float(c) for c in centers),
                       tuple(float(v) for v in hist), "mc", {**meta, **extra})
    _emit(args, grid_to_csv(grid) if args.format == "csv"
          else grid_to_json(grid))
    return 0


def cmd_verify(args) -> int:
    rows = run_suite(args.suite, quick=args.quick, threads=args.threads)
    if args.n is not None:
        needle = "n=%d" % args.n
        rows = [r for r in rows if needle in r.name or "[" not in r.name]
    out_lines = [format_row(r) for r in rows]
    fails = sum(r.status == "FAIL" for r in rows)
    out_lines.append("summary: %d checks, %d failed, %d info"
                     % (len(rows), fails,
                        sum(r.status == "INFO" for r in rows)))
    _emit(args, "\n".join(out_lines) + "\n")
    return NUMERIC_ERROR if fails else 0


def cmd_cumulants(args) -> int:
    ctx = make_context(args.precision_bits, args.tol)
    if args.mmax > 6:
        sys.stderr.write("error: extraction supports mmax <= 6\n")
        return USAGE_ERROR
    ext = b_extracted(args.n, args.alpha, args.beta,
                      min(args.mmax, 6), ctx)
    kap = cumulants(ext)
    columns = ["m", "b_closed_form", "b_extracted", "kappa", "agreement"]
    rows = []
    for m in range(1, ext.m_max + 1):
        try:
            closed = b_closed_form(args.n, args.alpha, args.beta, m, ctx)
            closed_val = float(closed)
            agree = abs(float(ext.b[m]) - closed_val) <= 1e-6 * max(
                abs(closed_val), 1e-9)
            agree_str = "yes" if agree else "NO"
        except (ZeroDivisionError, ValueError) as exc:
            closed_val = float("nan")
            agree_str = "n/a (%s)" % exc
        rows.append([m, closed_val, float(ext.b[m]), float(kap[m]), agree_str])
    cfg = _config_dict(args, {"mmax": args.mmax})
    doc = _csv_doc(cfg, columns, rows) if args.format == "csv" \
        else _json_doc(cfg, columns, rows)
    _emit(args, doc)
    if any(r[-1] == "NO" for r in rows):
        return NUMERIC_ERROR
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="juetrace",
        description="Trace distribution of finite-n Jacobi unitary ensembles")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mgf", help="moment generating function over a grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--lambda-grid", type=str, default="0:5:0.5",
                   dest="lambda_grid")
    p.add_argument("--compare", choices=("fluid", "series", "all"),
                   default=None)
    p.add_argument("--mmax", type=int, default=4)
    _add_common(p)
    p.set_defaults(func=cmd_mgf)

    p = sub.add_parser("density", help="density of the trace")
    p.add_argument("--method", choices=("exact", "edgeworth", "fourier", "mc"),
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--count", type=int, default=100000)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--cmin", type=float, default=None)
    p.add_argument("--cmax", type=float, default=None)
    p.add_argument("--lam-max", type=float, default=None, dest="lam_max")
    _add_common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("verify", help="run identity-verification suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cumulants", help="series coefficients and cumulants")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--mmax", type=int, default=4)
    _add_common(p)
    p.set_defaults(func=cmd_cumulants)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_ERROR
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return USAGE_ERROR
    except NumericsError as exc:
        sys.stderr.write("numeric failure: %s\n" % exc)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
