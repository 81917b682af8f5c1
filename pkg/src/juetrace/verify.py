"""Identity-verification suites: PASS/FAIL residual checks plus INFO reports.

Each check evaluates one proved identity of the deformed-Jacobi Hankel
pipeline at concrete parameters and compares the residual magnitude against
the tolerance budgeted for its derivative route (analytic identities get
rounding-level budgets, finite-difference composites looser ones).

Known transcription discrepancies in the source formulas (printed fluid
variance coefficient, printed Bessel seed, printed Chazy parameters, the
sigma-in-terms-of-Y closed form, the printed normal form of the sigma
equation, the spurious odd coefficients of the geometric family) are
reported as INFO rows carrying both values; they never fail a suite.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from . import asymptotics, density, fluctuations, ladder, orthopoly, painleve
from .numkit import make_context

__all__ = ["CheckResult", "SUITES", "run_suite", "format_row"]

SUITES = ("toda", "riccati", "difference", "painleve", "sigma", "chazy",
          "discrete", "appendix", "all")

FULL_PAIRS = ((0.0, 0.0), (1.0, 1.0), (1.0, 2.0), (0.5, 0.5), (0.5, 1.5))
FULL_NS = (1, 2, 3, 4, 5)
FULL_LAMS = (0.25, 1.0, 2.5)

QUICK_PAIRS = ((0.0, 0.0), (1.0, 2.0))
QUICK_NS = (1, 3)
QUICK_LAMS = (1.0,)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    status: str  # PASS | FAIL | INFO
    residual: float
    tol: float
    detail: str = ""


def format_row(r: CheckResult) -> str:
    if r.status == "INFO":
        return "INFO %s.%s %s" % (r.suite, r.name, r.detail)
    return "%s %s.%s residual=%.3e tol=%.1e%s" % (
        r.status, r.suite, r.name, r.residual, r.tol,
        (" " + r.detail) if r.detail else "")


_CTX_BITS = 256  # raised by run_suite when the caller asks for more


def _ctx(bits=None):
    return make_context(bits if bits else max(_CTX_BITS, 256), 1e-30)


def _row(suite, name, residual, tol, detail=""):
    residual = float(residual)
    return CheckResult(suite=suite, name=name,
                       status="PASS" if residual < tol else "FAIL",
                       residual=residual, tol=tol, detail=detail)


def _grid(quick):
    ns = QUICK_NS if quick else FULL_NS
    pairs = QUICK_PAIRS if quick else FULL_PAIRS
    lams = QUICK_LAMS if quick else FULL_LAMS
    return [(n, a, b, lam) for n in ns for (a, b) in pairs for lam in lams]


# --- suite unit implementations (top-level: picklable for the worker pool) --

def _unit_toda(args):
    n, a, b, lam = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    r1, r2, r3 = orthopoly.toda_residuals(n, lam, params, ctx)
    tag = "n=%d a=%g b=%g lam=%g" % (n, a, b, lam)
    return [
        _row("toda", "beta_flow[%s]" % tag, r1, 1e-6),
        _row("toda", "alpha_flow[%s]" % tag, r2, 1e-6),
        _row("toda", "molecule[%s]" % tag, r3, 1e-6),
    ]


def _unit_riccati(args):
    n, a, b, lam = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d a=%g b=%g lam=%g" % (n, a, b, lam)
    rR, rr = ladder.riccati_residuals(n, lam, params, ctx)
    sR, sr = ladder.second_order_residuals(n, lam, params, ctx)
    return [
        _row("riccati", "R_flow[%s]" % tag, rR, 1e-6),
        _row("riccati", "r_flow[%s]" % tag, rr, 1e-6),
        _row("riccati", "R_second_order[%s]" % tag, sR, 1e-5),
        _row("riccati", "r_second_order[%s]" % tag, sr, 1e-5),
    ]


def _unit_difference(args):
    n, a, b, lam = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d a=%g b=%g lam=%g" % (n, a, b, lam)
    out = []
    tab = ladder.aux_by_recursion(n, lam, params, ctx)
    for m in range(1, n + 1):
        out.append(_row("difference", "second_eq[%s m=%d]" % (tag, m),
                        tab.diff2_residuals[m], 1e-10))
    if a > 0:
        Rn, rn = ladder.aux_by_integral(n, lam, params, ctx)
        out.append(_row("difference", "route_R[%s]" % tag,
                        abs(tab.R[n] - Rn), 1e-8))
        if n >= 1:
            out.append(_row("difference", "route_r[%s]" % tag,
                            abs(tab.r[n] - rn), 1e-8))
    r1_rec = ladder.aux_by_recursion(1, lam, params, ctx).r[1]
    r1_closed = ladder.r1_closed_form(lam, params, ctx)
    out.append(_row("difference", "r1_closed[%s]" % tag,
                    abs(r1_rec - r1_closed), 1e-12))
    return out


def _unit_bessel(args):
    (lam,) = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(2, 0.5, 0.5)
    tab = ladder.aux_by_recursion(1, lam, params, ctx)
    R0c, r1c, R1c = ladder.bessel_closed_forms(lam, ctx)
    R0p, _, _ = ladder.bessel_closed_forms(lam, ctx, printed=True)
    out = [
        _row("difference", "bessel_R0[lam=%g]" % lam, abs(tab.R[0] - R0c), 1e-10),
        _row("difference", "bessel_r1[lam=%g]" % lam, abs(tab.r[1] - r1c), 1e-10),
        _row("difference", "bessel_R1[lam=%g]" % lam, abs(tab.R[1] - R1c), 1e-10),
        CheckResult("difference", "bessel_R0_printed[lam=%g]" % lam, "INFO", 0.0, 0.0,
                    "printed lambda/4 seed gives %s = recursion/2 (recursion %s)"
                    % (mp.nstr(R0p, 8), mp.nstr(tab.R[0], 8))),
    ]
    return out


def _unit_painleve(args):
    n, a, b, lam = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d a=%g b=%g lam=%g" % (n, a, b, lam)
    out = [_row("painleve", "pv[%s]" % tag,
                painleve.pv_residual(n, lam, params, ctx), 1e-5)]
    for z in (0.37, 0.73):
        out.append(_row("painleve", "pn_ode[%s z=%g]" % (tag, z),
                        painleve.pn_ode_residual(n, z, lam, params, ctx), 1e-8))
    return out


def _unit_sigma(args):
    n, a, b, lam = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d a=%g b=%g lam=%g" % (n, a, b, lam)
    out = [
        _row("sigma", "quadratic_form[%s]" % tag,
             painleve.sigma_form_residual(n, lam, params, ctx), 1e-8),
        _row("sigma", "jmo_form[%s]" % tag,
             painleve.jmo_sigma_form_residual(n, lam, params, ctx), 1e-8),
    ]
    printed = painleve.jmo_sigma_form_residual(n, lam, params, ctx, printed=True)
    out.append(CheckResult(
        "sigma", "jmo_form_printed[%s]" % tag, "INFO", 0.0, 0.0,
        "printed sign variant residual %.3e (corrected %.1e)" % (
            float(printed), float(out[-1].residual))))
    return out


def _unit_sigma_limits(args):
    n, a, b = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d a=%g b=%g" % (n, a, b)
    eps = mp.mpf(1) / 2 ** 24
    pt = painleve.sigma_point(n, eps, params, ctx)
    lim_sigma = -n * (n + mp.mpf(b))
    lim_slope = n * (n + mp.mpf(b)) / (2 * n + mp.mpf(a) + mp.mpf(b))
    out = [
        _row("sigma", "limit_value[%s]" % tag, abs(pt.sigma - lim_sigma), 1e-6),
        _row("sigma", "limit_slope[%s]" % tag, abs(pt.sigma_p - lim_slope), 1e-6),
    ]
    # Y(0) = 1 with slope 1/(2n+1+alpha+beta)
    y = painleve.y_value(n, eps, params, ctx)
    out.append(_row("sigma", "y_limit[%s]" % tag, abs(y - 1), 1e-6))
    slope = (y - 1) / eps
    out.append(_row("sigma", "y_slope[%s]" % tag,
                    abs(slope - 1 / (2 * n + 1 + mp.mpf(a) + mp.mpf(b))), 1e-6))
    return out


def _unit_sigma_y_report(args):
    n, a, b, lam = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    rep = painleve.sigma_from_y_check(n, lam, params, ctx)
    return [CheckResult(
        "sigma", "sigma_from_y[n=%d a=%g b=%g lam=%g]" % (n, a, b, lam),
        "INFO", 0.0, 0.0,
        "printed residual %.3e, (Y-1)^2 variant %.3e, derived form %.3e" % (
            float(rep["printed_residual"]), float(rep["y_minus_one_residual"]),
            float(rep["derived_residual"])))]


def _unit_series(args):
    n, a, b = args
    ctx = _ctx()
    tag = "n=%d a=%g b=%g" % (n, a, b)
    ext = asymptotics.b_extracted(n, a, b, 4, ctx)
    out = []
    for m in range(1, 5):
        try:
            cf = asymptotics.b_closed_form(n, a, b, m, ctx)
        except ZeroDivisionError:
            continue
        scale = max(abs(cf), mp.mpf(10) ** (-9))
        out.append(_row("sigma", "series_b%d[%s]" % (m, tag),
                        abs(ext.b[m] - cf) / scale, 1e-6))
    res, trunc = asymptotics.sigma_series_residual(n, a, b, 0.1, 4, ctx)
    out.append(_row("sigma", "series_sigma[%s lam=0.1]" % tag,
                    res, max(1e-6, 10 * float(trunc))))
    return out


def _unit_fluid(args):
    ctx = _ctx(192)
    fl0 = asymptotics.fluid_data(0.0, 0.0, 10, ctx)
    out = [CheckResult(
        "sigma", "fluid_J1_sign", "INFO", 0.0, 0.0,
        "printed J1 = %s at (a,b)=(0,1) is positive, contradicting log-MGF "
        "convexity; variance-consistent J1_alt = %s" % (
            mp.nstr(fl0.J1, 6), mp.nstr(fl0.J1_alt, 6)))]
    errs = []
    for n in (10, 20, 40):
        params = orthopoly.EnsembleParams(n, 0.0, 0.0)
        exact = orthopoly.hankel_det_log(n, 1.0, params, ctx) \
            - orthopoly.hankel_det_log(n, 0.0, params, ctx)
        fl = asymptotics.fluid_data(0.0, 0.0, n, ctx)
        appr = mp.log(asymptotics.mgf_fluid(1.0, params, fl, "corrected"))
        errs.append(abs(exact - appr))
    decreasing = errs[0] > errs[1] > errs[2]
    out.append(CheckResult(
        "sigma", "fluid_error_trend", "PASS" if decreasing else "FAIL",
        float(errs[-1]), float(errs[0]),
        "corrected-variant |log MGF error| at lam=1: " + ", ".join(
            "n=%d %.3e" % (n, float(e)) for n, e in zip((10, 20, 40), errs))))
    return out


def _unit_chazy(args):
    n, z, a, b = args
    ctx = _ctx()
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d z=%g a=%g b=%g" % (n, z, a, b)
    res = painleve.chazy_residual(n, z, params, ctx)
    printed = painleve.chazy_residual(n, z, params, ctx, printed=True)
    return [
        _row("chazy", "system[%s]" % tag, res, 1e-4),
        CheckResult("chazy", "system_printed[%s]" % tag, "INFO", 0.0, 0.0,
                    "printed parameter set residual %.3e (derived %.1e)" % (
                        float(printed), float(res))),
    ]


def _unit_discrete(args):
    n, a, b, lam = args
    ctx = _ctx(256)
    params = orthopoly.EnsembleParams(n, a, b)
    tag = "n=%d a=%g b=%g lam=%g" % (n, a, b, lam)
    res = painleve.discrete_sigma_residual(n, lam, params, ctx)
    return [_row("discrete", "relation[%s]" % tag, res, 1e-15)]


def _unit_appendix(args):
    a, b, n = args
    poly = density.exact_piecewise(n, a, b)  # construction validates
    tag = "(%d,%d,%d)" % (a, b, n)
    out = [_row("appendix", "mass_support_continuity%s" % tag, 0.0, 1.0,
                "exact rational checks passed at construction")]
    mean_exact = poly.mean() == -asymptotics.b_fraction(n, a, b, 1)
    var_exact = poly.variance() == asymptotics.b_fraction(n, a, b, 2)
    out.append(_row("appendix", "mean_vs_b1%s" % tag,
                    0.0 if mean_exact else 1.0, 0.5, "exact rational equality"))
    out.append(_row("appendix", "variance_vs_b2%s" % tag,
                    0.0 if var_exact else 1.0, 0.5, "exact rational equality"))
    if a == b:
        pts = [Fraction(1, 7), Fraction(5, 3), Fraction(n, 2) + Fraction(1, 5)]
        sym = all(poly.evaluate(c) == poly.evaluate(n - c)
                  for c in pts if 0 <= c <= n)
        out.append(_row("appendix", "symmetry%s" % tag, 0.0 if sym else 1.0, 0.5))
    if a > 0 and b > 0:
        ok, worst = density.log_concavity_check(poly)
        out.append(_row("appendix", "log_concavity%s" % tag,
                        max(0.0, -worst), 1e-9))
    else:
        ok, worst = density.log_concavity_check(poly)
        out.append(CheckResult(
            "appendix", "log_concavity%s" % tag, "INFO", 0.0, 0.0,
            "exponents outside the log-concavity hypothesis; scan gives "
            "min second difference %.3e (%s)" % (worst, "concave" if ok
                                                 else "not concave")))
    return out


def _unit_geometric(args):
    ctx = _ctx(192)
    ser, closed = fluctuations.example_geometric_family(0.5, M=60, ctx=ctx)
    serp, closedp = fluctuations.example_geometric_family(0.5, M=60, ctx=ctx,
                                                          printed=True)
    via_series = fluctuations.phi_star(ser)
    out = [
        _row("sigma", "geometric_phi_star[K=0.5]", abs(via_series - closed), 1e-8),
        CheckResult("sigma", "geometric_printed[K=0.5]", "INFO", 0.0, 0.0,
                    "printed all-order generator sums to %s (own closed form "
                    "%s); quadrature shows odd coefficients vanish, true "
                    "transform %s" % (mp.nstr(fluctuations.phi_star(serp), 8),
                                      mp.nstr(closedp, 8), mp.nstr(closed, 8))),
    ]
    var = fluctuations.linear_statistic_variance(lambda x: x, 0, 1, 48, ctx)
    out.append(_row("sigma", "linear_statistic_variance[x_on_01]",
                    abs(var - mp.mpf(1) / 16), 1e-10))
    return out


_UNITS = {
    "toda": _unit_toda,
    "riccati": _unit_riccati,
    "difference": _unit_difference,
    "bessel": _unit_bessel,
    "painleve": _unit_painleve,
    "sigma": _unit_sigma,
    "sigma_limits": _unit_sigma_limits,
    "sigma_y": _unit_sigma_y_report,
    "series": _unit_series,
    "fluid": _unit_fluid,
    "chazy": _unit_chazy,
    "discrete": _unit_discrete,
    "appendix": _unit_appendix,
    "geometric": _unit_geometric,
}


def _run_unit(task):
    kind, args = task
    return _UNITS[kind](args)


def _tasks_for(suite: str, quick: bool):
    grid = _grid(quick)
    tasks = []
    if suite in ("toda", "all"):
        tasks += [("toda", g) for g in grid]
    if suite in ("riccati", "all"):
        tasks += [("riccati", g) for g in grid]
    if suite in ("difference", "all"):
        tasks += [("difference", g) for g in grid]
        lams = (1.0,) if quick else (0.5, 1.0, 2.0)
        tasks += [("bessel", (lam,)) for lam in lams]
    if suite in ("painleve", "all"):
        tasks += [("painleve", g) for g in grid]
    if suite in ("sigma", "all"):
        tasks += [("sigma", g) for g in grid]
        ns = QUICK_NS if quick else FULL_NS
        pairs = QUICK_PAIRS if quick else FULL_PAIRS
        tasks += [("sigma_limits", (n, a, b)) for n in ns for (a, b) in pairs]
        tasks += [("sigma_y", (n, a, b, lam)) for (n, a, b, lam)
                  in [(1, 0.0, 0.0, 1.0), (2, 1.0, 1.0, 0.5), (1, 0.5, 1.5, 2.0)]]
        series_grid = [(2, 0.0, 0.0), (3, 1.0, 2.0)] if quick else \
            [(n, a, b) for n in (2, 3, 4) for (a, b) in
             ((0.0, 0.0), (1.0, 2.0), (0.5, 1.5))]
        tasks += [("series", g) for g in series_grid]
        tasks += [("fluid", ()), ("geometric", ())]
    if suite in ("chazy", "all"):
        pts = [(1, 0.0, 0.0, 0.0), (2, -1.0, 1.0, 2.0), (1, 0.5, 0.5, 0.5)]
        tasks += [("chazy", p) for p in pts]
    if suite in ("discrete", "all"):
        tasks += [("discrete", g) for g in grid]
    if suite in ("appendix", "all"):
        tasks += [("appendix", case) for case in density.tabulated_cases()]
    return tasks


def run_suite(suite: str, quick: bool = False, threads: int = 1):
    """Run a named suite; returns the ordered list of CheckResult rows."""
    if suite not in SUITES:
        raise ValueError("unknown suite %r; choose from %s" % (suite, SUITES))
    tasks = _tasks_for(suite, quick)
    rows = []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(_run_unit, tasks):
                rows.extend(chunk)
    else:
        for t in tasks:
            rows.extend(_run_unit(t))
    return rows
