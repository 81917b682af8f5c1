"""Coulomb-fluid approximation, cumulant coefficients and determinant series.

Large-n fluid data
------------------
Treating the eigenvalues as a continuum charge fluid with external potential
-(alpha log x + beta log(1-x))/n gives an equilibrium density supported on
[a, b] inside [0, 1].  With scaled exponents (alpha_s, beta_s) = (alpha/n,
beta/n) the support endpoints on the [-1, 1] convention are

    A, B = [beta_s^2 - alpha_s^2 -/+ 4 sqrt((1+alpha_s)(1+beta_s)(1+alpha_s+beta_s))]
           / (2+alpha_s+beta_s)^2,
    a = (1-B)/2,  b = (1-A)/2,

and the log moment generating function of the trace is approximately
-J1 lambda^2/2 - J2 lambda with

    J1 = -(a^2 + 2ab - b^2)/8        (as printed upstream),
    J2 = ((2n+alpha+beta)/2) (sqrt((a-1)(b-1)) - (a+b)/2 + 1).

The printed J1 is positive at (a, b) = (0, 1), contradicting convexity of the
log-MGF and the n -> infinity limit 1/16 of the quadratic cumulant
coefficient; the corrected variance field J1_alt = -(b-a)^2/16 is therefore
carried alongside and both variants are exposed.  The discrepancy is
documented by the verification suite, not silently fixed.

Finite-n cumulant series
------------------------
log[D_n(lambda)/D_n(0)] = sum_m (b_m/m) lambda^m, with closed-form rational
b_m(n, alpha, beta) for m <= 5 (m in {6, 8} additionally at alpha = beta = 0)
and a numerical extraction route fitting high-precision log-determinant
values on a symmetric stencil.  Cumulants follow as
kappa_m = (-1)^m (m-1)! b_m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .numkit import NumericsError, PrecisionContext, default_context
from .orthopoly import EnsembleParams, hankel_det_log, ortho_table
from .painleve import sigma_point
from .specfun import log_d0

__all__ = [
    "FluidData",
    "SeriesCoeffs",
    "fluid_data",
    "mgf_fluid",
    "b_closed_form",
    "b_extracted",
    "cumulants",
    "sigma_series_residual",
    "dn_expansion",
]


@dataclass(frozen=True)
class FluidData:
    """Support endpoints and log-MGF coefficients of the charge fluid."""

    A: object
    B: object
    a: object
    b: object
    J1: object
    J2: object
    J1_alt: object


@dataclass(frozen=True)
class SeriesCoeffs:
    """Coefficients b_1..b_mmax of the log-determinant power series."""

    n: int
    alpha: float
    beta: float
    b: tuple  # b[0] unused; b[m] for 1 <= m <= m_max
    source: str  # 'closed-form' | 'extracted'

    @property
    def m_max(self) -> int:
        return len(self.b) - 1


def fluid_data(alpha_scaled, beta_scaled, n: int,
               ctx: PrecisionContext = None) -> FluidData:
    """Fluid support and log-MGF coefficients for scaled exponents >= 0."""
    ctx = ctx or default_context()
    if not (float(alpha_scaled) >= 0 and float(beta_scaled) >= 0):
        raise ValueError("fluid regime requires nonnegative scaled exponents")
    with ctx.guard():
        asc = mp.mpf(alpha_scaled)
        bsc = mp.mpf(beta_scaled)
        denom = (2 + asc + bsc) ** 2
        root = 4 * mp.sqrt((1 + asc) * (1 + bsc) * (1 + asc + bsc))
        A = (bsc ** 2 - asc ** 2 - root) / denom
        B = (bsc ** 2 - asc ** 2 + root) / denom
        a = (1 - B) / 2
        b = (1 - A) / 2
        J1 = -(a ** 2 + 2 * a * b - b ** 2) / 8
        alpha_full = n * asc
        beta_full = n * bsc
        J2 = (2 * n + alpha_full + beta_full) / 2 \
            * (mp.sqrt((a - 1) * (b - 1)) - (a + b) / 2 + 1)
        J1_alt = -(b - a) ** 2 / 16
    return FluidData(A=A, B=B, a=a, b=b, J1=J1, J2=J2, J1_alt=J1_alt)


def mgf_fluid(lam, params: EnsembleParams, fluid: FluidData,
              variant: str = "corrected"):
    """Fluid approximation exp(-J1 lambda^2/2 - J2 lambda) of the MGF.

    variant='printed' uses the J1 field as printed; variant='corrected' uses
    the variance-consistent J1_alt.
    """
    if variant not in ("printed", "corrected"):
        raise ValueError("variant must be 'printed' or 'corrected'")
    lamv = mp.mpf(lam)
    J1 = fluid.J1 if variant == "printed" else fluid.J1_alt
    return mp.exp(-lamv ** 2 * J1 / 2 - lamv * fluid.J2)


# ---------------------------------------------------------------------------
# Closed-form series coefficients
# ---------------------------------------------------------------------------

def _b_even_symmetric(n: int, m: int) -> Fraction:
    """Even-order coefficients at alpha = beta = 0 (exact rationals)."""
    n2 = Fraction(n) ** 2
    if m == 2:
        return n2 / (4 * (4 * n2 - 1))
    if m == 4:
        return n2 / (16 * (4 * n2 - 9) * (4 * n2 - 1) ** 2)
    if m == 6:
        return n2 * (2 * n2 + 1) / (
            32 * (4 * n2 - 1) ** 3 * (16 * n2 ** 2 - 136 * n2 + 225))
    if m == 8:
        return (n2 * (64 * n2 ** 3 - 32 * n2 ** 2 - 392 * n2 - 45)
                / (256 * (4 * n2 - 1) ** 4 * (4 * n2 - 9) ** 2
                   * (16 * n2 ** 2 - 296 * n2 + 1225)))
    raise ValueError("symmetric closed forms cover m in {2, 4, 6, 8}")


def b_fraction(n: int, alpha, beta, m: int) -> Fraction:
    """Exact rational b_m for rational parameters; m in {1, 2} suffice for
    mean/variance identities against the tabulated densities."""
    a = Fraction(alpha)
    b = Fraction(beta)
    s = a + b + 2 * n
    if m == 1:
        return -n * (a + n) / s
    if m == 2:
        return n * (a + n) * (b + n) * (a + b + n) / ((s - 1) * s ** 2 * (s + 1))
    raise ValueError("exact fractions provided for m in {1, 2}")


def b_closed_form(n: int, alpha, beta, m: int, ctx: PrecisionContext = None):
    """Rational closed form of b_m(n, alpha, beta).

    m in 1..5 for general exponents; m in {6, 8} additionally at
    alpha = beta = 0.  Denominator collisions (alpha+beta+2n hitting a small
    integer) are reported as errors.
    """
    ctx = ctx or default_context()
    if float(alpha) == 0.0 and float(beta) == 0.0:
        # exact rational specialization, also covering m in {6, 8}
        if m == 1:
            return -mp.mpf(n) / 2
        if m in (3, 5, 7):
            return mp.mpf(0)
        if m in (2, 4, 6, 8):
            fr = _b_even_symmetric(n, m)
            return mp.mpf(fr.numerator) / mp.mpf(fr.denominator)
        raise ValueError("closed forms available for m <= 8 at alpha=beta=0")
    if m not in (1, 2, 3, 4, 5):
        raise ValueError("general closed forms cover m in 1..5")
    with ctx.guard():
        a = mp.mpf(alpha)
        b = mp.mpf(beta)
        s = a + b + 2 * n
        for k in range(-4, 5):
            # b_m has denominator factors s+k for |k| <= m-1
            if abs(k) <= m - 1 and s + k == 0:
                raise ZeroDivisionError(
                    "denominator factor alpha+beta+2n%+d vanishes" % k)
        core = n * (a + n) * (b + n) * (a + b + n)
        if m == 1:
            return -n * (a + n) / s
        if m == 2:
            return core / ((s - 1) * s ** 2 * (s + 1))
        if m == 3:
            return (n * (a - b) * (a + b) * (a + n) * (b + n) * (a + b + n)
                    / ((s - 2) * (s - 1) * s ** 3 * (s + 1) * (s + 2)))
        if m == 4:
            brace = (
                (a + b - 1) * (a + b) ** 2 * (a + b + 1)
                * (a ** 2 - 3 * a * b + b ** 2 + 1)
                - n ** 4 * (8 * a ** 2 + 8 * b ** 2 - 4)
                - 8 * n ** 3 * (a + b) * (2 * a ** 2 + 2 * b ** 2 - 1)
                - 2 * n ** 2 * (3 * a ** 4 + 12 * a ** 3 * b
                                + a ** 2 * (18 * b ** 2 - 7)
                                + 6 * a * b * (2 * b ** 2 - 1)
                                + 3 * b ** 4 - 7 * b ** 2 + 2)
                + 2 * n * (a + b) * (a ** 4 - 4 * a ** 3 * b
                                     + a ** 2 * (5 - 10 * b ** 2)
                                     + a * (2 * b - 4 * b ** 3)
                                     + b ** 4 + 5 * b ** 2 - 2)
            )
            return brace * core / (
                s ** 4 * (s - 3) * (s - 2) * (s - 1) ** 2
                * (s + 1) ** 2 * (s + 2) * (s + 3))
        brace = (
            (a + b - 1) * (a + b) ** 2 * (a + b + 1)
            * (a ** 2 - 5 * a * b + b ** 2 + 5)
            + 16 * n ** 6
            + 48 * n ** 5 * (a + b)
            + 4 * n ** 4 * (7 * a ** 2 + 30 * a * b + 7 * b ** 2 - 6)
            - 8 * n ** 3 * ((3 * a - b) * (a - 3 * b) + 6) * (a + b)
            - 2 * n ** 2 * ((14 * a ** 2 - 11) * b ** 2
                            + 18 * a * (a ** 2 + 2) * b
                            + 11 * a ** 2 * (a ** 2 - 1)
                            + 18 * a * b ** 3 + 11 * b ** 4 + 10)
            - 2 * n * (a + b) * (a ** 4 + 10 * a ** 3 * b
                                 + a ** 2 * (18 * b ** 2 - 23)
                                 + 2 * a * b * (5 * b ** 2 + 6)
                                 + b ** 4 - 23 * b ** 2 + 10)
        )
        return (brace * n * (a - b) * (a + b) * (a + n) * (b + n) * (a + b + n)
                / ((s - 4) * s ** 5 * (s - 3) * (s - 2) * (s - 1) ** 2
                   * (s + 1) ** 2 * (s + 2) * (s + 3) * (s + 4)))


def b_series_closed(n: int, alpha, beta, m_max: int,
                    ctx: PrecisionContext = None) -> SeriesCoeffs:
    """SeriesCoeffs from the closed forms (m_max <= 5 general, <= 8 symmetric)."""
    vals = [mp.mpf(0)]
    for m in range(1, m_max + 1):
        vals.append(b_closed_form(n, alpha, beta, m, ctx))
    return SeriesCoeffs(n=n, alpha=float(alpha), beta=float(beta),
                        b=tuple(vals), source="closed-form")


# ---------------------------------------------------------------------------
# Numerical extraction
# ---------------------------------------------------------------------------

def _log_mgf(n, lam, params, ctx):
    return hankel_det_log(n, lam, params, ctx) - hankel_det_log(n, mp.mpf(0), params, ctx)


def _fit_through_origin(n, params, ctx, degree, radius):
    """Interpolate log M on a symmetric stencil by an origin-anchored polynomial."""
    pts = []
    k = 1
    while len(pts) < degree:
        step = mp.mpf(radius) * ((k + 1) // 2) / ((degree + 1) // 2)
        pts.append(step if k % 2 else -step)
        k += 1
    with ctx.guard():
        rows = mp.matrix(degree, degree)
        rhs = mp.matrix(degree, 1)
        for i, x in enumerate(pts):
            acc = mp.mpf(1)
            for m in range(degree):
                acc *= x
                rows[i, m] = acc
            rhs[i] = _log_mgf(n, x, params, ctx)
        sol = mp.lu_solve(rows, rhs)
    return [sol[m] for m in range(degree)]


def b_extracted(n: int, alpha, beta, m_max: int,
                ctx: PrecisionContext = None) -> SeriesCoeffs:
    """b_1..b_mmax extracted from high-precision log-determinant values.

    Fits a degree-(m_max+2) polynomial through the origin on a symmetric
    stencil of radius 1/4; agreement with a half-radius refit certifies the
    result, otherwise the precision escalates and the stencil shrinks.
    """
    if m_max > 6:
        raise ValueError("extraction supported up to m_max = 6")
    ctx = ctx or default_context()
    degree = m_max + 2
    radius = mp.mpf(1) / 4
    work = ctx
    params = EnsembleParams(n, float(alpha), float(beta))
    for attempt in range(work.max_escalations + 1):
        c_full = _fit_through_origin(n, params, work, degree, radius)
        c_half = _fit_through_origin(n, params, work, degree, radius / 2)
        with work.guard():
            # Aliasing of omitted series terms shrinks like radius^(degree+1-m),
            # so full/half agreement certifies the half-radius coefficients.
            ok = all(
                abs(c_full[m - 1] - c_half[m - 1])
                <= max(mp.mpf(10) ** (-9) * abs(c_half[m - 1]), mp.mpf(10) ** (-11))
                for m in range(1, m_max + 1)
            )
        if ok:
            vals = [mp.mpf(0)] + [m * c_half[m - 1] for m in range(1, m_max + 1)]
            return SeriesCoeffs(n=n, alpha=float(alpha), beta=float(beta),
                                b=tuple(vals), source="extracted")
        radius = radius / 2
        if attempt % 2 == 1:
            work = work.escalated()
    raise NumericsError("series extraction failed to stabilize")


def cumulants(coeffs: SeriesCoeffs):
    """Cumulants kappa_m = (-1)^m (m-1)! b_m of the trace distribution."""
    out = [mp.mpf(0)]
    fact = 1
    for m in range(1, coeffs.m_max + 1):
        if m > 1:
            fact *= m - 1
        out.append((-1) ** m * fact * coeffs.b[m])
    return out


def sigma_series_residual(n: int, alpha, beta, lam, m_max: int,
                          ctx: PrecisionContext = None):
    """|sigma from the truncated series - sigma from the Hankel route|.

    Returns (residual, truncation_estimate) where the estimate is the size of
    the first omitted term |b_{m_max} lambda^{m_max+1}| as an order proxy.
    """
    ctx = ctx or default_context()
    params = EnsembleParams(n, float(alpha), float(beta))
    with ctx.guard():
        lamv = mp.mpf(lam)
        bvals = b_series_closed(n, alpha, beta, min(m_max, 5), ctx)
        sig_series = -n * (n + mp.mpf(beta)) + n * lamv
        for m in range(1, bvals.m_max + 1):
            sig_series -= bvals.b[m] * (-lamv) ** m
        sig_exact = sigma_point(n, lamv, params, ctx).sigma
        trunc = abs(bvals.b[bvals.m_max]) * abs(lamv) ** (bvals.m_max + 1)
        return abs(sig_series - sig_exact), trunc


def dn_expansion(n: int, alpha, beta, lam, m_max: int,
                 ctx: PrecisionContext = None):
    """Truncated determinant expansion D_n(0) exp(sum b_m lambda^m / m)."""
    ctx = ctx or default_context()
    with ctx.guard():
        lamv = mp.mpf(lam)
        if float(alpha) == 0.0 and float(beta) == 0.0:
            ms = [m for m in (1, 2, 4, 6, 8) if m <= m_max]
            bvals = {m: b_closed_form(n, alpha, beta, m, ctx) for m in ms}
        else:
            bvals = {m: b_closed_form(n, alpha, beta, m, ctx)
                     for m in range(1, min(m_max, 5) + 1)}
        expo = mp.mpf(0)
        for m, bm in bvals.items():
            expo += bm * lamv ** m / m
        return mp.exp(log_d0(n, alpha, beta, ctx) + expo)
