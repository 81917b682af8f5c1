"""Painleve V, sigma-form, Chazy and discrete-relation residual checks.

Sign conventions
----------------
The deformation argument alternates sign between the natural objects, so all
conversions are centralized here:

    sigma_n(s)   = n s + s p(n, -s) - n (n + beta)        (argument s)
    Y_n(t)       = 1 + t / R_n(-t)                        (argument t)
    Y_n(-lambda) = 1 - lambda / R_n(lambda)

i.e. computing sigma at s requires the orthogonalization table at -s, and
computing Y at t requires the ladder table at -t.  Derivatives of sigma come
in two flavours:

* ``analytic``: using d/ds log D(s) = p(n, s) and the Toda flow,

      sigma'(s)  = n + p(n,-s) - s beta_n(-s) = -r_n(-s)
      sigma''(s) = -2 beta_n(-s) + s [beta_n (a_{n-1} - a_n)](-s)

* ``fd``: Richardson finite differences of sigma itself (the independent
  cross-check; the analytic route is the default so that residual tests
  verify the identity rather than difference noise).

Residual evaluators cover: the sigma-form of Painleve V (quadratic in the
second derivative), the equivalent Jimbo-Miwa-Okamoto normal form for
-sigma, the Painleve V equation for Y_n, the Chazy II system satisfied by a
transformed r_n at imaginary exponential argument, the discrete relation
linking sigma_{n-1}, sigma_n, sigma_{n+1}, the linear second-order ODE obeyed
by the orthogonal polynomials themselves, and the (suspect) closed form for
sigma in terms of Y, which is reported rather than asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .ladder import AuxTable, aux_by_recursion
from .numkit import PrecisionContext, default_context, derivative
from .orthopoly import EnsembleParams, ortho_table

__all__ = [
    "SigmaPoint",
    "sigma_point",
    "sigma_form_residual",
    "jmo_sigma_form_residual",
    "y_from_R",
    "y_value",
    "pv_residual",
    "chazy_residual",
    "discrete_sigma_residual",
    "pn_ode_residual",
    "sigma_from_y_check",
]


@dataclass(frozen=True)
class SigmaPoint:
    """sigma and its first two derivatives at one real argument."""

    lam: object
    n: int
    sigma: object
    sigma_p: object
    sigma_pp: object
    derivation: str


def _sigma_value(n, s, params, ctx):
    b = mp.mpf(params.beta)
    table = ortho_table(n, -s, params, ctx)
    return n * s + s * table.p_sub[n] - n * (n + b)


def sigma_point(n: int, lam, params: EnsembleParams,
                ctx: PrecisionContext = None,
                derivation: str = "analytic") -> SigmaPoint:
    """sigma_n and derivatives at a real argument.

    lambda -> 0 limits: sigma -> -n(n+beta), sigma' -> n(n+beta)/(2n+alpha+beta).
    """
    ctx = ctx or default_context()
    if derivation not in ("analytic", "fd"):
        raise ValueError("derivation must be 'analytic' or 'fd'")
    with ctx.guard():
        s = mp.mpf(lam)
        b = mp.mpf(params.beta)
        table = ortho_table(n, -s, params, ctx)
        sig = n * s + s * table.p_sub[n] - n * (n + b)
        if derivation == "analytic":
            beta_n = table.b_rec[n]
            sig_p = n + table.p_sub[n] - s * beta_n
            sig_pp = -2 * beta_n + s * beta_n * (table.a_rec[n - 1] - table.a_rec[n])
        else:
            sig_p = derivative(lambda t: _sigma_value(n, t, params, ctx), s, 1, ctx)
            sig_pp = derivative(lambda t: _sigma_value(n, t, params, ctx), s, 2, ctx)
    return SigmaPoint(lam=s, n=n, sigma=sig, sigma_p=sig_p, sigma_pp=sig_pp,
                      derivation="analytic-Toda" if derivation == "analytic" else
                      "finite-difference")


def sigma_form_residual(n: int, lam, params: EnsembleParams,
                        ctx: PrecisionContext = None,
                        derivation: str = "analytic"):
    """Absolute residual of the sigma-form

    (s sigma'')^2 = [sigma - s sigma' + (2n+alpha+beta) sigma']^2
                    + 4 [sigma'^2 + alpha sigma'] [s sigma' - sigma - n(n+beta)].
    """
    ctx = ctx or default_context()
    pt = sigma_point(n, lam, params, ctx, derivation)
    with ctx.guard():
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        s = pt.lam
        lhs = (s * pt.sigma_pp) ** 2
        rhs = (pt.sigma - s * pt.sigma_p + (2 * n + a + b) * pt.sigma_p) ** 2 \
            + 4 * (pt.sigma_p ** 2 + a * pt.sigma_p) \
            * (s * pt.sigma_p - pt.sigma - n * (n + b))
        return abs(lhs - rhs)


def jmo_sigma_form_residual(n: int, lam, params: EnsembleParams,
                            ctx: PrecisionContext = None,
                            derivation: str = "analytic",
                            printed: bool = False):
    """Residual of the Jimbo-Miwa-Okamoto normal form for tilde-sigma = -sigma:

    (s t'')^2 = [t - s t' + 2 t'^2 + (2n - alpha + beta) t']^2
                - 4 t'(t' - alpha)(t' + n)(t' + n + beta),

    which is algebraically equivalent to the quadratic sigma-form above (the
    parameter tuple is (0, -alpha, n, n+beta)).  ``printed=True`` flips the
    sign of the (2n-alpha+beta) t' term, matching a published variant that
    differs from the quadratic form by exactly
    4 t' (alpha-2n-beta) (2 t'^2 + t - s t'); it is kept for the report.
    """
    ctx = ctx or default_context()
    pt = sigma_point(n, lam, params, ctx, derivation)
    with ctx.guard():
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        s = pt.lam
        t, tp, tpp = -pt.sigma, -pt.sigma_p, -pt.sigma_pp
        sign = -1 if printed else 1
        lhs = (s * tpp) ** 2
        rhs = (t - s * tp + 2 * tp ** 2 + sign * (2 * n - a + b) * tp) ** 2 \
            - 4 * tp * (tp - a) * (tp + n) * (tp + n + b)
        return abs(lhs - rhs)


def y_from_R(n: int, lam, aux: AuxTable):
    """Y_n(-lambda) = 1 - lambda / R_n(lambda) from a ladder table at lambda."""
    Rn = aux.R[n]
    if Rn == 0:
        raise ZeroDivisionError("R_n = 0: Y undefined")
    return 1 - aux.lam / Rn


def y_value(n: int, t, params: EnsembleParams, ctx: PrecisionContext = None):
    """Y_n evaluated at its own argument t: Y_n(t) = 1 + t / R_n(-t)."""
    ctx = ctx or default_context()
    with ctx.guard():
        tv = mp.mpf(t)
        aux = aux_by_recursion(n, -tv, params, ctx)
        if aux.R[n] == 0:
            raise ZeroDivisionError("R_n = 0: Y undefined")
        return 1 + tv / aux.R[n]


def pv_residual(n: int, lam, params: EnsembleParams,
                ctx: PrecisionContext = None):
    """Residual of the Painleve V equation with parameters
    (alpha^2/2, -beta^2/2, 2n+1+alpha+beta, 1/2) at argument lambda:

    Y'' = (3Y-1)/(2Y(Y-1)) Y'^2 - Y'/s + (Y-1)^2/s^2 (alpha^2/2 Y - beta^2/(2Y))
          + (2n+1+alpha+beta) Y/s - (1/2) Y(Y+1)/(Y-1).

    Y and its derivatives come from finite differences on the recursion route
    composed with the R -> Y change of variables.
    """
    ctx = ctx or default_context()
    with ctx.guard():
        s = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        if s == 0:
            raise ValueError("Painleve V residual needs lambda != 0")
        Y = y_value(n, s, params, ctx)
        if Y == 0 or Y == 1:
            raise ZeroDivisionError("Y in {0, 1}: equation degenerate")
        Yp = derivative(lambda t: y_value(n, t, params, ctx), s, 1, ctx)
        Ypp = derivative(lambda t: y_value(n, t, params, ctx), s, 2, ctx)
        rhs = ((3 * Y - 1) / (2 * Y * (Y - 1)) * Yp ** 2
               - Yp / s
               + (Y - 1) ** 2 / s ** 2 * (a ** 2 / 2 * Y - b ** 2 / 2 / Y)
               + (2 * n + 1 + a + b) * Y / s
               - Y * (Y + 1) / (2 * (Y - 1)))
        return abs(Ypp - rhs)


def _chazy_theta(n, z, params, ctx, printed_shift=False):
    a = mp.mpf(params.alpha)
    b = mp.mpf(params.beta)
    lam = 2j * mp.exp(z)
    aux = aux_by_recursion(n, lam, params, ctx)
    shift = mp.mpc(0, 1) / 2 * (2 * n - a + b)
    return 2j * aux.r[n] + (-shift if printed_shift else shift)


def chazy_residual(n: int, z, params: EnsembleParams,
                   ctx: PrecisionContext = None,
                   printed: bool = False):
    """|residual| of the Chazy II system satisfied by a transformed r_n.

    With theta(z) = 2i r_n(2i e^z) + (i/2)(2n - alpha + beta), substitution
    of lambda = 2i e^z into the second-order ODE for r_n yields exactly

    (theta'' - 2 theta^3 - a1 theta - b1)^2
        = -4 (theta - e^z)^2 [theta'^2 - theta^4 - a1 theta^2 - 2 b1 theta - g1]

    with
        a1 = (4n^2 + 4n alpha + 3 alpha^2 + 4n beta + 2 alpha beta + 3 beta^2)/2
        b1 = (i/2)(alpha - beta)(alpha + beta)(2n + alpha + beta)
        g1 = (1/16)(2n+alpha-beta)(2n-alpha+beta)(2n+3alpha+beta)(2n+alpha+3beta)

    ``printed=True`` evaluates a published variant (shift of opposite sign,
    b1 of opposite sign, 3 beta^3 in a1 and (2n+3alpha+2beta) in g1); it does
    not vanish and is kept only for the documentation report.
    """
    ctx = ctx or default_context()
    with ctx.guard():
        zv = mp.mpf(z)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)

        def theta_at(t):
            return _chazy_theta(n, t, params, ctx, printed_shift=printed)

        theta = theta_at(zv)
        tp = derivative(theta_at, zv, 1, ctx)
        tpp = derivative(theta_at, zv, 2, ctx)
        blast = b ** 3 if printed else b ** 2
        a1 = (4 * n ** 2 + 4 * n * a + 3 * a ** 2 + 4 * n * b + 2 * a * b
              + 3 * blast) / 2
        b1 = mp.mpc(0, 1) / 2 * (a - b) * (a + b) * (2 * n + a + b)
        if printed:
            b1 = -b1
        g_last = (2 * n + 3 * a + 2 * b) if printed else (2 * n + 3 * a + b)
        g1 = mp.mpf(1) / 16 * (2 * n + a - b) * (2 * n - a + b) \
            * g_last * (2 * n + a + 3 * b)
        ez = mp.exp(zv)
        lhs = (tpp - 2 * theta ** 3 - a1 * theta - b1) ** 2
        rhs = -4 * (theta - ez) ** 2 * (tp ** 2 - theta ** 4 - a1 * theta ** 2
                                        - 2 * b1 * theta - g1)
        return abs(lhs - rhs)


def discrete_sigma_residual(n: int, lam, params: EnsembleParams,
                            ctx: PrecisionContext = None,
                            mirrored_argument: bool = False):
    """|residual| of the discrete relation among sigma_{n-1}, sigma_n, sigma_{n+1}.

    With s_j = sigma_j(lambda) -- the same argument as the lambda appearing in
    the relation; this is the convention under which the identity is exact --
    the relation reads

      (s_n - s_{n-1} - alpha) [(2n+alpha+beta)(s_n + n^2 + n beta)
                               - n lambda (n+beta)] (s_n - s_{n+1} + alpha)
      (2n - alpha + beta - lambda - s_{n-1} + s_{n+1})
      + G [G - alpha lambda (2n - alpha + beta - lambda - s_{n-1} + s_{n+1})] = 0,

      G = 2 n alpha (n+beta) + (2 alpha + lambda) s_n
          + (n^2 + n beta + s_n)(s_{n-1} - s_{n+1}).

    ``mirrored_argument=True`` evaluates s_j = sigma_j(-lambda) instead (the
    relation then fails; retained for the conventions report).  No derivatives
    enter: with the default convention this is an exact algebraic identity and
    the residual is bounded by rounding at working precision.
    """
    ctx = ctx or default_context()
    if n < 1:
        raise ValueError("needs sigma at n-1, n, n+1 with n >= 1")
    with ctx.guard():
        lamv = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        arg = -lamv if mirrored_argument else lamv
        s = {j: _sigma_value(j, arg, params, ctx) for j in (n - 1, n, n + 1)}
        f1 = s[n] - s[n - 1] - a
        f2 = (2 * n + a + b) * (s[n] + n * n + n * b) - n * lamv * (n + b)
        f3 = s[n] - s[n + 1] + a
        f4 = 2 * n - a + b - lamv - s[n - 1] + s[n + 1]
        G = 2 * n * a * (n + b) + (2 * a + lamv) * s[n] \
            + (n * n + n * b + s[n]) * (s[n - 1] - s[n + 1])
        return abs(f1 * f2 * f3 * f4 + G * (G - a * lamv * f4))


def pn_ode_residual(n: int, z, lam, params: EnsembleParams,
                    ctx: PrecisionContext = None):
    """Residual of the linear second-order ODE for the monic P_n:

    P_n'' + R(z) P_n' + Q(z) P_n = 0,

    R(z) = (alpha+1)/z + (beta+1)/(z-1) - lambda - 1/(z - R_n/lambda),
    Q(z) = [n(alpha+1) - sigma_n(-lambda)]/z
           + [n(lambda-alpha-1) + sigma_n(-lambda)]/(z-1)
           + 1/(z - R_n/lambda) * [ (n + r_n)/(z-1) - r_n/z ],

    where r_n(lambda) = d/dlambda [sigma_n(-lambda)] and the pole sits at
    R_n/lambda = -1/(Y_n(-lambda) - 1).  Polynomial derivatives are exact
    (coefficient differentiation of the monic expansion).
    """
    ctx = ctx or default_context()
    if n < 1:
        raise ValueError("n must be >= 1")
    with ctx.guard():
        zv = mp.mpf(z)
        lamv = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        table = ortho_table(n, lamv, params, ctx)
        aux = aux_by_recursion(n, lamv, params, ctx)
        Rn, rn = aux.R[n], aux.r[n]
        pole = Rn / lamv
        if zv in (mp.mpf(0), mp.mpf(1)) or abs(zv - pole) < mp.mpf("1e-12"):
            raise ValueError("evaluation point too close to a pole of the ODE")
        sig = -n * lamv - lamv * table.p_sub[n] - n * (n + b)  # sigma_n(-lambda)
        coeffs = table.poly_coeffs[n]
        P = _poly_eval(coeffs, zv)
        Pp = _poly_eval(_poly_diff(coeffs), zv)
        Ppp = _poly_eval(_poly_diff(_poly_diff(coeffs)), zv)
        Rz = (a + 1) / zv + (b + 1) / (zv - 1) - lamv - 1 / (zv - pole)
        Qz = (n * (a + 1) - sig) / zv \
            + (n * (lamv - a - 1) + sig) / (zv - 1) \
            + 1 / (zv - pole) * ((n + rn) / (zv - 1) - rn / zv)
        return abs(Ppp + Rz * Pp + Qz * P)


def _poly_eval(coeffs, x):
    total = mp.mpf(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def _poly_diff(coeffs):
    return tuple(k * coeffs[k] for k in range(1, len(coeffs)))


def sigma_from_y_check(n: int, lam, params: EnsembleParams,
                       ctx: PrecisionContext = None):
    """Evaluate closed forms of sigma_n in terms of Y_n; report only.

    Printed right-hand side (prefactor 1/(4 Y (4Y-1)^2)):

        beta^2 - (s Y')^2 + alpha^2 Y^4
        + [alpha^2 + (beta-s)^2 - 4 alpha (beta+2n) + 2 s (alpha+6n)] Y^2
        + 2 [alpha (2n - alpha + beta - s) - 4 n s] Y^3
        + 2 [2n (alpha - s) + beta (alpha - beta + s)] Y

    Three values are reported side by side and none is asserted by this
    operation: the printed form, the same numerator over the (Y-1)^2
    prefactor, and the numerator obtained by eliminating the ladder variables
    exactly (which does reproduce sigma):

        [ beta^2 - (s Y')^2 + alpha^2 Y^4 + 2 alpha (2n - alpha + beta - s) Y^3
          + (alpha^2 + (beta-s)^2 - 4 alpha (beta+2n) + 2 s (alpha-2n)) Y^2
          + 2 (2n (alpha + s) + beta (alpha - beta + s)) Y ] / (4 Y (Y-1)^2).
    """
    ctx = ctx or default_context()
    with ctx.guard():
        s = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        sig = _sigma_value(n, s, params, ctx)
        Y = y_value(n, s, params, ctx)
        Yp = derivative(lambda t: y_value(n, t, params, ctx), s, 1, ctx)
        core_printed = (b ** 2 - (s * Yp) ** 2 + a ** 2 * Y ** 4
                        + (a ** 2 + (b - s) ** 2 - 4 * a * (b + 2 * n)
                           + 2 * s * (a + 6 * n)) * Y ** 2
                        + 2 * (a * (2 * n - a + b - s) - 4 * n * s) * Y ** 3
                        + 2 * (2 * n * (a - s) + b * (a - b + s)) * Y)
        core_derived = (b ** 2 - (s * Yp) ** 2 + a ** 2 * Y ** 4
                        + 2 * a * (2 * n - a + b - s) * Y ** 3
                        + (a ** 2 + (b - s) ** 2 - 4 * a * (b + 2 * n)
                           + 2 * s * (a - 2 * n)) * Y ** 2
                        + 2 * (2 * n * (a + s) + b * (a - b + s)) * Y)
        printed = core_printed / (4 * Y * (4 * Y - 1) ** 2)
        variant = core_printed / (4 * Y * (Y - 1) ** 2)
        derived = core_derived / (4 * Y * (Y - 1) ** 2)
        return {
            "sigma": sig,
            "printed_form": printed,
            "printed_residual": abs(sig - printed),
            "y_minus_one_form": variant,
            "y_minus_one_residual": abs(sig - variant),
            "derived_form": derived,
            "derived_residual": abs(sig - derived),
        }
