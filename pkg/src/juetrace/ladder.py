"""Auxiliary ladder quantities R_n(lambda), r_n(lambda) and their identities.

The ladder-operator coefficients of the deformed Jacobi weight are rational
in z with residues R_n and r_n:

    R_n(lambda) = (alpha/h_n)     int_0^1 P_n(y)^2        y^{alpha-1} (1-y)^beta e^{-lambda y} dy,
    r_n(lambda) = (alpha/h_{n-1}) int_0^1 P_n(y) P_{n-1}(y) y^{alpha-1} (1-y)^beta e^{-lambda y} dy.

Two independent construction routes are provided:

* ``aux_by_integral`` evaluates the integrals by Gauss-Jacobi quadrature with
  exponents (alpha-1, beta); it needs alpha > 0 for integrability and serves
  as the oracle.
* ``aux_by_recursion`` is the primary route, valid for all alpha > -1 and for
  complex lambda.  It seeds

      r_0 = 0,
      R_0 = (alpha+beta+1) M(alpha; 1+alpha+beta; -lambda)
                          / M(1+alpha; 2+alpha+beta; -lambda),

  then extracts R_n for n >= 1 from the recurrence-coefficient relation
  lambda a_n = 2n+1+alpha+beta+lambda - R_n (a_n taken from the moment-matrix
  factorization, which avoids root-selection ambiguity in the coupled
  first-order difference system), and advances r via the first difference
  equation

      lambda (r_{n+1} + r_n) = R_n^2 - R_n (2n+1+alpha+beta+lambda) + lambda alpha.

  The second difference equation,

      n(n+beta) + (2n+alpha+beta) r_n
          = (r_n^2 - alpha r_n) (lambda^2/(R_n R_{n-1}) - lambda/R_n - lambda/R_{n-1}),

  is evaluated as a residual diagnostic at every step and stored on the table.

At lambda = 0 the difference system degenerates; the analytic limits
R_n(0) = 2n+1+alpha+beta and r_n(0) = -n(n+beta)/(2n+alpha+beta) are stored
with a flag instead.

Residual evaluators for the coupled Riccati system and for the two
second-order scalar ODEs satisfied by R_n and r_n complete the module.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .numkit import PrecisionContext, default_context, derivative, gauss_jacobi_rule
from .orthopoly import EnsembleParams, eval_poly, ortho_table

__all__ = [
    "AuxTable",
    "aux_by_integral",
    "aux_by_recursion",
    "recurrence_from_aux",
    "riccati_residuals",
    "second_order_residuals",
    "bessel_closed_forms",
    "r1_closed_form",
]


@dataclass(frozen=True)
class AuxTable:
    """Values R_0..R_N and r_0..r_N at one deformation argument.

    ``route`` records the construction ('integral' or 'recursion');
    ``diff2_residuals[n]`` holds the second-difference-equation diagnostic for
    1 <= n <= N (index 0 unused); ``at_zero_limit`` flags analytic lambda -> 0
    limit values.
    """

    lam: object
    N: int
    R: tuple
    r: tuple
    route: str
    diff2_residuals: tuple = ()
    at_zero_limit: bool = False


def _kummer(a, b, z, ctx):
    bits = ctx.working_bits
    from .orthopoly import _kummer_bits

    return _kummer_bits(a, b, z, bits, ctx.mantissa_bits + 64, ctx.max_escalations)


def aux_by_recursion(N: int, lam, params: EnsembleParams,
                     ctx: PrecisionContext = None) -> AuxTable:
    """R_0..R_N, r_0..r_N by the seeded difference system (primary route)."""
    ctx = ctx or default_context()
    a = mp.mpf(params.alpha)
    b = mp.mpf(params.beta)
    with ctx.guard():
        lamv = mp.mpc(lam)
        is_real = mp.im(lamv) == 0
        if is_real:
            lamv = mp.re(lamv)
        if lamv == 0:
            R = tuple(2 * n + 1 + a + b for n in range(N + 1))
            r = tuple(-n * (n + b) / (2 * n + a + b) for n in range(N + 1))
            return AuxTable(lam=lamv, N=N, R=R, r=r, route="recursion",
                            diff2_residuals=(mp.mpf(0),) * (N + 1),
                            at_zero_limit=True)
        table = ortho_table(max(N, 1), lamv, params, ctx)
        R = [(a + b + 1) * _kummer(a, a + b + 1, -lamv, ctx)
             / _kummer(1 + a, 2 + a + b, -lamv, ctx)]
        r = [mp.mpf(0)]
        diag = [mp.mpf(0)]
        for n in range(N):
            # r_{n+1} from the first difference equation at index n
            const = 2 * n + 1 + a + b + lamv
            r.append((R[n] ** 2 - R[n] * const + lamv * a) / lamv - r[n])
            # R_{n+1} from lambda a_{n+1} = 2(n+1)+1+alpha+beta+lambda - R_{n+1}
            R.append(2 * (n + 1) + 1 + a + b + lamv - lamv * table.a_rec[n + 1])
            m = n + 1
            lhs = m * (m + b) + (2 * m + a + b) * r[m]
            rhs = (r[m] ** 2 - a * r[m]) * (
                lamv ** 2 / (R[m] * R[m - 1]) - lamv / R[m] - lamv / R[m - 1])
            diag.append(abs(lhs - rhs))
        return AuxTable(lam=lamv, N=N, R=tuple(R), r=tuple(r), route="recursion",
                        diff2_residuals=tuple(diag))


def aux_by_integral(n: int, lam, params: EnsembleParams,
                    ctx: PrecisionContext = None):
    """(R_n, r_n) by direct quadrature; requires alpha > 0.

    The 1/y factor is absorbed by quadrature against exponents (alpha-1, beta);
    r_n is only defined for n >= 1 (returns None in slot r for n = 0).
    """
    ctx = ctx or default_context()
    if not params.alpha > 0:
        raise ValueError("integral route needs alpha > 0; use aux_by_recursion")
    with ctx.guard():
        lamv = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        table = ortho_table(max(n, 1), lamv, params, ctx)

        def quad(f):
            tol = mp.mpf(ctx.target_rel_tol)
            prev = None
            m = 32
            for _ in range(9):
                nodes, weights = gauss_jacobi_rule(m, params.alpha - 1, params.beta, ctx)
                total = mp.mpf(0)
                for x, w in zip(nodes, weights):
                    total += w * f(x) * mp.exp(-lamv * x)
                if prev is not None and abs(total - prev) <= tol * max(
                        abs(total), mp.mpf(2) ** (-ctx.mantissa_bits)):
                    return total
                prev = total
                m *= 2
            return prev

        Rn = a / table.h[n] * quad(lambda y: eval_poly(n, y, table) ** 2)
        rn = None
        if n >= 1:
            rn = a / table.h[n - 1] * quad(
                lambda y: eval_poly(n, y, table) * eval_poly(n - 1, y, table))
        return Rn, rn


def recurrence_from_aux(n: int, aux: AuxTable, params: EnsembleParams):
    """Recurrence coefficients (a_n, b_n) expressed through (R_n, r_n).

    lambda a_n = 2n+1+alpha+beta+lambda - R_n
    b_n (lambda^2 - lambda R_n) = n(n+beta) + (2n+alpha+beta) r_n
                                  + (lambda/R_n)(r_n^2 - alpha r_n)
    """
    lam = aux.lam
    a = mp.mpf(params.alpha)
    b = mp.mpf(params.beta)
    if aux.at_zero_limit or lam == 0:
        raise ValueError("recurrence_from_aux needs lambda != 0")
    Rn, rn = aux.R[n], aux.r[n]
    if Rn == 0:
        raise ZeroDivisionError("degenerate R_n = 0")
    if Rn == lam:
        raise ZeroDivisionError("degenerate R_n = lambda")
    alpha_n = (2 * n + 1 + a + b + lam - Rn) / lam
    beta_n = (n * (n + b) + (2 * n + a + b) * rn + (lam / Rn) * (rn ** 2 - a * rn)) \
        / (lam ** 2 - lam * Rn)
    return alpha_n, beta_n


def _aux_scalar(which: str, n: int, lam, params: EnsembleParams, ctx):
    tab = aux_by_recursion(n, lam, params, ctx)
    return tab.R[n] if which == "R" else tab.r[n]


def riccati_residuals(n: int, lam, params: EnsembleParams,
                      ctx: PrecisionContext = None):
    """Residuals of the coupled first-order Riccati system for (R_n, r_n).

    lambda R_n' = -alpha lambda + R_n (2n+1+alpha+beta+lambda) - R_n^2
                  + 2 lambda r_n
    r_n'        = R_n/(lambda R_n - lambda^2) * [ n(n+beta) + (2n+alpha+beta) r_n
                  + (lambda/R_n)(r_n^2 - alpha r_n) ] + (r_n^2 - alpha r_n)/R_n

    Derivatives come from Richardson differences on the recursion route.
    """
    ctx = ctx or default_context()
    if n < 1:
        raise ValueError("n must be >= 1")
    with ctx.guard():
        lamv = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        tab = aux_by_recursion(n, lamv, params, ctx)
        Rn, rn = tab.R[n], tab.r[n]
        Rp = derivative(lambda l: _aux_scalar("R", n, l, params, ctx), lamv, 1, ctx)
        rp = derivative(lambda l: _aux_scalar("r", n, l, params, ctx), lamv, 1, ctx)
        res_R = abs(lamv * Rp - (-a * lamv + Rn * (2 * n + 1 + a + b + lamv)
                                 - Rn ** 2 + 2 * lamv * rn))
        res_r = abs(rp - (Rn / (lamv * Rn - lamv ** 2)
                          * (n * (n + b) + (2 * n + a + b) * rn
                             + (lamv / Rn) * (rn ** 2 - a * rn))
                          + (rn ** 2 - a * rn) / Rn))
    return res_R, res_r


def second_order_residuals(n: int, lam, params: EnsembleParams,
                           ctx: PrecisionContext = None):
    """Residuals of the scalar second-order ODEs for R_n and for r_n.

    The R_n equation is solved form R_n'' = F(R_n, R_n', lambda); the r_n
    equation is a squared relation
        [lambda^2 r'' + 8 r^3 + 6(2n-alpha+beta) r^2
         + 4(n^2 - 2n alpha + n beta - alpha beta) r
         - 2n(n+beta) alpha + lambda r']^2
        = (4r + lambda + 2n - alpha + beta)^2
          [4 r (r-alpha)(r+n)(r+n+beta) + (lambda r')^2].
    Both residuals are absolute values of (lhs - rhs).
    """
    ctx = ctx or default_context()
    if n < 1:
        raise ValueError("n must be >= 1")
    with ctx.guard():
        lamv = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        tab = aux_by_recursion(n, lamv, params, ctx)
        R, r = tab.R[n], tab.r[n]
        if R == 0 or R == lamv:
            raise ZeroDivisionError("R_n in {0, lambda}: equation degenerate")
        Rp = derivative(lambda l: _aux_scalar("R", n, l, params, ctx), lamv, 1, ctx)
        Rpp = derivative(lambda l: _aux_scalar("R", n, l, params, ctx), lamv, 2, ctx)
        rp = derivative(lambda l: _aux_scalar("r", n, l, params, ctx), lamv, 1, ctx)
        rpp = derivative(lambda l: _aux_scalar("r", n, l, params, ctx), lamv, 2, ctx)
        K = 2 * n + 1 + a + b
        rhs_R = (1 / (2 * lamv ** 2 * (R - lamv) * R)) * (
            (2 * R - lamv) * (lamv * Rp) ** 2
            - 2 * lamv * R ** 2 * Rp
            + 2 * R ** 5
            - 2 * a ** 2 * lamv ** 2 * R
            + a ** 2 * lamv ** 3
            - (2 * K + 5 * lamv) * R ** 4
            + 4 * lamv * (K + lamv) * R ** 3
            - (lamv ** 3 - lamv * (1 + a ** 2 - b ** 2) + 2 * lamv ** 2 * K) * R ** 2
        )
        res_R = abs(Rpp - rhs_R)
        lhs_r = (lamv ** 2 * rpp + 8 * r ** 3 + 6 * (2 * n - a + b) * r ** 2
                 + 4 * (n ** 2 - 2 * n * a + n * b - a * b) * r
                 - 2 * n * (n + b) * a + lamv * rp) ** 2
        rhs_r = (4 * r + lamv + 2 * n - a + b) ** 2 * (
            4 * r * (r - a) * (r + n) * (r + n + b) + (lamv * rp) ** 2)
        res_r = abs(lhs_r - rhs_r)
    return res_R, res_r


# ---------------------------------------------------------------------------
# Closed forms for special parameter values
# ---------------------------------------------------------------------------

def r1_closed_form(lam, params: EnsembleParams, ctx: PrecisionContext = None,
                   printed: bool = False):
    """Kummer closed form of r_1(lambda).

    The derivable expression (r_1 = alpha - a_0 R_0 with a_0 = mu_1/mu_0) is

        r_1 = alpha - (alpha+1)(alpha+beta+1)
                      M(alpha; alpha+beta+1; -lambda) M(alpha+2; alpha+beta+3; -lambda)
              / [(alpha+beta+2) M(alpha+1; alpha+beta+2; -lambda)^2].

    ``printed=True`` swaps the (alpha+beta+1)/(alpha+beta+2) pair, matching a
    published variant of the formula; the two differ by that ratio squared's
    worth and do NOT agree with the difference system -- kept only so the
    discrepancy can be reported.
    """
    ctx = ctx or default_context()
    with ctx.guard():
        lamv = mp.mpf(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        m_a = _kummer(a, a + b + 1, -lamv, ctx)
        m_b = _kummer(a + 1, a + b + 2, -lamv, ctx)
        m_c = _kummer(a + 2, a + b + 3, -lamv, ctx)
        if printed:
            coef = (a + 1) * (a + b + 2) / (a + b + 1)
        else:
            coef = (a + 1) * (a + b + 1) / (a + b + 2)
        return a - coef * m_a * m_c / (m_b ** 2)


def bessel_closed_forms(lam, ctx: PrecisionContext = None, printed: bool = False):
    """(R_0, r_1, R_1) at alpha = beta = 1/2 in terms of modified Bessel I_nu.

    With u = I_0(lambda/2), v = I_1(lambda/2), w = I_2(lambda/2):

        R_0 = (lambda/2) [u/v + 1]
        r_1 = (1/4) [lambda u w / v^2 - lambda - 2]
        R_1 = lambda [(lambda+4) v - lambda u] [-lambda u^2 + 4 u v + (lambda+2) v^2]
              / { 2 v [-lambda^2 u^2 + (lambda^2+8) v^2 + 2 lambda u v] }

    ``printed=True`` uses lambda/4 in R_0 (a published variant, exactly half
    of the value consistent with the Kummer seed); r_1 and R_1 are unchanged.
    """
    from .specfun import bessel_i

    ctx = ctx or default_context()
    with ctx.guard():
        lamv = mp.mpf(lam)
        u = bessel_i(0, lamv / 2, ctx)
        v = bessel_i(1, lamv / 2, ctx)
        w = bessel_i(2, lamv / 2, ctx)
        factor = mp.mpf(1) / 4 if printed else mp.mpf(1) / 2
        R0 = factor * lamv * (u / v + 1)
        r1 = (lamv * u * w / v ** 2 - lamv - 2) / 4
        R1 = (lamv * ((lamv + 4) * v - lamv * u)
              * (-lamv * u ** 2 + 4 * u * v + (lamv + 2) * v ** 2)
              / (2 * v * (-lamv ** 2 * u ** 2 + (lamv ** 2 + 8) * v ** 2
                          + 2 * lamv * u * v)))
        return R0, r1, R1
