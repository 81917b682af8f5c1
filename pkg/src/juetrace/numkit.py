"""Precision-controlled arithmetic, weighted quadrature and differentiation.

Everything downstream (moment matrices, Hankel determinants, residual
verification) runs on top of this module.  The central object is a
:class:`PrecisionContext`, a frozen record of

* ``mantissa_bits`` -- the binary precision at which results are delivered,
* ``target_rel_tol`` -- the relative accuracy the caller wants certified,
* ``max_escalations`` -- how many times a consumer may double the working
  precision when a stability check fails.

Values are ordinary ``mpmath`` numbers.  Operations compute with guard bits
(typically twice the delivery precision) so that a returned value is accurate
essentially to the last delivered bit; the explicit escalation loop on top of
that handles genuinely ill-conditioned objects such as Hankel pivots.

Quadrature against the deformed Jacobi weight

    x^alpha (1-x)^beta exp(-lambda x)   on (0, 1)

uses Gauss-Jacobi rules: the algebraic endpoint factors are absorbed into the
nodes/weights (after mapping [-1,1] -> [0,1]) while exp(-lambda x) is folded
into the integrand, which keeps the node tables independent of lambda and
cacheable.  Node counts double until two successive rules agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from mpmath import mp

__all__ = [
    "PrecisionContext",
    "NumericsError",
    "QuadratureError",
    "make_context",
    "default_context",
    "integrate_weighted",
    "derivative",
    "derivative_with_error",
    "gauss_jacobi_rule",
]


class NumericsError(ArithmeticError):
    """Base class for numeric failures that survived escalation."""


class QuadratureError(NumericsError):
    """Adaptive quadrature failed to converge; carries the last two levels."""

    def __init__(self, msg, estimates=None):
        super().__init__(msg)
        self.estimates = estimates


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable precision policy shared by all numeric operations."""

    mantissa_bits: int
    target_rel_tol: float
    max_escalations: int = 6

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise ValueError("mantissa_bits must be at least 64")
        if not self.target_rel_tol > 0:
            raise ValueError("target_rel_tol must be positive")
        # The tolerance has to be representable with an 8-bit safety margin.
        floor = mp.mpf(2) ** (-(self.mantissa_bits - 8))
        if self.target_rel_tol < floor:
            raise ValueError(
                "target_rel_tol %g below precision floor 2^-(mantissa_bits-8) = %s"
                % (self.target_rel_tol, mp.nstr(floor, 8))
            )

    @property
    def working_bits(self) -> int:
        """Internal precision: delivery bits plus guard bits."""
        return 2 * self.mantissa_bits

    def guard(self, extra_bits: int = 0):
        """Context manager switching mpmath to the working precision."""
        return mp.workprec(self.working_bits + extra_bits)

    def escalated(self, times: int = 1) -> "PrecisionContext":
        """A context with the mantissa doubled ``times`` times."""
        return PrecisionContext(
            self.mantissa_bits * (2 ** times), self.target_rel_tol, self.max_escalations
        )


def make_context(mantissa_bits: int, target_rel_tol: float,
                 max_escalations: int = 6) -> PrecisionContext:
    """Build a :class:`PrecisionContext`, rejecting unachievable tolerances."""
    return PrecisionContext(int(mantissa_bits), float(target_rel_tol), max_escalations)


def default_context() -> PrecisionContext:
    """256-bit context certifying 1e-30 relative accuracy."""
    return make_context(256, 1e-30)


# ---------------------------------------------------------------------------
# Gauss-Jacobi rules on [0, 1] for the weight x^alpha (1-x)^beta
# ---------------------------------------------------------------------------

def _monic_jacobi_coeffs(m: int, a, b):
    """Monic three-term recurrence coefficients on [-1,1] for (1-t)^a (1+t)^b.

    p_{k+1}(t) = (t - A_k) p_k(t) - B_k p_{k-1}(t), with B_0 unused.
    """
    ab = a + b
    A = []
    B = [mp.mpf(0)]
    for k in range(m):
        if k == 0:
            denom = ab + 2
            A.append((b - a) / denom if denom != 0 else mp.mpf(0))
        else:
            denom = (2 * k + ab) * (2 * k + ab + 2)
            A.append((b * b - a * a) / denom)
        if k == 1:
            B.append(4 * (a + 1) * (b + 1) / ((ab + 2) ** 2 * (ab + 3)))
        elif k >= 2:
            B.append(
                4 * k * (k + a) * (k + b) * (k + ab)
                / ((2 * k + ab) ** 2 * (2 * k + ab + 1) * (2 * k + ab - 1))
            )
    return A, B


def _eval_monic(t, A, B, m):
    """Value and derivative of the degree-m monic polynomial at t."""
    pm1, p = mp.mpf(0), mp.mpf(1)
    dm1, d = mp.mpf(0), mp.mpf(0)
    for k in range(m):
        pnew = (t - A[k]) * p - (B[k] * pm1 if k > 0 else 0)
        dnew = p + (t - A[k]) * d - (B[k] * dm1 if k > 0 else 0)
        pm1, p = p, pnew
        dm1, d = d, dnew
    return p, d, pm1


@lru_cache(maxsize=256)
def _rule_cached(m: int, alpha_key, beta_key, bits: int):
    """Nodes/weights on [0,1] for x^alpha (1-x)^beta, full bit accuracy.

    float64 seeds from scipy are polished by Newton iteration on the monic
    Jacobi polynomial; weights come from the Christoffel formula
    w_i = h_{m-1} / (p_{m-1}(t_i) p_m'(t_i)).
    """
    from scipy.special import roots_jacobi

    with mp.workprec(bits + 64):
        alpha = mp.mpf(alpha_key)
        beta = mp.mpf(beta_key)
        # x = (1+t)/2 maps the weight to (1-t)^beta (1+t)^alpha on [-1,1].
        a, b = beta, alpha
        A, Bc = _monic_jacobi_coeffs(m, a, b)
        seeds = roots_jacobi(m, float(a), float(b))[0]
        eps = mp.mpf(2) ** (-(bits + 16))
        nodes_t = []
        for s in seeds:
            t = mp.mpf(float(s))
            for _ in range(80):
                p, d, _ = _eval_monic(t, A, Bc, m)
                step = p / d
                t -= step
                if abs(step) <= eps * max(abs(t), mp.mpf(1)):
                    break
            nodes_t.append(t)
        # h_{m-1} = mu0 * prod B_k; mu0 = 2^{a+b+1} B(a+1, b+1)
        mu0 = mp.power(2, a + b + 1) * mp.beta(a + 1, b + 1)
        hm1 = mu0
        for k in range(1, m):
            hm1 *= Bc[k]
        nodes, weights = [], []
        scale = mp.power(2, -(alpha + beta + 1))
        for t in nodes_t:
            _, d, pm1 = _eval_monic(t, A, Bc, m)
            w = hm1 / (pm1 * d)
            nodes.append((1 + t) / 2)
            weights.append(w * scale)
        return tuple(nodes), tuple(weights)


def gauss_jacobi_rule(m: int, alpha, beta, ctx: PrecisionContext):
    """m-point rule for integrals of f against x^alpha (1-x)^beta on [0,1]."""
    if m < 1:
        raise ValueError("node count must be positive")
    with ctx.guard():
        ak = mp.mpf(alpha)
        bk = mp.mpf(beta)
    if not (ak > -1 and bk > -1):
        raise ValueError("weight exponents must exceed -1")
    return _rule_cached(m, str(ak), str(bk), ctx.working_bits)


def integrate_weighted(f: Callable, alpha, beta, lam, ctx: PrecisionContext,
                       initial_nodes: int = 24, max_doublings: int = 8):
    """Integral of f(x) x^alpha (1-x)^beta exp(-lambda x) over (0, 1).

    Gauss-Jacobi nodes absorb the algebraic weight; exp(-lambda x) multiplies
    the integrand so the rule stays lambda-independent.  Node count doubles
    until two successive levels agree to ctx.target_rel_tol.  Complex lambda
    is evaluated with the same real nodes and a complex integrand.
    """
    with ctx.guard():
        lamv = mp.mpc(lam) if (isinstance(lam, complex) or mp.im(mp.mpc(lam)) != 0) else mp.mpf(lam)
        tol = mp.mpf(ctx.target_rel_tol)
        prev = None
        m = initial_nodes
        estimates = []
        for _ in range(max_doublings + 1):
            nodes, weights = gauss_jacobi_rule(m, alpha, beta, ctx)
            total = mp.mpf(0)
            for x, w in zip(nodes, weights):
                total += w * f(x) * mp.exp(-lamv * x)
            estimates.append(total)
            if prev is not None:
                if abs(total - prev) <= tol * max(abs(total), mp.mpf(2) ** (-ctx.mantissa_bits)):
                    return total
            prev = total
            m *= 2
        raise QuadratureError(
            "weighted quadrature did not converge after %d doublings; last two "
            "estimates %s and %s" % (max_doublings, mp.nstr(estimates[-2], 20),
                                     mp.nstr(estimates[-1], 20)),
            estimates=(estimates[-2], estimates[-1]),
        )


# ---------------------------------------------------------------------------
# Numerical differentiation
# ---------------------------------------------------------------------------

def _dyadic_step(scale, log2_frac: float):
    """Power-of-two step near scale * 2^log2_frac, so stencil points are exact."""
    expo = int(math.floor(math.log2(float(scale)) + log2_frac)) if float(scale) > 0 else int(log2_frac)
    return mp.mpf(2) ** expo


def derivative_with_error(g: Callable, lam0, order: int, ctx: PrecisionContext,
                          levels: int = 3):
    """Richardson-extrapolated central difference plus a truncation estimate.

    The base step is max(|lam0|, 1) * (2^-mantissa_bits)^(1/(order+2)),
    rounded to a power of two so that the stencil abscissae are exactly
    representable (and therefore cache-friendly for table builders).
    """
    if order not in (1, 2):
        raise ValueError("only first and second derivatives are supported")
    with ctx.guard(64):
        scale = max(abs(mp.mpf(lam0)), mp.mpf(1))
        h0 = _dyadic_step(scale, -ctx.mantissa_bits / (order + 2))
        lam0 = mp.mpf(lam0)

        def central(h):
            if order == 1:
                return (g(lam0 + h) - g(lam0 - h)) / (2 * h)
            return (g(lam0 + h) - 2 * g(lam0) + g(lam0 - h)) / (h * h)

        # Richardson table: error orders h^2, h^4, ...
        rows = [[central(h0 / (2 ** i))] for i in range(levels)]
        for j in range(1, levels):
            for i in range(levels - j):
                fac = mp.mpf(4) ** j
                rows[i].append((fac * rows[i + 1][j - 1] - rows[i][j - 1]) / (fac - 1))
        value = rows[0][levels - 1]
        err = abs(value - rows[1][levels - 2]) if levels > 1 else mp.mpf("nan")
        return value, err


def derivative(g: Callable, lam0, order: int, ctx: PrecisionContext) -> "mp.mpf":
    """First or second derivative of g at lam0; see derivative_with_error."""
    return derivative_with_error(g, lam0, order, ctx)[0]
