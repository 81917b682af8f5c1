"""Special functions needed by the deformed-Jacobi moment machinery.

Only the handful of functions the pipeline actually consumes live here:

* ``log_gamma`` / ``beta`` -- Gamma-family plumbing (mpmath-backed),
* ``kummer_m`` -- the confluent hypergeometric M(a; b; z) by direct Taylor
  series with automatic precision escalation when cancellation is detected,
* ``bessel_i`` -- modified Bessel I_nu by its ascending series,
* ``log_d0`` -- log of the undeformed Hankel determinant via its finite
  Gamma product (no Barnes-G evaluation).

The Kummer series is deliberately plain: at desk scale (|z| up to a couple of
hundred) a Taylor sum at escalated precision is uniformly correct and easy to
audit, which matters more here than speed.  For oscillatory arguments the
largest partial term can exceed the sum by e^{|z|}-type factors; the
escalation loop measures that loss and retries with enough extra bits.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .numkit import NumericsError, PrecisionContext

__all__ = [
    "KummerArgs",
    "log_gamma",
    "beta",
    "kummer_m",
    "bessel_i",
    "log_d0",
]


@dataclass(frozen=True)
class KummerArgs:
    """Arguments of M(a; b; z); b must not be a non-positive integer."""

    a: float
    b: float
    z: complex

    def __post_init__(self):
        bb = mp.mpf(self.b)
        if bb <= 0 and mp.isint(bb):
            raise ValueError("Kummer parameter b must not be a non-positive integer")


def log_gamma(x, ctx: PrecisionContext):
    """log Gamma(x) for x > 0."""
    with ctx.guard():
        xv = mp.mpf(x)
        if xv <= 0:
            raise ValueError("log_gamma requires a positive argument")
        return +mp.loggamma(xv)


def beta(a, b, ctx: PrecisionContext):
    """Euler Beta B(a, b) = Gamma(a) Gamma(b) / Gamma(a+b) for a, b > 0."""
    with ctx.guard():
        av, bv = mp.mpf(a), mp.mpf(b)
        if av <= 0 or bv <= 0:
            raise ValueError("beta requires positive arguments")
        return mp.exp(mp.loggamma(av) + mp.loggamma(bv) - mp.loggamma(av + bv))


_KUMMER_MAX_TERMS = 100_000


def _kummer_series(a, b, z, bits: int):
    """One Taylor-sum attempt at the given working precision.

    Returns (value, cancellation_bits): how many leading bits the largest
    partial term loses against the final sum.
    """
    with mp.workprec(bits):
        tol = mp.mpf(2) ** (-(bits - 8))
        a = mp.mpf(a)
        b = mp.mpf(b)
        z = mp.mpc(z) if mp.im(mp.mpc(z)) != 0 else mp.mpf(mp.re(mp.mpc(z)))
        term = mp.mpf(1) if isinstance(z, type(mp.mpf(1))) else mp.mpc(1)
        total = term
        max_abs = mp.mpf(1)
        small_streak = 0
        terminated = False
        for k in range(_KUMMER_MAX_TERMS):
            term = term * (a + k) * z / ((b + k) * (k + 1))
            if term == 0:
                # negative-integer a: the series is a polynomial, sum is final
                terminated = True
                break
            total += term
            if abs(term) > max_abs:
                max_abs = abs(term)
            # two consecutive tiny terms guard against accidental zeros
            if abs(term) <= tol * max(abs(total), mp.mpf(2) ** (-bits)):
                small_streak += 1
                if small_streak >= 2:
                    break
            else:
                small_streak = 0
        else:
            raise NumericsError("Kummer series did not converge within term cap")
        denom = abs(total)
        if terminated and denom == 0:
            cancel_bits = 0  # exact zero of a terminating polynomial
        elif denom == 0:
            cancel_bits = bits
        else:
            cancel_bits = max(0, int(mp.log(max_abs / denom, 2)) + 1)
        return total, cancel_bits


def kummer_m(args: KummerArgs, ctx: PrecisionContext):
    """Confluent hypergeometric M(a; b; z) by series with escalation.

    The sum runs until terms are below tolerance relative to the partial sum.
    If the largest partial term dwarfs the result (cancellation), the sum is
    repeated with the lost bits added back, up to ctx.max_escalations times.
    """
    bits = ctx.working_bits
    for _ in range(ctx.max_escalations + 1):
        value, cancel_bits = _kummer_series(args.a, args.b, args.z, bits)
        if bits - cancel_bits >= ctx.mantissa_bits + 64:
            return value
        bits = bits + cancel_bits + 64
    raise NumericsError(
        "Kummer series cancellation exceeded escalation budget for a=%s b=%s z=%s"
        % (args.a, args.b, args.z)
    )


def bessel_i(nu, x, ctx: PrecisionContext):
    """Modified Bessel I_nu(x), nu >= 0, by the ascending series."""
    with ctx.guard():
        nu = mp.mpf(nu)
        x = mp.mpf(x)
        if nu < 0:
            raise ValueError("bessel_i implemented for nu >= 0 only")
        half = x / 2
        # sum_k (x/2)^{2k+nu} / (k! Gamma(nu+k+1))
        term = mp.power(half, nu) / mp.gamma(nu + 1) if x != 0 else (
            mp.mpf(1) if nu == 0 else mp.mpf(0))
        if x == 0:
            return term
        total = term
        k = 0
        tol = mp.mpf(2) ** (-(ctx.working_bits - 8))
        while True:
            k += 1
            term = term * half * half / (k * (nu + k))
            total += term
            if abs(term) <= tol * abs(total):
                return total
            if k > _KUMMER_MAX_TERMS:
                raise NumericsError("Bessel series did not converge")


def log_d0(n: int, alpha, beta_exp, ctx: PrecisionContext):
    """log D_n at zero deformation via the finite Gamma product.

    D_n(0) = (1/n!) prod_{j=0}^{n-1} Gamma(j+2) Gamma(j+alpha+1) Gamma(j+beta+1)
                                      / Gamma(n+j+alpha+beta+1).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    with ctx.guard():
        a = mp.mpf(alpha)
        b = mp.mpf(beta_exp)
        total = -mp.loggamma(n + 1)
        for j in range(n):
            total += (
                mp.loggamma(j + 2)
                + mp.loggamma(j + a + 1)
                + mp.loggamma(j + b + 1)
                - mp.loggamma(n + j + a + b + 1)
            )
        return total
