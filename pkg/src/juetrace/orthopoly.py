"""Moments, Hankel determinants and orthogonalization for the deformed weight.

The weight is

    w(x; lambda, alpha, beta) = x^alpha (1-x)^beta exp(-lambda x),  x in (0,1),

with alpha, beta > -1 and a real or complex deformation argument lambda.  Its
power moments have the closed form

    mu_j(lambda) = B(j+alpha+1, beta+1) * M(j+alpha+1; j+alpha+beta+2; -lambda),

so the Hankel moment matrix [mu_{j+k}] can be assembled to any precision.  A
root-free symmetric triangular (LDL^T) factorization of that matrix yields in
one sweep:

* the squared norms h_j of the monic orthogonal polynomials (the pivots),
* log D_n = sum_{j<n} log h_j for the Hankel determinants,
* the monic coefficient rows (inverse of the unit factor), hence the
  sub-leading coefficients p(n, lambda),
* the recurrence data a_n = p(n) - p(n+1) and b_n = h_n / h_{n-1}.

Hankel matrices are exponentially ill-conditioned in the dimension, so builds
run at escalating working precision until the log-determinant vector is
stable to the context tolerance; a failing pivot at the precision cap is
reported with its index.  For complex lambda positivity is unavailable and a
pivot-magnitude monitor triggers the same escalation.

Tables are immutable and cached on the exact binary value of lambda, which
makes finite-difference stencils and inversion grids cheap to revisit.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .numkit import NumericsError, PrecisionContext, default_context
from .specfun import _kummer_series, beta as beta_fn

__all__ = [
    "EnsembleParams",
    "OrthoTable",
    "FactorizationError",
    "moment",
    "ortho_table",
    "hankel_det_log",
    "sub_leading",
    "eval_poly",
    "toda_residuals",
    "MAX_TABLE_DEGREE",
]

MAX_TABLE_DEGREE = 64


class FactorizationError(NumericsError):
    """Symmetric factorization broke down at the maximum precision."""

    def __init__(self, msg, pivot_index=None):
        super().__init__(msg)
        self.pivot_index = pivot_index


@dataclass(frozen=True)
class EnsembleParams:
    """Ensemble size and Jacobi exponents (alpha, beta > -1)."""

    n: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix dimension n must be >= 1")
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError("weight exponents must exceed -1 for integrability")


@dataclass(frozen=True)
class OrthoTable:
    """Per-lambda orthogonalization data up to degree N.

    h[j], 0<=j<=N            squared norms (factorization pivots)
    a_rec[j], 0<=j<=N        recurrence coefficients alpha_j(lambda)
    b_rec[j], 1<=j<=N+1      recurrence coefficients beta_j(lambda); b_rec[0]=0
    p_sub[j], 0<=j<=N+1      sub-leading monic coefficients, p_sub[0]=0
    log_d[n], 0<=n<=N+1      log Hankel determinants, log_d[0]=0
    poly_coeffs[j], j<=N+1   ascending monic coefficients of P_j
    """

    lam: object
    N: int
    alpha: object
    beta: object
    h: tuple
    a_rec: tuple
    b_rec: tuple
    p_sub: tuple
    log_d: tuple
    poly_coeffs: tuple
    working_bits: int

    def is_real(self) -> bool:
        return isinstance(self.lam, type(mp.mpf(0)))


def _as_mp_scalar(lam):
    """Normalize lambda to mpf (real) or mpc (strictly complex)."""
    if isinstance(lam, type(mp.mpf(0))):
        return lam
    z = mp.mpc(lam)
    if mp.im(z) == 0:
        return mp.re(z)
    return z


def _kummer_bits(a, b, z, bits: int, floor_bits: int, max_escalations: int):
    """Kummer M at explicit working precision with cancellation escalation."""
    for _ in range(max_escalations + 1):
        value, cancel_bits = _kummer_series(a, b, z, bits)
        if bits - cancel_bits >= floor_bits:
            return value
        bits = bits + cancel_bits + 64
    raise NumericsError("Kummer series cancellation exceeded escalation budget")


def moment(j: int, lam, params: EnsembleParams, ctx: PrecisionContext = None):
    """Closed-form moment mu_j(lambda) of the deformed weight.

    mu_j = B(j+alpha+1, beta+1) * M(j+alpha+1; j+alpha+beta+2; -lambda).
    """
    if j < 0:
        raise ValueError("moment index must be >= 0")
    ctx = ctx or default_context()
    with ctx.guard():
        lamv = _as_mp_scalar(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
        front = beta_fn(j + a + 1, b + 1, ctx)
        hyp = _kummer_bits(j + a + 1, j + a + b + 2, -lamv, ctx.working_bits,
                           ctx.mantissa_bits + 64, ctx.max_escalations)
        return front * hyp


def _moment_row(max_j: int, lam, alpha, beta_exp, bits: int, max_escalations: int):
    """Moments mu_0 .. mu_{max_j} computed ``bits``-accurate."""
    out = []
    with mp.workprec(bits):
        a = mp.mpf(alpha)
        b = mp.mpf(beta_exp)
        lamv = _as_mp_scalar(lam)
        for j in range(max_j + 1):
            front = mp.exp(mp.loggamma(j + a + 1) + mp.loggamma(b + 1)
                           - mp.loggamma(j + a + b + 2))
            out.append(front * _kummer_bits(j + a + 1, j + a + b + 2, -lamv,
                                            bits, bits - 16, max_escalations))
    return out


def _ldl_pass(moments, dim: int, bits: int, complex_mode: bool):
    """Root-free LDL^T of the Hankel matrix [mu_{j+k}]_{j,k<dim}.

    Returns (pivots, unit_lower); raises FactorizationError on a degenerate
    pivot (non-positive in the real case, below the magnitude floor in the
    complex case).
    """
    with mp.workprec(bits):
        M = [[moments[j + k] for k in range(dim)] for j in range(dim)]
        L = [[mp.mpf(0)] * dim for _ in range(dim)]
        D = [None] * dim
        floor = mp.mpf(2) ** (-(bits - 16))
        scale = max(abs(M[0][0]), mp.mpf(1))
        for i in range(dim):
            L[i][i] = mp.mpf(1)
            for j in range(i):
                s = M[i][j]
                for k in range(j):
                    s -= L[i][k] * L[j][k] * D[k]
                L[i][j] = s / D[j]
            s = M[i][i]
            for k in range(i):
                s -= L[i][k] * L[i][k] * D[k]
            D[i] = s
            bad = (abs(s) <= floor * scale) if complex_mode else (not (mp.re(s) > 0))
            if bad:
                raise FactorizationError(
                    "Hankel factorization pivot %d degenerate at %d bits" % (i, bits),
                    pivot_index=i,
                )
        return D, L


def _build_table(N: int, lam, alpha, beta_exp, ctx: PrecisionContext) -> OrthoTable:
    """Factorize at escalating precision until log-determinants stabilize."""
    dim = N + 2  # one spare degree so a_rec[N] = p(N) - p(N+1) is available
    complex_mode = isinstance(lam, type(mp.mpc(0)))
    base_bits = max(ctx.working_bits, 192, 24 * dim)
    tol = mp.mpf(ctx.target_rel_tol)

    prev_log_d = None
    bits = base_bits
    last_error = None
    for _ in range(ctx.max_escalations + 1):
        try:
            moments = _moment_row(2 * dim - 2, lam, alpha, beta_exp, bits,
                                  ctx.max_escalations)
            D, L = _ldl_pass(moments, dim, bits, complex_mode)
        except FactorizationError as exc:
            last_error = exc
            bits *= 2
            continue
        with mp.workprec(bits):
            log_d = [mp.mpf(0)]
            for d in D:
                log_d.append(log_d[-1] + mp.log(d))
            if prev_log_d is not None:
                worst = max(
                    abs(a - b) / max(abs(a), mp.mpf(1))
                    for a, b in zip(log_d[1:], prev_log_d[1:])
                )
                if worst <= tol:
                    return _assemble(N, lam, alpha, beta_exp, D, L, log_d, bits)
        prev_log_d = log_d
        bits *= 2
    if last_error is not None:
        raise last_error
    raise FactorizationError(
        "Hankel log-determinants failed to stabilize within escalation budget"
    )


def _assemble(N, lam, alpha, beta_exp, D, L, log_d, bits) -> OrthoTable:
    dim = N + 2
    with mp.workprec(bits):
        # C = L^{-1}; row j holds the ascending monic coefficients of P_j.
        C = [[mp.mpf(0)] * dim for _ in range(dim)]
        for i in range(dim):
            C[i][i] = mp.mpf(1)
            for j in range(i - 1, -1, -1):
                s = mp.mpf(0)
                for k in range(j + 1, i + 1):
                    s -= C[i][k] * L[k][j]
                C[i][j] = s
        p_sub = tuple(C[j][j - 1] if j >= 1 else mp.mpf(0) for j in range(dim))
        a_rec = tuple(p_sub[j] - p_sub[j + 1] for j in range(N + 1))
        b_rec = tuple(mp.mpf(0) if j == 0 else D[j] / D[j - 1] for j in range(N + 2))
        h = tuple(D[j] for j in range(N + 1))
        coeffs = tuple(tuple(C[j][: j + 1]) for j in range(N + 2))
    return OrthoTable(
        lam=lam, N=N, alpha=mp.mpf(alpha), beta=mp.mpf(beta_exp),
        h=h, a_rec=a_rec, b_rec=b_rec, p_sub=p_sub,
        log_d=tuple(log_d), poly_coeffs=coeffs, working_bits=bits,
    )


_TABLE_CACHE = {}


def ortho_table(N: int, lam, params: EnsembleParams,
                ctx: PrecisionContext = None) -> OrthoTable:
    """Orthogonalization table for degrees 0..N at deformation lambda."""
    if N > MAX_TABLE_DEGREE:
        raise ValueError("table degree capped at %d" % MAX_TABLE_DEGREE)
    if N < 0:
        raise ValueError("table degree must be >= 0")
    ctx = ctx or default_context()
    with ctx.guard():
        lamv = _as_mp_scalar(lam)
        a = mp.mpf(params.alpha)
        b = mp.mpf(params.beta)
    if isinstance(lamv, type(mp.mpc(0))):
        lam_key = (mp.re(lamv)._mpf_, mp.im(lamv)._mpf_)
    else:
        lam_key = (lamv._mpf_, None)
    key = (N, lam_key, a._mpf_, b._mpf_, ctx.mantissa_bits,
           float(ctx.target_rel_tol), ctx.max_escalations)
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    table = _build_table(N, lamv, a, b, ctx)
    if len(_TABLE_CACHE) > 20000:
        _TABLE_CACHE.clear()
    _TABLE_CACHE[key] = table
    return table


def hankel_det_log(n: int, lam, params: EnsembleParams,
                   ctx: PrecisionContext = None):
    """log D_n(lambda) as the pivot-log sum; principal branch per pivot.

    exp() of the result reproduces D_n exactly regardless of branch; the
    imaginary part is only defined modulo 2 pi per pivot for complex lambda.
    """
    if n < 1:
        raise ValueError("Hankel dimension must be >= 1")
    table = ortho_table(max(n - 1, 0), lam, params, ctx)
    return table.log_d[n]


def sub_leading(n: int, lam, params: EnsembleParams,
                ctx: PrecisionContext = None):
    """Sub-leading monic coefficient p(n, lambda); p(0, .) = 0."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    if n == 0:
        return mp.mpf(0)
    table = ortho_table(n, lam, params, ctx)
    return table.p_sub[n]


def eval_poly(n: int, x, table: OrthoTable):
    """Monic orthogonal polynomial P_n(x) by the forward recurrence."""
    if n > table.N + 1:
        raise ValueError("table holds degrees up to %d" % (table.N + 1))
    if n < 0:
        raise ValueError("degree must be >= 0")
    pm1 = mp.mpf(0)
    p = mp.mpf(1)
    for k in range(n):
        if k == table.N + 1:
            raise ValueError("recurrence data exhausted")
        pnew = (x - table.a_rec[k]) * p - (table.b_rec[k] * pm1 if k >= 1 else 0)
        pm1, p = p, pnew
    return p


def toda_residuals(n: int, lam, params: EnsembleParams,
                   ctx: PrecisionContext = None):
    """Residual magnitudes of the coupled Toda flow in the deformation.

    Checks, with derivatives by Richardson differences:
      beta_n' = beta_n (a_{n-1} - a_n)
      a_n'    = beta_n - beta_{n+1}
      (d^2/dlambda^2) log D_n = D_{n+1} D_{n-1} / D_n^2
    """
    from .numkit import derivative

    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = ctx or default_context()
    deg = n  # b_rec reaches n+1 on a table of degree n

    def tab(l):
        return ortho_table(deg, l, params, ctx)

    with ctx.guard():
        lamv = mp.mpf(lam)
        t0 = tab(lamv)
        beta_p = derivative(lambda l: tab(l).b_rec[n], lamv, 1, ctx)
        alpha_p = derivative(lambda l: tab(l).a_rec[n], lamv, 1, ctx)
        logd_pp = derivative(lambda l: tab(l).log_d[n], lamv, 2, ctx)
        res1 = abs(beta_p - t0.b_rec[n] * (t0.a_rec[n - 1] - t0.a_rec[n]))
        res2 = abs(alpha_p - (t0.b_rec[n] - t0.b_rec[n + 1]))
        ratio = mp.exp(t0.log_d[n + 1] + t0.log_d[n - 1] - 2 * t0.log_d[n])
        res3 = abs(logd_pp - ratio)
    return res1, res2, res3
