"""Chebyshev-coefficient machinery for linear-statistic fluctuations.

Coefficient convention
----------------------
Throughout this module a ChebSeries stores the *integral-normalized*
coefficients

    a_k = Integral_{-1}^{1} h(x) T_k(x) dx / (pi sqrt(1-x^2)),

i.e. the projection against the arcsine weight without the customary factor
2 for k >= 1.  A plain expansion h = sum_k c_k T_k therefore stores
a_0 = c_0 and a_k = c_k / 2 for k >= 1.  Every operation below applies its
stated series formula to the stored coefficients; where a formula is
classically written for expansion coefficients the docstring says so.

Functionals
-----------
* logarithmic-energy distance between two densities p = f/(pi sqrt(1-x^2)),
  q = g/(pi sqrt(1-x^2)):  I(p, q) = sum_{k>=1} (a_k - b_k)^2 / (2k)
  applied to the stored coefficients;
* quadratic form  Phi(f) = sum_j j a_j^2 / 2  (variance functional, exact
  for expansion coefficients) and its Legendre transform
  Phi*(sigma) = sum_j b_j^2 / (2j), exact for integral-normalized
  coefficients of h = pi sigma sqrt(1-x^2);
* the closed-form family sigma(x) = kappa sqrt(1-x^2)/(1-K^2 x^2) whose
  coefficients form a geometric sequence, giving Phi* in closed form;
* the variance of a linear statistic sum f(x_j) under an equilibrium
  measure on [a, b], evaluated through the Chebyshev route: mapping to
  [-1, 1] and using the finite-Hilbert-transform (Tricomi) identities the
  principal-value double integral collapses to (1/4) sum_k k c_k^2 with
  expansion coefficients c_k, which equals sum_k k a_k^2 in the stored
  convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .numkit import PrecisionContext, default_context

__all__ = [
    "ChebSeries",
    "cheb_coeffs",
    "log_energy_distance",
    "phi",
    "phi_star",
    "example_geometric_family",
    "linear_statistic_variance",
    "tricomi_t_from_u_coeffs",
    "tricomi_u_from_t_coeffs",
    "pv_transform_numeric",
]


@dataclass(frozen=True)
class ChebSeries:
    """Integral-normalized Chebyshev coefficients a_0..a_M."""

    coeffs: tuple
    M: int

    def __post_init__(self):
        if len(self.coeffs) != self.M + 1:
            raise ValueError("coefficient count must be M+1")

    def a(self, k: int):
        return self.coeffs[k] if k <= self.M else mp.mpf(0)


def _cheb_t(kmax, x):
    """T_0(x) .. T_kmax(x) by the three-term recurrence."""
    vals = [mp.mpf(1)]
    if kmax >= 1:
        vals.append(x)
    for _ in range(2, kmax + 1):
        vals.append(2 * x * vals[-1] - vals[-2])
    return vals


def _cheb_u(kmax, x):
    """U_0(x) .. U_kmax(x) by the three-term recurrence."""
    vals = [mp.mpf(1)]
    if kmax >= 1:
        vals.append(2 * x)
    for _ in range(2, kmax + 1):
        vals.append(2 * x * vals[-1] - vals[-2])
    return vals


def cheb_coeffs(h, M: int, ctx: PrecisionContext = None) -> ChebSeries:
    """Coefficients a_k = int h T_k / (pi sqrt(1-x^2)) by Gauss-Chebyshev.

    Uses 4M nodes, exact for polynomial h of degree <= 8M - M - 1; a slowly
    decaying tail (|a_M| comparable to max_k |a_k|) is reported as a warning
    in the returned series' last coefficient, left for the caller to check.
    """
    ctx = ctx or default_context()
    m = max(4 * M, 8)
    with ctx.guard():
        out = [mp.mpf(0)] * (M + 1)
        for i in range(1, m + 1):
            x = mp.cos(mp.pi * (2 * i - 1) / (2 * m))
            v = h(x)
            for k, t in enumerate(_cheb_t(M, x)):
                out[k] += v * t
        return ChebSeries(coeffs=tuple(c / m for c in out), M=M)


def log_energy_distance(p: ChebSeries, q: ChebSeries,
                        tol: float = 1e-12):
    """sum_{k>=1} (a_k - b_k)^2 / (2k) on the stored coefficients.

    Rejects series of unequal mass (a_0 mismatch): the energy distance is
    only defined between equal-mass densities.
    """
    if abs(p.a(0) - q.a(0)) > tol:
        raise ValueError("unequal masses: a_0 = %s vs %s" % (p.a(0), q.a(0)))
    with mp.workprec(max(mp.prec, 192)):
        M = max(p.M, q.M)
        total = mp.mpf(0)
        for k in range(1, M + 1):
            total += (p.a(k) - q.a(k)) ** 2 / (2 * k)
        return total


def phi(f: ChebSeries):
    """Quadratic variance functional sum_j j a_j^2 / 2 on stored coefficients.

    Classically exact when the stored coefficients are the expansion
    coefficients of a centered f; requires a_0 = 0.
    """
    if f.a(0) != 0:
        raise ValueError("phi requires a centered series (a_0 = 0)")
    with mp.workprec(max(mp.prec, 192)):
        total = mp.mpf(0)
        for j in range(1, f.M + 1):
            total += j * f.a(j) ** 2 / 2
        return total


def phi_star(sigma: ChebSeries):
    """Legendre transform sum_j b_j^2 / (2j) of the variance functional.

    Exact when fed integral-normalized coefficients of h = pi sigma
    sqrt(1-x^2) (the constant mode is ignored, matching the centering in the
    underlying supremum).
    """
    with mp.workprec(max(mp.prec, 192)):
        total = mp.mpf(0)
        for j in range(1, sigma.M + 1):
            total += sigma.a(j) ** 2 / (2 * j)
        return total


def example_geometric_family(K, M: int = 40, ctx: PrecisionContext = None,
                             printed: bool = False):
    """Closed forms for sigma(x) = kappa sqrt(1-x^2) / (1 - K^2 x^2), 0<K<1.

    Returns (series, phi_star_closed).  With r = (1 - sqrt(1-K^2))/K and
    pi kappa = K^2 / (1 - sqrt(1-K^2)), the density is even, so its
    integral-normalized coefficients vanish for odd order and for even m >= 2

        a_m = -pi kappa sqrt(1-K^2) r^m / K^2,      a_0 = 1,

    giving the closed transform value

        Phi* = sum_m a_m^2/(2m)
             = -pi^2 kappa^2 (1-K^2) / (4 K^4) * log(1 - r^4).

    ``printed=True`` returns a published variant that extends the even-order
    formula to all m (quadrature shows those odd coefficients are spurious)
    and whose closed form accordingly reads
    -pi^2 kappa^2 (1-K^2)/(2 K^4) * log(1 - r^2); generator and closed form
    are self-consistent in both variants, but only the default matches the
    density's actual coefficients.

    K -> 1 is the arcsine law (all higher coefficients vanish); K -> 0
    degenerates to the semicircle law with a_2 -> -1/2.
    """
    ctx = ctx or default_context()
    with ctx.guard():
        Kv = mp.mpf(K)
        if not (0 < Kv < 1):
            raise ValueError("K must lie strictly between 0 and 1")
        root = mp.sqrt(1 - Kv ** 2)
        pik = Kv ** 2 / (1 - root)
        amp = -pik * root / Kv ** 2
        r = (1 - root) / Kv
        coeffs = [pik * (1 - root) / Kv ** 2]
        for m_idx in range(1, M + 1):
            if printed:
                coeffs.append(amp * (-r) ** m_idx)
            else:
                coeffs.append(amp * r ** m_idx if m_idx % 2 == 0 else mp.mpf(0))
        kap2 = (pik / mp.pi) ** 2
        if printed:
            closed = -mp.pi ** 2 * kap2 * (1 - Kv ** 2) / (2 * Kv ** 4) \
                * mp.log(1 - r ** 2)
        else:
            closed = -mp.pi ** 2 * kap2 * (1 - Kv ** 2) / (4 * Kv ** 4) \
                * mp.log(1 - r ** 4)
        return ChebSeries(coeffs=tuple(coeffs), M=M), closed


def tricomi_t_from_u_coeffs(coeffs):
    """Finite Hilbert transform on coefficients: if f = sum_j a_j T_j then
    (1/pi) PV int f'(y) sqrt(1-y^2)/(x-y) dy = sum_j j a_j T_j(x)."""
    return tuple(j * c for j, c in enumerate(coeffs))


def tricomi_u_from_t_coeffs(coeffs):
    """Companion transform: for g = sum_j b_j T_j,
    (1/pi) PV int g(y) / ((y-x) sqrt(1-y^2)) dy = sum_{j>=1} b_j U_{j-1}(x)."""
    return tuple(coeffs[1:])


def pv_transform_numeric(f_expansion_coeffs, x, ctx: PrecisionContext = None):
    """(1/pi) PV int_{-1}^1 f'(y) sqrt(1-y^2) / (x - y) dy for polynomial f.

    Independent of the coefficient identities: the principal value is removed
    by subtracting f'(x), whose PV integral is known in closed form
    (PV int sqrt(1-y^2)/(x-y) dy = pi x), and the remaining smooth polynomial
    integrand is handled exactly by Gauss-Chebyshev-U quadrature.
    """
    ctx = ctx or default_context()
    with ctx.guard():
        xv = mp.mpf(x)
        deg = len(f_expansion_coeffs) - 1

        def fprime(y):
            u = _cheb_u(max(deg - 1, 0), y)
            tot = mp.mpf(0)
            for j in range(1, deg + 1):
                tot += j * f_expansion_coeffs[j] * u[j - 1]
            return tot

        m = 4 * (deg + 2)
        # Gauss-Chebyshev-U: int g(y) sqrt(1-y^2) dy ~ sum w_i g(y_i)
        total = mp.mpf(0)
        for i in range(1, m + 1):
            th = mp.pi * i / (m + 1)
            y = mp.cos(th)
            w = mp.pi / (m + 1) * mp.sin(th) ** 2
            total += w * (fprime(y) - fprime(xv)) / (xv - y)
        return (total + fprime(xv) * mp.pi * xv) / mp.pi


def linear_statistic_variance(f, a, b, M: int = 64,
                              ctx: PrecisionContext = None):
    """Variance of the linear statistic sum f(x_j) on equilibrium support [a,b].

    Maps to [-1, 1], takes integral-normalized coefficients a_k of the mapped
    f and evaluates sum_k k a_k^2 (equal to (1/4) sum k c_k^2 with expansion
    coefficients), which is the Chebyshev form of the principal-value double
    integral (1/(2 pi^2)) int f/sqrt PV int sqrt f'/(x-y) dy dx.
    """
    ctx = ctx or default_context()
    with ctx.guard():
        av, bv = mp.mpf(a), mp.mpf(b)
        if not bv > av:
            raise ValueError("need b > a")

        def mapped(t):
            return f(av + (bv - av) * (t + 1) / 2)

        series = cheb_coeffs(mapped, M, ctx)
        total = mp.mpf(0)
        for k in range(1, M + 1):
            total += k * series.a(k) ** 2
        return total
