import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from juetrace.fluctuations import (ChebSeries, cheb_coeffs,
                                   example_geometric_family,
                                   linear_statistic_variance,
                                   log_energy_distance, phi, phi_star,
                                   pv_transform_numeric,
                                   tricomi_t_from_u_coeffs,
                                   tricomi_u_from_t_coeffs)


def test_cheb_coeffs_orthogonality(ctx):
    s = cheb_coeffs(lambda x: mp.chebyt(3, x), 6, ctx)
    assert abs(s.a(3) - mp.mpf(1) / 2) < 1e-30
    for k in (0, 1, 2, 4, 5, 6):
        assert abs(s.a(k)) < 1e-30


def test_cheb_coeffs_constant(ctx):
    s = cheb_coeffs(lambda x: mp.mpf(1), 4, ctx)
    assert abs(s.a(0) - 1) < 1e-30
    assert all(abs(s.a(k)) < 1e-30 for k in range(1, 5))


def test_cheb_coeffs_parabola(ctx):
    # h = 2(1-x^2) = 1 - T_2; integral convention halves k >= 1
    s = cheb_coeffs(lambda x: 2 * (1 - x ** 2), 6, ctx)
    assert abs(s.a(0) - 1) < 1e-30
    assert abs(s.a(2) + mp.mpf(1) / 2) < 1e-30


def test_energy_distance_zero_and_one_term(ctx):
    sc = cheb_coeffs(lambda x: 2 * (1 - x ** 2), 6, ctx)
    assert log_energy_distance(sc, sc) == 0
    arcsine = ChebSeries(coeffs=(mp.mpf(1),), M=0)
    t = mp.mpf("0.37")
    onemode = ChebSeries(coeffs=(mp.mpf(1), t), M=1)
    assert abs(log_energy_distance(onemode, arcsine) - t ** 2 / 2) < 1e-30
    # semicircle vs arcsine under the module convention
    assert abs(log_energy_distance(sc, arcsine) - mp.mpf(1) / 16) < 1e-30


def test_energy_distance_mass_mismatch(ctx):
    a = ChebSeries(coeffs=(mp.mpf(1),), M=0)
    b = ChebSeries(coeffs=(mp.mpf(2),), M=0)
    with pytest.raises(ValueError):
        log_energy_distance(a, b)


def test_phi_values():
    f1 = ChebSeries(coeffs=(mp.mpf(0), mp.mpf(1)), M=1)
    assert abs(phi(f1) - mp.mpf(1) / 2) < 1e-30
    f2 = ChebSeries(coeffs=(mp.mpf(0), mp.mpf(1), mp.mpf(1)), M=2)
    assert abs(phi(f2) - mp.mpf(3) / 2) < 1e-30
    with pytest.raises(ValueError):
        phi(ChebSeries(coeffs=(mp.mpf(1), mp.mpf(1)), M=1))


def test_phi_star_values():
    arcsine = ChebSeries(coeffs=(mp.mpf(1),), M=0)
    assert phi_star(arcsine) == 0
    t = mp.mpf("0.8")
    g = ChebSeries(coeffs=(mp.mpf(0), t), M=1)
    assert abs(phi_star(g) - t ** 2 / 2) < 1e-30


def test_geometric_family_k_limits(ctx):
    ser, _ = example_geometric_family(1e-6, M=8, ctx=ctx)
    assert abs(ser.a(0) - 1) < 1e-10
    assert abs(ser.a(2) + mp.mpf(1) / 2) < 1e-10  # semicircle limit
    ser9, _ = example_geometric_family(0.999999, M=8, ctx=ctx)
    assert all(abs(ser9.a(k)) < 1e-2 for k in range(1, 9))  # near arcsine


def test_geometric_family_quadrature_cross_check(ctx):
    with ctx.guard():
        K = mp.mpf(1) / 2
        root = mp.sqrt(1 - K ** 2)
        pik = K ** 2 / (1 - root)
        h = lambda x: pik * (1 - x ** 2) / (1 - K ** 2 * x ** 2)
        quad = cheb_coeffs(h, 8, ctx)
    ser, _ = example_geometric_family(0.5, M=8, ctx=ctx)
    assert abs(ser.a(1) - quad.a(1)) < 1e-10   # both vanish
    assert abs(ser.a(2) - quad.a(2)) < 1e-25
    assert abs(ser.a(4) - quad.a(4)) < 1e-25


def test_geometric_family_phi_star_closed_form(ctx):
    ser, closed = example_geometric_family(0.5, M=60, ctx=ctx)
    assert abs(phi_star(ser) - closed) < 1e-8
    # the printed variant is self-consistent but sums its spurious odd terms
    serp, closedp = example_geometric_family(0.5, M=60, ctx=ctx, printed=True)
    assert abs(phi_star(serp) - closedp) < 1e-8
    assert abs(closedp - closed) > 1


def test_phi_star_equals_energy_distance_to_arcsine(ctx):
    # module-convention identity on three densities
    arcsine = ChebSeries(coeffs=(mp.mpf(1),) + (mp.mpf(0),) * 60, M=60)
    for K in (0.3, 0.5, 0.8):
        ser, _ = example_geometric_family(K, M=60, ctx=ctx)
        lhs = phi_star(ser)
        rhs = log_energy_distance(ser, arcsine)
        assert abs(lhs - rhs) < 1e-25


def test_linear_statistic_variance_identity(ctx):
    v = linear_statistic_variance(lambda x: x, 0, 1, 48, ctx)
    assert abs(v - mp.mpf(1) / 16) < 1e-10
    v2 = linear_statistic_variance(lambda x: x, 2.0, 5.0, 48, ctx)
    assert abs(v2 - mp.mpf(9) / 16) < 1e-10  # (b-a)^2/16
    v0 = linear_statistic_variance(lambda x: mp.mpf(3), 0, 1, 24, ctx)
    assert abs(v0) < 1e-20


def test_tricomi_coefficient_maps():
    coeffs = (mp.mpf(0), mp.mpf(2), mp.mpf(3))
    fwd = tricomi_t_from_u_coeffs(coeffs)
    assert fwd == (0, 2, 6)
    assert tricomi_u_from_t_coeffs(coeffs) == (2, 3)


@settings(max_examples=12, deadline=None, derandomize=True)
@given(st.lists(st.floats(min_value=-2, max_value=2), min_size=2, max_size=11),
       st.floats(min_value=-0.9, max_value=0.9))
def test_tricomi_round_trip(coeff_list, x):
    """Numeric principal-value transform matches the coefficient map to
    1e-10 for polynomials of degree <= 10 (round trip of the identities)."""
    from juetrace.fluctuations import _cheb_t
    from juetrace.numkit import make_context

    ctx = make_context(160, 1e-20)
    with ctx.guard():
        coeffs = [mp.mpf(0)] + [mp.mpf(c) for c in coeff_list]
        xv = mp.mpf(x)
        tvals = _cheb_t(len(coeffs) - 1, xv)
        predicted = sum(j * coeffs[j] * tvals[j] for j in range(1, len(coeffs)))
        numeric = pv_transform_numeric(coeffs, xv, ctx)
    assert abs(predicted - numeric) < 1e-10
