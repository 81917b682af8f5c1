from fractions import Fraction

import pytest
from mpmath import mp

from juetrace.asymptotics import (b_closed_form, b_extracted, b_fraction,
                                  b_series_closed, cumulants, dn_expansion,
                                  fluid_data, mgf_fluid, sigma_series_residual)
from juetrace.density import exact_piecewise
from juetrace.orthopoly import EnsembleParams, hankel_det_log, ortho_table


def test_fluid_endpoints_symmetric(ctx):
    fl = fluid_data(0.0, 0.0, 5, ctx)
    assert abs(fl.A + 1) < 1e-30 and abs(fl.B - 1) < 1e-30
    assert abs(fl.a) < 1e-30 and abs(fl.b - 1) < 1e-30
    assert abs(fl.J2 - mp.mpf(5) / 2) < 1e-30       # mean n/2
    assert abs(fl.J1 - mp.mpf(1) / 8) < 1e-30       # printed (positive) value
    assert abs(fl.J1_alt + mp.mpf(1) / 16) < 1e-30  # variance-consistent


def test_fluid_J1_discrepancy_documented(ctx):
    # the printed J1 has the opposite sign from the large-n b_2 limit 1/16
    fl = fluid_data(0.0, 0.0, 20, ctx)
    assert fl.J1 > 0 and fl.J1_alt < 0
    assert abs(-fl.J1_alt - mp.mpf(1) / 16) < 1e-30


def test_mgf_fluid_normalization(ctx):
    p = EnsembleParams(4, 0.0, 0.0)
    fl = fluid_data(0.0, 0.0, 4, ctx)
    assert mgf_fluid(0.0, p, fl, "printed") == 1
    assert mgf_fluid(0.0, p, fl, "corrected") == 1


def test_mgf_fluid_accuracy_n20(ctx):
    p = EnsembleParams(20, 0.0, 0.0)
    fl = fluid_data(0.0, 0.0, 20, ctx)
    exact = hankel_det_log(20, 1.0, p, ctx) - hankel_det_log(20, 0.0, p, ctx)
    corr = mp.log(mgf_fluid(1.0, p, fl, "corrected"))
    assert abs(exact - corr) < 3e-3


def test_b_closed_form_values(ctx):
    assert abs(b_closed_form(2, 0, 0, 1, ctx) + 1) < 1e-30
    assert abs(b_closed_form(2, 0, 0, 2, ctx) - mp.mpf(1) / 15) < 1e-30
    assert abs(b_closed_form(2, 0, 0, 4, ctx) - mp.mpf(1) / 6300) < 1e-30
    assert abs(b_closed_form(1, 0.5, 0.5, 1, ctx) + mp.mpf(1) / 2) < 1e-30
    for n in (1, 2, 5):
        assert b_closed_form(n, 1.5, 1.5, 3, ctx) == 0  # factor (alpha-beta)


def test_b_fraction_matches_float_route(ctx):
    for (n, a, b) in [(2, 0, 0), (3, 1, 2), (2, 1, 1)]:
        f1 = b_fraction(n, a, b, 1)
        f2 = b_fraction(n, a, b, 2)
        assert abs(mp.mpf(f1.numerator) / f1.denominator
                   - b_closed_form(n, a, b, 1, ctx)) < 1e-30
        assert abs(mp.mpf(f2.numerator) / f2.denominator
                   - b_closed_form(n, a, b, 2, ctx)) < 1e-30


def test_b_closed_form_collision_detection(ctx):
    with pytest.raises(ZeroDivisionError):
        b_closed_form(1, 0.5, 0.5, 4, ctx)  # alpha+beta+2n-3 = 0


def test_extraction_matches_closed_forms(ctx):
    for (n, a, b) in [(2, 0.0, 0.0), (3, 1.0, 2.0)]:
        ext = b_extracted(n, a, b, 5, ctx)
        for m in range(1, 6):
            cf = b_closed_form(n, a, b, m, ctx)
            if abs(cf) > 1e-20:
                assert abs(ext.b[m] - cf) < 1e-6 * abs(cf), (n, a, b, m)
            else:
                assert abs(ext.b[m]) < 1e-9, (n, a, b, m)
        assert ext.source == "extracted"


def test_extraction_evenness_symmetric(ctx):
    for n in (2, 3, 4):
        ext = b_extracted(n, 0.0, 0.0, 5, ctx)
        assert abs(ext.b[3]) < 1e-9
        assert abs(ext.b[5]) < 1e-9


def test_cumulant_conversion(ctx):
    ser = b_series_closed(2, 0.0, 0.0, 4, ctx)
    kap = cumulants(ser)
    assert abs(kap[1] - 1) < 1e-30                 # mean n/2
    assert abs(kap[2] - mp.mpf(1) / 15) < 1e-30    # variance
    assert abs(kap[3] + 2 * ser.b[3]) < 1e-30
    assert abs(kap[4] - 6 * ser.b[4]) < 1e-30


def test_variance_against_exact_density(ctx):
    # kappa_2 equals the exact variance of the tabulated density
    poly = exact_piecewise(2, 0, 0)
    assert poly.variance() == Fraction(1, 15)
    assert poly.variance() == b_fraction(2, 0, 0, 2)


def test_mean_identity_all_tabulated():
    from juetrace.density import tabulated_cases
    for (a, b, n) in tabulated_cases():
        poly = exact_piecewise(n, a, b)
        assert poly.mean() == -b_fraction(n, a, b, 1), (a, b, n)
        assert poly.variance() == b_fraction(n, a, b, 2), (a, b, n)


def test_sigma_series_residual_small(ctx):
    r, _ = sigma_series_residual(2, 0, 0, 0.1, 4, ctx)
    assert r < 1e-6
    r, _ = sigma_series_residual(3, 1, 2, 0.2, 5, ctx)
    assert r < 1e-5
    r, _ = sigma_series_residual(2, 0, 0, 0.0, 4, ctx)
    assert r < 1e-30


def test_dn_expansion(ctx):
    p = EnsembleParams(2, 0.0, 0.0)
    assert abs(dn_expansion(2, 0, 0, 0.0, 4, ctx)
               - mp.exp(hankel_det_log(2, 0.0, p, ctx))) < 1e-30
    exact = mp.exp(hankel_det_log(2, 0.5, p, ctx))
    appr = dn_expansion(2, 0, 0, 0.5, 4, ctx)
    rel2 = abs(exact - appr) / exact
    assert rel2 < 1e-5
    p4 = EnsembleParams(4, 0.0, 0.0)
    exact4 = mp.exp(hankel_det_log(4, 0.5, p4, ctx))
    rel4 = abs(exact4 - dn_expansion(4, 0, 0, 0.5, 4, ctx)) / exact4
    assert rel4 < rel2  # series sharpens as n grows


def test_log_mgf_convexity(ctx):
    # d^2/dlambda^2 log D_n = beta_{n} ratio > 0 via the Toda molecule:
    # equivalently all recurrence b_j stay positive along real lambda
    p = EnsembleParams(3, 0.5, 1.5)
    for lam in (0.0, 1.0, 2.5, 5.0):
        t = ortho_table(3, lam, p, ctx)
        assert all(b > 0 for b in t.b_rec[1:])


def test_fluid_error_monotone(ctx):
    errs = []
    for n in (10, 20, 40):
        p = EnsembleParams(n, 0.0, 0.0)
        exact = hankel_det_log(n, 1.0, p, ctx) - hankel_det_log(n, 0.0, p, ctx)
        fl = fluid_data(0.0, 0.0, n, ctx)
        errs.append(abs(exact - mp.log(mgf_fluid(1.0, p, fl, "corrected"))))
    assert errs[0] > errs[1] > errs[2]
