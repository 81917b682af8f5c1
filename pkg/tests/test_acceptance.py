"""Acceptance suite: one test per criterion, each printing a PASS line.

Tolerances are pinned here and nowhere else.  Known transcription
discrepancies in the source formulas are reported as INFO and never fail a
criterion; the documenting assertions pin both the consistent value and the
published variant.
"""

import random
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from juetrace import asymptotics, density, fluctuations, ladder, orthopoly
from juetrace.numkit import integrate_weighted, make_context
from juetrace.orthopoly import EnsembleParams
from juetrace.sampler import (KS_99_COEFF, empirical_cumulants,
                              ks_distance_exact, ks_two_sample,
                              matrix_model_sample, mcmc_sample)
from juetrace.specfun import log_d0
from juetrace.verify import run_suite

CTX = make_context(256, 1e-30)

PAIRS = ((0.0, 0.0), (1.0, 1.0), (1.0, 2.0), (0.5, 0.5), (0.5, 1.5))
NS = (1, 2, 3, 4, 5)
LAMS = (0.25, 1.0, 2.5)


def report(criterion, detail=""):
    print("PASS %s%s" % (criterion, (" -- " + detail) if detail else ""))


def _suite_failures(suite):
    rows = run_suite(suite)
    return [r for r in rows if r.status == "FAIL"], rows


def test_criterion_01_moment_closed_form():
    """Beta x Kummer moments match adaptive quadrature to 1e-12 relative."""
    rng = random.Random(20260810)
    worst = mp.mpf(0)
    for _ in range(50):
        j = rng.randint(0, 10)
        lam = rng.uniform(0.0, 5.0)
        a = rng.uniform(-0.9, 3.0)
        b = rng.uniform(-0.9, 3.0)
        params = EnsembleParams(1, a, b)
        m = orthopoly.moment(j, lam, params, CTX)
        q = integrate_weighted(lambda x, jj=j: x ** jj, a, b, lam, CTX)
        rel = abs(m - q) / abs(q)
        worst = max(worst, rel)
        assert rel < 1e-12, (j, lam, a, b)
    report("criterion 1: moment closed form vs quadrature (50 draws)",
           "worst relative %.2e" % float(worst))


def test_criterion_02_d0_product_formula():
    """Factorization route matches the Gamma product for n <= 20."""
    worst = mp.mpf(0)
    for (a, b) in ((0.0, 0.0), (1.0, 1.0), (1.0, 2.0), (0.5, 0.5), (2.5, 0.5)):
        params = EnsembleParams(20, a, b)
        for n in (1, 2, 3, 5, 8, 12, 16, 20):
            got = orthopoly.hankel_det_log(n, 0.0, params, CTX)
            want = log_d0(n, a, b, CTX)
            rel = abs(got - want) / max(abs(want), mp.mpf(1))
            worst = max(worst, rel)
            assert rel < 1e-10, (a, b, n)
    report("criterion 2: log D_n(0) factorization vs product formula, n<=20",
           "worst relative %.2e" % float(worst))


def test_criterion_03_aux_route_agreement():
    """Recursion vs integral routes for (R_n, r_n), alpha > 0."""
    worst = 0.0
    for (a, b) in ((1.0, 1.0), (0.5, 1.5)):
        params = EnsembleParams(10, a, b)
        for lam in (0.1, 0.5, 1.0, 2.0, 5.0):
            tab = ladder.aux_by_recursion(10, lam, params, CTX)
            for n in range(0, 11):
                Rn, rn = ladder.aux_by_integral(n, lam, params, CTX)
                dev = abs(tab.R[n] - Rn)
                if n >= 1:
                    dev = max(dev, abs(tab.r[n] - rn))
                worst = max(worst, float(dev))
                assert dev < 1e-8, (a, b, lam, n)
    report("criterion 3: ladder routes agree for n<=10",
           "worst deviation %.2e" % worst)


def test_criterion_04_bessel_special_case():
    """Closed Bessel forms at alpha = beta = 1/2 vs recursion; seed documented."""
    params = EnsembleParams(2, 0.5, 0.5)
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        tab = ladder.aux_by_recursion(1, lam, params, CTX)
        R0, r1, R1 = ladder.bessel_closed_forms(lam, CTX)
        for dev in (abs(tab.R[0] - R0), abs(tab.r[1] - r1), abs(tab.R[1] - R1)):
            worst = max(worst, float(dev))
            assert dev < 1e-10, lam
    # the published seed prints lambda/4: exactly half the consistent value
    R0p, _, _ = ladder.bessel_closed_forms(1.0, CTX, printed=True)
    assert abs(R0p - mp.mpf("1.280929")) < 1e-6
    tab = ladder.aux_by_recursion(0, 1.0, params, CTX)
    assert abs(tab.R[0] - 2 * R0p) < 1e-10
    report("criterion 4: Bessel closed forms match recursion at 1e-10",
           "worst %.2e; INFO printed seed R0(1)=%.5f = consistent/2" % (
               worst, float(R0p)))


def test_criterion_05_r1_consistency():
    """Kummer closed form of r_1 minus recursion below 1e-12 on the grid."""
    worst = 0.0
    for (a, b) in PAIRS:
        params = EnsembleParams(1, a, b)
        for lam in LAMS:
            rec = ladder.aux_by_recursion(1, lam, params, CTX).r[1]
            closed = ladder.r1_closed_form(lam, params, CTX)
            dev = abs(rec - closed)
            worst = max(worst, float(dev))
            assert dev < 1e-12, (a, b, lam)
    report("criterion 5: r_1 closed form consistency", "worst %.2e" % worst)


@pytest.mark.parametrize("suite,label", [
    ("toda", "Toda flow residuals < 1e-6"),
    ("riccati", "Riccati < 1e-6 and second-order ODEs < 1e-5"),
    ("sigma", "sigma-form < 1e-8 with analytic derivatives"),
    ("painleve", "Painleve V < 1e-5 and P_n ODE < 1e-8"),
    ("discrete", "discrete relation < 1e-15 at 256 bits"),
    ("chazy", "Chazy system < 1e-4 at three points"),
])
def test_criterion_06_identity_suites(suite, label):
    fails, rows = _suite_failures(suite)
    assert not fails, [r.name for r in fails]
    worst = max((r.residual for r in rows if r.status == "PASS"), default=0.0)
    report("criterion 6 (%s): %s" % (suite, label),
           "%d checks, worst residual %.2e" % (len(rows), worst))


def test_criterion_07_cumulant_coefficients():
    """Extraction vs closed forms; symmetric-case values and evenness."""
    for n in (2, 3, 4):
        for (a, b) in ((0.0, 0.0), (1.0, 2.0), (0.5, 1.5)):
            ext = asymptotics.b_extracted(n, a, b, 4, CTX)
            for m in range(1, 5):
                cf = asymptotics.b_closed_form(n, a, b, m, CTX)
                if abs(cf) > 1e-20:
                    assert abs(ext.b[m] - cf) < 1e-6 * abs(cf), (n, a, b, m)
                else:
                    assert abs(ext.b[m]) < 1e-9, (n, a, b, m)
    assert asymptotics.b_fraction(2, 0, 0, 2) == Fraction(1, 15)
    b4 = asymptotics.b_closed_form(2, 0, 0, 4, CTX)
    assert abs(b4 - mp.mpf(1) / 6300) < 1e-30
    for n in (2, 3, 4):
        ext = asymptotics.b_extracted(n, 0.0, 0.0, 5, CTX)
        assert abs(ext.b[3]) < 1e-9 and abs(ext.b[5]) < 1e-9, n
    report("criterion 7: extracted b_1..b_4 match closed forms to 1e-6; "
           "b_2(2)=1/15, b_4(2)=1/6300; odd coefficients vanish to 1e-9")


def test_criterion_08_exact_densities():
    """All tabulated densities: exact mass, support, continuity, positivity;
    exact rational mean/variance identities for the n = 2 cases."""
    for (a, b, n) in density.tabulated_cases():
        poly = density.exact_piecewise(n, a, b)  # construction validates
        assert poly.mass() == 1
    for (a, b) in ((0, 0), (1, 1), (1, 2)):
        poly = density.exact_piecewise(2, a, b)
        assert poly.mean() == -asymptotics.b_fraction(2, a, b, 1)
        assert poly.variance() == asymptotics.b_fraction(2, a, b, 2)
    report("criterion 8: ten exact densities validated; mean/variance "
           "identities exact in rational arithmetic")


def test_criterion_09_fourier_inversion():
    """Inversion reproduces tabulated interior values to 1e-4, < 10 s/point."""
    import time

    cases = {
        (0, 0, 2): (0.5, 0.75, 1.25, 1.5, 1.75),
        (0, 0, 3): (0.5, 1.25, 1.5, 2.25, 2.6),
        (1, 2, 2): (0.4, 0.75, 1.0, 1.25, 1.6),
    }
    v, _ = density.fourier_inversion_with_tail(0.5, 2, 0, 0)
    assert abs(v - 0.25) < 1e-4
    worst = 0.0
    worst_time = 0.0
    for (a, b, n), points in cases.items():
        poly = density.exact_piecewise(n, a, b)
        for c in points:
            t0 = time.time()
            got = density.fourier_inversion(c, n, a, b)
            dt = time.time() - t0
            dev = abs(float(got) - poly.evaluate(c))
            worst = max(worst, dev)
            worst_time = max(worst_time, dt)
            assert dev < 1e-4, (a, b, n, c)
            assert dt < 10.0, (a, b, n, c)
    report("criterion 9: inversion matches exact densities at 1e-4",
           "worst %.2e, slowest point %.2fs" % (worst, worst_time))


def test_criterion_10_edgeworth_accuracy():
    """Order-4 approximation within 2%% of peak over [0.05 n, 0.95 n]."""
    ratios = []
    for (a, b, n) in ((0, 0, 4), (1, 1, 4)):
        poly = density.exact_piecewise(n, a, b)
        grid = [0.05 * n + 0.9 * n * i / 200 for i in range(201)]
        sup = max(abs(float(density.edgeworth_density(c, n, a, b, 4, CTX))
                      - poly.evaluate(c)) for c in grid)
        peak = max(poly.evaluate(c) for c in grid)
        ratios.append(sup / peak)
        assert sup < 0.02 * peak, (a, b, n)
    report("criterion 10: Edgeworth order-4 sup-norm below 0.02 x peak",
           "ratios %s" % ", ".join("%.4f" % r for r in ratios))


def test_criterion_11_monte_carlo():
    """MCMC vs exact CDF at the 99%% KS point; two-oracle agreement at 1%%."""
    thr = KS_99_COEFF / np.sqrt(100_000)
    stats = []
    for (a, b, n) in ((0, 0, 2), (1, 2, 2), (1, 1, 3)):
        poly = density.exact_piecewise(n, a, b)
        batch = mcmc_sample(n, float(a), float(b), 100_000, seed=2026)
        d = ks_distance_exact(batch, poly)
        stats.append(d)
        assert d < thr, (a, b, n, d)
    # matrix-model vs MCMC two-sample at 1%
    for (n, p, q) in ((2, 2, 2), (2, 3, 4), (3, 4, 4)):
        mm = matrix_model_sample(n, p, q, 50_000, seed=77)
        mc = mcmc_sample(n, float(p - n), float(q - n), 50_000, seed=78)
        D, thr2 = ks_two_sample(mm.values, mc.values)
        assert D < thr2, (n, p, q, D, thr2)
    report("criterion 11: KS below 1.628/sqrt(1e5) and two-oracle agreement",
           "one-sample distances %s" % ", ".join("%.5f" % d for d in stats))


def test_criterion_12_log_concavity():
    """Nonnegative second differences of -log density for alpha, beta > 0."""
    for (a, b, n) in density.tabulated_cases():
        if a > 0 and b > 0:
            poly = density.exact_piecewise(n, a, b)
            ok, worst = density.log_concavity_check(poly, tolerance=1e-9)
            assert ok, (a, b, n, worst)
    report("criterion 12: log-concavity scans pass for the positive-exponent "
           "tabulated cases")


def test_criterion_13_fluid_documentation():
    """Corrected-variant fluid error decreases in n; J1 sign reported INFO."""
    errs = []
    for n in (10, 20, 40):
        params = EnsembleParams(n, 0.0, 0.0)
        exact = orthopoly.hankel_det_log(n, 1.0, params, CTX) \
            - orthopoly.hankel_det_log(n, 0.0, params, CTX)
        fl = asymptotics.fluid_data(0.0, 0.0, n, CTX)
        errs.append(float(abs(exact - mp.log(
            asymptotics.mgf_fluid(1.0, params, fl, "corrected")))))
    assert errs[0] > errs[1] > errs[2]
    fl = asymptotics.fluid_data(0.0, 0.0, 10, CTX)
    assert fl.J1 > 0 > fl.J1_alt  # the documented sign discrepancy
    print("INFO criterion 13: printed J1 = %s has the sign inconsistent with "
          "log-MGF convexity; variance-consistent J1_alt = %s"
          % (mp.nstr(fl.J1, 6), mp.nstr(fl.J1_alt, 6)))
    report("criterion 13: corrected fluid log-MGF error decreases over "
           "n in {10, 20, 40}", "errors %s" % ", ".join("%.2e" % e for e in errs))


def test_criterion_14_fluctuations():
    """Geometric-family transform closed form and the variance identity."""
    ser, closed = fluctuations.example_geometric_family(0.5, M=60, ctx=CTX)
    assert abs(fluctuations.phi_star(ser) - closed) < 1e-8
    serp, closedp = fluctuations.example_geometric_family(0.5, M=60, ctx=CTX,
                                                          printed=True)
    assert abs(fluctuations.phi_star(serp) - closedp) < 1e-8
    var = fluctuations.linear_statistic_variance(lambda x: x, 0, 1, 48, CTX)
    assert abs(var - mp.mpf(1) / 16) < 1e-10
    b2_lim = asymptotics.b_closed_form(10 ** 6, 0, 0, 2, CTX)
    assert abs(var - b2_lim) < 1e-10  # matches the large-n variance limit
    report("criterion 14: geometric-family transform matches its closed form "
           "at K=0.5; linear-statistic variance = 1/16",
           "INFO printed all-order generator sums to %s vs true %s" % (
               mp.nstr(fluctuations.phi_star(serp), 6), mp.nstr(closed, 6)))


def test_criterion_15_verify_all_reproducible(tmp_path):
    """`verify --suite all` exits 0 twice with byte-identical output."""
    from juetrace.cli import main

    out1, out2 = tmp_path / "v1.txt", tmp_path / "v2.txt"
    args = ["verify", "--suite", "all", "--threads", "1", "--seed", "5"]
    rc1 = main(args + ["--output", str(out1)])
    rc2 = main(args + ["--output", str(out2)])
    assert rc1 == 0 and rc2 == 0
    assert out1.read_bytes() == out2.read_bytes()
    # seeded outputs elsewhere are byte-stable too
    d1, d2 = tmp_path / "d1.csv", tmp_path / "d2.csv"
    margs = ["density", "--method", "mc", "--n", "2", "--alpha", "0",
             "--beta", "0", "--count", "20000", "--seed", "9",
             "--points", "41"]
    assert main(margs + ["--output", str(d1)]) == 0
    assert main(margs + ["--output", str(d2)]) == 0
    assert d1.read_bytes() == d2.read_bytes()
    text = out1.read_text()
    report("criterion 15: verify --suite all exits 0; reruns byte-identical",
           text.splitlines()[-1])
