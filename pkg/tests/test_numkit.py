import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from juetrace.numkit import (PrecisionContext, QuadratureError, derivative,
                             derivative_with_error, gauss_jacobi_rule,
                             integrate_weighted, make_context)


def test_make_context_valid():
    c = make_context(256, 1e-30)
    assert c.mantissa_bits == 256
    c2 = make_context(512, 1e-60)
    assert c2.working_bits == 1024


def test_make_context_rejects_unachievable_tolerance():
    with pytest.raises(ValueError):
        make_context(64, 1e-40)


def test_make_context_rejects_small_mantissa():
    with pytest.raises(ValueError):
        make_context(32, 1e-5)


def test_integrate_unit_interval(ctx):
    v = integrate_weighted(lambda x: 1, 0, 0, 0, ctx)
    assert abs(v - 1) < 1e-30


def test_integrate_beta_weight(ctx):
    v = integrate_weighted(lambda x: 1, 1, 2, 0, ctx)
    assert abs(v - mp.mpf(1) / 12) < 1e-30


def test_integrate_exponential(ctx):
    # closed-form antiderivative: (1 - e^-lambda)/lambda at lambda = 1
    v = integrate_weighted(lambda x: 1, 0, 0, 1, ctx)
    with ctx.guard():
        expect = 1 - mp.exp(-1)
    assert abs(v - expect) < 1e-30


def test_integrate_complex_lambda(ctx):
    v = integrate_weighted(lambda x: 1, 0, 0, 1j, ctx)
    with ctx.guard():
        expect = (1 - mp.exp(-1j)) / 1j
    assert abs(v - expect) < 1e-30


@settings(max_examples=20, deadline=None, derandomize=True)
@given(m=st.integers(min_value=2, max_value=24),
       k=st.integers(min_value=0, max_value=47))
def test_gauss_jacobi_polynomial_exactness(m, k):
    """m nodes integrate x^k exactly for k <= 2m-1 against the plain weight."""
    if k > 2 * m - 1:
        k = 2 * m - 1
    ctx = make_context(128, 1e-20)
    nodes, weights = gauss_jacobi_rule(m, 0.0, 0.0, ctx)
    with ctx.guard():
        v = sum(w * x ** k for x, w in zip(nodes, weights))
        assert abs(v - mp.mpf(1) / (k + 1)) < 1e-25


@settings(max_examples=10, deadline=None, derandomize=True)
@given(alpha=st.floats(min_value=-0.8, max_value=2.5),
       beta=st.floats(min_value=-0.8, max_value=2.5),
       lam=st.floats(min_value=0.0, max_value=4.0))
def test_quadrature_agrees_across_precision(alpha, beta, lam):
    lo = make_context(96, 1e-12)
    hi = make_context(192, 1e-12)
    a = integrate_weighted(lambda x: x + 1, alpha, beta, lam, lo)
    b = integrate_weighted(lambda x: x + 1, alpha, beta, lam, hi)
    assert abs(a - b) <= 1e-12 * abs(b)


def test_quadrature_nonconvergence_reports_estimates(ctx):
    # a genuinely singular integrand defeats the rule and must report
    with pytest.raises(QuadratureError) as err:
        integrate_weighted(lambda x: 1 / abs(x - mp.mpf(1) / mp.pi) ** mp.mpf("0.99"),
                           0, 0, 0, ctx, initial_nodes=8, max_doublings=3)
    assert err.value.estimates is not None


def test_derivative_polynomial(ctx):
    assert abs(derivative(lambda l: l * l, 3, 1, ctx) - 6) < 1e-30
    assert abs(derivative(lambda l: l * l, 3, 2, ctx) - 2) < 1e-25


def test_derivative_exponential(ctx):
    v, err = derivative_with_error(lambda l: mp.exp(l), 0, 1, ctx)
    assert abs(v - 1) < 1e-25
    assert err < 1e-20


def test_derivative_rejects_higher_order(ctx):
    with pytest.raises(ValueError):
        derivative(lambda l: l, 0, 3, ctx)
