import pytest
from mpmath import mp

from juetrace.numkit import make_context

# expectation arithmetic inside the tests themselves runs at high precision;
# library entry points carry their own workprec guards and are unaffected
mp.prec = 320


@pytest.fixture(scope="session")
def ctx():
    """Shared working context: 192-bit, certifies 1e-25."""
    return make_context(192, 1e-25)


@pytest.fixture(scope="session")
def ctx256():
    return make_context(256, 1e-30)
