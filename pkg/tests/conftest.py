import pytest
from mpmath import mp

from tmflow.numerics import DEFAULT_CTX


@pytest.fixture(autouse=True)
def ambient_precision():
    """Test-side arithmetic must not silently run at double precision."""
    old = mp.prec
    mp.prec = DEFAULT_CTX.precision_bits + 16
    yield
    mp.prec = old


@pytest.fixture
def ctx():
    return DEFAULT_CTX
