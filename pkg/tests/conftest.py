import pytest
from mpmath import mp

from amlaplace.precision import DEFAULT_PRECISION_BITS, use_bits


@pytest.fixture(autouse=True)
def _default_precision():
    use_bits(DEFAULT_PRECISION_BITS)
    yield
    mp.prec = DEFAULT_PRECISION_BITS
