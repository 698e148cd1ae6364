import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def working_precision():
    """All tests run at 256-bit precision unless they set their own."""
    old = mp.prec
    mp.prec = 256
    yield
    mp.prec = old
