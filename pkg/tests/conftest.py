"""
Pytest configuration and fixtures.
"""

import pytest
from mpmath import mp

from cmdeg.models import PrecisionContext
from cmdeg.utils import log_grid


@pytest.fixture(autouse=True)
def working_precision():
    """Run every test at 65 digits and restore mpmath's global precision afterwards."""
    saved = mp.dps
    mp.dps = 65
    yield
    mp.dps = saved


@pytest.fixture
def ctx():
    """The default 50-digit precision context."""
    return PrecisionContext(working_digits=50)


@pytest.fixture
def ctx_low():
    """A cheaper 25-digit context for scans."""
    return PrecisionContext(working_digits=25)


@pytest.fixture
def small_grid():
    """A coarse logarithmic scan grid on [1e-3, 60]."""
    return log_grid(1e-3, 60, 40)


@pytest.fixture
def tiny_grid():
    """A very coarse grid for end-to-end bracket tests."""
    return log_grid(1e-2, 40, 16)
