import numpy as np
import pytest

from src.kernel.expression import NUMERIC_POINTS, NUMERIC_TOLERANCE, configure_numeric


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(autouse=True)
def numeric_defaults():
    """Tests that reconfigure the zero test do not leak into later tests."""
    configure_numeric(NUMERIC_POINTS, NUMERIC_TOLERANCE)
    yield
    configure_numeric(NUMERIC_POINTS, NUMERIC_TOLERANCE)
