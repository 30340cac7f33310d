import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def trig_poly(n, coeffs, z=None):
    """Sum of a_k cos(2 pi k z) + b_k sin(2 pi k z) on the n-node grid, with its exact derivative."""
    z = np.arange(n) / n if z is None else z
    f = np.zeros_like(z, dtype=float)
    df = np.zeros_like(z, dtype=float)
    for k, (a, b) in enumerate(coeffs, start=1):
        w = 2 * np.pi * k
        f += a * np.cos(w * z) + b * np.sin(w * z)
        df += w * (-a * np.sin(w * z) + b * np.cos(w * z))
    return f, df


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
