import numpy as np
import pytest

from corrflow import GaussianSpec, Grid, PhysicalConstants, make_gaussian

NATURAL = PhysicalConstants(1.0, 1.0)


@pytest.fixture
def consts():
    return NATURAL


@pytest.fixture
def grid():
    return Grid(1024, -20.0, 20.0)


@pytest.fixture
def gaussian(grid):
    return make_gaussian(GaussianSpec(sigma=1.0), grid)


@pytest.fixture
def shrinking(grid):
    return make_gaussian(GaussianSpec(sigma=1.0, chirp=-0.5), grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_smooth_state(grid, rng, n_modes=12, width=2.0):
    """Random band-limited, interior-supported state on ``grid``."""
    from corrflow import WaveFunction

    x = grid.x
    coeffs = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
    ks = rng.uniform(-2.0, 2.0, size=n_modes)
    values = np.exp(-(x**2) / (4 * width**2)) * (coeffs[:, None] * np.exp(1j * ks[:, None] * x)).sum(axis=0)
    return WaveFunction.normalized(grid, values)


# acceptance criterion -> (passed, detail), printed after the run
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
