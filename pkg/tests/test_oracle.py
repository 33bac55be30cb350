import numpy as np
import pytest

from corrflow import (
    ConfigurationError,
    GaussianSpec,
    MomentLaw,
    PhysicalConstants,
    correlation_at,
    gaussian_waist_saturation,
    waist_time,
    x2_at,
)

SHRINKING = MomentLaw(c0=-1.0, x2_0=1.0, p2_0=1.25)


def test_correlation_law():
    assert correlation_at(SHRINKING, 0.0) == -1.0
    assert correlation_at(SHRINKING, 0.8) == pytest.approx(0.0, abs=1e-15)
    assert correlation_at(SHRINKING, -1.0) == pytest.approx(-2.25)


def test_correlation_monotone():
    t = np.linspace(-3, 3, 101)
    assert np.all(np.diff(correlation_at(SHRINKING, t)) >= 0)


def test_width_law():
    assert x2_at(SHRINKING, 0.0) == 1.0
    assert x2_at(SHRINKING, 0.8) == pytest.approx(0.2, abs=1e-15)


def test_width_positive_under_strict_cauchy_schwarz():
    t = np.linspace(-50, 50, 2001)
    law = MomentLaw(c0=0.999, x2_0=1.0, p2_0=1.0)
    assert np.all(x2_at(law, t) > 0)


def test_width_derivative_is_twice_correlation():
    # the quadratic is fixed by 3 points; sample 7 with a central difference
    law = MomentLaw(c0=-0.7, x2_0=2.0, p2_0=0.9, mass=1.7)
    h = 1e-4
    for t in np.linspace(-2, 3, 7):
        derivative = (x2_at(law, t + h) - x2_at(law, t - h)) / (2 * h)
        assert derivative == pytest.approx(2 * correlation_at(law, t) / law.mass, abs=1e-8)


def test_zero_crossing_is_width_minimum():
    law = MomentLaw(c0=-0.4, x2_0=1.3, p2_0=0.6, mass=2.0)
    t_star = waist_time(law).time
    assert correlation_at(law, t_star) == pytest.approx(0.0, abs=1e-14)
    t = np.linspace(t_star - 1, t_star + 1, 2001)
    assert t[np.argmin(x2_at(law, t))] == pytest.approx(t_star, abs=1e-3)


class TestWaistTime:
    def test_shrinking(self):
        assert waist_time(SHRINKING) == (pytest.approx(0.8), False)

    def test_boundary(self):
        assert waist_time(MomentLaw(0.0, 1.0, 1.0)) == (0.0, True)

    def test_expanding(self):
        assert waist_time(MomentLaw(1.0, 1.0, 2.0)) == (None, True)

    def test_tolerance(self):
        assert waist_time(MomentLaw(-1e-17, 1.0, 1.0), atol=1e-12) == (0.0, True)

    def test_degenerate(self):
        with pytest.raises(ConfigurationError, match="momentum eigen-limit"):
            waist_time(MomentLaw(0.0, 1.0, 0.0))


class TestMomentLaw:
    def test_cauchy_schwarz_enforced(self):
        with pytest.raises(ConfigurationError):
            MomentLaw(c0=2.0, x2_0=1.0, p2_0=1.0)

    def test_from_gaussian(self):
        law = MomentLaw.for_gaussian(GaussianSpec(sigma=1.0, chirp=-0.5))
        assert (law.c0, law.x2_0, law.p2_0) == (-1.0, 1.0, 1.25)


class TestSaturation:
    @pytest.mark.parametrize("sigma,chirp", [(1.0, -0.5), (1.0, 0.0), (2.0, -0.25), (0.4, 1.3)])
    def test_minimum_uncertainty_at_waist(self, sigma, chirp):
        value = gaussian_waist_saturation(GaussianSpec(sigma=sigma, chirp=chirp))
        assert value == pytest.approx(0.25, abs=1e-8)

    def test_scales_with_hbar(self):
        consts = PhysicalConstants(hbar=0.3, mass=2.0)
        value = gaussian_waist_saturation(GaussianSpec(sigma=1.0, chirp=-0.5), consts)
        assert value == pytest.approx(0.3**2 / 4, rel=1e-10)

    def test_needs_centred_spec(self):
        with pytest.raises(ConfigurationError):
            gaussian_waist_saturation(GaussianSpec(x0=1.0))
