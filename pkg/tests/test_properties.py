"""Property-based checks of the state constructors and transformation laws."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrflow import (
    GaussianSpec,
    Grid,
    HermiteStateSpec,
    MomentLaw,
    Schedule,
    auto_grid,
    boost,
    correlation_at,
    make_gaussian,
    make_hermite_state,
    moments,
    run_trajectory,
    translate,
    waist_time,
    x2_at,
)

GRID = Grid(2048, -40.0, 40.0)
SETTINGS = settings(max_examples=40, deadline=None)

sigmas = st.floats(0.2, 5.0)
chirps = st.floats(-2.0, 2.0)
smalls = st.floats(-3.0, 3.0)


@SETTINGS
@given(sigmas, chirps, smalls, smalls)
def test_gaussian_moment_contract(sigma, chirp, x0, p0):
    spec = GaussianSpec(x0=x0, p0=p0, sigma=sigma, chirp=chirp)
    ms = moments(make_gaussian(spec, auto_grid([spec], 0.0)))
    assert ms.mean_x == pytest.approx(x0, abs=1e-9)
    assert ms.mean_p == pytest.approx(p0, abs=1e-9)
    assert ms.var_x == pytest.approx(sigma**2, rel=1e-9)
    assert ms.var_p == pytest.approx(spec.var_p(), rel=1e-9)
    assert ms.cov_xp == pytest.approx(2 * chirp * sigma**2, abs=1e-9 * max(1.0, sigma**2))
    assert ms.robertson_schrodinger() == pytest.approx(0.25, rel=1e-9)


@SETTINGS
@given(st.integers(0, 2**32 - 1), st.floats(-3.0, 3.0), st.floats(-2.0, 2.0))
def test_covariance_invariant_under_translate_and_boost(seed, a, q):
    psi = make_hermite_state(HermiteStateSpec(seed=seed, max_order=4), GRID)
    before = moments(psi)
    shifted = moments(translate(psi, a))
    boosted = moments(boost(psi, q))
    assert shifted.cov_xp == pytest.approx(before.cov_xp, abs=1e-10)
    assert boosted.cov_xp == pytest.approx(before.cov_xp, abs=1e-10)
    assert shifted.mean_c - before.mean_c == pytest.approx(a * before.mean_p, abs=1e-9)
    assert boosted.mean_c - before.mean_c == pytest.approx(q * before.mean_x, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.5, 1.5), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_arrow_on_random_states(seed, scale, chirp, p0):
    spec = HermiteStateSpec(seed=seed, max_order=5, scale=scale, chirp=chirp, p0=p0)
    psi = make_hermite_state(spec, auto_grid([spec], 1.0))
    series = run_trajectory(psi, Schedule(1.0, 21), strict=True)
    c = series.column("mean_c")
    assert np.min(np.diff(c)) >= -1e-9
    law = MomentLaw.from_moments(series[0])
    assert np.max(np.abs(c - correlation_at(law, series.times))) < 1e-8


@SETTINGS
@given(st.floats(-5.0, 5.0), st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.2, 5.0))
def test_oracle_consistency_triangle(c0, x2, p2, mass):
    if c0**2 > x2 * p2:
        c0 = np.sign(c0) * np.sqrt(x2 * p2) * 0.99
    law = MomentLaw(c0, x2, p2, mass=mass)
    t = np.linspace(0.0, 3.0, 7)
    h = 1e-4
    deriv = (x2_at(law, t + h) - x2_at(law, t - h)) / (2 * h)
    assert np.allclose(deriv, 2 * correlation_at(law, t) / mass, rtol=1e-6, atol=1e-6)
    waist = waist_time(law)
    if not waist.already_expanding and waist.time > 1e-3:
        assert correlation_at(law, waist.time) == pytest.approx(0.0, abs=1e-9)
        grid_t = np.linspace(0, 2 * waist.time, 2001)
        assert grid_t[np.argmin(x2_at(law, grid_t))] == pytest.approx(waist.time, abs=waist.time / 1000)
