from pathlib import Path

import numpy as np
import pytest

from corrflow import GaussianSpec, Grid, HermiteStateSpec, ScenarioError, load_scenario, parse_scenario
from corrflow.evolution import FREE, POTENTIAL
from corrflow.scenario import TOLERANCE_DEFAULTS, default_tolerances

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).parent / "fixtures"

MINIMAL = """
[state]
sigma = 1
[schedule]
t_end = 1
n_samples = 11
"""


def errors_of(text, **kw):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text, **kw)
    return info.value.errors


def test_minimal_defaults():
    s = parse_scenario(MINIMAL, name="minimal")
    assert s.name == "minimal"
    assert (s.consts.hbar, s.consts.mass) == (1.0, 1.0)
    assert s.grid is None
    assert s.mode == FREE
    assert s.components == (GaussianSpec(sigma=1.0),)
    assert (s.schedule.t_end, s.schedule.n_samples) == (1.0, 11)
    assert s.tolerances == TOLERANCE_DEFAULTS


def test_canonical_shrinking_file():
    s = load_scenario(ROOT / "scenarios" / "canonical" / "shrinking.scn")
    assert s.components == (GaussianSpec(sigma=1.0, chirp=-0.5),)
    assert s.schedule.t_end == 2.0
    from corrflow import MomentLaw, waist_time

    law = MomentLaw.for_gaussian(s.components[0], s.consts)
    assert law.c0 == -1.0
    assert waist_time(law).time == pytest.approx(0.8)


def test_negative_sigma_single_error():
    text = MINIMAL.replace("sigma = 1", "sigma = -1")
    errors = errors_of(text, name="bad")
    assert len(errors) == 1
    assert errors[0].line == 3
    assert "sigma must be > 0" in str(errors[0])


def test_collects_all_errors():
    text = """name = broken
colour = blue
[constants]
hbar = -2
mass = heavy
[state]
sigma = 0
[schedule]
t_end = 0
n_samples = 1
[tolerances]
monotonicity = -1
bogus = 3
[nonsense]
"""
    errors = errors_of(text)
    lines = [e.line for e in errors]
    assert lines == sorted(lines)
    assert set(lines) == {2, 4, 5, 7, 9, 10, 12, 13, 14}


@pytest.mark.parametrize("text,line,fragment", [
    ("[state]\nsigma = 1\n", 1, "[schedule]"),
    ("[state]\nsigma = 1\n[schedule]\nt_end = 1\n", 3, "n_samples"),
    ("[state]\n[schedule]\nt_end = 1\nn_samples = 3\n", 1, "sigma"),
    ("[state]\nsigma = 1\nsigma = 2\n[schedule]\nt_end=1\nn_samples=3\n", 3, "duplicate key"),
    ("[state]\nsigma = 1\n[schedule]\nt_end = 1\nn_samples = 3.5\n", 5, "integer"),
    ("[state]\nsigma 1\n[schedule]\nt_end = 1\nn_samples = 3\n", 2, "key = value"),
    ("[grid]\nn = 100\nx_min = -1\nx_max = 1\n" + MINIMAL, 2, "power of two"),
    ("[grid]\nn = 64\nx_min = 1\nx_max = -1\n" + MINIMAL, 4, "x_max must exceed"),
    ("[grid]\nn = 64\n" + MINIMAL, 1, "x_min"),
    ("[mode]\nkind = relativistic\n" + MINIMAL, 2, "mode kind"),
    ("[mode]\nkind = table\n[grid]\nn=64\nx_min=-1\nx_max=1\n" + MINIMAL, 1, "table"),
    ("[mode]\nkind = table\ntable = nowhere.csv\n" + MINIMAL, 3, "cannot read"),
    ("[state]\nkind = squeezed\n[schedule]\nt_end=1\nn_samples=3\n", 2, "kind must be"),
    ("[state]\nkind = superposition\n[state.1]\nsigma=1\n[schedule]\nt_end=1\nn_samples=3\n", 1,
     "at least two"),
    ("[state]\nsigma = 1\n[state.1]\nsigma = 1\n[schedule]\nt_end=1\nn_samples=3\n", 2, "[state.N]"),
    ("[state]\nkind = gaussian\nsigma = 1\n[state.1]\nsigma = 1\n[schedule]\nt_end=1\nn_samples=3\n", 4,
     "requires kind = superposition"),
])
def test_validation_messages(text, line, fragment):
    errors = errors_of(text, name="x")
    assert any(e.line == line and fragment in str(e) for e in errors), errors


def test_missing_name():
    errors = errors_of(MINIMAL)
    assert "name" in str(errors[0])


def test_explicit_grid():
    s = parse_scenario("[grid]\nn = 512\nx_min = -10\nx_max = 10\n" + MINIMAL, name="g")
    assert s.grid == Grid(512, -10.0, 10.0)
    assert s.build_grid() is s.grid


def test_auto_grid_keyword():
    s = parse_scenario("[grid]\nn = auto\n" + MINIMAL, name="g")
    assert s.grid is None
    assert s.build_grid().n >= 8


def test_superposition():
    s = load_scenario(ROOT / "scenarios" / "canonical" / "cat.scn")
    assert s.state_kind == "superposition"
    assert [c.x0 for c in s.components] == [-4.0, 4.0]
    assert s.weights == (1 + 0j, 1 + 0j)
    psi = s.build_state()
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)


def test_complex_weights():
    text = """name = w
[state.1]
x0 = -3
sigma = 1
weight = 1
[state.2]
x0 = 3
sigma = 1
weight = 0.5-2i
[schedule]
t_end = 1
n_samples = 3
"""
    assert parse_scenario(text).weights == (1 + 0j, 0.5 - 2j)


def test_hermite_state_uses_seed():
    text = "name = h\nseed = 5\n[state]\nkind = hermite\nmax_order = 3\nscale = 0.7\n" \
           "[schedule]\nt_end = 1\nn_samples = 3\n"
    s = parse_scenario(text)
    assert s.components == (HermiteStateSpec(seed=5, max_order=3, scale=0.7),)


def test_harmonic_mode():
    s = load_scenario(ROOT / "scenarios" / "contrast" / "harmonic.scn")
    assert s.mode == POTENTIAL and s.potential_name == "harmonic"
    assert s.witness
    grid = s.build_grid()
    assert np.allclose(s.build_potential(grid), 0.5 * grid.x**2)


def test_table_mode():
    s = load_scenario(FIXTURES / "table.scn")
    grid = s.build_grid()
    v = s.build_potential(grid)
    assert v[grid.n // 2] == pytest.approx(0.0)
    assert v[0] == pytest.approx(150.0)


def test_tolerance_overrides():
    s = parse_scenario(MINIMAL + "[tolerances]\nvariance_law = 1e-6\n", name="t")
    assert s.tolerances["variance_law"] == 1e-6
    assert s.tolerances["correlation_law"] == 1e-8


def test_environment_tolerance():
    tol = default_tolerances({"CORRFLOW_DEFAULT_TOL": "3e-7"})
    assert tol["correlation_law"] == tol["variance_law"] == 3e-7
    assert tol["monotonicity"] == 1e-9
    s = parse_scenario(MINIMAL, name="e", environ={"CORRFLOW_DEFAULT_TOL": "3e-7"})
    assert s.tolerances["covariance_law"] == 3e-7


@pytest.mark.parametrize("value", ["-1", "zero", "inf"])
def test_environment_tolerance_rejected(value):
    from corrflow import ConfigurationError

    with pytest.raises(ConfigurationError):
        default_tolerances({"CORRFLOW_DEFAULT_TOL": value})


def test_comments_and_whitespace():
    text = "# header\n  name = spaced   # trailing\n\n[ state ]\n sigma=2\n[schedule]\nt_end=1\nn_samples=2\n"
    s = parse_scenario(text)
    assert s.name == "spaced"
    assert s.components[0].sigma == 2.0
