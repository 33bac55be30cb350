"""Position-momentum correlation of freely evolving 1-D wavepackets."""
from .estimator import FreeParticleMoments
from .evolution import (
    Schedule,
    TimeSeries,
    free_propagate,
    harmonic_potential,
    run_trajectory,
    split_step_propagate,
)
from .exceptions import (
    ConfigurationError,
    CorrflowError,
    GridTooSmallError,
    GuardError,
    MomentumOverflowError,
    NormError,
    ScenarioError,
)
from .grid import Grid, PhysicalConstants, WaveFunction, inner_product, to_momentum, to_position
from .observables import (
    MomentSet,
    commutator_residual_pc,
    commutator_residual_xc,
    commutator_residual_xp,
    moments,
    momentum_density,
)
from .oracle import MomentLaw, correlation_at, gaussian_waist_saturation, waist_time, x2_at
from .report import emit_timeseries_csv, run_check_suite
from .scenario import Scenario, load_scenario, parse_scenario
from .states import (
    GaussianSpec,
    HermiteStateSpec,
    auto_grid,
    boost,
    cat_state,
    combine,
    make_gaussian,
    make_hermite_state,
    make_state,
    superpose,
    translate,
)
from .sweep import load_family, parse_family, run_sweep

__version__ = "0.1.0"

__all__ = [
    "auto_grid",
    "boost",
    "cat_state",
    "combine",
    "commutator_residual_pc",
    "commutator_residual_xc",
    "commutator_residual_xp",
    "ConfigurationError",
    "correlation_at",
    "CorrflowError",
    "emit_timeseries_csv",
    "free_propagate",
    "FreeParticleMoments",
    "gaussian_waist_saturation",
    "GaussianSpec",
    "Grid",
    "GridTooSmallError",
    "GuardError",
    "harmonic_potential",
    "HermiteStateSpec",
    "inner_product",
    "load_family",
    "load_scenario",
    "make_gaussian",
    "make_hermite_state",
    "make_state",
    "MomentLaw",
    "moments",
    "MomentSet",
    "momentum_density",
    "MomentumOverflowError",
    "NormError",
    "parse_family",
    "parse_scenario",
    "PhysicalConstants",
    "run_check_suite",
    "run_sweep",
    "run_trajectory",
    "Scenario",
    "ScenarioError",
    "Schedule",
    "split_step_propagate",
    "superpose",
    "TimeSeries",
    "to_momentum",
    "to_position",
    "translate",
    "waist_time",
    "WaveFunction",
    "x2_at",
]
