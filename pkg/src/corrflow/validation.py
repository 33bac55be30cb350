"""Input validation helpers for the estimator API.

scikit-learn's ``check_array`` rejects complex input, so wavefunction
amplitudes get their own checker.
"""
import numpy as np

from .exceptions import ConfigurationError
from .grid import WaveFunction


def check_wavefunction(X, grid=None):
    """Return a :class:`WaveFunction` from ``X``.

    ``X`` may already be a WaveFunction, or a 1-D (or single-row 2-D)
    array of complex amplitudes sampled on ``grid``.
    """
    if isinstance(X, WaveFunction):
        if grid is not None and X.grid != grid:
            raise ConfigurationError(f"wavefunction grid {X.grid} does not match {grid}")
        return X
    if grid is None:
        raise ConfigurationError("a grid is required to interpret raw amplitudes")
    values = np.asarray(X)
    if values.ndim == 2 and values.shape[0] == 1:
        values = values[0]
    if values.ndim != 1:
        raise ConfigurationError(f"expected a 1-D amplitude array, got shape {values.shape}")
    if not np.issubdtype(values.dtype, np.number):
        raise ConfigurationError(f"amplitudes must be numeric, got dtype {values.dtype}")
    return WaveFunction.normalized(grid, values.astype(complex))


def check_times(T):
    """Validate sample times given as shape ``(n,)`` or ``(n, 1)``."""
    times = np.asarray(T, dtype=float)
    if times.ndim == 2 and times.shape[1] == 1:
        times = times[:, 0]
    if times.ndim == 0:
        times = times.reshape(1)
    if times.ndim != 1 or times.size == 0:
        raise ConfigurationError(f"times must be a non-empty 1-D array, got shape {np.shape(T)}")
    if not np.all(np.isfinite(times)):
        raise ConfigurationError("times must be finite")
    return times
