"""Spatial/momentum lattice, wavefunction container and spectral transforms.

Everything here is immutable: evolution and state operations return new
:class:`WaveFunction` objects instead of touching ``values`` in place.
"""
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from .exceptions import ConfigurationError

LEAK_THRESHOLD = 1e-12
NYQUIST_THRESHOLD = 1e-10

# guard_flags bits
FLAG_LEAK = 1
FLAG_NYQUIST = 2

MAX_POINTS = 2**20


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive and finite, got {value!r}")


NATURAL_UNITS = PhysicalConstants()


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice on ``[x_min, x_max)`` with ``n`` points.

    Parameters
    ----------
    n : int
        Number of points, a power of two no smaller than 8.
    x_min, x_max : float
        Box edges. ``x_max`` itself is not a lattice point (periodicity).
    """

    n: int
    x_min: float
    x_max: float

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or int(n) != n:
            raise ConfigurationError(f"grid size must be an integer, got {n!r}")
        n = int(n)
        object.__setattr__(self, "n", n)
        if n < 8 or n & (n - 1):
            raise ConfigurationError(f"grid size must be a power of two >= 8, got {n}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigurationError("grid edges must be finite")
        if not self.x_max > self.x_min:
            raise ConfigurationError(
                f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]"
            )

    @property
    def length(self):
        return self.x_max - self.x_min

    @property
    def dx(self):
        return self.length / self.n

    @property
    def dk(self):
        return 2.0 * np.pi / (self.n * self.dx)

    @property
    def k_max(self):
        """Nyquist wavenumber ``pi / dx``."""
        return np.pi / self.dx

    @cached_property
    def x(self):
        x = self.x_min + self.dx * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self):
        """Angular wavenumbers in FFT ordering."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        k.setflags(write=False)
        return k

    @cached_property
    def _edge_bins(self):
        # bins carrying the two largest |k| magnitudes
        h = self.n // 2
        return np.array([h - 1, h, h + 1])

    @cached_property
    def _phase(self):
        # exp(-i k x_min): makes the DFT approximate the continuum transform
        phase = np.exp(-1j * self.k * self.x_min)
        phase.setflags(write=False)
        return phase


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes on a :class:`Grid` (units length**-1/2)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ConfigurationError(
                f"expected {self.grid.n} amplitudes, got array of shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("wavefunction contains non-finite amplitudes")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def normalized(cls, grid, values):
        psi = cls(grid, values)
        nrm = psi.norm()
        if nrm == 0:
            raise ConfigurationError("cannot normalize the zero wavefunction")
        return cls(grid, psi.values / nrm)

    @classmethod
    def from_momentum(cls, grid, amplitudes):
        return cls(grid, to_position(grid, amplitudes))

    def norm(self):
        return math.sqrt(self.grid.dx * float(np.sum(np.abs(self.values) ** 2)))

    def density(self):
        return np.abs(self.values) ** 2

    def with_values(self, values):
        return WaveFunction(self.grid, values)

    def __len__(self):
        return self.grid.n


def check_same_grid(a, b):
    if a.grid != b.grid:
        raise ConfigurationError(f"grid mismatch: {a.grid} vs {b.grid}")


def inner_product(a, b):
    """Return ``<a|b> = dx * sum(conj(a) * b)``."""
    check_same_grid(a, b)
    return complex(a.grid.dx * np.vdot(a.values, b.values))


def to_momentum(psi):
    """Unitary transform to momentum-space amplitudes on ``grid.k``.

    Normalized so that ``dk * sum(|phi|**2) == dx * sum(|psi|**2)``.
    """
    grid = psi.grid
    return grid.dx / math.sqrt(2.0 * np.pi) * grid._phase * np.fft.fft(psi.values)


def to_position(grid, amplitudes):
    """Inverse of :func:`to_momentum`, returning a plain amplitude array."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    return math.sqrt(2.0 * np.pi) / grid.dx * np.fft.ifft(amplitudes / grid._phase)


def apply_in_momentum(psi, multiplier):
    """Return ``F^-1 [multiplier * F psi]`` as a raw array (no guards)."""
    return np.fft.ifft(multiplier * np.fft.fft(psi.values))


def boundary_mass(psi):
    """Probability carried by the two edge points of the box."""
    v = psi.values
    return psi.grid.dx * float(abs(v[0]) ** 2 + abs(v[-1]) ** 2)


def nyquist_ratio(psi):
    """Momentum density at the highest-|k| bins relative to its peak."""
    density = np.abs(np.fft.fft(psi.values)) ** 2
    peak = density.max()
    if peak == 0:
        return 0.0
    return float(density[psi.grid._edge_bins].max() / peak)


def guard_flags(psi, leak_threshold=LEAK_THRESHOLD, nyquist_threshold=NYQUIST_THRESHOLD):
    flags = 0
    if boundary_mass(psi) > leak_threshold:
        flags |= FLAG_LEAK
    if nyquist_ratio(psi) > nyquist_threshold:
        flags |= FLAG_NYQUIST
    return flags


def describe_flags(flags):
    names = []
    if flags & FLAG_LEAK:
        names.append("boundary leak")
    if flags & FLAG_NYQUIST:
        names.append("Nyquist occupancy")
    return ", ".join(names) or "none"


def next_power_of_two(value):
    n = 8
    while n < value:
        n *= 2
    return n


def grid_for_extent(half_width, k_needed, center=0.0):
    """Smallest power-of-two grid covering ``center +- half_width`` whose
    Nyquist wavenumber is at least ``k_needed``."""
    if not (half_width > 0 and math.isfinite(half_width)):
        raise ConfigurationError(f"invalid half width {half_width!r}")
    length = 2.0 * half_width
    n = next_power_of_two(length * k_needed / np.pi)
    if n > MAX_POINTS:
        raise ConfigurationError(
            f"auto grid needs {n} points (> {MAX_POINTS}); reduce t_end or momentum spread"
        )
    return Grid(n, center - half_width, center + half_width)


def predicted_extent(mean_x, var_x, mean_p, var_p, cov_xp, t, consts, margin):
    """Interval ``mean_x(t) +- margin * dx(t)`` from the free variance law.

    The centered moments evolve as ``var_x(t) = var_x + 2 cov t/m + var_p t^2/m^2``
    and ``mean_x(t) = mean_x + mean_p t/m``.
    """
    m = consts.mass
    centre = mean_x + mean_p * t / m
    var = var_x + 2.0 * cov_xp * t / m + var_p * t * t / (m * m)
    width = math.sqrt(max(var, 0.0))
    return centre - margin * width, centre + margin * width
