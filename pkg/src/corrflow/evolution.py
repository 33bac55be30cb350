"""Time evolution: exact free propagation, Strang split-step with a potential,
and the trajectory runner that samples moment sets."""
from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import ConfigurationError, GridTooSmallError, MomentumOverflowError
from .grid import (
    FLAG_LEAK,
    LEAK_THRESHOLD,
    NATURAL_UNITS,
    NYQUIST_THRESHOLD,
    WaveFunction,
    describe_flags,
    predicted_extent,
)
from .observables import moments

FREE = "free"
POTENTIAL = "potential"

# standard deviations that must fit inside the box at the target time
PREDICTED_MARGIN = 6.0


@dataclass(frozen=True)
class Schedule:
    t_end: float
    n_samples: int

    def __post_init__(self):
        if not math.isfinite(self.t_end) or self.t_end <= 0:
            raise ConfigurationError(
                f"t_end must be positive and finite (n_samples >= 2 distinct times), got {self.t_end}"
            )
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ConfigurationError(f"n_samples must be an integer >= 2, got {self.n_samples}")

    @property
    def times(self):
        return np.linspace(0.0, self.t_end, int(self.n_samples))

    @property
    def spacing(self):
        return self.t_end / (self.n_samples - 1)


@dataclass(frozen=True)
class TimeSeries:
    samples: tuple
    provenance: str = ""
    mode: str = FREE
    final_state: WaveFunction = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise ConfigurationError("a time series needs at least one sample")
        if samples[0].time != 0.0:
            raise ConfigurationError("a time series must start at t=0")
        times = [s.time for s in samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigurationError("sample times must be strictly increasing")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def column(self, name):
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    @property
    def times(self):
        return self.column("time")

    @property
    def flagged(self):
        return [s for s in self.samples if s.guard_flags]


def kinetic_phase(grid, t, consts):
    return np.exp(-1j * consts.hbar * grid.k**2 * t / (2.0 * consts.mass))


def check_predicted_extent(psi, t, consts=NATURAL_UNITS, margin=PREDICTED_MARGIN):
    """Raise :class:`GridTooSmallError` if the packet is predicted to outgrow
    the box by time ``t`` (free variance law, ``margin`` standard deviations).
    """
    ms = moments(psi, consts)
    grid = psi.grid
    lo, hi = predicted_extent(ms.mean_x, ms.var_x, ms.mean_p, ms.var_p, ms.cov_xp, t, consts, margin)
    if lo < grid.x_min or hi > grid.x_max:
        required = 2.0 * max(abs(lo), abs(hi))
        raise GridTooSmallError(
            f"free evolution to t={t} needs the box to span [{lo:.6g}, {hi:.6g}]; "
            f"grid is [{grid.x_min}, {grid.x_max}); use a domain of length >= {required:.6g}",
            required_length=required,
            time=t,
        )


def free_propagate(psi, t, consts=NATURAL_UNITS, check=True):
    """Evolve under ``H = P^2 / 2m`` for time ``t`` exactly.

    The propagator is diagonal in the FFT basis, so there is no time-step
    error. With ``check=True`` the free variance law is used to refuse
    evolutions whose spread would reach the box boundary.
    """
    if t == 0:
        return psi
    if check:
        check_predicted_extent(psi, t, consts)
    grid = psi.grid
    values = np.fft.ifft(kinetic_phase(grid, t, consts) * np.fft.fft(psi.values))
    return WaveFunction(grid, values)


def harmonic_potential(grid, omega=1.0, consts=NATURAL_UNITS):
    return 0.5 * consts.mass * omega**2 * grid.x**2


def split_step_propagate(psi, potential, dt, steps, consts=NATURAL_UNITS):
    """Strang splitting ``e^{-iV dt/2h} e^{-iT dt/h} e^{-iV dt/2h}`` for ``steps`` steps.

    Parameters
    ----------
    psi : WaveFunction
    potential : array_like
        Real potential sampled on ``psi.grid.x``.
    dt : float
        Time step, > 0.
    steps : int
        Number of steps, >= 1.
    """
    potential = np.asarray(potential, dtype=float)
    grid = psi.grid
    if potential.shape != (grid.n,) or not np.all(np.isfinite(potential)):
        raise ConfigurationError("potential must be a finite array sampled on the grid")
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    if int(steps) != steps or steps < 1:
        raise ConfigurationError(f"steps must be an integer >= 1, got {steps}")

    half_v = np.exp(-0.5j * potential * dt / consts.hbar)
    kinetic = kinetic_phase(grid, dt, consts)
    v = psi.values
    for _ in range(int(steps)):
        v = half_v * np.fft.ifft(kinetic * np.fft.fft(half_v * v))
    return WaveFunction(grid, v)


def _guard_or_raise(ms, strict):
    if not (strict and ms.guard_flags):
        return
    message = f"guard violation at t={ms.time}: {describe_flags(ms.guard_flags)}"
    if ms.guard_flags & FLAG_LEAK:
        raise GridTooSmallError(message, flags=ms.guard_flags, time=ms.time)
    raise MomentumOverflowError(message, flags=ms.guard_flags, time=ms.time)


def run_trajectory(psi0, schedule, mode=FREE, consts=NATURAL_UNITS, potential=None, dt=1e-3,
                   strict=False, leak_threshold=LEAK_THRESHOLD, nyquist_threshold=NYQUIST_THRESHOLD,
                   provenance="", observer=None):
    """Sample :class:`MomentSet` values at every schedule time.

    Free mode jumps from the initial state straight to each sample time.
    Potential mode steps sequentially with the Strang propagator, using the
    largest step ``<= dt`` that divides each sampling interval evenly.

    Guard violations are recorded per sample; with ``strict=True`` the first
    one is raised instead, carrying the failing sample time. ``observer``,
    if given, is called as ``observer(moment_set, state)`` for every sample.
    """
    if mode not in (FREE, POTENTIAL):
        raise ConfigurationError(f"unknown mode {mode!r}")
    if mode == POTENTIAL and potential is None:
        raise ConfigurationError("potential mode needs a sampled potential")
    guards = dict(leak_threshold=leak_threshold, nyquist_threshold=nyquist_threshold)

    samples = []
    psi = psi0
    previous = 0.0
    for t in schedule.times:
        t = float(t)
        if mode == FREE:
            psi = free_propagate(psi0, t, consts, check=False)
            ms = moments(psi, consts, t, **guards)
        else:
            interval = t - previous
            if interval > 0:
                steps = max(1, math.ceil(interval / dt - 1e-9))
                psi = split_step_propagate(psi, potential, interval / steps, steps, consts)
            ms = moments(psi, consts, t, potential=potential, **guards)
        _guard_or_raise(ms, strict)
        if observer is not None:
            observer(ms, psi)
        samples.append(ms)
        previous = t
    return TimeSeries(tuple(samples), provenance=provenance, mode=mode, final_state=psi)
