"""Expectation values of X, P, the correlation C = (XP + PX)/2 and H = P^2/2m.

Position quantities come from position-space quadrature, momentum quantities
from momentum space; P is always applied spectrally (``hbar * k`` in the FFT
basis), never through difference stencils.
"""
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import GuardError
from .grid import (
    LEAK_THRESHOLD,
    NATURAL_UNITS,
    NYQUIST_THRESHOLD,
    describe_flags,
    guard_flags,
    to_momentum,
)

CSV_FIELDS = (
    "time", "mean_x", "mean_p", "var_x", "var_p", "mean_x2",
    "mean_c", "cov_xp", "mean_h", "guard_flags",
)


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of one state at one instant.

    ``mean_x2`` is the raw ``<X^2>``; ``var_x`` is centred. ``cov_xp`` is
    ``mean_c - mean_x * mean_p``. ``mean_v`` is only filled in potential mode.
    """

    time: float
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    mean_x2: float
    mean_c: float
    cov_xp: float
    mean_h: float
    guard_flags: int = 0
    norm: float = 1.0
    mean_v: float = 0.0

    @property
    def mean_p2(self):
        return self.var_p + self.mean_p**2

    def uncertainty_product(self):
        return self.var_x * self.var_p

    def robertson_schrodinger(self):
        """``var_x * var_p - cov_xp**2``, bounded below by ``(hbar/2)**2``."""
        return self.var_x * self.var_p - self.cov_xp**2

    def as_row(self):
        return tuple(getattr(self, name) for name in CSV_FIELDS)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def apply_x(values, grid):
    return grid.x * values


def apply_p(values, grid, hbar=1.0):
    """``-i hbar d/dx`` applied spectrally."""
    return hbar * np.fft.ifft(grid.k * np.fft.fft(values))


def apply_c(values, grid, hbar=1.0):
    """``(X P + P X) / 2`` applied to an amplitude array."""
    return 0.5 * (apply_x(apply_p(values, grid, hbar), grid) + apply_p(apply_x(values, grid), grid, hbar))


def _braket(grid, a, b):
    return grid.dx * np.vdot(a, b)


def moments(psi, consts=NATURAL_UNITS, t=0.0, leak_threshold=LEAK_THRESHOLD,
            nyquist_threshold=NYQUIST_THRESHOLD, potential=None):
    """Compute the :class:`MomentSet` of ``psi`` at time ``t``.

    Guard violations are recorded in ``guard_flags`` rather than raised.
    If ``potential`` (an array sampled on the grid) is given, ``mean_v`` is
    filled in as well.
    """
    grid = psi.grid
    hbar = consts.hbar
    v = psi.values
    rho = np.abs(v) ** 2
    norm2 = grid.dx * rho.sum()
    w = grid.dx * rho / norm2

    x = grid.x
    mean_x = float(np.dot(w, x))
    var_x = float(np.dot(w, (x - mean_x) ** 2))
    mean_x2 = float(np.dot(w, x * x))

    phi = np.fft.fft(v)
    pk = np.abs(phi) ** 2
    pk /= pk.sum()
    k = grid.k
    mean_k = float(np.dot(pk, k))
    var_k = float(np.dot(pk, (k - mean_k) ** 2))
    mean_k2 = float(np.dot(pk, k * k))

    p_psi = hbar * np.fft.ifft(k * phi)
    mean_c = float(_braket(grid, v, x * p_psi).real / norm2)

    mean_p = hbar * mean_k
    mean_v = 0.0
    if potential is not None:
        mean_v = float(np.dot(w, potential))
    return MomentSet(
        time=float(t),
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=var_x,
        var_p=hbar**2 * var_k,
        mean_x2=mean_x2,
        mean_c=mean_c,
        cov_xp=mean_c - mean_x * mean_p,
        mean_h=hbar**2 * mean_k2 / (2.0 * consts.mass),
        guard_flags=guard_flags(psi, leak_threshold, nyquist_threshold),
        norm=float(np.sqrt(norm2)),
        mean_v=mean_v,
    )


def momentum_density(psi):
    """``|psi(k)|^2`` on ``grid.k``, normalized so that ``dk * sum == 1``."""
    density = np.abs(to_momentum(psi)) ** 2
    return density / (psi.grid.dk * density.sum())


def _require_guards(psi):
    flags = guard_flags(psi)
    if flags:
        raise GuardError(
            f"commutator residual needs a band-limited interior state ({describe_flags(flags)})",
            flags=flags,
        )


def _relative(residual, reference, grid):
    return float(np.sqrt(_braket(grid, residual, residual).real / _braket(grid, reference, reference).real))


def commutator_residual_xp(psi, consts=NATURAL_UNITS):
    """Relative residual ``||[X, P] psi - i hbar psi|| / ||psi||``."""
    _require_guards(psi)
    grid, hbar, v = psi.grid, consts.hbar, psi.values
    comm = apply_x(apply_p(v, grid, hbar), grid) - apply_p(apply_x(v, grid), grid, hbar)
    return _relative(comm - 1j * hbar * v, v, grid)


def commutator_residual_xc(psi, consts=NATURAL_UNITS):
    """Relative residual ``||[X, C] psi - i hbar X psi|| / ||X psi||``."""
    _require_guards(psi)
    grid, hbar, v = psi.grid, consts.hbar, psi.values
    xv = apply_x(v, grid)
    comm = apply_x(apply_c(v, grid, hbar), grid) - apply_c(xv, grid, hbar)
    return _relative(comm - 1j * hbar * xv, xv, grid)


def commutator_residual_pc(psi, consts=NATURAL_UNITS):
    """Relative residual ``||[P, C] psi + i hbar P psi|| / ||P psi||``."""
    _require_guards(psi)
    grid, hbar, v = psi.grid, consts.hbar, psi.values
    pv = apply_p(v, grid, hbar)
    comm = apply_p(apply_c(v, grid, hbar), grid, hbar) - apply_c(pv, grid, hbar)
    return _relative(comm + 1j * hbar * pv, pv, grid)
