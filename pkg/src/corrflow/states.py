"""Initial-state construction: chirped Gaussians, translations, boosts and
superpositions.

The chirp ``b`` multiplies the Gaussian by ``exp(i b (x - x0)**2)`` and sets
the position-momentum covariance to ``2 * hbar * b * sigma**2``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .exceptions import ConfigurationError, GridTooSmallError, MomentumOverflowError, NormError
from .grid import (
    LEAK_THRESHOLD,
    NATURAL_UNITS,
    NYQUIST_THRESHOLD,
    WaveFunction,
    boundary_mass,
    check_same_grid,
    grid_for_extent,
    nyquist_ratio,
    predicted_extent,
    to_momentum,
    to_position,
)

# widths (in standard deviations) kept inside the box / below Nyquist when auto-sizing
EXTENT_MARGIN = 10.0


@dataclass(frozen=True)
class GaussianSpec:
    x0: float = 0.0
    p0: float = 0.0
    sigma: float = 1.0
    chirp: float = 0.0

    def __post_init__(self):
        for name in ("x0", "p0", "sigma", "chirp"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"GaussianSpec.{name} must be finite")
        if not self.sigma > 0:
            raise ConfigurationError(f"GaussianSpec.sigma must be positive, got {self.sigma}")

    def var_x(self):
        return self.sigma**2

    def var_p(self, consts=NATURAL_UNITS):
        hbar, s2 = consts.hbar, self.sigma**2
        return hbar**2 / (4.0 * s2) + 4.0 * hbar**2 * self.chirp**2 * s2

    def cov_xp(self, consts=NATURAL_UNITS):
        return 2.0 * consts.hbar * self.chirp * self.sigma**2

    def mean_c(self, consts=NATURAL_UNITS):
        return self.cov_xp(consts) + self.x0 * self.p0

    def extent(self, t, consts=NATURAL_UNITS, margin=EXTENT_MARGIN):
        """``(x_lo, x_hi, k_needed)`` covering the packet over ``[0, t]``."""
        lo0, hi0 = predicted_extent(
            self.x0, self.var_x(), self.p0, self.var_p(consts), self.cov_xp(consts), 0.0, consts, margin
        )
        lo1, hi1 = predicted_extent(
            self.x0, self.var_x(), self.p0, self.var_p(consts), self.cov_xp(consts), t, consts, margin
        )
        k_needed = (abs(self.p0) + margin * math.sqrt(self.var_p(consts))) / consts.hbar
        return min(lo0, lo1), max(hi0, hi1), k_needed


@dataclass(frozen=True)
class HermiteStateSpec:
    """Random superposition of Hermite-Gauss functions up to ``max_order``.

    Coefficients are drawn from ``seed``; the envelope is then scaled by
    ``scale``, chirped, boosted by ``p0`` and centred on ``x0``.
    """

    seed: int
    max_order: int = 6
    scale: float = 1.0
    x0: float = 0.0
    p0: float = 0.0
    chirp: float = 0.0

    def __post_init__(self):
        if self.max_order < 0:
            raise ConfigurationError("max_order must be >= 0")
        if not self.scale > 0:
            raise ConfigurationError("scale must be positive")

    def coefficients(self):
        rng = np.random.default_rng(self.seed)
        size = self.max_order + 1
        return rng.normal(size=size) + 1j * rng.normal(size=size)

    def extent(self, t, consts=NATURAL_UNITS, margin=EXTENT_MARGIN):
        # Hermite functions up to order N have var_u <= N + 1/2 in both u and its conjugate
        spread = math.sqrt(self.max_order + 0.5)
        sx = self.scale * spread
        sp = consts.hbar * (spread / self.scale + 2.0 * abs(self.chirp) * sx)
        width = sx + sp * abs(t) / consts.mass
        centre = self.x0 + self.p0 * t / consts.mass
        lo = min(self.x0 - margin * sx, centre - margin * width)
        hi = max(self.x0 + margin * sx, centre + margin * width)
        return lo, hi, (abs(self.p0) + margin * sp) / consts.hbar


def auto_grid(specs, t_end, consts=NATURAL_UNITS, margin=EXTENT_MARGIN):
    """Symmetric power-of-two grid that holds every component up to ``t_end``.

    A superposition evolves component by component, so covering each
    component's own predicted extent covers the whole state.
    """
    specs = list(specs)
    if not specs:
        raise ConfigurationError("auto_grid needs at least one component")
    half, k_needed = 0.0, 0.0
    for spec in specs:
        lo, hi, k = spec.extent(t_end, consts, margin)
        half = max(half, abs(lo), abs(hi))
        k_needed = max(k_needed, k)
    return grid_for_extent(half, k_needed)


def check_guards(psi, what, leak_threshold=LEAK_THRESHOLD, nyquist_threshold=NYQUIST_THRESHOLD):
    leak = boundary_mass(psi)
    if leak > leak_threshold:
        raise GridTooSmallError(
            f"{what}: boundary mass {leak:.3e} exceeds leak threshold {leak_threshold:.1e} "
            f"on grid [{psi.grid.x_min}, {psi.grid.x_max})"
        )
    ratio = nyquist_ratio(psi)
    if ratio > nyquist_threshold:
        raise MomentumOverflowError(
            f"{what}: momentum density at the Nyquist bins is {ratio:.3e} of its peak "
            f"(limit {nyquist_threshold:.1e}); refine the grid"
        )
    return psi


def make_gaussian(spec, grid, consts=NATURAL_UNITS, leak_threshold=LEAK_THRESHOLD,
                  nyquist_threshold=NYQUIST_THRESHOLD):
    """Normalized chirped Gaussian wavepacket described by ``spec``.

    Raises :class:`GridTooSmallError` when the packet reaches the box edge.
    """
    u = grid.x - spec.x0
    phase = spec.chirp * u**2 + spec.p0 * u / consts.hbar
    values = np.exp(-(u**2) / (4.0 * spec.sigma**2) + 1j * phase)
    psi = WaveFunction.normalized(grid, values)
    return check_guards(psi, repr(spec), leak_threshold, nyquist_threshold)


def hermite_functions(max_order, u):
    """Orthonormal Hermite functions ``phi_0 .. phi_max_order`` evaluated at ``u``."""
    u = np.asarray(u, dtype=float)
    out = np.empty((max_order + 1,) + u.shape)
    out[0] = np.pi**-0.25 * np.exp(-(u**2) / 2.0)
    if max_order >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for n in range(1, max_order):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * u * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def make_hermite_state(spec, grid, consts=NATURAL_UNITS, leak_threshold=LEAK_THRESHOLD,
                       nyquist_threshold=NYQUIST_THRESHOLD):
    u = grid.x - spec.x0
    envelope = spec.coefficients() @ hermite_functions(spec.max_order, u / spec.scale)
    values = envelope * np.exp(1j * (spec.chirp * u**2 + spec.p0 * u / consts.hbar))
    psi = WaveFunction.normalized(grid, values)
    return check_guards(psi, repr(spec), leak_threshold, nyquist_threshold)


def make_state(spec, grid, consts=NATURAL_UNITS, **guards):
    if isinstance(spec, GaussianSpec):
        return make_gaussian(spec, grid, consts, **guards)
    if isinstance(spec, HermiteStateSpec):
        return make_hermite_state(spec, grid, consts, **guards)
    raise ConfigurationError(f"unsupported state spec {spec!r}")


def translate(psi, a, leak_threshold=LEAK_THRESHOLD):
    """Apply ``exp(-i a P / hbar)``: shift the packet by ``a``.

    The shift is a linear phase in momentum space, so ``a`` need not be a
    multiple of the lattice spacing.
    """
    if a == 0:
        return psi
    grid = psi.grid
    shifted = WaveFunction(grid, to_position(grid, np.exp(-1j * grid.k * a) * to_momentum(psi)))
    leak = boundary_mass(shifted)
    if leak > leak_threshold:
        raise GridTooSmallError(
            f"translation by {a} pushes boundary mass to {leak:.3e} (threshold {leak_threshold:.1e})"
        )
    return shifted


def boost(psi, q, consts=NATURAL_UNITS, nyquist_threshold=NYQUIST_THRESHOLD):
    """Multiply by ``exp(i q x / hbar)``, shifting the mean momentum by ``q``."""
    if q == 0:
        return psi
    boosted = psi.with_values(psi.values * np.exp(1j * q * psi.grid.x / consts.hbar))
    ratio = nyquist_ratio(boosted)
    if ratio > nyquist_threshold:
        raise MomentumOverflowError(
            f"boost by {q} puts {ratio:.3e} of the peak momentum density at the Nyquist bins"
        )
    return boosted


def superpose(a, b, alpha=1.0, beta=1.0, normalize=True):
    """Return ``alpha*a + beta*b``, normalized unless ``normalize=False``."""
    return combine((a, b), (alpha, beta), normalize)


def combine(states, weights, normalize=True):
    """Weighted sum of states on a common grid."""
    states = list(states)
    for other in states[1:]:
        check_same_grid(states[0], other)
    values = sum(w * s.values for w, s in zip(weights, states))
    psi = WaveFunction(states[0].grid, values)
    nrm = psi.norm()
    if nrm < 1e-8:
        raise NormError(f"superposition norm {nrm:.3e} is below 1e-8 (destructive cancellation)")
    if normalize:
        psi = WaveFunction(psi.grid, values / nrm)
    return psi


def cat_state(grid, separation, sigma=1.0, consts=NATURAL_UNITS, phase=0.0):
    """Even (phase=0) two-Gaussian cat centred at ``+-separation``."""
    left = make_gaussian(GaussianSpec(x0=-separation, sigma=sigma), grid, consts)
    right = make_gaussian(GaussianSpec(x0=separation, sigma=sigma), grid, consts)
    return superpose(left, right, 1.0, np.exp(1j * phase))
