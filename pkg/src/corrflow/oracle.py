"""Closed-form free-particle moment laws.

Under ``H = P^2 / 2m`` the Heisenberg-picture operators satisfy

    C(t)   = C + (t/m) P^2
    X^2(t) = X^2 + (t/m)(XP + PX) + (t/m)^2 P^2

with ``P^2`` conserved. These hold for the raw moments and, because
translations and boosts commute with the free dynamics up to c-number
shifts, also for the centred ones (``cov_xp``, ``var_x``, ``var_p``).
"""
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .exceptions import ConfigurationError
from .grid import NATURAL_UNITS


@dataclass(frozen=True)
class MomentLaw:
    c0: float
    x2_0: float
    p2_0: float
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.p2_0 < 0:
            raise ConfigurationError("p2_0 must be non-negative")
        if not self.x2_0 > 0:
            raise ConfigurationError("x2_0 must be positive")
        # Cauchy-Schwarz, with a little slack for sampled moments
        if self.c0**2 > self.x2_0 * self.p2_0 * (1 + 1e-9):
            raise ConfigurationError("moments violate c0^2 <= x2_0 * p2_0")

    @classmethod
    def from_moments(cls, ms, consts=NATURAL_UNITS, centered=False):
        """Build the raw law (``<C>``, ``<X^2>``, ``<P^2>``) or, with
        ``centered=True``, the law for ``cov_xp``, ``var_x``, ``var_p``."""
        if centered:
            return cls(ms.cov_xp, ms.var_x, ms.var_p, consts.mass, consts.hbar)
        return cls(ms.mean_c, ms.mean_x2, ms.mean_p2, consts.mass, consts.hbar)

    @classmethod
    def for_gaussian(cls, spec, consts=NATURAL_UNITS):
        """Centred law of a chirped Gaussian, from its analytic moments."""
        return cls(spec.cov_xp(consts), spec.var_x(), spec.var_p(consts), consts.mass, consts.hbar)


def correlation_at(law, t):
    return law.c0 + law.p2_0 * t / law.mass


def x2_at(law, t):
    m = law.mass
    return law.x2_0 + 2.0 * law.c0 * t / m + law.p2_0 * t * t / (m * m)


class Waist(NamedTuple):
    time: Optional[float]
    already_expanding: bool


def waist_time(law, atol=0.0):
    """Time of minimum width.

    A shrinking state (``c0 < 0``) reaches its waist at ``-m c0 / p2_0``,
    where the correlation crosses zero. ``c0 == 0`` (within ``atol``) is
    reported as already expanding with ``time == 0``; ``c0 > 0`` as already
    expanding with no future waist.
    """
    if law.p2_0 == 0:
        raise ConfigurationError("momentum eigen-limit not representable (p2_0 = 0)")
    if abs(law.c0) <= atol:
        return Waist(0.0, True)
    if law.c0 < 0:
        return Waist(-law.mass * law.c0 / law.p2_0, False)
    return Waist(None, True)


def gaussian_waist_saturation(spec, consts=NATURAL_UNITS):
    """``var_x * var_p`` of a centred Gaussian at its waist; equals ``hbar**2 / 4``."""
    if spec.x0 != 0 or spec.p0 != 0:
        raise ConfigurationError("gaussian_waist_saturation needs a centred spec (x0 = p0 = 0)")
    law = MomentLaw.for_gaussian(spec, consts)
    # past waists (chirp > 0) are still minimizers of the quadratic
    t_star = -law.mass * law.c0 / law.p2_0
    return x2_at(law, t_star) * law.p2_0

