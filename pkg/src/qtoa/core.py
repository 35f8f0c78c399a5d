"""Parameter containers, derived scales, and regime classification.

Everything downstream works in terms of a few derived quantities:

* ``tau = 2 m sigma^2 / hbar`` — the packet-spreading time,
* ``x0_grav = (hbar^2 / (2 m^2 g))^(1/3)`` — the gravitational quantum length,
* ``q = hbar / (2 m sigma sqrt(2 g x))`` — ratio of the height-dependent
  de Broglie wavelength to the initial packet width,
* ``beta = sigma / (q x)`` — the near-field/far-field discriminator.

All functions are pure and accept explicit parameter objects; there is no
module-level mutable state.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Reduced Planck constant, J*s, from the exact SI definition of h.
HBAR_SI = 6.62607015e-34 / (2.0 * math.pi)


@dataclass(frozen=True)
class FreeFallParams:
    """Particle and field constants.

    Parameters
    ----------
    m : float
        Mass (kg, or 1 in natural units).
    g : float
        Uniform acceleration, > 0, field along +x.
    sigma : float
        Initial position standard deviation of the Gaussian packet.
    hbar : float, optional
        Reduced Planck constant; defaults to the SI value, set to 1.0 for
        natural-unit parameter sets.
    """

    m: float
    g: float
    sigma: float
    hbar: float = HBAR_SI

    def __post_init__(self):
        for name in ("m", "g", "sigma", "hbar"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def tau(self):
        """Spreading time 2 m sigma^2 / hbar (recomputed, never cached)."""
        return 2.0 * self.m * self.sigma**2 / self.hbar

    @property
    def x0_grav(self):
        """Gravitational quantum length (hbar^2 / (2 m^2 g))^(1/3)."""
        return (self.hbar**2 / (2.0 * self.m**2 * self.g)) ** (1.0 / 3.0)


class Regime(enum.Enum):
    """Asymptotic regime of a detector placement."""

    NEAR_FIELD = "NearField"
    FAR_FIELD_SEMICLASSICAL = "FarFieldSemiClassical"
    FAR_FIELD_QUANTUM = "FarFieldQuantum"
    INTERMEDIATE = "Intermediate"


@dataclass(frozen=True)
class RegimeReport:
    q: float
    beta: float
    t_c: float
    regime: Regime


@dataclass(frozen=True)
class ToaDistribution:
    """Normalized time-of-arrival density on a grid.

    ``pdf`` integrates to 1 over ``t_grid`` (trapezoid rule) to within 1e-6.
    ``norm_const`` is the constant the raw density was divided by, so the
    un-normalized magnitude can be recovered. ``tail_mass_estimate`` bounds
    the mass beyond the end of the grid, relative to the total.
    """

    t_grid: np.ndarray
    pdf: np.ndarray
    norm_const: float
    mean: float
    std: float
    tail_mass_estimate: float


def classical_time(x, params):
    """Newtonian fall time sqrt(2 x / g) from rest to the detector at x > 0."""
    if not x > 0.0:
        raise DomainError(f"detector height must be positive, got {x!r}")
    return math.sqrt(2.0 * x / params.g)


def classify_regime(x, params, threshold=10.0):
    """Classify a detector placement into an asymptotic regime.

    The regime is a pure function of q and sigma/x. With Theta = ``threshold``:

    * NearField when sigma/x >= Theta * max(q, q^2),
    * FarFieldSemiClassical when sigma/x <= max(q, q^2)/Theta and q <= 1/Theta,
    * FarFieldQuantum when sigma/x <= max(q, q^2)/Theta and q >= Theta,
    * Intermediate otherwise.

    The factor 10 default makes each closed-form asymptote accurate at the
    percent level at its regime boundary.
    """
    t_c = classical_time(x, params)
    q = params.hbar / (2.0 * params.m * params.sigma * math.sqrt(2.0 * params.g * x))
    beta = params.sigma / (q * x)
    ratio = params.sigma / x
    scale = max(q, q * q)
    if ratio >= threshold * scale:
        regime = Regime.NEAR_FIELD
    elif ratio <= scale / threshold and q <= 1.0 / threshold:
        regime = Regime.FAR_FIELD_SEMICLASSICAL
    elif ratio <= scale / threshold and q >= threshold:
        regime = Regime.FAR_FIELD_QUANTUM
    else:
        regime = Regime.INTERMEDIATE
    return RegimeReport(q=q, beta=beta, t_c=t_c, regime=regime)


def sigma_of_t(t, params):
    """Spread sigma(t) = sigma sqrt(1 + t^2/tau^2) of the freely evolving packet."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("time must be non-negative")
    out = params.sigma * np.sqrt(1.0 + (t / params.tau) ** 2)
    return float(out) if out.ndim == 0 else out


def sigma_dot_of_t(t, params):
    """Time derivative of sigma_of_t; vanishes at t = 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("time must be non-negative")
    tau = params.tau
    out = params.sigma * (t / tau**2) / np.sqrt(1.0 + (t / tau) ** 2)
    return float(out) if out.ndim == 0 else out
