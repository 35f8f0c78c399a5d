"""Arrival-time statistics for a dropped Gaussian wavepacket.

The packet starts at rest with zero mean position; the detector sits a
height x below along the field. The arrival time T is a deterministic
function of a single standard normal fluctuation xi conditioned on
xi <= x/sigma, which makes exact sampling, quadrature moments, and all
closed-form asymptotics available from one scalar map.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Regime, classical_time, classify_regime
from .errors import ConsistencyError, DomainError, UnsupportedRegimeError
from .numerics import (
    QuadratureConfig,
    SampleStats,
    TimeGridConfig,
    distribution_from_density,
    gamma_fn,
    integrate,
    normal_cdf,
    normal_pdf,
    sample_truncated_normal,
)

# Closed-form asymptotic coefficients (exact expressions, evaluated once).
MEAN_COEFF_NEAR_FIELD = 2.0 ** 0.25 * gamma_fn(0.75) / math.sqrt(math.pi)
SECOND_MOMENT_COEFF_NEAR_FIELD = math.sqrt(2.0 / math.pi)
STD_COEFF_NEAR_FIELD = math.sqrt(
    SECOND_MOMENT_COEFF_NEAR_FIELD - MEAN_COEFF_NEAR_FIELD**2
)
STD_FACTOR_FAR_FIELD_QUANTUM = math.sqrt(2.0 * (math.pi - 1.0) / math.pi)
MEAN_FACTOR_FAR_FIELD_QUANTUM = math.sqrt(2.0 / math.pi)

# Truncation of the normal weight; tail mass beyond is < 1e-15.
XI_CUTOFF = 8.0


@dataclass(frozen=True)
class GaussianDropProblem:
    """A dropped packet plus one detector height x > 0."""

    params: object
    x: float

    def __post_init__(self):
        if not (self.x > 0.0 and math.isfinite(self.x)):
            raise DomainError(f"detector height must be positive, got {self.x!r}")

    @property
    def t_c(self):
        return classical_time(self.x, self.params)

    @property
    def q(self):
        p = self.params
        return p.hbar / (2.0 * p.m * p.sigma * math.sqrt(2.0 * p.g * self.x))

    def regime_report(self, threshold=10.0):
        return classify_regime(self.x, self.params, threshold)


@dataclass(frozen=True)
class EnergyStats:
    mean_E: float
    delta_E: float


@dataclass(frozen=True)
class UncertaintyReport:
    delta_t: float
    delta_x0: float
    product: float
    bound: float
    ratio: float


@dataclass(frozen=True)
class TimeEnergyReport:
    delta_e: float
    delta_t: float
    product: float
    bound: float
    ratio: float


def _as_float_array(v, name, minimum=None, maximum=None):
    arr = np.asarray(v, dtype=float)
    if minimum is not None and np.any(arr < minimum):
        raise DomainError(f"{name} must be >= {minimum}")
    if maximum is not None and np.any(arr > maximum):
        raise DomainError(f"{name} must be <= {maximum}")
    return arr


def _scalar_like(out, template):
    return float(out) if np.ndim(template) == 0 else out


def toa_pdf(prob, t):
    """Un-normalized arrival-time density at time t >= 0.

    This is the magnitude of the single-packet probability current at the
    detector. Callers wanting a proper PDF normalize through
    ``build_toa_distribution``; the total mass over [0, inf) equals the
    arrival probability Phi(x/sigma).
    """
    arr = _as_float_array(t, "time", minimum=0.0)
    p = prob.params
    out = kernels.gaussian_flux_grid(np.atleast_1d(arr), prob.x, p.g, p.sigma, p.tau)
    return _scalar_like(out[0] if np.ndim(t) == 0 else out, t)


def toa_exact(prob, xi):
    """Exact arrival time for fluctuation value xi <= x/sigma.

    Strictly decreasing in xi; equals the classical time at xi = 0 and
    vanishes exactly at the boundary xi = x/sigma.
    """
    p = prob.params
    r = p.sigma / prob.x
    arr = _as_float_array(xi, "xi", maximum=1.0 / r)
    out = kernels.toa_exact_batch(np.atleast_1d(arr), prob.t_c, prob.q, r)
    return _scalar_like(out[0] if np.ndim(xi) == 0 else out, xi)


def toa_farfield_approx(prob, xi):
    """Far-field arrival time t_c (sqrt(1 + q^2 xi^2) - q xi).

    Valid when sigma/x is negligible against max(q, q^2); no runtime regime
    check is made so the approximation can be probed anywhere.
    """
    arr = _as_float_array(xi, "xi")
    u = prob.q * arr
    out = prob.t_c * (np.sqrt(1.0 + u * u) - u)
    return _scalar_like(out, xi)


def toa_farfield_branches(prob, xi):
    """The two expansion branches of the far-field map, for diagnostics.

    Returns (semiclassical, deep_quantum): the q << 1 Taylor branch
    t_c (1 - q xi + q^2 xi^2 / 2) and the q >> 1 branch q t_c (|xi| - xi).
    """
    arr = _as_float_array(xi, "xi")
    u = prob.q * arr
    semi = prob.t_c * (1.0 - u + 0.5 * u * u)
    deep = prob.t_c * prob.q * (np.abs(arr) - arr)
    return _scalar_like(semi, xi), _scalar_like(deep, xi)


def toa_nearfield_approx(prob, xi):
    """Near-field arrival time t_c sqrt(1 - (sigma/x) xi), xi <= x/sigma."""
    p = prob.params
    r = p.sigma / prob.x
    arr = _as_float_array(xi, "xi", maximum=1.0 / r)
    out = prob.t_c * np.sqrt(np.maximum(1.0 - r * arr, 0.0))
    return _scalar_like(out, xi)


def arrival_tail_fraction(prob, t):
    """Fraction of arrivals later than t.

    The flux bracket never changes sign for a dropped packet, so the mass
    beyond t is exactly Phi(xi(t)) / Phi(x/sigma) with
    xi(t) = (x - g t^2/2) / sigma(t).
    """
    p = prob.params
    arr = _as_float_array(t, "time", minimum=0.0)
    st = p.sigma * np.sqrt(1.0 + (arr / p.tau) ** 2)
    xi_t = (prob.x - 0.5 * p.g * arr * arr) / st
    out = np.asarray(normal_cdf(xi_t)) / normal_cdf(prob.x / p.sigma)
    return _scalar_like(out, t)


def sample_toa(prob, n, rng):
    """Monte Carlo arrival-time statistics from n exact draws."""
    if n < 2:
        raise DomainError("need n >= 2 for a standard error")
    p = prob.params
    xi = sample_truncated_normal(prob.x / p.sigma, rng, n)
    T = kernels.toa_exact_batch(xi, prob.t_c, prob.q, p.sigma / prob.x)
    mean = float(np.mean(T))
    std = float(np.std(T, ddof=1))
    return SampleStats(
        mean=mean,
        std=std,
        n=n,
        stderr=std / math.sqrt(n),
        seed=rng.seed,
        stream_id=rng.stream_id,
    )


def toa_moments_quadrature(prob, cfg=None):
    """Mean and std of the arrival time by adaptive quadrature over xi.

    Integrates toa_exact against the standard normal weight on
    [-XI_CUTOFF, min(x/sigma, XI_CUTOFF)] and divides by the arrival
    probability Phi(x/sigma), matching the Monte Carlo conditioning.
    """
    p = prob.params
    r = p.sigma / prob.x
    upper = min(1.0 / r, XI_CUTOFF)
    t_c, q = prob.t_c, prob.q
    norm = normal_cdf(1.0 / r)

    def first(xi):
        return kernels.toa_exact_batch(xi, t_c, q, r) * normal_pdf(xi)

    def second(xi):
        T = kernels.toa_exact_batch(xi, t_c, q, r)
        return T * T * normal_pdf(xi)

    m1 = integrate(first, -XI_CUTOFF, upper, cfg).value / norm
    m2 = integrate(second, -XI_CUTOFF, upper, cfg).value / norm
    var = m2 - m1 * m1
    if var < -1e-12 * max(m2, m1 * m1):
        raise ConsistencyError(f"negative variance {var!r} from quadrature moments")
    return m1, math.sqrt(max(var, 0.0))


def delta_toa_closed_form(prob, threshold=10.0):
    """Closed-form arrival-time spread and the regime that selected it.

    Returns (delta_t, regime). The Intermediate regime has no closed form;
    use the quadrature route there.
    """
    p = prob.params
    report = classify_regime(prob.x, p, threshold)
    if report.regime is Regime.FAR_FIELD_SEMICLASSICAL:
        value = p.hbar / (2.0 * p.m * p.g * p.sigma)
    elif report.regime is Regime.FAR_FIELD_QUANTUM:
        value = p.hbar / (2.0 * p.m * p.g * p.sigma) * STD_FACTOR_FAR_FIELD_QUANTUM
    elif report.regime is Regime.NEAR_FIELD:
        value = STD_COEFF_NEAR_FIELD * math.sqrt(2.0 * p.sigma / p.g)
    else:
        raise UnsupportedRegimeError(
            f"no closed-form spread in the Intermediate regime "
            f"(q={report.q:.3g}, sigma/x={p.sigma / prob.x:.3g})"
        )
    return value, report.regime


def uncertainty_product(prob, cfg=None):
    """Arrival-time/initial-position uncertainty product and its bound.

    delta_t comes from the quadrature route; the position spread enters at
    its minimum over time, sigma(0) = sigma, which is what the universal
    bound hbar/(2 m g) constrains.
    """
    p = prob.params
    _, delta_t = toa_moments_quadrature(prob, cfg)
    bound = p.hbar / (2.0 * p.m * p.g)
    product = delta_t * p.sigma
    return UncertaintyReport(
        delta_t=delta_t,
        delta_x0=p.sigma,
        product=product,
        bound=bound,
        ratio=product / bound,
    )


def energy_stats(params):
    """Mean and spread of the energy operator for the initial packet."""
    p = params
    mean_e = p.hbar**2 / (8.0 * p.m * p.sigma**2)
    radical = 1.0 + p.hbar**4 / (32.0 * p.m**4 * p.g**2 * p.sigma**6)
    return EnergyStats(mean_E=mean_e, delta_E=p.m * p.g * p.sigma * math.sqrt(radical))


def time_energy_product(prob, cfg=None):
    """Energy-time uncertainty product; must respect hbar/2.

    A violation beyond the 1e-3 numerical allowance signals a numerics bug,
    not physics, so it raises rather than returning quietly.
    """
    p = prob.params
    _, delta_t = toa_moments_quadrature(prob, cfg)
    delta_e = energy_stats(p).delta_E
    product = delta_e * delta_t
    bound = 0.5 * p.hbar
    ratio = product / bound
    if ratio < 1.0 - 1e-3:
        raise ConsistencyError(
            f"energy-time product {product!r} fell below the bound {bound!r}"
        )
    return TimeEnergyReport(
        delta_e=delta_e, delta_t=delta_t, product=product, bound=bound, ratio=ratio
    )


def build_toa_distribution(prob, grid=None):
    """Normalized arrival-time distribution on an auto-sized grid.

    The window starts at t_c (1 + 20 max(1, q)) and doubles until the
    analytic tail fraction drops below the configured tolerance, far-field
    quantum tails scale like q t_c so the allowance grows with q.
    """
    p = prob.params
    grid = grid or TimeGridConfig()
    t_max0 = prob.t_c * (1.0 + 20.0 * max(1.0, prob.q))

    def density(t):
        return kernels.gaussian_flux_grid(t, prob.x, p.g, p.sigma, p.tau)

    return distribution_from_density(
        density, t_max0, grid, tail_fraction_fn=lambda T: arrival_tail_fraction(prob, T)
    )
