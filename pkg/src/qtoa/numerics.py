"""Shared numerical machinery.

Adaptive Gauss quadrature, normal-distribution special functions, truncated
normal sampling through the inverse CDF, counter-based RNG streams, and
grid-based density/moment construction. Physics modules build on these and
stay free of numerical policy.
"""
import math
import os
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import ToaDistribution
from .errors import ConsistencyError, ConvergenceError, DomainError


def thread_cap():
    """Worker limit for embarrassingly parallel scans.

    QTOA_THREADS overrides the CPU count; unset or invalid falls back to
    the machine, never below one worker.
    """
    raw = os.environ.get("QTOA_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n >= 1:
        return n
    return os.cpu_count() or 1

# Fixed Gauss-Legendre rules; the 15/7 pair gives the panel error estimate.
_NODES_LO, _WEIGHTS_LO = np.polynomial.legendre.leggauss(7)
_NODES_HI, _WEIGHTS_HI = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_depth: int = 60

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")


@dataclass(frozen=True)
class RngStream:
    """Seedable, splittable random stream.

    Backed by the Philox-4x64-10 counter-based generator keyed on
    (seed, stream_id), so the same pair reproduces the identical sequence
    bit-for-bit on any platform and distinct stream_ids are independent.
    """

    seed: int
    stream_id: int = 0

    def generator(self):
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, stream_id):
        """Substream for a concurrent task; does not perturb this stream."""
        return RngStream(seed=self.seed, stream_id=stream_id)


@dataclass(frozen=True)
class SampleStats:
    """Monte Carlo estimator output."""

    mean: float
    std: float
    n: int
    stderr: float
    seed: int
    stream_id: int = 0


QuadratureResult = namedtuple("QuadratureResult", ["value", "error", "n_eval"])


def integrate(f, a, b, cfg=None):
    """Adaptively integrate ``f`` over [a, b].

    Parameters
    ----------
    f : callable
        Maps a float ndarray of abscissas to an ndarray of values. Scalar
        math inside is fine as long as numpy broadcasting applies.
    a, b : float
        Finite bounds with a < b. Map infinite tails to a finite interval
        before calling (normal-weight integrals here truncate at 8 sigma).
    cfg : QuadratureConfig, optional

    Returns
    -------
    QuadratureResult
        value, an error estimate, and the number of f evaluations.

    Raises
    ------
    ConvergenceError
        If the tolerance cannot be met before panels reach ``max_depth``
        subdivisions. The best estimate is attached to the exception.
    """
    cfg = cfg or QuadratureConfig()
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"need finite a < b, got [{a!r}, {b!r}]")

    # Panel state: columns a, b, value, error, depth. Waves of pending panels
    # are evaluated in single batched calls to f.
    def eval_panels(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts_hi = mid[:, None] + half[:, None] * _NODES_HI[None, :]
        pts_lo = mid[:, None] + half[:, None] * _NODES_LO[None, :]
        pts = np.concatenate([pts_hi, pts_lo], axis=1)
        vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
        if not np.all(np.isfinite(vals)):
            raise DomainError("integrand returned non-finite values")
        v_hi = half * (vals[:, :15] @ _WEIGHTS_HI)
        v_lo = half * (vals[:, 15:] @ _WEIGHTS_LO)
        return v_hi, np.abs(v_hi - v_lo)

    n_eval = 22
    values, errors = eval_panels(np.array([a]), np.array([b]))
    panels = [(a, b, values[0], errors[0], 0)]

    for _ in range(1000):
        total = sum(p[2] for p in panels)
        err = sum(p[3] for p in panels)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err <= tol:
            return QuadratureResult(total, err, n_eval)
        # Split every panel holding more than its share of the budget.
        share = tol / len(panels)
        split = [p for p in panels if p[3] > share]
        keep = [p for p in panels if p[3] <= share]
        if any(p[4] >= cfg.max_depth for p in split):
            raise ConvergenceError(
                f"quadrature stalled at max_depth={cfg.max_depth} "
                f"(estimate {total!r}, error {err!r})",
                estimate=total,
                error=err,
            )
        lo = np.array([p[0] for p in split] + [0.5 * (p[0] + p[1]) for p in split])
        hi = np.array([0.5 * (p[0] + p[1]) for p in split] + [p[1] for p in split])
        values, errors = eval_panels(lo, hi)
        n_eval += 22 * len(lo)
        depths = [p[4] + 1 for p in split] * 2
        panels = keep + [
            (lo[i], hi[i], values[i], errors[i], depths[i]) for i in range(len(lo))
        ]
    raise ConvergenceError("quadrature failed to settle", estimate=total, error=err)


def gamma_fn(z):
    """Gamma function for z > 0 (poles are outside this artifact's needs)."""
    if not z > 0.0:
        raise DomainError(f"gamma_fn requires z > 0, got {z!r}")
    return math.gamma(z)


def normal_cdf(u):
    """Standard normal CDF, accurate to full double precision."""
    u = np.asarray(u, dtype=float)
    out = 0.5 * special.erfc(-u / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def normal_pdf(u):
    u = np.asarray(u, dtype=float)
    out = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


# Rational approximation of the inverse normal CDF (relative error < 1.15e-9)
# refined below by one Newton step on the CDF, which lands within ~1e-15.
_ICDF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
           1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ICDF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
           6.680131188771972e+01, -1.328068155288572e+01)
_ICDF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
           -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ICDF_D = (7.784695709041462e-03, 3.224671290700398e-01,
           2.445134137142996e+00, 3.754408661907416e+00)
_ICDF_PLOW = 0.02425


def _inverse_normal_cdf_lower(p):
    """Quantile for p in (0, 0.5]; full relative precision in p is preserved."""
    x = np.empty_like(p)
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D

    lower = p < _ICDF_PLOW
    mid = ~lower
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
        den = (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r) + 1.0
        x[mid] = q * num / den
    if np.any(lower):
        q = np.sqrt(-2.0 * np.log(p[lower]))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q) + 1.0
        x[lower] = num / den

    # One Newton step. With x <= 0 the CDF is an erfc of a positive argument,
    # so the residual keeps the relative accuracy of p itself.
    x -= (0.5 * special.erfc(-x / math.sqrt(2.0)) - p) \
        / np.maximum(normal_pdf(x), 1e-300)
    return x


def inverse_normal_cdf(p):
    """Quantile function of the standard normal on [0, 1].

    Endpoints map to -inf/+inf. Vectorized. The upper half reflects through
    1 - p (exact in floating point for p >= 0.5) so both tails are resolved
    to the information content of the input probability.
    """
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    if np.any((p < 0.0) | (p > 1.0)):
        raise DomainError("probabilities must lie in [0, 1]")
    x = np.empty_like(p)

    lo = (p > 0.0) & (p <= 0.5)
    hi = (p > 0.5) & (p < 1.0)
    if np.any(lo):
        x[lo] = _inverse_normal_cdf_lower(p[lo])
    if np.any(hi):
        x[hi] = -_inverse_normal_cdf_lower(1.0 - p[hi])
    x[p == 0.0] = -np.inf
    x[p == 1.0] = np.inf
    return float(x[0]) if scalar else x


def sample_truncated_normal(upper, rng, n):
    """Draw n standard normals conditioned on xi <= upper.

    Inverse-CDF construction: xi = Phi^-1(U * Phi(upper)) with U uniform on
    [0, 1), so the sequence is fully determined by the stream.
    """
    if n < 1:
        raise DomainError("need n >= 1 samples")
    gen = rng.generator()
    u = gen.random(n)
    p = u * normal_cdf(upper)
    # U = 0 occurs with probability 2^-53; keep the map finite.
    p = np.maximum(p, 5e-324)
    return inverse_normal_cdf(p)


def moments_from_grid(dist):
    """Trapezoid mean and std of a normalized ToaDistribution."""
    t, w = dist.t_grid, dist.pdf
    mean = np.trapezoid(t * w, t)
    m2 = np.trapezoid(t * t * w, t)
    var = m2 - mean * mean
    if var < -1e-12 * max(m2, mean * mean, 1e-300):
        raise ConsistencyError(f"negative variance {var!r} from grid moments")
    return mean, math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class TimeGridConfig:
    """Controls for distribution grids on [0, t_max].

    ``t_max=None`` lets the builder pick a window and double it until the
    estimated tail mass drops below ``tail_tol``; an explicit value pins the
    window (the tail estimate is still reported). The grid is refined by
    doubling the point count until the raw mass and first two moments move
    less than ``rel_tol`` relatively, starting from ``n_init`` points.
    """

    n_init: int = 4097
    max_points: int = 2_097_153
    rel_tol: float = 1e-7
    tail_tol: float = 1e-8
    t_max: float = None
    max_window_doublings: int = 24

    def __post_init__(self):
        if self.n_init < 9:
            raise DomainError("n_init too small to estimate moments")
        if self.t_max is not None and not self.t_max > 0.0:
            raise DomainError("t_max must be positive")


def _raw_moments(t, w):
    mass = np.trapezoid(w, t)
    m1 = np.trapezoid(t * w, t)
    m2 = np.trapezoid(t * t * w, t)
    return mass, m1, m2


def distribution_from_density(density_fn, t_max0, cfg=None, tail_fraction_fn=None):
    """Build a normalized ToaDistribution from an un-normalized density.

    Parameters
    ----------
    density_fn : callable
        Maps a time ndarray to non-negative density values.
    t_max0 : float
        Initial window guess; doubled until the tail criterion is met
        (unless the config pins ``t_max``).
    cfg : TimeGridConfig, optional
    tail_fraction_fn : callable, optional
        Maps a window end T to the known mass fraction beyond T. When not
        given, the fraction of mass in the last tenth of the window is used
        as the tail estimate.
    """
    cfg = cfg or TimeGridConfig()

    def tail_estimate(t, w, mass):
        if tail_fraction_fn is not None:
            return float(tail_fraction_fn(t[-1]))
        if mass <= 0.0:
            return 1.0
        i = int(0.9 * len(t))
        return float(np.trapezoid(w[i:], t[i:]) / mass)

    t_max = float(cfg.t_max) if cfg.t_max is not None else float(t_max0)
    n = cfg.n_init
    for attempt in range(cfg.max_window_doublings + 1):
        t = np.linspace(0.0, t_max, n)
        w = density_fn(t)
        mass, m1, m2 = _raw_moments(t, w)
        tail = tail_estimate(t, w, mass)
        if cfg.t_max is not None or (tail < cfg.tail_tol and mass > 0.0):
            break
        if attempt == cfg.max_window_doublings:
            raise ConvergenceError(
                f"window grew to {t_max!r} without meeting the tail "
                f"criterion {cfg.tail_tol!r} (tail estimate {tail!r})",
                estimate=mass,
            )
        t_max *= 2.0

    while n < cfg.max_points:
        n2 = 2 * n - 1
        t2 = np.linspace(0.0, t_max, n2)
        w2 = density_fn(t2)
        mass2, m1_2, m2_2 = _raw_moments(t2, w2)
        drift = max(
            abs(mass2 - mass) / max(mass2, 1e-300),
            abs(m1_2 - m1) / max(m1_2, 1e-300),
            abs(m2_2 - m2) / max(m2_2, 1e-300),
        )
        t, w, mass, m1, m2, n = t2, w2, mass2, m1_2, m2_2, n2
        if drift <= cfg.rel_tol:
            break

    if mass <= 0.0:
        raise ConsistencyError("density integrated to zero mass on the window")
    norm = 1.0 / mass
    pdf = w * norm
    mean = m1 / mass
    var = m2 / mass - mean * mean
    if var < -1e-12 * max(m2 / mass, mean * mean):
        raise ConsistencyError(f"negative variance {var!r} in grid moments")
    tail = tail_estimate(t, w, mass)
    return ToaDistribution(
        t_grid=t,
        pdf=pdf,
        norm_const=norm,
        mean=mean,
        std=math.sqrt(max(var, 0.0)),
        tail_mass_estimate=tail,
    )
