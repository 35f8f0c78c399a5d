"""Arrival-time statistics for a superposition of two Gaussian packets.

Both packets start centered at the origin with common width sigma and
opposite (or arbitrary) wave vectors k1, k2. The detection-rate magnitude
|j| of the probability current at the detector, normalized over the arrival
window, plays the role the flux density plays for the single packet. The
interference terms in j produce the non-monotonic mean-arrival-time effect
this module exposes through ``mean_std_vs_x``.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import classical_time
from .errors import DomainError
from .numerics import (
    QuadratureConfig,
    TimeGridConfig,
    distribution_from_density,
    integrate,
    thread_cap,
)


@dataclass(frozen=True)
class SuperposedState:
    """Two-packet initial condition with numerically computed normalization.

    ``norm_n`` multiplies the bare sum of packets, so
    psi = norm_n (psi_1 + psi_2) has unit norm. It is computed from the
    t = 0 position density rather than a closed-form overlap, which keeps
    the construction valid for any (k1, k2, sigma).
    """

    params: object
    k1: float
    k2: float
    norm_n: float = field(init=False, default=None)

    def __post_init__(self):
        sigma = self.params.sigma
        dk = self.k1 - self.k2

        def density(x):
            envelope = np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
            return envelope * (2.0 + 2.0 * np.cos(dk * x))

        total = integrate(
            density, -9.0 * sigma, 9.0 * sigma, QuadratureConfig(abs_tol=1e-12)
        ).value
        object.__setattr__(self, "norm_n", 1.0 / math.sqrt(total))

    @property
    def norm_sq(self):
        return self.norm_n**2


@dataclass(frozen=True)
class PacketFrame:
    """Kinematic snapshot of both packets at one time."""

    t: float
    k_t: tuple
    x_t: tuple
    sigma_t: float
    lambda_t: float


def packet_frame(state, t):
    if t < 0.0:
        raise DomainError("time must be non-negative")
    p = state.params
    drift = p.m * p.g * t / p.hbar
    fall = 0.5 * p.g * t * t
    return PacketFrame(
        t=t,
        k_t=(state.k1 + drift, state.k2 + drift),
        x_t=(p.hbar * state.k1 * t / p.m + fall, p.hbar * state.k2 * t / p.m + fall),
        sigma_t=p.sigma * math.sqrt(1.0 + (t / p.tau) ** 2),
        lambda_t=math.sqrt(p.hbar * t / p.m),
    )


def _packet_pieces(state, x, t):
    """Envelope, velocity fields, and phases of both packets, broadcast over
    (x, t). Returns rho_j, u_j, v_j and the phase difference varphi_1-varphi_2
    in a cancellation-free form."""
    p = state.params
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    st2 = p.sigma**2 * (1.0 + (t / p.tau) ** 2)
    lam2 = p.hbar * t / p.m
    vk = p.hbar / p.m

    x1 = vk * state.k1 * t + 0.5 * p.g * t * t
    x2 = vk * state.k2 * t + 0.5 * p.g * t * t
    d1 = x - x1
    d2 = x - x2
    rho1 = np.exp(-0.5 * d1 * d1 / st2) / np.sqrt(2.0 * np.pi * st2)
    rho2 = np.exp(-0.5 * d2 * d2 / st2) / np.sqrt(2.0 * np.pi * st2)
    u1 = -vk * d1 / (2.0 * st2)
    u2 = -vk * d2 / (2.0 * st2)
    spread = lam2 / (4.0 * p.sigma**2 * st2)
    drift = p.m * p.g * t / p.hbar
    v1 = vk * (spread * d1 + state.k1 + drift)
    v2 = vk * (spread * d2 + state.k2 + drift)

    # (x-x1)^2 - (x-x2)^2 factored as (x2-x1)(2x-x1-x2); the k^2 and cubic
    # global terms of the individual phases cancel in the difference except
    # through k1^2-k2^2.
    dphi = 0.5 * spread * (x2 - x1) * (2.0 * x - x1 - x2) \
        + (state.k1 - state.k2) * x \
        - 0.5 * vk * (state.k1**2 - state.k2**2) * t \
        - 0.5 * p.g * (state.k1 - state.k2) * t * t
    return rho1, rho2, u1, u2, v1, v2, dphi


def phases(state, x, t):
    """Real and imaginary exponents (phi_j, varphi_j) of both packets.

    The j-dependent global terms -hbar k_j^2 t/(2m) - g k_j t^2/2 are
    retained since they differ across packets and drive the interference;
    the common cubic term -m^2 g^2 t^3/(6 hbar) is retained for completeness
    even though it cancels from every density and current.
    """
    if t < 0.0:
        raise DomainError("time must be non-negative")
    p = state.params
    frame = packet_frame(state, t)
    st2 = frame.sigma_t**2
    lam2 = p.hbar * t / p.m
    phi = np.empty(2)
    varphi = np.empty(2)
    cubic = p.m**2 * p.g**2 * t**3 / (6.0 * p.hbar)
    for j, (k, k_t, x_t) in enumerate(
        zip((state.k1, state.k2), frame.k_t, frame.x_t)
    ):
        d = x - x_t
        phi[j] = -0.25 * math.log(2.0 * math.pi * st2) - d * d / (4.0 * st2)
        varphi[j] = (
            lam2 / (8.0 * p.sigma**2 * st2) * d * d
            + k_t * x
            - 0.5 * p.hbar * k * k * t / p.m
            - 0.5 * p.g * k * t * t
            - cubic
        )
    return phi, varphi


def current(state, x, t):
    """Probability current of the superposition at (x, t); broadcasts.

    norm_n^2 (v1 rho1 + v2 rho2 + (u1-u2) sqrt(rho1 rho2) sin(dphi)
    + (v1+v2) sqrt(rho1 rho2) cos(dphi)).
    """
    if np.any(np.asarray(t) < 0.0):
        raise DomainError("time must be non-negative")
    rho1, rho2, u1, u2, v1, v2, dphi = _packet_pieces(state, x, t)
    cross = np.sqrt(rho1 * rho2)
    out = state.norm_sq * (
        v1 * rho1 + v2 * rho2
        + (u1 - u2) * cross * np.sin(dphi)
        + (v1 + v2) * cross * np.cos(dphi)
    )
    return float(out) if out.ndim == 0 else out


def born_density(state, x, t):
    """Position density of the superposition at (x, t); broadcasts."""
    if np.any(np.asarray(t) < 0.0):
        raise DomainError("time must be non-negative")
    rho1, rho2, _, _, _, _, dphi = _packet_pieces(state, x, t)
    out = state.norm_sq * (rho1 + rho2 + 2.0 * np.sqrt(rho1 * rho2) * np.cos(dphi))
    return float(out) if out.ndim == 0 else out


def _crossing_time(v0, g, x):
    """Classical time for initial velocity v0 to reach x > 0 under g."""
    return (-v0 + math.sqrt(v0 * v0 + 2.0 * g * x)) / g


def default_window(state, x):
    """Initial arrival-window guess covering both packets' crossings."""
    p = state.params
    t_c = classical_time(x, p)
    q = p.hbar / (2.0 * p.m * p.sigma * math.sqrt(2.0 * p.g * x))
    single = t_c * (1.0 + 20.0 * max(1.0, q))
    vk = p.hbar / p.m
    latest = max(
        _crossing_time(vk * state.k1, p.g, x), _crossing_time(vk * state.k2, p.g, x)
    )
    return max(single, 2.0 * latest)


def toa_distribution(state, x, grid=None):
    """Normalized |current| over the arrival window at detector height x.

    The window doubles until the estimated tail mass of |j| falls below the
    grid config's tolerance; every sign change of j contributes its
    magnitude to the detection rate.
    """
    if not x > 0.0:
        raise DomainError(f"detector height must be positive, got {x!r}")
    p = state.params
    grid = grid or TimeGridConfig()
    nsq = state.norm_sq

    def density(t):
        j = kernels.superposition_current_grid(
            t, x, p.m, p.g, p.hbar, p.sigma, state.k1, state.k2, nsq
        )
        return np.abs(j)

    return distribution_from_density(density, default_window(state, x), grid)


@dataclass(frozen=True)
class MeanStdRow:
    x: float
    mean: float
    std: float


def mean_std_vs_x(state, xs, grid=None, max_workers=None):
    """Per-detector mean and std of the arrival distribution.

    Detector positions evaluate concurrently (each builds its own time
    grid); rows come back sorted by x regardless of completion order, so
    the output is deterministic.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0.0):
        raise DomainError("detector grid must be positive")
    if np.any(np.diff(xs) <= 0.0):
        raise DomainError("detector grid must be strictly increasing")

    def one(x):
        dist = toa_distribution(state, float(x), grid)
        return MeanStdRow(x=float(x), mean=dist.mean, std=dist.std)

    workers = max_workers or thread_cap()
    if workers <= 1 or len(xs) == 1:
        return [one(x) for x in xs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, xs))


def find_mean_inversions(rows):
    """Adjacent index pairs where the mean arrival time decreases with x.

    Non-empty output is the interference signature: a farther detector with
    an earlier mean arrival.
    """
    return [
        (i, i + 1)
        for i in range(len(rows) - 1)
        if rows[i + 1].mean < rows[i].mean
    ]
