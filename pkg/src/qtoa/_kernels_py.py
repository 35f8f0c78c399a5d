"""Pure-numpy implementations of the hot kernels.

Import-time fallback for builds without the compiled extension; also the
reference the extension is tested against. Signatures and semantics must stay
identical to ``_kernels.pyx``.
"""
import numpy as np

SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def toa_exact_batch(xi, t_c, q, sigma_over_x):
    """Arrival times for an array of fluctuation values xi <= x/sigma.

    Evaluates t_c * sqrt(f) where f is the physical root of the quartic
    arrival equation. The root is assembled in two algebraically equivalent
    forms chosen by the sign of q*xi so that no catastrophic cancellation
    occurs, and f vanishes exactly at xi = x/sigma:

    * q*xi <= 0:  f = 1 + 2u^2 - 2u*R   (all terms add)
    * q*xi  > 0:  f = (1 - s^2) / (1 + 2u^2 + 2u*R)   (product-of-roots form)

    with u = q*xi, s = sigma_over_x*xi, R = sqrt(1 + u^2 + (sigma_over_x/2q)^2).
    """
    xi = np.asarray(xi, dtype=float)
    u = q * xi
    s = sigma_over_x * xi
    half_beta = sigma_over_x / (2.0 * q)
    R = np.sqrt(1.0 + u * u + half_beta * half_beta)
    f_neg = 1.0 + 2.0 * u * u - 2.0 * u * R
    denom = 1.0 + 2.0 * u * u + 2.0 * u * R
    with np.errstate(divide="ignore", invalid="ignore"):
        f_pos = (1.0 - s * s) / denom
    f = np.where(u <= 0.0, f_neg, f_pos)
    return t_c * np.sqrt(np.maximum(f, 0.0))


def gaussian_flux_grid(t, x, g, sigma, tau):
    """Un-normalized single-packet arrival density on a time grid.

    |v_c(t) sigma(t) + (x - x_c(t)) sigma_dot(t)| / sigma(t)^2 times the
    Gaussian envelope exp(-(x - x_c)^2 / (2 sigma(t)^2)) / sqrt(2 pi), with
    x_c = g t^2 / 2 and v_c = g t.
    """
    t = np.asarray(t, dtype=float)
    ratio = t / tau
    root = np.sqrt(1.0 + ratio * ratio)
    st = sigma * root
    sd = sigma * (t / (tau * tau)) / root
    d = x - 0.5 * g * t * t
    bracket = np.abs(g * t * st + d * sd)
    return bracket / (st * st) * np.exp(-0.5 * (d / st) ** 2) / SQRT_2PI


def superposition_current_grid(t, x, m, g, hbar, sigma, k1, k2, nsq):
    """Probability current of a two-packet superposition at position x.

    Assembles nsq * (v1 rho1 + v2 rho2 + (u1-u2) sqrt(rho1 rho2) sin(dphi)
    + (v1+v2) sqrt(rho1 rho2) cos(dphi)). The phase difference dphi uses the
    factored form (x2-x1)(2x - x1 - x2) for the envelope-curvature term, so
    no large-square cancellation occurs, and the global cubic-in-t phase
    drops out (identical for both packets).
    """
    t = np.asarray(t, dtype=float)
    tau = 2.0 * m * sigma * sigma / hbar
    st2 = sigma * sigma * (1.0 + (t / tau) ** 2)
    lam2 = hbar * t / m
    vk = hbar / m

    x1 = vk * k1 * t + 0.5 * g * t * t
    x2 = vk * k2 * t + 0.5 * g * t * t
    d1 = x - x1
    d2 = x - x2
    rho1 = np.exp(-0.5 * d1 * d1 / st2) / np.sqrt(2.0 * np.pi * st2)
    rho2 = np.exp(-0.5 * d2 * d2 / st2) / np.sqrt(2.0 * np.pi * st2)
    u1 = -vk * d1 / (2.0 * st2)
    u2 = -vk * d2 / (2.0 * st2)
    spread = lam2 / (4.0 * sigma * sigma * st2)
    v1 = vk * (spread * d1 + k1 + m * g * t / hbar)
    v2 = vk * (spread * d2 + k2 + m * g * t / hbar)

    dphi = 0.5 * spread * (x2 - x1) * (2.0 * x - x1 - x2) \
        + (k1 - k2) * x \
        - 0.5 * vk * (k1 * k1 - k2 * k2) * t \
        - 0.5 * g * (k1 - k2) * t * t
    cross = np.sqrt(rho1 * rho2)
    return nsq * (v1 * rho1 + v2 * rho2
                  + (u1 - u2) * cross * np.sin(dphi)
                  + (v1 + v2) * cross * np.cos(dphi))
