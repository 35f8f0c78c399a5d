"""Arrival-time statistics for quantum particles falling in uniform gravity.

Single Gaussian packets get an exact stochastic representation of the
time-of-arrival distribution plus closed-form asymptotics and uncertainty
products; two-packet superpositions get the probability-current treatment
with its interference structure. ``scans`` regenerates the standard result
tables and ``cli`` exposes everything from the command line.
"""
from .core import (
    HBAR_SI,
    FreeFallParams,
    Regime,
    RegimeReport,
    ToaDistribution,
    classical_time,
    classify_regime,
    sigma_dot_of_t,
    sigma_of_t,
)
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    QtoaError,
    UnsupportedRegimeError,
)
from .gaussian_toa import (
    EnergyStats,
    GaussianDropProblem,
    TimeEnergyReport,
    UncertaintyReport,
    arrival_tail_fraction,
    build_toa_distribution,
    delta_toa_closed_form,
    energy_stats,
    sample_toa,
    time_energy_product,
    toa_exact,
    toa_farfield_approx,
    toa_moments_quadrature,
    toa_nearfield_approx,
    toa_pdf,
    uncertainty_product,
)
from .kernels import BACKEND
from .numerics import (
    QuadratureConfig,
    RngStream,
    SampleStats,
    TimeGridConfig,
    integrate,
    thread_cap,
)
from .superposition_toa import (
    SuperposedState,
    born_density,
    current,
    find_mean_inversions,
    mean_std_vs_x,
    packet_frame,
    phases,
    toa_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HBAR_SI",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
    "EnergyStats",
    "FreeFallParams",
    "GaussianDropProblem",
    "QtoaError",
    "QuadratureConfig",
    "Regime",
    "RegimeReport",
    "RngStream",
    "SampleStats",
    "SuperposedState",
    "TimeEnergyReport",
    "TimeGridConfig",
    "ToaDistribution",
    "UncertaintyReport",
    "UnsupportedRegimeError",
    "arrival_tail_fraction",
    "born_density",
    "build_toa_distribution",
    "classical_time",
    "classify_regime",
    "current",
    "delta_toa_closed_form",
    "energy_stats",
    "find_mean_inversions",
    "integrate",
    "mean_std_vs_x",
    "packet_frame",
    "phases",
    "sample_toa",
    "sigma_dot_of_t",
    "sigma_of_t",
    "thread_cap",
    "time_energy_product",
    "toa_distribution",
    "toa_exact",
    "toa_farfield_approx",
    "toa_moments_quadrature",
    "toa_nearfield_approx",
    "toa_pdf",
    "uncertainty_product",
    "__version__",
]
