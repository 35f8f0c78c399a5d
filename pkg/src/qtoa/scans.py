"""Parameter sweeps and the standard result tables.

Four pipelines orchestrate the computation modules into reproducible
datasets: the uncertainty-product and mean-arrival sweeps for a dropped
Gaussian packet (``run_fig1``), interference arrival-time densities for the
two-packet superposition (``run_fig2``), the mean/std oscillation sweep
(``run_fig3``), and the hydrogen-scale superposition sweep (``run_fig4``).
Output is CSV with a JSON sidecar carrying the resolved parameters; no
plotting here, figures are rendered by external tools.
"""
import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import kernels
from .core import HBAR_SI, FreeFallParams, classical_time
from .errors import DomainError
from .gaussian_toa import (
    GaussianDropProblem,
    MEAN_COEFF_NEAR_FIELD,
    MEAN_FACTOR_FAR_FIELD_QUANTUM,
    STD_COEFF_NEAR_FIELD,
    STD_FACTOR_FAR_FIELD_QUANTUM,
    toa_moments_quadrature,
)
from .numerics import TimeGridConfig, thread_cap
from .superposition_toa import SuperposedState, mean_std_vs_x, toa_distribution

# Fully resolved parameter sets behind the standard tables. The hydrogen
# presets are SI; the interference preset uses natural units (hbar = m = 1).
PRESETS = {
    "hydrogen-drop": {
        "m": 1.67e-27,
        "g": 9.8,
        "x": 1e-5,
        "hbar": HBAR_SI,
    },
    "interference-natural": {
        "m": 1.0,
        "g": 200.0,
        "sigma": 3.0,
        "k1": 10.0,
        "k2": -10.0,
        "hbar": 1.0,
    },
    "hydrogen-superposition": {
        "m": 1.67e-27,
        "g": 9.8,
        "sigma": 1e-5,
        "k1": 1e6,
        "k2": -1e6,
        "hbar": HBAR_SI,
    },
}


class ScanKind(Enum):
    UNCERTAINTY_VS_SIGMA = "UncertaintyVsSigma"
    MEAN_TOA_VS_SIGMA = "MeanToaVsSigma"
    TOA_PDF_SINGLE = "ToaPdfSingle"
    MEAN_STD_VS_X = "MeanStdVsX"
    HYDROGEN_MEAN_VS_X = "HydrogenMeanVsX"


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("grid needs at least 2 points")
        if not self.lo < self.hi:
            raise DomainError("grid bounds must satisfy lo < hi")
        if self.spacing not in ("linear", "log"):
            raise DomainError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and not self.lo > 0.0:
            raise DomainError("log grid needs positive bounds")

    def values(self):
        if self.spacing == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class ScanSpec:
    """Resolved description of one sweep, echoed to the JSON sidecar."""

    kind: ScanKind
    preset: str
    params: dict
    grid: GridSpec = None
    seed: int = 0

    def as_dict(self):
        out = {
            "kind": self.kind.value,
            "preset": self.preset,
            "params": dict(sorted(self.params.items())),
            "seed": self.seed,
        }
        if self.grid is not None:
            out["grid"] = {
                "lo": self.grid.lo,
                "hi": self.grid.hi,
                "count": self.grid.count,
                "spacing": self.grid.spacing,
            }
        return out


@dataclass(frozen=True)
class ScanTable:
    spec: ScanSpec
    header: tuple
    rows: list


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".9g")


def write_table(table, path):
    """CSV at 9 significant digits plus a <path>.json provenance sidecar."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, table.header, table.rows)
    write_sidecar(table.spec, path)


def write_sidecar(spec, path):
    from . import __version__

    payload = {"scan": spec.as_dict(), "version": __version__, "seed": spec.seed}
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_rows(stream, header, rows):
    writer = csv.writer(stream)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def table_to_csv_text(table):
    buf = io.StringIO(newline="")
    _write_rows(buf, table.header, table.rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Dropped Gaussian packet: uncertainty product and mean arrival vs. sigma/x.

FIG1_PRODUCT_HEADER = (
    "sigma_over_x",
    "q",
    "delta_t",
    "product",
    "bound",
    "ratio",
    "asym_far_semiclassical",
    "asym_far_quantum",
    "asym_near_field",
    "regime",
)
FIG1_MEAN_HEADER = (
    "sigma_over_x",
    "q",
    "mean_toa",
    "t_classical",
    "asym_near_field",
    "asym_far_quantum",
    "regime",
)


def _fig1_spec(kind, grid, params, seed):
    return ScanSpec(kind=kind, preset="hydrogen-drop", params=params, grid=grid, seed=seed)


def run_fig1(grid=None, m=None, g=None, x=None, hbar=None, seed=0, max_workers=None):
    """Uncertainty product and mean arrival time against sigma/x.

    Returns the product table and the mean table. Asymptote columns carry
    the closed forms for the three regimes; the bound column is the
    universal hbar/(2 m g).
    """
    preset = PRESETS["hydrogen-drop"]
    m = preset["m"] if m is None else m
    g = preset["g"] if g is None else g
    x = preset["x"] if x is None else x
    hbar = preset["hbar"] if hbar is None else hbar
    grid = grid or GridSpec(lo=1e-2, hi=10.0, count=601, spacing="log")
    params = {"m": m, "g": g, "x": x, "hbar": hbar}
    bound = hbar / (2.0 * m * g)

    def one(r):
        p = FreeFallParams(m=m, g=g, sigma=r * x, hbar=hbar)
        prob = GaussianDropProblem(params=p, x=x)
        mean, delta_t = toa_moments_quadrature(prob)
        t_c = prob.t_c
        q = prob.q
        regime = prob.regime_report().regime.value
        scale_nf = t_c * math.sqrt(r)
        product_row = (
            r,
            q,
            delta_t,
            delta_t * p.sigma,
            bound,
            delta_t * p.sigma / bound,
            q * t_c * p.sigma,
            q * t_c * p.sigma * STD_FACTOR_FAR_FIELD_QUANTUM,
            scale_nf * STD_COEFF_NEAR_FIELD * p.sigma,
            regime,
        )
        mean_row = (
            r,
            q,
            mean,
            t_c,
            scale_nf * MEAN_COEFF_NEAR_FIELD,
            q * t_c * MEAN_FACTOR_FAR_FIELD_QUANTUM,
            regime,
        )
        return product_row, mean_row

    ratios = grid.values()
    workers = max_workers or thread_cap()
    if workers <= 1:
        pairs = [one(r) for r in ratios]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(one, ratios))
    product_rows = [p for p, _ in pairs]
    mean_rows = [q_ for _, q_ in pairs]
    return (
        ScanTable(
            spec=_fig1_spec(ScanKind.UNCERTAINTY_VS_SIGMA, grid, params, seed),
            header=FIG1_PRODUCT_HEADER,
            rows=product_rows,
        ),
        ScanTable(
            spec=_fig1_spec(ScanKind.MEAN_TOA_VS_SIGMA, grid, params, seed),
            header=FIG1_MEAN_HEADER,
            rows=mean_rows,
        ),
    )


# ---------------------------------------------------------------------------
# Two-packet interference densities at fixed detectors.

FIG2_HEADER = ("x", "t", "pdf_interference", "pdf_envelope")
FIG2_DETECTORS = (2.0, 1.195, 1.3075)
PDF_TABLE_ROWS = 4097


def _decimate(t, n_out):
    """Indices of an evenly spaced sub-grid keeping both endpoints.

    Converged grids have (len-1) divisible by (n_out-1) by construction;
    anything else is kept whole rather than resampled unevenly.
    """
    stride, rem = divmod(len(t) - 1, n_out - 1)
    if stride <= 1 or rem:
        return np.arange(len(t))
    return np.arange(0, len(t), stride)


@dataclass(frozen=True)
class DetectorPdfs:
    """Interference and averaged-envelope arrival densities at one detector.

    The envelope column averages the two singly-normalized one-packet
    densities, which removes the cross term while keeping each packet's
    flux; both columns integrate to one on ``t_grid``.
    """

    x: float
    t_grid: np.ndarray
    pdf_interference: np.ndarray
    pdf_envelope: np.ndarray
    mean: float
    std: float
    mean_envelope: float
    std_envelope: float


def _interference_state(params_dict):
    p = FreeFallParams(
        m=params_dict["m"],
        g=params_dict["g"],
        sigma=params_dict["sigma"],
        hbar=params_dict["hbar"],
    )
    return SuperposedState(params=p, k1=params_dict["k1"], k2=params_dict["k2"])


def detector_pdfs(state, x, grid=None):
    """Build both densities for one detector on a shared time grid."""
    base = grid or TimeGridConfig()
    single1 = SuperposedState(params=state.params, k1=state.k1, k2=state.k1)
    single2 = SuperposedState(params=state.params, k1=state.k2, k2=state.k2)
    parts = [
        toa_distribution(s, x, base) for s in (state, single1, single2)
    ]
    t_max = max(d.t_grid[-1] for d in parts)
    pinned = replace(base, t_max=t_max)
    parts = [
        toa_distribution(s, x, pinned) for s in (state, single1, single2)
    ]
    n = max(len(d.t_grid) for d in parts)
    t = np.linspace(0.0, t_max, n)
    p = state.params

    def normalized(s):
        w = np.abs(
            kernels.superposition_current_grid(
                t, x, p.m, p.g, p.hbar, p.sigma, s.k1, s.k2, s.norm_sq
            )
        )
        return w / np.trapezoid(w, t)

    pdf_int = normalized(state)
    pdf_env = 0.5 * (normalized(single1) + normalized(single2))
    mean_env = np.trapezoid(t * pdf_env, t)
    var_env = np.trapezoid(t * t * pdf_env, t) - mean_env**2

    # Published tables sample the converged density on a fixed-size grid,
    # renormalized there so the emitted rows integrate to one exactly.
    keep = _decimate(t, PDF_TABLE_ROWS)
    t_out = t[keep]
    pdf_int = pdf_int[keep]
    pdf_env = pdf_env[keep]
    pdf_int = pdf_int / np.trapezoid(pdf_int, t_out)
    pdf_env = pdf_env / np.trapezoid(pdf_env, t_out)
    return DetectorPdfs(
        x=x,
        t_grid=t_out,
        pdf_interference=pdf_int,
        pdf_envelope=pdf_env,
        mean=parts[0].mean,
        std=parts[0].std,
        mean_envelope=float(mean_env),
        std_envelope=float(math.sqrt(max(var_env, 0.0))),
    )


def run_fig2(detectors=FIG2_DETECTORS, grid=None, seed=0):
    """Interference vs. averaged-envelope arrival densities.

    Natural-unit preset; the default detectors are the fringe showcase
    x = 2 plus the pair whose mean arrival times invert.
    """
    params = dict(PRESETS["interference-natural"])
    state = _interference_state(params)
    results = [detector_pdfs(state, float(x), grid) for x in detectors]
    rows = []
    for res in results:
        for i in range(len(res.t_grid)):
            rows.append(
                (res.x, res.t_grid[i], res.pdf_interference[i], res.pdf_envelope[i])
            )
    spec = ScanSpec(
        kind=ScanKind.TOA_PDF_SINGLE,
        preset="interference-natural",
        params={**params, "detectors": list(float(x) for x in detectors)},
        seed=seed,
    )
    return ScanTable(spec=spec, header=FIG2_HEADER, rows=rows), results


# ---------------------------------------------------------------------------
# Mean and std of the arrival time against detector position.

FIG3_HEADER = ("x", "mean_toa", "std_toa", "t_classical")


def _mean_std_table(state, xs, grid, kind, preset, params, seed, gridspec, max_workers):
    rows_ms = mean_std_vs_x(state, xs, grid, max_workers=max_workers)
    rows = [
        (r.x, r.mean, r.std, classical_time(r.x, state.params)) for r in rows_ms
    ]
    spec = ScanSpec(kind=kind, preset=preset, params=params, grid=gridspec, seed=seed)
    return ScanTable(spec=spec, header=FIG3_HEADER, rows=rows)


def run_fig3(grid=None, inset_grid=None, time_grid=None, seed=0, max_workers=None):
    """Mean/std sweep for the natural-unit superposition.

    The main table covers the oscillatory window; the wider inset table
    shows the oscillations dying out and the mean joining the classical
    curve.
    """
    params = dict(PRESETS["interference-natural"])
    state = _interference_state(params)
    grid = grid or GridSpec(lo=0.5, hi=3.0, count=400)
    inset_grid = inset_grid or GridSpec(lo=0.5, hi=30.0, count=240)
    main = _mean_std_table(
        state, grid.values(), time_grid, ScanKind.MEAN_STD_VS_X,
        "interference-natural", params, seed, grid, max_workers,
    )
    inset = _mean_std_table(
        state, inset_grid.values(), time_grid, ScanKind.MEAN_STD_VS_X,
        "interference-natural", params, seed, inset_grid, max_workers,
    )
    return main, inset


# ---------------------------------------------------------------------------
# Hydrogen-scale superposition: mean arrival vs. detector plus two densities.

FIG4_PDF_HEADER = ("x", "t", "pdf")
FIG4_PDF_DETECTORS = (0.5e-5, 2e-5)


def run_fig4(grid=None, time_grid=None, seed=0, max_workers=None):
    """Hydrogen-preset superposition sweep.

    Returns the mean/std table over the detector range and the arrival
    densities at the two reference detector heights.
    """
    params = dict(PRESETS["hydrogen-superposition"])
    state = _interference_state(params)
    grid = grid or GridSpec(lo=0.25e-5, hi=4e-5, count=31)
    table = _mean_std_table(
        state, grid.values(), time_grid, ScanKind.HYDROGEN_MEAN_VS_X,
        "hydrogen-superposition", params, seed, grid, max_workers,
    )
    dists = [toa_distribution(state, x, time_grid) for x in FIG4_PDF_DETECTORS]
    pdf_rows = []
    for x, d in zip(FIG4_PDF_DETECTORS, dists):
        keep = _decimate(d.t_grid, PDF_TABLE_ROWS)
        t_out = d.t_grid[keep]
        pdf = d.pdf[keep]
        pdf = pdf / np.trapezoid(pdf, t_out)
        for i in range(len(t_out)):
            pdf_rows.append((x, t_out[i], pdf[i]))
    pdf_spec = ScanSpec(
        kind=ScanKind.TOA_PDF_SINGLE,
        preset="hydrogen-superposition",
        params={**params, "detectors": list(FIG4_PDF_DETECTORS)},
        seed=seed,
    )
    pdf_table = ScanTable(spec=pdf_spec, header=FIG4_PDF_HEADER, rows=pdf_rows)
    return table, pdf_table, dists


# ---------------------------------------------------------------------------


def reproduce(figure, out, seed=0, max_workers=None):
    """Regenerate one standard dataset; returns the list of files written.

    ``out`` names the primary CSV; companion tables derive their names from
    its stem (for example ``fig1.csv`` also writes ``fig1_mean.csv``). Every
    CSV gets a JSON sidecar.
    """
    out = str(out)
    stem = out[:-4] if out.endswith(".csv") else out
    written = []

    def emit(table, path):
        write_table(table, path)
        written.append(path)
        written.append(path + ".json")

    if figure == 1:
        product, mean = run_fig1(seed=seed, max_workers=max_workers)
        emit(product, out)
        emit(mean, stem + "_mean.csv")
    elif figure == 2:
        table, _ = run_fig2(seed=seed)
        emit(table, out)
    elif figure == 3:
        main, inset = run_fig3(seed=seed, max_workers=max_workers)
        emit(main, out)
        emit(inset, stem + "_inset.csv")
    elif figure == 4:
        table, pdf_table, _ = run_fig4(seed=seed, max_workers=max_workers)
        emit(table, out)
        emit(pdf_table, stem + "_pdfs.csv")
    else:
        raise DomainError(f"no figure {figure!r}; choose 1-4")
    return written
