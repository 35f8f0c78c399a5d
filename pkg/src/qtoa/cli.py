"""Command-line interface.

Every subcommand writes CSV: to stdout by default, or to --out with a JSON
sidecar next to it carrying the fully resolved parameters. Diagnostics and
the stdout-mode parameter echo go to stderr, so pipelines stay clean. SI
units are the default; --natural switches the unset mass and hbar to 1 for
the dimensionless presets.

Exit codes: 0 success, 1 numerical or domain failure, 2 flag errors.
"""
import argparse
import json
import sys

from .core import HBAR_SI, FreeFallParams
from .errors import QtoaError
from .gaussian_toa import (
    GaussianDropProblem,
    build_toa_distribution,
    energy_stats,
    time_energy_product,
    toa_exact,
    toa_moments_quadrature,
    uncertainty_product,
)
from .numerics import (
    QuadratureConfig,
    RngStream,
    TimeGridConfig,
    sample_truncated_normal,
)
from .superposition_toa import SuperposedState
from .superposition_toa import toa_distribution as superposition_distribution
from . import scans

COMMANDS = (
    "gaussian-pdf",
    "gaussian-sample",
    "gaussian-moments",
    "uncertainty",
    "energy",
    "superposition-pdf",
    "scan",
    "reproduce",
)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    num = common.add_argument_group("parameters")
    num.add_argument("--mass", type=float, default=None,
                     help="particle mass (kg; required in SI mode, 1 with --natural)")
    num.add_argument("--g", type=float, default=9.8,
                     help="gravitational acceleration (default 9.8)")
    num.add_argument("--hbar", type=float, default=None,
                     help="reduced Planck constant (default SI value, 1 with --natural)")
    num.add_argument("--natural", action="store_true",
                     help="natural units: unset --mass and --hbar become 1")
    num.add_argument("--sigma", type=float, default=None,
                     help="initial packet width")
    num.add_argument("--x", type=float, default=None,
                     help="detector height below the initial packet center")
    num.add_argument("--k1", type=float, default=None,
                     help="first packet wave number (superposition commands)")
    num.add_argument("--k2", type=float, default=None,
                     help="second packet wave number (superposition commands)")
    num.add_argument("--n-samples", type=int, default=100000,
                     help="sample count for gaussian-sample (default 100000)")
    num.add_argument("--seed", type=int, default=0,
                     help="RNG seed / provenance tag (default 0)")
    num.add_argument("--t-max", type=float, default=None,
                     help="pin the time window instead of growing it")
    num.add_argument("--grid-points", type=int, default=4097,
                     help="rows in PDF output tables (default 4097)")
    num.add_argument("--out", type=str, default=None,
                     help="output CSV path (default stdout; adds a .json sidecar)")
    num.add_argument("--tol", type=float, default=None,
                     help="relative convergence tolerance override")

    parser = argparse.ArgumentParser(
        prog="qtoa",
        description="Arrival-time statistics for quantum particles in free fall.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gaussian-pdf", parents=[common],
                   help="arrival-time density of a dropped Gaussian packet")
    sub.add_parser("gaussian-sample", parents=[common],
                   help="draw arrival times from the exact representation")
    sub.add_parser("gaussian-moments", parents=[common],
                   help="mean and std of the arrival time by quadrature")
    sub.add_parser("uncertainty", parents=[common],
                   help="arrival-time/initial-position uncertainty product")
    sub.add_parser("energy", parents=[common],
                   help="energy moments and the time-energy product")
    sub.add_parser("superposition-pdf", parents=[common],
                   help="arrival-time density of a two-packet superposition")
    scan = sub.add_parser("scan", parents=[common],
                          help="run one sweep kind over a parameter grid")
    scan.add_argument("--kind", required=True,
                      choices=[k.value for k in scans.ScanKind],
                      help="sweep kind")
    scan.add_argument("--grid-lo", type=float, default=None, help="grid start")
    scan.add_argument("--grid-hi", type=float, default=None, help="grid end")
    scan.add_argument("--grid-count", type=int, default=None, help="grid points")
    scan.add_argument("--grid-spacing", choices=["linear", "log"], default=None,
                      help="grid spacing")
    rep = sub.add_parser("reproduce", parents=[common],
                         help="regenerate a standard dataset (1-4)")
    rep.add_argument("--figure", type=int, required=True, choices=[1, 2, 3, 4],
                     help="dataset number")
    return parser


def _resolved_units(args):
    hbar = args.hbar
    mass = args.mass
    if args.natural:
        hbar = 1.0 if hbar is None else hbar
        mass = 1.0 if mass is None else mass
    elif hbar is None:
        hbar = HBAR_SI
    return mass, hbar


def _require(parser, args, *names):
    mass, hbar = _resolved_units(args)
    values = {"mass": mass, "hbar": hbar, "g": args.g, "sigma": args.sigma,
              "x": args.x, "k1": args.k1, "k2": args.k2}
    for name in names:
        if values[name] is None:
            parser.error(f"--{name} is required for this command"
                         + ("" if args.natural or name not in ("mass",)
                            else " (or use --natural)"))
    return values


def _params(values):
    return FreeFallParams(m=values["mass"], g=values["g"],
                          sigma=values["sigma"], hbar=values["hbar"])


def _grid_config(args):
    overrides = {}
    if args.t_max is not None:
        overrides["t_max"] = args.t_max
    if args.tol is not None:
        overrides["rel_tol"] = args.tol
    return TimeGridConfig(**overrides) if overrides else None


def _emit(args, header, rows, resolved):
    """CSV to --out or stdout; resolved parameters to sidecar or stderr."""
    from . import __version__

    payload = {
        "command": args.command,
        "params": dict(sorted(resolved.items())),
        "seed": args.seed,
        "version": __version__,
    }
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            scans._write_rows(fh, header, rows)
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        scans._write_rows(sys.stdout, header, rows)
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _pdf_rows(dist, n_out, density_fn):
    """Sample the converged density on an n_out-point grid, renormalized."""
    import numpy as np

    t = np.linspace(0.0, dist.t_grid[-1], n_out)
    w = density_fn(t)
    pdf = w / np.trapezoid(w, t)
    return [(t[i], pdf[i]) for i in range(n_out)]


def _cmd_gaussian_pdf(parser, args):
    values = _require(parser, args, "mass", "sigma", "x")
    prob = GaussianDropProblem(params=_params(values), x=args.x)
    dist = build_toa_distribution(prob, _grid_config(args))
    from . import kernels
    p = prob.params
    rows = _pdf_rows(dist, args.grid_points,
                     lambda t: kernels.gaussian_flux_grid(t, prob.x, p.g, p.sigma, p.tau))
    resolved = {**values, "t_max": dist.t_grid[-1], "mean": dist.mean, "std": dist.std}
    _emit(args, ("t", "pdf"), rows, resolved)


def _cmd_superposition_pdf(parser, args):
    values = _require(parser, args, "mass", "sigma", "x", "k1", "k2")
    state = SuperposedState(params=_params(values), k1=args.k1, k2=args.k2)
    dist = superposition_distribution(state, args.x, _grid_config(args))
    from . import kernels
    import numpy as np
    p = state.params
    rows = _pdf_rows(
        dist, args.grid_points,
        lambda t: np.abs(kernels.superposition_current_grid(
            t, args.x, p.m, p.g, p.hbar, p.sigma, state.k1, state.k2, state.norm_sq)),
    )
    resolved = {**values, "t_max": dist.t_grid[-1], "mean": dist.mean, "std": dist.std}
    _emit(args, ("t", "pdf"), rows, resolved)


def _cmd_gaussian_sample(parser, args):
    import numpy as np

    values = _require(parser, args, "mass", "sigma", "x")
    if args.n_samples < 1:
        parser.error("--n-samples must be positive")
    prob = GaussianDropProblem(params=_params(values), x=args.x)
    stream = RngStream(seed=args.seed)
    xi = sample_truncated_normal(prob.x / prob.params.sigma, stream, args.n_samples)
    toas = toa_exact(prob, xi)
    rows = [(v,) for v in np.atleast_1d(toas)]
    resolved = {**values, "n_samples": args.n_samples}
    if args.n_samples >= 2:
        mean = float(np.mean(toas))
        std = float(np.std(toas, ddof=1))
        print(f"mean={mean:.9g} std={std:.9g} stderr={std / len(toas) ** 0.5:.9g}",
              file=sys.stderr)
    _emit(args, ("toa",), rows, resolved)


def _cmd_gaussian_moments(parser, args):
    values = _require(parser, args, "mass", "sigma", "x")
    prob = GaussianDropProblem(params=_params(values), x=args.x)
    cfg = QuadratureConfig(rel_tol=args.tol) if args.tol else None
    mean, std = toa_moments_quadrature(prob, cfg)
    report = prob.regime_report()
    rows = [(mean, std, prob.t_c, prob.q, report.regime.value)]
    _emit(args, ("mean_toa", "std_toa", "t_classical", "q", "regime"), rows, values)


def _cmd_uncertainty(parser, args):
    values = _require(parser, args, "mass", "sigma", "x")
    prob = GaussianDropProblem(params=_params(values), x=args.x)
    cfg = QuadratureConfig(rel_tol=args.tol) if args.tol else None
    rep = uncertainty_product(prob, cfg)
    rows = [(rep.delta_t, rep.delta_x0, rep.product, rep.bound, rep.ratio,
             prob.regime_report().regime.value)]
    _emit(args, ("delta_t", "delta_x0", "product", "bound", "ratio", "regime"),
          rows, values)


def _cmd_energy(parser, args):
    values = _require(parser, args, "mass", "sigma", "x")
    prob = GaussianDropProblem(params=_params(values), x=args.x)
    cfg = QuadratureConfig(rel_tol=args.tol) if args.tol else None
    stats = energy_stats(prob.params)
    rep = time_energy_product(prob, cfg)
    rows = [(stats.mean_E, rep.delta_e, rep.delta_t, rep.product, rep.bound, rep.ratio)]
    _emit(args, ("mean_energy", "delta_energy", "delta_t", "product", "bound", "ratio"),
          rows, values)


def _scan_grid(args, default):
    lo = default.lo if args.grid_lo is None else args.grid_lo
    hi = default.hi if args.grid_hi is None else args.grid_hi
    count = default.count if args.grid_count is None else args.grid_count
    spacing = default.spacing if args.grid_spacing is None else args.grid_spacing
    return scans.GridSpec(lo=lo, hi=hi, count=count, spacing=spacing)


def _cmd_scan(parser, args):
    kind = scans.ScanKind(args.kind)
    out = args.out
    if kind in (scans.ScanKind.UNCERTAINTY_VS_SIGMA, scans.ScanKind.MEAN_TOA_VS_SIGMA):
        grid = _scan_grid(args, scans.GridSpec(1e-2, 10.0, 601, "log"))
        product, mean = scans.run_fig1(grid=grid, m=args.mass, g=args.g,
                                       x=args.x, hbar=args.hbar, seed=args.seed)
        table = product if kind is scans.ScanKind.UNCERTAINTY_VS_SIGMA else mean
    elif kind is scans.ScanKind.TOA_PDF_SINGLE:
        detectors = (args.x,) if args.x is not None else scans.FIG2_DETECTORS
        table, _ = scans.run_fig2(detectors=detectors, grid=_grid_config(args),
                                  seed=args.seed)
    elif kind is scans.ScanKind.MEAN_STD_VS_X:
        grid = _scan_grid(args, scans.GridSpec(0.5, 3.0, 400))
        table, _ = scans.run_fig3(grid=grid, time_grid=_grid_config(args),
                                  seed=args.seed)
    else:
        grid = _scan_grid(args, scans.GridSpec(0.25e-5, 4e-5, 31))
        table, _, _ = scans.run_fig4(grid=grid, time_grid=_grid_config(args),
                                     seed=args.seed)
    if out:
        scans.write_table(table, out)
    else:
        sys.stdout.write(scans.table_to_csv_text(table))
        print(json.dumps({"scan": table.spec.as_dict()}, sort_keys=True),
              file=sys.stderr)


def _cmd_reproduce(parser, args):
    if not args.out:
        parser.error("--out is required for reproduce")
    written = scans.reproduce(args.figure, args.out, seed=args.seed)
    for path in written:
        print(path, file=sys.stderr)


_HANDLERS = {
    "gaussian-pdf": _cmd_gaussian_pdf,
    "gaussian-sample": _cmd_gaussian_sample,
    "gaussian-moments": _cmd_gaussian_moments,
    "uncertainty": _cmd_uncertainty,
    "energy": _cmd_energy,
    "superposition-pdf": _cmd_superposition_pdf,
    "scan": _cmd_scan,
    "reproduce": _cmd_reproduce,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        _HANDLERS[args.command](parser, args)
    except SystemExit as exc:
        return exc.code
    except QtoaError as exc:
        print(f"qtoa: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
