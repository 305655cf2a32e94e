"""Command-line front end.

Subcommands: ``run``, ``sweep-pmax``, ``sweep-eve``, ``spectrum``,
``trace``. Every command reads a flat config file, writes CSV files
named ``<command>_<tag>.csv`` into the output directory (the tag
defaults to a UTC timestamp; pass ``--tag`` for stable names), and exits
0 on success. On failure a single machine-readable line

    ERROR {"code": ..., "message": ...}

is printed to stderr and the exit status is nonzero (2 for
configuration problems, 1 otherwise).
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from .channel import PolarLocation
from .config import load_config
from .errors import ConfigError
from . import harness


def _add_common(parser):
    parser.add_argument("--config", required=True, help="path to a scenario config file")
    parser.add_argument("--out", required=True, help="output directory (created if absent)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--tag", default=None, help="output filename tag (default: UTC timestamp)")
    parser.add_argument("--workers", type=int, default=1, help="concurrent trials")
    parser.add_argument("--svg", action="store_true", help="also emit an SVG plot")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfsec",
        description="Two-stage secrecy beamforming simulator for near-field MIMO links",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario over all trials")
    _add_common(p_run)
    p_run.add_argument("--model", choices=["near", "far"], default=None)

    p_pmax = sub.add_parser("sweep-pmax", help="sweep the transmit power budget")
    _add_common(p_pmax)
    p_pmax.add_argument("--model", choices=["near", "far"], default=None)
    p_pmax.add_argument(
        "--pmax-dbm", type=float, nargs="+", required=True, help="budgets to sweep"
    )

    p_eve = sub.add_parser("sweep-eve", help="sweep the eavesdropper location")
    _add_common(p_eve)
    p_eve.add_argument("--model", choices=["near", "far"], default=None)
    p_eve.add_argument(
        "--distances-m", type=float, nargs="+", default=None,
        help="eavesdropper distances (default: config value)",
    )
    p_eve.add_argument(
        "--angles-deg", type=float, nargs="+", default=None,
        help="eavesdropper azimuths (default: config value)",
    )

    p_spec = sub.add_parser("spectrum", help="map the radiated power over space")
    _add_common(p_spec)
    p_spec.add_argument(
        "--grid",
        default="2:30:29,0:90:46",
        help="dmin:dmax:nd,amin:amax:na (distances in m, angles in deg)",
    )

    p_trace = sub.add_parser("trace", help="dump single-trial convergence traces")
    _add_common(p_trace)
    p_trace.add_argument("--model", choices=["near", "far"], default=None)

    return parser


def _parse_grid(spec: str):
    try:
        d_part, a_part = spec.split(",")
        d_lo, d_hi, n_d = d_part.split(":")
        a_lo, a_hi, n_a = a_part.split(":")
        return (
            (float(d_lo), float(d_hi)),
            (math.radians(float(a_lo)), math.radians(float(a_hi))),
            (int(n_d), int(n_a)),
        )
    except ValueError as exc:
        raise ConfigError(f"cannot parse --grid {spec!r}: expected dmin:dmax:nd,amin:amax:na") from exc


def _prepare(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = args.tag or datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    return config, out, tag


def _svg_lines(path, x, series, xlabel, ylabel):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in series.items():
        ax.plot(x, y, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _svg_heatmap(path, spectrum):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(
        spectrum.angles_deg, spectrum.distances_m, spectrum.power, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="normalized power")
    ax.set_xlabel("angle (deg)")
    ax.set_ylabel("distance (m)")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _cmd_run(args) -> int:
    config, out, tag = _prepare(args)
    result = harness.run_scenario(config, model=args.model, workers=args.workers)
    harness.write_run_csv(result, out / f"run_{tag}.csv")
    if args.svg:
        trials = [t.trial for t in result.trials]
        _svg_lines(
            out / f"run_{tag}.svg",
            trials,
            {
                "fully digital": [t.fd_report.c_s_bits for t in result.trials],
                "hybrid": [t.hybrid_report.c_s_bits for t in result.trials],
            },
            "trial",
            "C_s (bits/s/Hz)",
        )
    return 0


def _cmd_sweep_pmax(args) -> int:
    config, out, tag = _prepare(args)
    rows = harness.sweep_pmax(config, args.pmax_dbm, model=args.model, workers=args.workers)
    harness.write_pmax_csv(rows, out / f"sweep-pmax_{tag}.csv")
    if args.svg:
        _svg_lines(
            out / f"sweep-pmax_{tag}.svg",
            [r["p_max_dbm"] for r in rows],
            {
                "fully digital": [r["fd_mean_c_s"] for r in rows],
                "hybrid": [r["hybrid_mean_c_s"] for r in rows],
            },
            "P_max (dBm)",
            "mean C_s (bits/s/Hz)",
        )
    return 0


def _cmd_sweep_eve(args) -> int:
    config, out, tag = _prepare(args)
    distances = args.distances_m or [config.e_distance_m]
    angles = args.angles_deg or [config.e_angle_deg]
    grid = [
        PolarLocation(d, math.radians(a)) for d in distances for a in angles
    ]
    rows = harness.sweep_eve_location(config, grid, model=args.model, workers=args.workers)
    harness.write_eve_csv(rows, out / f"sweep-eve_{tag}.csv")
    if args.svg:
        _svg_lines(
            out / f"sweep-eve_{tag}.svg",
            list(range(len(rows))),
            {
                "fully digital": [r["fd_mean_c_s"] for r in rows],
                "hybrid": [r["hybrid_mean_c_s"] for r in rows],
            },
            "grid index",
            "mean C_s (bits/s/Hz)",
        )
    return 0


def _cmd_spectrum(args) -> int:
    config, out, tag = _prepare(args)
    d_range, a_range, resolution = _parse_grid(args.grid)
    spectrum = harness.spectrum_map(config, d_range, a_range, resolution)
    harness.write_spectrum_csv(spectrum, out / f"spectrum_{tag}.csv")
    if args.svg:
        _svg_heatmap(out / f"spectrum_{tag}.svg", spectrum)
    return 0


def _cmd_trace(args) -> int:
    config, out, tag = _prepare(args)
    bcd_trace, projection = harness.convergence_trace(config, model=args.model)
    harness.write_bcd_trace_csv(bcd_trace, out / f"trace_{tag}_bcd.csv")
    harness.write_ao_trace_csv(projection, out / f"trace_{tag}_ao.csv")
    harness.write_beamformer_csv(projection.beamformer.p, out / f"trace_{tag}_analog.csv")
    harness.write_beamformer_csv(projection.beamformer.w, out / f"trace_{tag}_digital.csv")
    with open(out / f"trace_{tag}_meta.json", "w") as fh:
        json.dump(projection.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.svg:
        _svg_lines(
            out / f"trace_{tag}.svg",
            [pt.iteration for pt in bcd_trace],
            {"C_s (digital design)": [pt.c_s_bits for pt in bcd_trace]},
            "iteration",
            "C_s (bits/s/Hz)",
        )
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep-pmax": _cmd_sweep_pmax,
    "sweep-eve": _cmd_sweep_eve,
    "spectrum": _cmd_spectrum,
    "trace": _cmd_trace,
}


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write("ERROR " + json.dumps({"code": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail(2, "config", str(exc))
    except FileNotFoundError as exc:
        return _fail(2, "io", str(exc))
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        return _fail(1, "runtime", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    raise SystemExit(main())
