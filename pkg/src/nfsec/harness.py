"""Seeded scenario execution, experiment sweeps and CSV emission.

Determinism contract: identical (config, seed) inputs produce
byte-identical CSV files. Floats are written with ``repr`` (shortest
round-trip form), rows follow fixed documented column orders, and trial
results are aggregated in index order even when computed concurrently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import (
    ArrayGeometry,
    ChannelMatrix,
    PolarLocation,
    farfield_channel,
    nearfield_channel,
)
from .config import SystemConfig, trial_rng
from .errors import ConfigError, DomainError
from .fully_digital import FDState, bcd_optimize, random_beamformer
from .hybrid import ProjectionResult, ao_project
from .metrics import IterationCounts, SecrecyReport, power_spectrum

_POWER_SLACK = 1.0 + 1e-9


def _fmt(value) -> str:
    """Deterministic CSV cell formatting."""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def _write_csv(path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def build_channels(
    config: SystemConfig, model: Optional[str] = None
) -> tuple[ChannelMatrix, ChannelMatrix]:
    """Construct the legitimate and eavesdropping channels for a scenario."""
    model = model or config.channel_model
    if model not in ("near", "far"):
        raise ConfigError(f"channel model must be 'near' or 'far', got {model!r}")
    build = nearfield_channel if model == "near" else farfield_channel
    tx = ArrayGeometry.ula(config.m, config.spacing_m)
    rx_u = ArrayGeometry.ula_at(config.u_location, config.m_u, config.spacing_m)
    rx_e = ArrayGeometry.ula_at(config.e_location, config.m_e, config.spacing_m)
    return build(tx, rx_u, config.f_hz), build(tx, rx_e, config.f_hz)


@dataclass
class TrialResult:
    trial: int
    fd_report: SecrecyReport
    hybrid_report: SecrecyReport
    fd_state: FDState
    projection: ProjectionResult


@dataclass
class ScenarioResult:
    config: SystemConfig
    model: str
    trials: list[TrialResult] = field(default_factory=list)

    def _stats(self, pick) -> tuple[float, float]:
        values = np.array([pick(t) for t in self.trials], dtype=float)
        return float(values.mean()), float(values.std())

    @property
    def fd_mean_c_s(self) -> float:
        return self._stats(lambda t: t.fd_report.c_s_bits)[0]

    @property
    def fd_std_c_s(self) -> float:
        return self._stats(lambda t: t.fd_report.c_s_bits)[1]

    @property
    def hybrid_mean_c_s(self) -> float:
        return self._stats(lambda t: t.hybrid_report.c_s_bits)[0]

    @property
    def hybrid_std_c_s(self) -> float:
        return self._stats(lambda t: t.hybrid_report.c_s_bits)[1]

    @property
    def all_converged(self) -> bool:
        return all(
            t.fd_state.converged and t.projection.converged for t in self.trials
        )


def run_trial(
    config: SystemConfig, h_u: ChannelMatrix, h_e: ChannelMatrix, trial: int
) -> TrialResult:
    """One seeded end-to-end optimization (digital design then projection)."""
    rng = trial_rng(config.seed, trial)
    w_init = random_beamformer(config.m, config.k, config.p_max_w, rng)
    state = bcd_optimize(h_u, h_e, config, w_init=w_init)
    projection = ao_project(
        state.w_fd, config, channels=(h_u, h_e), rng=rng
    )
    noise = config.noise_power_w
    fd_report = SecrecyReport.evaluate(
        h_u,
        h_e,
        state.w_fd,
        noise,
        IterationCounts(state.iterations, tuple(state.bisection_counts), 0),
    )
    hybrid_report = SecrecyReport.evaluate(
        h_u,
        h_e,
        projection.beamformer.effective,
        noise,
        IterationCounts(
            state.iterations, tuple(state.bisection_counts), projection.iterations
        ),
    )
    for report in (fd_report, hybrid_report):
        if report.transmit_power_w > config.p_max_w * _POWER_SLACK:
            raise DomainError(
                f"trial {trial} emitted power {report.transmit_power_w} above budget"
            )
    return TrialResult(trial, fd_report, hybrid_report, state, projection)


def run_scenario(
    config: SystemConfig, model: Optional[str] = None, workers: int = 1
) -> ScenarioResult:
    """Run all Monte-Carlo trials of a scenario.

    Trials are seeded independently from (seed, trial index), so any
    execution order yields the same results; aggregation is by index.
    """
    model = model or config.channel_model
    h_u, h_e = build_channels(config, model)
    indices = range(config.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: run_trial(config, h_u, h_e, t), indices))
    else:
        results = [run_trial(config, h_u, h_e, t) for t in indices]
    return ScenarioResult(config=config, model=model, trials=results)


def sweep_pmax(
    config: SystemConfig,
    p_max_dbm_list: Sequence[float],
    model: Optional[str] = None,
    workers: int = 1,
) -> list[dict]:
    """Mean secrecy capacity per power budget, both beamformer variants."""
    if len(p_max_dbm_list) == 0:
        raise ConfigError("p_max sweep list is empty")
    rows = []
    for p_dbm in p_max_dbm_list:
        result = run_scenario(config.replace(p_max_dbm=float(p_dbm)), model, workers)
        rows.append(
            {
                "p_max_dbm": float(p_dbm),
                "fd_mean_c_s": result.fd_mean_c_s,
                "fd_std_c_s": result.fd_std_c_s,
                "hybrid_mean_c_s": result.hybrid_mean_c_s,
                "hybrid_std_c_s": result.hybrid_std_c_s,
            }
        )
    return rows


def sweep_eve_location(
    config: SystemConfig,
    e_grid: Sequence[PolarLocation],
    model: Optional[str] = None,
    workers: int = 1,
) -> list[dict]:
    """Mean secrecy capacity per eavesdropper location."""
    if len(e_grid) == 0:
        raise ConfigError("eavesdropper location grid is empty")
    rows = []
    for loc in e_grid:
        cfg = config.replace(
            e_distance_m=loc.distance_m, e_angle_deg=math.degrees(loc.azimuth_rad)
        )
        result = run_scenario(cfg, model, workers)
        rows.append(
            {
                "e_distance_m": loc.distance_m,
                "e_angle_deg": math.degrees(loc.azimuth_rad),
                "fd_mean_c_s": result.fd_mean_c_s,
                "hybrid_mean_c_s": result.hybrid_mean_c_s,
            }
        )
    return rows


@dataclass
class SpectrumMap:
    """Normalized radiated power over a (distance, angle) grid."""

    distances_m: np.ndarray
    angles_deg: np.ndarray
    power: np.ndarray  # shape (len(distances), len(angles)), peak exactly 1
    scenario: ScenarioResult

    def peak_cell(self) -> tuple[float, float]:
        idx = np.unravel_index(int(np.argmax(self.power)), self.power.shape)
        return float(self.distances_m[idx[0]]), float(self.angles_deg[idx[1]])

    def value_at(self, distance_m: float, angle_deg: float) -> float:
        i = int(np.argmin(np.abs(self.distances_m - distance_m)))
        j = int(np.argmin(np.abs(self.angles_deg - angle_deg)))
        return float(self.power[i, j])


def spectrum_map(
    config: SystemConfig,
    distance_range_m: tuple[float, float],
    angle_range_rad: tuple[float, float],
    resolution: tuple[int, int],
) -> SpectrumMap:
    """Optimize once (first trial seed) and scan the radiated power.

    The grid is the Cartesian product of ``resolution[0]`` evenly spaced
    distances and ``resolution[1]`` evenly spaced angles; probing uses a
    single-antenna spherical-wave receiver regardless of the scenario's
    channel model.
    """
    n_d, n_a = resolution
    if n_d < 1 or n_a < 1:
        raise ConfigError("grid resolution must be at least 1 in each dimension")
    if not 0.0 < distance_range_m[0] <= distance_range_m[1]:
        raise ConfigError(f"bad distance range {distance_range_m}")
    if not angle_range_rad[0] <= angle_range_rad[1]:
        raise ConfigError(f"bad angle range {angle_range_rad}")
    scenario = run_scenario(config.replace(trials=1))
    beamformer = scenario.trials[0].projection.beamformer
    distances = np.linspace(distance_range_m[0], distance_range_m[1], n_d)
    angles = np.linspace(angle_range_rad[0], angle_range_rad[1], n_a)
    grid = [PolarLocation(float(d), float(a)) for d in distances for a in angles]
    tx = ArrayGeometry.ula(config.m, config.spacing_m)
    values = power_spectrum(beamformer.p, beamformer.w, tx, config.f_hz, grid)
    return SpectrumMap(
        distances_m=distances,
        angles_deg=np.degrees(angles),
        power=values.reshape(n_d, n_a),
        scenario=scenario,
    )


def convergence_trace(config: SystemConfig, model: Optional[str] = None):
    """Single-trial traces of both loops (first trial seed)."""
    result = run_scenario(config.replace(trials=1), model)
    trial = result.trials[0]
    return trial.fd_state.trace, trial.projection


# -- CSV writers -----------------------------------------------------------

RUN_HEADER = [
    "variant",
    "trial",
    "c_u_bits",
    "c_e_bits",
    "c_s_bits",
    "transmit_power_w",
    "bcd_iterations",
    "ao_iterations",
    "converged",
]


def write_run_csv(result: ScenarioResult, path) -> None:
    """Per-trial rows for both variants, then mean/std summary rows."""
    rows = []
    for t in result.trials:
        rows.append(
            [
                "fd",
                t.trial,
                t.fd_report.c_u_bits,
                t.fd_report.c_e_bits,
                t.fd_report.c_s_bits,
                t.fd_report.transmit_power_w,
                t.fd_state.iterations,
                0,
                int(t.fd_state.converged),
            ]
        )
    for t in result.trials:
        rows.append(
            [
                "hybrid",
                t.trial,
                t.hybrid_report.c_u_bits,
                t.hybrid_report.c_e_bits,
                t.hybrid_report.c_s_bits,
                t.hybrid_report.transmit_power_w,
                t.fd_state.iterations,
                t.projection.iterations,
                int(t.fd_state.converged and t.projection.converged),
            ]
        )
    rows.append(["fd_mean", "", "", "", result.fd_mean_c_s, "", "", "", ""])
    rows.append(["fd_std", "", "", "", result.fd_std_c_s, "", "", "", ""])
    rows.append(["hybrid_mean", "", "", "", result.hybrid_mean_c_s, "", "", "", ""])
    rows.append(["hybrid_std", "", "", "", result.hybrid_std_c_s, "", "", "", ""])
    _write_csv(path, RUN_HEADER, rows)


def write_pmax_csv(rows: list[dict], path) -> None:
    header = ["p_max_dbm", "fd_mean_c_s", "fd_std_c_s", "hybrid_mean_c_s", "hybrid_std_c_s"]
    _write_csv(path, header, [[r[h] for h in header] for r in rows])


def write_eve_csv(rows: list[dict], path) -> None:
    header = ["e_distance_m", "e_angle_deg", "fd_mean_c_s", "hybrid_mean_c_s"]
    _write_csv(path, header, [[r[h] for h in header] for r in rows])


def write_spectrum_csv(spectrum: SpectrumMap, path) -> None:
    """Long format: one row per grid cell, distance-major order."""
    rows = []
    for i, d in enumerate(spectrum.distances_m):
        for j, a in enumerate(spectrum.angles_deg):
            rows.append([float(d), float(a), float(spectrum.power[i, j])])
    _write_csv(path, ["distance_m", "angle_deg", "normalized_power"], rows)


def write_bcd_trace_csv(trace, path) -> None:
    rows = [
        [pt.iteration, pt.c_s_bits, pt.surrogate_nats, pt.mu, pt.power_w]
        for pt in trace
    ]
    _write_csv(
        path, ["iteration", "c_s_bits", "surrogate_nats", "mu", "power_w"], rows
    )


def write_ao_trace_csv(projection: ProjectionResult, path) -> None:
    c_s = projection.c_s_trace or [math.nan] * len(projection.residual_trace)
    rows = [
        [i + 1, c_s[i], projection.residual_trace[i]]
        for i in range(len(projection.residual_trace))
    ]
    _write_csv(path, ["iteration", "c_s_bits", "d_e"], rows)


def write_beamformer_csv(matrix, path) -> None:
    """Interleaved re,im dump, one row per matrix row."""
    m = np.asarray(matrix, dtype=np.complex128)
    header = ",".join(f"re{c},im{c}" for c in range(m.shape[1]))
    lines = [header]
    for row in m:
        lines.append(",".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
