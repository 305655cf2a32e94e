"""Capacity, secrecy and beam-similarity measures for given beamformers.

Capacities are returned in bits/s/Hz; all internal log-determinant work
is done in nats through :mod:`nfsec.linalg`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import ArrayGeometry, ChannelMatrix, PolarLocation, nearfield_channel
from .errors import DimensionError, DomainError
from .linalg import logdet_hpd

LN2 = math.log(2.0)


def _as_matrix(h) -> np.ndarray:
    if isinstance(h, ChannelMatrix):
        return h.matrix
    return np.asarray(h, dtype=np.complex128)


def mutual_information(h, w_eff, noise_power_w: float) -> float:
    """log2 det(I + H W W^H H^H / noise) in bits/s/Hz."""
    hm = _as_matrix(h)
    w = np.asarray(w_eff, dtype=np.complex128)
    if w.ndim != 2 or hm.shape[1] != w.shape[0]:
        raise DimensionError(
            f"beamformer shape {w.shape} incompatible with channel shape {hm.shape}"
        )
    if not noise_power_w > 0.0:
        raise DomainError(f"noise power must be positive, got {noise_power_w}")
    g = hm @ w
    gram = np.eye(hm.shape[0], dtype=np.complex128) + (g @ g.conj().T) / noise_power_w
    return logdet_hpd(gram) / LN2


def secrecy_capacity(h_u, h_e, w_eff, noise_power_w: float) -> float:
    """[C_U - C_E]^+ for a common effective beamformer."""
    c_u = mutual_information(h_u, w_eff, noise_power_w)
    c_e = mutual_information(h_e, w_eff, noise_power_w)
    return max(c_u - c_e, 0.0)


def beam_similarity(w_fd, p, w) -> float:
    """Squared Frobenius residual between a target beamformer and P W."""
    w_fd = np.asarray(w_fd, dtype=np.complex128)
    p = np.asarray(p, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if p.shape[1] != w.shape[0] or (p.shape[0], w.shape[1]) != w_fd.shape:
        raise DimensionError(
            f"shapes {p.shape} x {w.shape} do not compose to {w_fd.shape}"
        )
    diff = w_fd - p @ w
    return float(np.sum(np.abs(diff) ** 2))


def power_spectrum(
    p,
    w,
    tx: ArrayGeometry,
    f_hz: float,
    grid: Sequence[PolarLocation],
    include_path_loss: bool = False,
) -> np.ndarray:
    """Normalized radiated power over a set of free-space probe points.

    Each point is probed with a single-antenna spherical-wave receiver
    and the result is scaled so the grid maximum is exactly 1, aligned
    with ``grid``.

    By default the probe keeps only the spherical phase profile (unit
    per-element gain), so the map shows where the array focuses rather
    than raw received power; with ``include_path_loss=True`` the 1/r
    free-space amplitude is kept, which makes cells close to the array
    dominate the normalization.
    """
    if len(grid) == 0:
        raise DomainError("probe grid is empty")
    w_eff = np.asarray(p, dtype=np.complex128) @ np.asarray(w, dtype=np.complex128)
    rows = []
    for loc in grid:
        row = nearfield_channel(tx, ArrayGeometry.ula_at(loc, 1, tx.spacing_m), f_hz).matrix[0]
        if not include_path_loss:
            row = row / (np.abs(row) * math.sqrt(tx.num_elements))
        rows.append(row)
    probe = np.vstack(rows)
    powers = np.sum(np.abs(probe @ w_eff) ** 2, axis=1)
    peak = float(powers.max())
    if peak <= 0.0:
        raise DomainError("radiated power is identically zero over the grid")
    return powers / peak


@dataclass(frozen=True)
class IterationCounts:
    """Loop totals for one optimized trial: outer descent, per-step
    bisection counts, and projection sweeps."""

    bcd: int
    bisection: tuple[int, ...]
    ao: int


@dataclass(frozen=True)
class SecrecyReport:
    """Per-run capacities and the power actually radiated."""

    c_u_bits: float
    c_e_bits: float
    c_s_bits: float
    transmit_power_w: float
    iterations: Optional[IterationCounts] = None

    def __post_init__(self):
        expected = max(self.c_u_bits - self.c_e_bits, 0.0)
        if not math.isclose(self.c_s_bits, expected, rel_tol=1e-9, abs_tol=1e-12):
            raise DomainError(
                f"c_s = {self.c_s_bits} inconsistent with [c_u - c_e]^+ = {expected}"
            )
        if self.c_s_bits < 0.0:
            raise DomainError("secrecy capacity cannot be negative")

    @classmethod
    def evaluate(
        cls, h_u, h_e, w_eff, noise_power_w: float, iterations=None
    ) -> "SecrecyReport":
        c_u = mutual_information(h_u, w_eff, noise_power_w)
        c_e = mutual_information(h_e, w_eff, noise_power_w)
        w = np.asarray(w_eff)
        power = float(np.sum(np.abs(w) ** 2))
        return cls(c_u, c_e, max(c_u - c_e, 0.0), power, iterations)
