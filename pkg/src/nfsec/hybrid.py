"""Projection of a fully-digital beamformer onto the hybrid architecture.

The hybrid beamformer is a cascade of a phase-only analog precoder P
(every entry unit modulus) and a small digital precoder W. Alternating
optimization of ``||W_fd - P W||_F^2`` is used: the digital part has the
least-squares closed form, and each analog entry has a closed-form
phase-only minimizer, swept in fixed row-major order for reproducible
traces. Both update families never increase the residual.

Coordinate update derivation (convention pinned here and certified by a
grid-search oracle in the tests): with X = W W^H and Y = W_fd W^H, the
residual restricted to entry (i, j) of P is, up to constants,
``-2 Re(conj(p) z)`` with

    z = Y[i, j] - (P[i, :] X[:, j] - P[i, j] X[j, j]),

so the minimizer on the unit circle is p = z / |z| (entry kept when
z = 0, where the restriction is constant).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import solve_hpd
from .metrics import beam_similarity, mutual_information, secrecy_capacity

log = logging.getLogger(__name__)

_UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class HybridBeamformer:
    """Analog precoder (unit-modulus entries) plus digital precoder."""

    p: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.complex128)
        w = np.asarray(self.w, dtype=np.complex128)
        if p.ndim != 2 or w.ndim != 2 or p.shape[1] != w.shape[0]:
            raise DimensionError(f"incompatible precoder shapes {p.shape} and {w.shape}")
        if np.any(np.abs(np.abs(p) - 1.0) > _UNIT_MODULUS_TOL):
            raise DomainError("analog precoder entries must have unit modulus")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "w", w)

    @property
    def effective(self) -> np.ndarray:
        return self.p @ self.w


@dataclass
class ProjectionResult:
    """Outcome of one alternating projection run."""

    beamformer: HybridBeamformer
    residual_trace: list[float] = field(default_factory=list)
    c_s_trace: Optional[list[float]] = None
    iterations: int = 0
    converged: bool = True
    rescale_factor: float = 1.0

    @property
    def residual(self) -> float:
        return self.residual_trace[-1] if self.residual_trace else math.nan

    def metadata(self) -> dict:
        m, m_r = self.beamformer.p.shape
        return {
            "num_antennas": m,
            "num_rf_chains": m_r,
            "num_streams": self.beamformer.w.shape[1],
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "rescale_factor": self.rescale_factor,
        }


def ls_digital(p, w_fd) -> np.ndarray:
    """Least-squares digital precoder (P^H P)^{-1} P^H W_fd."""
    p = np.asarray(p, dtype=np.complex128)
    w_fd = np.asarray(w_fd, dtype=np.complex128)
    if p.shape[0] != w_fd.shape[0]:
        raise DimensionError(
            f"analog precoder has {p.shape[0]} rows but target has {w_fd.shape[0]}"
        )
    gram = p.conj().T @ p
    rhs = p.conj().T @ w_fd
    try:
        return solve_hpd(gram, rhs)
    except DomainError:
        # unit-modulus columns give tr(P^H P) = M * M_R, so this ridge is
        # ~1e-12 relative to the diagonal
        ridge = 1e-12 * p.shape[0]
        log.warning("rank-deficient analog Gram matrix; solving with ridge %.3g", ridge)
        eye = np.eye(gram.shape[0], dtype=np.complex128)
        return solve_hpd(gram + ridge * eye, rhs)


def phase_coordinate_update(p, index, x, y) -> complex:
    """Optimal unit-modulus value for one analog entry, others fixed.

    ``x`` and ``y`` are the fixed quadratic/linear coefficient matrices
    W W^H and W_fd W^H of the residual objective.
    """
    i, j = index
    p = np.asarray(p)
    z = y[i, j] - (p[i, :] @ x[:, j] - p[i, j] * x[j, j])
    mag = abs(z)
    if mag == 0.0:
        return complex(p[i, j])
    return complex(z / mag)


def analog_init(w_fd, m_r: int, rng=None) -> np.ndarray:
    """Matched-phase start for the analog precoder.

    Column j < K copies the phases of target column j; the remaining
    columns (and exact-zero target entries) fall back to random phases,
    which keeps the columns linearly independent - repeating the matched
    columns would make P^H P exactly singular whenever m_r > K. Without
    a generator the fallback is a deterministic phase ramp.
    """
    w_fd = np.asarray(w_fd, dtype=np.complex128)
    m, k = w_fd.shape
    p = np.empty((m, m_r), dtype=np.complex128)
    for j in range(m_r):
        if j < k:
            p[:, j] = np.exp(1j * np.angle(w_fd[:, j]))
        elif rng is not None:
            p[:, j] = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=m))
        else:
            p[:, j] = np.exp(1j * (2.0 * math.pi * (j + 1) / m_r) * np.arange(m) / m)
    return p


def power_rescale(p, w, p_max_w: float) -> np.ndarray:
    """Shrink the digital precoder so the effective beamformer is feasible."""
    if not p_max_w > 0.0:
        raise DomainError(f"power budget must be positive, got {p_max_w}")
    power = float(np.sum(np.abs(np.asarray(p) @ np.asarray(w)) ** 2))
    if power <= p_max_w or power == 0.0:
        return np.asarray(w, dtype=np.complex128)
    return np.asarray(w, dtype=np.complex128) * math.sqrt(p_max_w / power)


def ao_project(w_fd, config, initial_p=None, channels=None, rng=None) -> ProjectionResult:
    """Alternate digital and analog updates until the stop rule fires.

    With ``channels=(h_u, h_e)`` the stop rule follows the secrecy-rate
    change of the effective beamformer (|delta C_s| <= eps2, evaluated
    on the unclipped rate so iterations pinned at zero secrecy do not
    stall the loop); without channels it falls back to the residual
    change, which keeps the projection usable standalone. The returned
    digital precoder is rescaled so the effective beamformer meets the
    power budget.
    """
    w_fd = np.asarray(w_fd, dtype=np.complex128)
    if w_fd.ndim != 2:
        raise DimensionError(f"target beamformer must be 2-D, got shape {w_fd.shape}")
    m, k = w_fd.shape
    m_r = config.m_r
    if initial_p is None:
        p = analog_init(w_fd, m_r, rng=rng)
    else:
        p = np.asarray(initial_p, dtype=np.complex128)
        if p.shape != (m, m_r):
            raise DimensionError(f"analog precoder shape {p.shape}, expected {(m, m_r)}")
        if np.any(np.abs(np.abs(p) - 1.0) > _UNIT_MODULUS_TOL):
            raise DomainError("initial analog precoder entries must have unit modulus")
    p = p.copy()

    track_cs = channels is not None
    noise = config.noise_power_w if track_cs else None
    residual_trace: list[float] = []
    c_s_trace: list[float] = [] if track_cs else None
    prev_stat = None
    converged = False
    iterations = 0
    w = np.zeros((m_r, k), dtype=np.complex128)

    for it in range(1, config.max_ao_iters + 1):
        w = ls_digital(p, w_fd)
        x = w @ w.conj().T
        x = 0.5 * (x + x.conj().T)
        y = w_fd @ w.conj().T
        for i in range(m):
            for j in range(m_r):
                p[i, j] = phase_coordinate_update(p, (i, j), x, y)
        iterations = it

        d_e = beam_similarity(w_fd, p, w)
        residual_trace.append(d_e)
        if track_cs:
            w_eff = p @ w
            raw = mutual_information(channels[0], w_eff, noise) - mutual_information(
                channels[1], w_eff, noise
            )
            c_s_trace.append(max(raw, 0.0))
            stat = raw
        else:
            stat = d_e
        if prev_stat is not None and abs(stat - prev_stat) <= config.eps2_cs_bits:
            converged = True
            break
        prev_stat = stat

    if not converged:
        log.warning("projection hit the %d-iteration cap", config.max_ao_iters)

    power = float(np.sum(np.abs(p @ w) ** 2))
    w_final = power_rescale(p, w, config.p_max_w)
    scale = min(1.0, math.sqrt(config.p_max_w / power)) if power > 0.0 else 1.0
    if track_cs and scale < 1.0:
        before = secrecy_capacity(channels[0], channels[1], p @ w, noise)
        after = secrecy_capacity(channels[0], channels[1], p @ w_final, noise)
        log.info("power rescale by %.6f changed C_s %.6f -> %.6f bits", scale, before, after)
    return ProjectionResult(
        beamformer=HybridBeamformer(p, w_final),
        residual_trace=residual_trace,
        c_s_trace=c_s_trace,
        iterations=iterations,
        converged=converged,
        rescale_factor=scale,
    )
