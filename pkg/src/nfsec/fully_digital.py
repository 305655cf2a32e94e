"""Fully-digital secrecy beamformer design by block coordinate descent.

The non-convex secrecy-rate objective is lifted with auxiliary matrices
(a receive filter U and two weight matrices V_u, V_e) so that each block
update is available in closed form:

* U        <- MMSE receive filter for the legitimate link,
* V_u, V_e <- inverses of the current error/covariance matrices,
* W        <- solution of a convex quadratic subproblem under the power
              budget, obtained from its Lagrangian dual by bisection on
              the multiplier mu (power is strictly decreasing in mu).

With those updates the lifted objective is a tight lower bound of the
unclipped secrecy rate, which makes the rate trace monotone.

All channels inside this module are noise-normalized (H / sigma), so
capacities follow with unit noise power.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelMatrix
from .errors import DimensionError, DomainError, NumericalError
from .linalg import hermitian_eig, logdet_hpd, solve_hpd
from .metrics import LN2, mutual_information

log = logging.getLogger(__name__)

# Relative eigenvalue threshold below which a quadratic-form direction is
# treated as null when the power constraint is inactive.
_NULLSPACE_RTOL = 1e-12
# The dual bisection keeps halving until the bracket is this small
# relative to mu, so the subproblem is solved to machine accuracy and the
# monotonicity of the outer descent is not polluted by a loose multiplier.
_MU_RTOL = 1e-13
_MAX_BISECTIONS = 500


def normalized_channels(h_u, h_e, noise_power_w: float):
    """Scale physical channels by 1/sigma so unit-noise capacities apply."""
    if not noise_power_w > 0.0:
        raise DomainError(f"noise power must be positive, got {noise_power_w}")
    scale = 1.0 / math.sqrt(noise_power_w)
    hu = h_u.matrix if isinstance(h_u, ChannelMatrix) else np.asarray(h_u, dtype=np.complex128)
    he = h_e.matrix if isinstance(h_e, ChannelMatrix) else np.asarray(h_e, dtype=np.complex128)
    return hu * scale, he * scale


@dataclass(frozen=True)
class AuxVariables:
    """Lifting variables: receive filter and the two weight matrices."""

    u: np.ndarray
    v_u: np.ndarray
    v_e: np.ndarray


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    c_s_bits: float
    surrogate_nats: float
    mu: float
    power_w: float


@dataclass
class FDState:
    """Result of one fully-digital optimization run."""

    w_fd: np.ndarray
    aux: AuxVariables
    surrogate_nats: float
    c_s_bits: float
    trace: list[TracePoint] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0
    bisection_counts: list[int] = field(default_factory=list)


def random_beamformer(m: int, k: int, p_max_w: float, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian start rescaled to spend the full power budget."""
    w = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
    norm = np.linalg.norm(w)
    if norm == 0.0:  # pragma: no cover - measure-zero draw
        w = np.ones((m, k), dtype=np.complex128)
        norm = np.linalg.norm(w)
    return w * math.sqrt(p_max_w) / norm


def update_u(h_u_norm: np.ndarray, w_fd: np.ndarray) -> np.ndarray:
    """MMSE receive filter (I + H W W^H H^H)^{-1} H W."""
    g = h_u_norm @ w_fd
    gram = np.eye(g.shape[0], dtype=np.complex128) + g @ g.conj().T
    return solve_hpd(gram, g)


def mse_matrix(u: np.ndarray, h_u_norm: np.ndarray, w_fd: np.ndarray) -> np.ndarray:
    """Error matrix (I - U^H H W)(I - U^H H W)^H + U^H U of the U-link."""
    k = w_fd.shape[1]
    e = np.eye(k, dtype=np.complex128) - u.conj().T @ (h_u_norm @ w_fd)
    f = e @ e.conj().T + u.conj().T @ u
    return 0.5 * (f + f.conj().T)


def update_v(h_u_norm, h_e_norm, u, w_fd):
    """Optimal weights: inverses of the error and leakage covariances."""
    f = mse_matrix(u, h_u_norm, w_fd)
    eye_k = np.eye(f.shape[0], dtype=np.complex128)
    try:
        v_u = solve_hpd(f, eye_k)
    except DomainError:
        log.warning("error matrix numerically singular; adding 1e-12 ridge")
        v_u = solve_hpd(f + 1e-12 * eye_k, eye_k)
    g_e = h_e_norm @ w_fd
    cov_e = np.eye(g_e.shape[0], dtype=np.complex128) + g_e @ g_e.conj().T
    v_e = solve_hpd(cov_e, np.eye(g_e.shape[0], dtype=np.complex128))
    return 0.5 * (v_u + v_u.conj().T), 0.5 * (v_e + v_e.conj().T)


def surrogate_objective(w_fd, aux: AuxVariables, h_u_norm, h_e_norm) -> float:
    """Lifted objective value in nats.

    Equals the unclipped secrecy rate (in nats) when the auxiliary
    variables are at their closed-form optima for ``w_fd``; otherwise it
    is a lower bound.
    """
    k = w_fd.shape[1]
    m_e = h_e_norm.shape[0]
    f = mse_matrix(aux.u, h_u_norm, w_fd)
    g_e = h_e_norm @ w_fd
    cov_e = np.eye(m_e, dtype=np.complex128) + g_e @ g_e.conj().T
    term_u = logdet_hpd(aux.v_u) - float(np.real(np.trace(aux.v_u @ f))) + k
    term_e = logdet_hpd(aux.v_e) - float(np.real(np.trace(aux.v_e @ cov_e))) + m_e
    return term_u + term_e


def _power_of(coeff_energy: np.ndarray, eigvals: np.ndarray, mu: float) -> float:
    return float(np.sum(coeff_energy / (eigvals + mu) ** 2))


def update_w_fd(h_u_norm, h_e_norm, aux: AuxVariables, p_max_w: float, power_tol_w: float):
    """Beamformer block update via the dual of the quadratic subproblem.

    Returns ``(w_fd, mu, bisection_steps)`` where ``w_fd`` solves
    (A + mu I) W = B for the quadratic coefficients

        A = H_u^H U V_u U^H H_u + H_e^H V_e H_e,     B = H_u^H U V_u,

    with the smallest mu >= 0 keeping tr(W W^H) <= p_max. When the power
    constraint binds, the returned beamformer is feasible and within
    ``power_tol_w`` of the budget.
    """
    if not p_max_w > 0.0:
        raise DomainError(f"power budget must be positive, got {p_max_w}")
    a = h_u_norm.conj().T @ aux.u @ aux.v_u @ aux.u.conj().T @ h_u_norm
    a = a + h_e_norm.conj().T @ aux.v_e @ h_e_norm
    b = h_u_norm.conj().T @ aux.u @ aux.v_u
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b), 0.0, 0

    eigvals, q = hermitian_eig(a)
    eigvals = np.maximum(eigvals, 0.0)
    coeff = q.conj().T @ b
    coeff_energy = np.sum(np.abs(coeff) ** 2, axis=1)

    # Power of the minimum-norm unconstrained solution; infinite if B has
    # weight on a null direction of A.
    null_cut = eigvals.max() * _NULLSPACE_RTOL
    null_dirs = eigvals <= null_cut
    if np.any(coeff_energy[null_dirs] > (b_norm * _NULLSPACE_RTOL) ** 2):
        unconstrained_power = math.inf
    else:
        live = ~null_dirs
        unconstrained_power = float(
            np.sum(coeff_energy[live] / eigvals[live] ** 2)
        ) if np.any(live) else 0.0

    if unconstrained_power <= p_max_w:
        inv = np.zeros_like(eigvals)
        live = ~null_dirs
        inv[live] = 1.0 / eigvals[live]
        w = q @ (inv[:, None] * coeff)
        return w, 0.0, 0

    mu_lo = 0.0
    mu_hi = b_norm / math.sqrt(p_max_w)
    power_hi = _power_of(coeff_energy, eigvals, mu_hi)
    if power_hi > p_max_w:  # pragma: no cover - excluded by the bound above
        raise NumericalError("bisection bracket failed to contain the power budget")
    steps = 0
    while steps < _MAX_BISECTIONS:
        gap_ok = (p_max_w - power_hi) <= power_tol_w
        bracket_ok = (mu_hi - mu_lo) <= _MU_RTOL * mu_hi
        if gap_ok and bracket_ok:
            break
        mid = 0.5 * (mu_lo + mu_hi)
        steps += 1
        power_mid = _power_of(coeff_energy, eigvals, mid)
        if power_mid <= p_max_w:
            mu_hi = mid
            power_hi = power_mid
        else:
            mu_lo = mid
    else:  # pragma: no cover - 500 halvings always suffice
        raise NumericalError(f"dual bisection did not settle in {_MAX_BISECTIONS} steps")

    w = q @ (coeff / (eigvals + mu_hi)[:, None])
    return w, mu_hi, steps


def bcd_optimize(h_u, h_e, config, rng=None, w_init=None) -> FDState:
    """Run the full descent until the secrecy-rate change drops under eps1.

    The stopping difference is evaluated on the unclipped rate so that
    early iterations pinned at zero secrecy do not stall the loop; the
    reported/traced ``c_s`` is clipped at zero.
    """
    hu, he = normalized_channels(h_u, h_e, config.noise_power_w)
    if hu.shape[1] != he.shape[1]:
        raise DimensionError("transmit dimensions of the two channels differ")
    m = hu.shape[1]
    k = config.k
    p_max = config.p_max_w

    if w_init is not None:
        w = np.asarray(w_init, dtype=np.complex128)
        if w.shape != (m, k):
            raise DimensionError(f"initial beamformer shape {w.shape}, expected {(m, k)}")
        if float(np.sum(np.abs(w) ** 2)) > p_max * (1.0 + 1e-9):
            raise DomainError("initial beamformer exceeds the power budget")
    else:
        if rng is None:
            rng = np.random.default_rng(config.seed)
        w = random_beamformer(m, k, p_max, rng)

    def raw_rate_bits(wm):
        return mutual_information(hu, wm, 1.0) - mutual_information(he, wm, 1.0)

    raw = raw_rate_bits(w)
    trace = [
        TracePoint(0, max(raw, 0.0), raw * LN2, math.nan, float(np.sum(np.abs(w) ** 2)))
    ]
    aux = None
    surrogate = raw * LN2
    converged = False
    bisections: list[int] = []
    iterations = 0

    for n in range(1, config.max_bcd_iters + 1):
        u = update_u(hu, w)
        v_u, v_e = update_v(hu, he, u, w)
        aux = AuxVariables(u, v_u, v_e)
        w, mu, steps = update_w_fd(hu, he, aux, p_max, config.eps3_power_w)
        bisections.append(steps)
        iterations = n

        new_raw = raw_rate_bits(w)
        surrogate = surrogate_objective(w, aux, hu, he)
        trace.append(
            TracePoint(n, max(new_raw, 0.0), surrogate, mu, float(np.sum(np.abs(w) ** 2)))
        )
        if abs(new_raw - raw) <= config.eps1_cs_bits:
            raw = new_raw
            converged = True
            break
        raw = new_raw

    if not converged:
        log.warning("descent hit the %d-iteration cap", config.max_bcd_iters)
    if aux is None:  # max_bcd_iters >= 1 is enforced by config validation
        raise NumericalError("optimizer performed no iterations")
    return FDState(
        w_fd=w,
        aux=aux,
        surrogate_nats=surrogate,
        c_s_bits=max(raw, 0.0),
        trace=trace,
        converged=converged,
        iterations=iterations,
        bisection_counts=bisections,
    )
