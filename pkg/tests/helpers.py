"""Shared random-instance builders for the test suite."""

import math

import numpy as np


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_hermitian(rng, n, scale=1.0):
    a = crandn(rng, n, n) * scale
    return 0.5 * (a + a.conj().T)


def rand_hpd(rng, n, jitter=0.1):
    g = crandn(rng, n, n)
    return g @ g.conj().T + jitter * np.eye(n)


def rand_hpd_with_condition(rng, n, cond):
    """HPD matrix with eigenvalues log-spaced to hit the given condition."""
    q, _ = np.linalg.qr(crandn(rng, n, n))
    eigvals = np.logspace(0.0, -math.log10(cond), n)
    return (q * eigvals) @ q.conj().T


def rand_unit_modulus(rng, rows, cols):
    return np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, (rows, cols)))


def rand_channel(rng, m_rx, m_tx, scale=1.0):
    """Dimension-normalized complex Gaussian channel (unit-noise style)."""
    return crandn(rng, m_rx, m_tx) * (scale / math.sqrt(2 * m_tx))


def scaled_beamformer(rng, m, k, power):
    w = crandn(rng, m, k)
    return w * math.sqrt(power) / np.linalg.norm(w)
