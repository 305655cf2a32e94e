"""Scenario configuration: validation, flat-file round-tripping, presets.

The on-disk format is a flat ``key = value`` text file with units spelled
out in the key names (``f_hz``, ``p_max_dbm``, ``u_angle_deg``, ...).
Lines starting with ``#`` and blank lines are ignored. Serialization
uses ``repr`` for floats, so parse(serialize(config)) reproduces the
configuration exactly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import SPEED_OF_LIGHT, PolarLocation
from .errors import ConfigError


@dataclass(frozen=True)
class SystemConfig:
    f_hz: float = 28e9
    spacing_m: float = 0.0  # 0 means "use half a wavelength"
    m: int = 32
    m_u: int = 8
    m_e: int = 8
    m_r: int = 4
    k: int = 2
    noise_dbm: float = -105.0
    p_max_dbm: float = -10.0
    u_distance_m: float = 15.0
    u_angle_deg: float = 45.0
    e_distance_m: float = 5.0
    e_angle_deg: float = 45.0
    trials: int = 20
    seed: int = 1
    eps1_cs_bits: float = 1e-4
    eps2_cs_bits: float = 1e-6
    eps3_power_w: float = 1e-6
    max_bcd_iters: int = 500
    max_ao_iters: int = 200
    channel_model: str = "near"

    def __post_init__(self):
        if self.spacing_m == 0.0 and self.f_hz > 0.0:
            object.__setattr__(self, "spacing_m", 0.5 * SPEED_OF_LIGHT / self.f_hz)
        self.validate()

    def validate(self):
        bad = []
        if not self.f_hz > 0.0:
            bad.append(f"f_hz must be positive, got {self.f_hz}")
        if not self.spacing_m > 0.0:
            bad.append(f"spacing_m must be positive, got {self.spacing_m}")
        for name in ("m", "m_u", "m_e", "m_r", "k"):
            if getattr(self, name) < 1:
                bad.append(f"{name} must be at least 1, got {getattr(self, name)}")
        if not self.k <= self.m_r <= self.m:
            bad.append(f"need k <= m_r <= m, got k={self.k}, m_r={self.m_r}, m={self.m}")
        for name in ("u_distance_m", "e_distance_m"):
            if not getattr(self, name) > 0.0:
                bad.append(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("u_angle_deg", "e_angle_deg"):
            if not -90.0 < getattr(self, name) < 90.0:
                bad.append(f"{name} must lie in (-90, 90), got {getattr(self, name)}")
        if self.trials < 1:
            bad.append(f"trials must be at least 1, got {self.trials}")
        for name in ("eps1_cs_bits", "eps2_cs_bits", "eps3_power_w"):
            if not getattr(self, name) > 0.0:
                bad.append(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("max_bcd_iters", "max_ao_iters"):
            if getattr(self, name) < 1:
                bad.append(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.channel_model not in ("near", "far"):
            bad.append(f"channel_model must be 'near' or 'far', got {self.channel_model!r}")
        if bad:
            raise ConfigError(bad)

    # -- derived quantities ------------------------------------------------

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.f_hz

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    @property
    def p_max_w(self) -> float:
        return dbm_to_watts(self.p_max_dbm)

    @property
    def u_location(self) -> PolarLocation:
        return PolarLocation(self.u_distance_m, math.radians(self.u_angle_deg))

    @property
    def e_location(self) -> PolarLocation:
        return PolarLocation(self.e_distance_m, math.radians(self.e_angle_deg))

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def desk_scale() -> SystemConfig:
    """Small configuration suitable for tests and quick runs."""
    return SystemConfig()


def full_scale() -> SystemConfig:
    """Full-size configuration (256 antennas, 100 trials); minutes-scale
    runtime, intentionally not used by the test suite."""
    return SystemConfig(m=256, trials=100)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Deterministic per-trial generator.

    The trial seed is derived by feeding the pair (master seed, trial
    index) as entropy to ``numpy.random.SeedSequence``, which makes
    trials independent of execution order.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


_FIELDS = {f.name: f.type for f in dataclasses.fields(SystemConfig)}
_INT_FIELDS = {
    "m", "m_u", "m_e", "m_r", "k", "trials", "seed", "max_bcd_iters", "max_ao_iters"
}
_STR_FIELDS = {"channel_model"}


def serialize_config(config: SystemConfig) -> str:
    lines = ["# nfsec scenario configuration"]
    for f in dataclasses.fields(SystemConfig):
        value = getattr(config, f.name)
        if f.name in _INT_FIELDS or f.name in _STR_FIELDS:
            lines.append(f"{f.name} = {value}")
        else:
            lines.append(f"{f.name} = {value!r}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> SystemConfig:
    """Parse the flat key = value format; unknown keys and type errors
    are all reported together."""
    values = {}
    bad = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            bad.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _FIELDS:
            bad.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            if key in _INT_FIELDS:
                values[key] = int(val)
            elif key in _STR_FIELDS:
                values[key] = val
            else:
                values[key] = float(val)
        except ValueError:
            bad.append(f"line {lineno}: cannot parse value {val!r} for {key}")
    if bad:
        raise ConfigError(bad)
    return SystemConfig(**values)


def load_config(path) -> SystemConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def save_config(config: SystemConfig, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_config(config))
