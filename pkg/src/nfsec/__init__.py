"""Secrecy-capacity-maximizing hybrid beamforming for near-field MIMO links.

The package builds spherical-wave (and baseline planar-wave) channels,
designs a fully-digital beamformer by block coordinate descent on a
lifted secrecy-rate objective, projects it onto the phase-shifter-plus-
digital hybrid architecture by alternating closed-form updates, and
ships a seeded Monte-Carlo harness with a CLI for experiment sweeps.
"""

from .channel import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    ChannelMatrix,
    PolarLocation,
    farfield_channel,
    nearfield_channel,
    pair_distance,
    rayleigh_distance,
    write_channel_csv,
)
from .config import (
    SystemConfig,
    desk_scale,
    load_config,
    full_scale,
    parse_config,
    save_config,
    serialize_config,
    trial_rng,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    GeometryError,
    NumericalError,
)
from .fully_digital import (
    AuxVariables,
    FDState,
    TracePoint,
    bcd_optimize,
    mse_matrix,
    normalized_channels,
    random_beamformer,
    surrogate_objective,
    update_u,
    update_v,
    update_w_fd,
)
from .harness import (
    ScenarioResult,
    SpectrumMap,
    TrialResult,
    build_channels,
    convergence_trace,
    run_scenario,
    run_trial,
    spectrum_map,
    sweep_eve_location,
    sweep_pmax,
)
from .hybrid import (
    HybridBeamformer,
    ProjectionResult,
    analog_init,
    ao_project,
    ls_digital,
    phase_coordinate_update,
    power_rescale,
)
from .linalg import HermitianEigen, hermitian_eig, logdet_hpd, solve_hpd
from .metrics import (
    IterationCounts,
    SecrecyReport,
    beam_similarity,
    mutual_information,
    power_spectrum,
    secrecy_capacity,
)

__version__ = "0.1.0"
