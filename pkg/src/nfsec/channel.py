"""Line-of-sight channel construction for uniform linear arrays.

Geometry conventions (fixed throughout the package):

* Every array is a uniform linear array along the y-axis. Element ``m``
  (0-based) of an ``n``-element array sits at offset
  ``(m - (n - 1)/2) * spacing`` from the array centre, so the offsets are
  symmetric around the midpoint (half-integers when ``n`` is even).
* The transmit array is centred at the origin. A receiver is placed by
  the polar coordinates of its array midpoint: range ``r > 0`` from the
  transmit centre and azimuth ``theta`` in (-pi/2, pi/2) measured from
  the x-axis (array broadside), i.e. midpoint = (r cos t, r sin t, 0).

Near-field (spherical-wave) entry for receive element u, transmit
element m, carrier f:

    H[u, m] = (1/sqrt(M)) * g(d_um) * exp(-j * 2 pi f / c * (d_um - d_u))

where ``d_um`` is the exact element-pair distance, ``d_u`` the per-row
reference distance from the transmit centre to receive element u, and
``g(d) = c / (4 pi f d)`` the free-space amplitude. The phase reference
is per receive element, so the column facing the transmit centre
(offset 0, odd-sized arrays) has exactly zero phase.

Far-field (planar-wave) entries share the midpoint path loss
``g(r_mid)`` and carry linear phase ramps. Sign convention, held fixed:
transmit side ``exp(+j 2 pi f/c * off_tx * d_tx * sin t)``, receive side
``exp(-j 2 pi f/c * off_rx * d_rx * sin t)``; this is the large-range
limit of the spherical model above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, GeometryError

SPEED_OF_LIGHT = 3.0e8  # m/s

_Y_AXIS = (0.0, 1.0, 0.0)


@dataclass(frozen=True)
class PolarLocation:
    """Receiver-midpoint placement relative to the transmit array centre."""

    distance_m: float
    azimuth_rad: float

    def __post_init__(self):
        if not self.distance_m > 0.0:
            raise GeometryError(f"distance must be positive, got {self.distance_m}")
        if not -math.pi / 2 < self.azimuth_rad < math.pi / 2:
            raise GeometryError(
                f"azimuth must lie in (-pi/2, pi/2), got {self.azimuth_rad}"
            )

    @property
    def xy(self) -> tuple[float, float]:
        return (
            self.distance_m * math.cos(self.azimuth_rad),
            self.distance_m * math.sin(self.azimuth_rad),
        )


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: element count, pitch, centre and axis."""

    num_elements: int
    spacing_m: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis: tuple[float, float, float] = _Y_AXIS

    def __post_init__(self):
        if self.num_elements < 1:
            raise GeometryError(f"need at least one element, got {self.num_elements}")
        if not self.spacing_m > 0.0:
            raise GeometryError(f"spacing must be positive, got {self.spacing_m}")
        norm = math.sqrt(sum(a * a for a in self.axis))
        if abs(norm - 1.0) > 1e-12:
            raise GeometryError(f"axis must be a unit vector, |axis| = {norm}")

    @classmethod
    def ula(cls, num_elements: int, spacing_m: float) -> "ArrayGeometry":
        """Transmit-style array: centred at the origin along y."""
        return cls(num_elements, spacing_m)

    @classmethod
    def ula_at(
        cls, location: PolarLocation, num_elements: int, spacing_m: float
    ) -> "ArrayGeometry":
        """Receiver-style array: centred at ``location``, parallel to y."""
        x, y = location.xy
        return cls(num_elements, spacing_m, center=(x, y, 0.0))

    @property
    def offsets(self) -> np.ndarray:
        """Signed element offsets m - (n-1)/2, symmetric about the centre."""
        return np.arange(self.num_elements) - (self.num_elements - 1) / 2.0

    @property
    def element_positions(self) -> np.ndarray:
        """(n, 3) Cartesian positions of the elements."""
        center = np.asarray(self.center, dtype=float)
        axis = np.asarray(self.axis, dtype=float)
        return center[None, :] + np.outer(self.offsets * self.spacing_m, axis)

    @property
    def aperture_m(self) -> float:
        return (self.num_elements - 1) * self.spacing_m


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex channel (receive elements x transmit elements) plus provenance."""

    matrix: np.ndarray
    carrier_frequency_hz: float
    tx: ArrayGeometry
    rx: ArrayGeometry
    model: str = "near"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2:
            raise DimensionError(f"channel matrix must be 2-D, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise GeometryError("channel matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def _require_centered_y_ula(geometry: ArrayGeometry, what: str):
    if any(abs(c) > 0.0 for c in geometry.center):
        raise GeometryError(f"{what} must be centred at the origin")
    if tuple(geometry.axis) != _Y_AXIS:
        raise GeometryError(f"{what} must lie along the y-axis")


def pair_distance(
    tx_geometry: ArrayGeometry,
    tx_index: int,
    rx_location: PolarLocation,
    rx_offset: float,
    spacing_m: float,
) -> float:
    """Distance between transmit element ``tx_index`` and one receive element.

    The receive element sits ``rx_offset`` pitches along y from the
    receiver midpoint at ``rx_location``. Computed in the polar form

        sqrt(d_el^2 + u^2 - 2 u d_el sin(t_el))

    with (d_el, t_el) the receive element's own range/azimuth and
    ``u`` the transmit element's signed y-offset; this agrees with the
    direct Cartesian evaluation to rounding error.
    """
    _require_centered_y_ula(tx_geometry, "transmit array")
    if not 0 <= tx_index < tx_geometry.num_elements:
        raise DimensionError(
            f"transmit index {tx_index} out of range for {tx_geometry.num_elements} elements"
        )
    u = (tx_index - (tx_geometry.num_elements - 1) / 2.0) * tx_geometry.spacing_m
    x, y_mid = rx_location.xy
    y = y_mid + rx_offset * spacing_m
    d_el = math.hypot(x, y)
    if d_el <= 0.0:
        raise GeometryError("receive element coincides with the transmit centre")
    sin_el = y / d_el
    dist_sq = d_el * d_el + u * u - 2.0 * u * d_el * sin_el
    if dist_sq <= 0.0:
        raise GeometryError("transmit and receive elements are co-located")
    return math.sqrt(dist_sq)


def _pairwise_distances(tx: ArrayGeometry, rx: ArrayGeometry):
    """(rx, tx) distance grid and per-receive-element reference distances."""
    tx_pos = tx.element_positions
    rx_pos = rx.element_positions
    diff = rx_pos[:, None, :] - tx_pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    ref = np.sqrt(np.sum((rx_pos - np.asarray(tx.center)[None, :]) ** 2, axis=1))
    if np.any(dist <= 0.0):
        raise GeometryError("co-located transmit/receive elements")
    if np.any(ref <= 0.0):
        raise GeometryError("receive element coincides with the transmit centre")
    return dist, ref


def nearfield_channel(tx: ArrayGeometry, rx: ArrayGeometry, f_hz: float) -> ChannelMatrix:
    """Spherical-wave LoS channel between two placed arrays."""
    if not f_hz > 0.0:
        raise GeometryError(f"carrier frequency must be positive, got {f_hz}")
    dist, ref = _pairwise_distances(tx, rx)
    amplitude = (SPEED_OF_LIGHT / (4.0 * math.pi * f_hz)) / dist
    phase = (-2.0 * math.pi * f_hz / SPEED_OF_LIGHT) * (dist - ref[:, None])
    h = amplitude * np.exp(1j * phase) / math.sqrt(tx.num_elements)
    return ChannelMatrix(h, f_hz, tx, rx, model="near")


def farfield_channel(tx: ArrayGeometry, rx: ArrayGeometry, f_hz: float) -> ChannelMatrix:
    """Planar-wave baseline with common midpoint path loss (rank one)."""
    if not f_hz > 0.0:
        raise GeometryError(f"carrier frequency must be positive, got {f_hz}")
    rel = np.asarray(rx.center, dtype=float) - np.asarray(tx.center, dtype=float)
    r_mid = float(np.linalg.norm(rel))
    if r_mid <= 0.0:
        raise GeometryError("receiver midpoint coincides with the transmit centre")
    sin_t = rel[1] / r_mid
    wavenumber = 2.0 * math.pi * f_hz / SPEED_OF_LIGHT
    tx_phase = wavenumber * tx.offsets * tx.spacing_m * sin_t
    rx_phase = -wavenumber * rx.offsets * rx.spacing_m * sin_t
    amplitude = SPEED_OF_LIGHT / (4.0 * math.pi * f_hz * r_mid)
    h = (
        amplitude
        / math.sqrt(tx.num_elements)
        * np.exp(1j * (rx_phase[:, None] + tx_phase[None, :]))
    )
    return ChannelMatrix(h, f_hz, tx, rx, model="far")


def rayleigh_distance(aperture_tx_m: float, aperture_rx_m: float, f_hz: float) -> float:
    """Boundary 2 (D1 + D2)^2 / lambda between near- and far-field regions."""
    if aperture_tx_m < 0.0 or aperture_rx_m < 0.0:
        raise GeometryError("apertures must be non-negative")
    if not f_hz > 0.0:
        raise GeometryError(f"carrier frequency must be positive, got {f_hz}")
    wavelength = SPEED_OF_LIGHT / f_hz
    return 2.0 * (aperture_tx_m + aperture_rx_m) ** 2 / wavelength


def write_channel_csv(channel: ChannelMatrix, path) -> None:
    """Dump a channel row-major as interleaved re,im pairs (header row first)."""
    m = channel.matrix
    header = ",".join(f"re{c},im{c}" for c in range(m.shape[1]))
    lines = [header]
    for row in m:
        lines.append(",".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
