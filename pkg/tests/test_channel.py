import cmath
import math

import numpy as np
import pytest

from nfsec.channel import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    PolarLocation,
    farfield_channel,
    nearfield_channel,
    pair_distance,
    rayleigh_distance,
    write_channel_csv,
)
from nfsec.errors import GeometryError

F28 = 28e9
HALF_WAVE = 0.5 * SPEED_OF_LIGHT / F28


def element_xy(location, offset, spacing):
    """Independent Cartesian placement of one receive element."""
    x = location.distance_m * math.cos(location.azimuth_rad)
    y = location.distance_m * math.sin(location.azimuth_rad) + offset * spacing
    return x, y


class TestPairDistance:
    def test_center_element_gives_reference_distance(self):
        tx = ArrayGeometry.ula(5, HALF_WAVE)  # odd count: offset 0 exists
        loc = PolarLocation(12.0, 0.3)
        d = pair_distance(tx, 2, loc, 0.0, HALF_WAVE)
        assert d == pytest.approx(12.0, rel=1e-15)

    def test_broadside_pythagoras(self):
        # single tx element one pitch off centre, receiver on the x-axis
        tx = ArrayGeometry.ula(3, 1.0)
        loc = PolarLocation(10.0, 0.0)
        d = pair_distance(tx, 2, loc, 0.0, 1.0)  # offset +1 pitch
        assert d == pytest.approx(math.sqrt(10.0**2 + 1.0**2), rel=1e-15)

    def test_matches_cartesian_oracle(self):
        tx = ArrayGeometry.ula(4, HALF_WAVE)
        loc = PolarLocation(15.0, math.radians(45.0))
        for m in range(4):
            for off in (-1.5, -0.5, 0.5, 1.5):
                rx, ry = element_xy(loc, off, HALF_WAVE)
                ty = (m - 1.5) * HALF_WAVE
                expected = math.hypot(rx, ry - ty)
                got = pair_distance(tx, m, loc, off, HALF_WAVE)
                assert got == pytest.approx(expected, rel=1e-12)

    def test_polar_equals_cartesian_property(self):
        rng = np.random.default_rng(99)
        for _ in range(10_000):
            n = int(rng.integers(1, 17))
            spacing = float(rng.uniform(0.001, 0.5))
            tx = ArrayGeometry.ula(n, spacing)
            loc = PolarLocation(
                float(rng.uniform(0.5, 50.0)), float(rng.uniform(-1.3, 1.3))
            )
            m = int(rng.integers(0, n))
            off = float(rng.uniform(-4.0, 4.0))
            rx, ry = element_xy(loc, off, spacing)
            ty = (m - (n - 1) / 2) * spacing
            expected = math.hypot(rx, ry - ty)
            got = pair_distance(tx, m, loc, off, spacing)
            assert abs(got - expected) <= 1e-12 * expected

    def test_colocated_raises(self):
        tx = ArrayGeometry.ula(3, 1.0)
        loc = PolarLocation(1.0, math.pi / 2 - 1e-9)  # receiver on the y-axis
        with pytest.raises(GeometryError):
            # offset pushes the element onto the tx element at +1 m
            pair_distance(tx, 2, loc, 0.0, 1.0)


class TestNearfieldChannel:
    def setup_method(self):
        self.tx = ArrayGeometry.ula(5, HALF_WAVE)
        self.loc = PolarLocation(15.0, math.radians(45.0))
        self.rx = ArrayGeometry.ula_at(self.loc, 2, HALF_WAVE)
        self.channel = nearfield_channel(self.tx, self.rx, F28)

    def test_center_column_zero_phase(self):
        col = self.channel.matrix[:, 2]  # transmit offset 0
        assert np.all(col.imag == 0.0)
        assert np.all(col.real > 0.0)

    def test_path_loss_magnitude(self):
        # centre transmit element: pair distance equals the row reference
        rx_pos = self.rx.element_positions
        for row in range(2):
            d = np.linalg.norm(rx_pos[row])
            expected = SPEED_OF_LIGHT / (4 * math.pi * F28 * d)
            got = abs(self.channel.matrix[row, 2]) * math.sqrt(5)
            assert got == pytest.approx(expected, rel=1e-12)

    def test_magnitude_value_at_15m(self):
        tx = ArrayGeometry.ula(1, HALF_WAVE)
        rx = ArrayGeometry.ula_at(PolarLocation(15.0, 0.0), 1, HALF_WAVE)
        h = nearfield_channel(tx, rx, F28).matrix
        assert abs(h[0, 0]) * math.sqrt(1) == pytest.approx(
            3e8 / (4 * math.pi * 28e9 * 15.0), rel=1e-12
        )

    def test_matches_coordinate_oracle(self):
        tx = ArrayGeometry.ula(4, HALF_WAVE)
        loc = PolarLocation(15.0, math.radians(45.0))
        rx = ArrayGeometry.ula_at(loc, 2, HALF_WAVE)
        got = nearfield_channel(tx, rx, F28).matrix
        # element-by-element reconstruction from raw coordinates
        k = 2 * math.pi * F28 / SPEED_OF_LIGHT
        for u in range(2):
            ux, uy = element_xy(loc, u - 0.5, HALF_WAVE)
            d_ref = math.hypot(ux, uy)
            for m in range(4):
                ty = (m - 1.5) * HALF_WAVE
                d = math.hypot(ux, uy - ty)
                gain = SPEED_OF_LIGHT / (4 * math.pi * F28 * d) / math.sqrt(4)
                expected = gain * cmath.exp(-1j * k * (d - d_ref))
                assert got[u, m] == pytest.approx(expected, rel=1e-12)

    def test_entries_finite(self):
        assert np.all(np.isfinite(self.channel.matrix))

    def test_magnitude_reciprocity(self):
        bs = ArrayGeometry.ula(6, HALF_WAVE)
        user = ArrayGeometry.ula_at(PolarLocation(8.0, 0.4), 3, HALF_WAVE)
        fwd = nearfield_channel(bs, user, F28).matrix
        rev = nearfield_channel(user, bs, F28).matrix
        assert np.allclose(
            np.abs(fwd) * math.sqrt(6), np.abs(rev.T) * math.sqrt(3), rtol=1e-12
        )

    def test_magnitudes_decrease_with_distance(self):
        tx = ArrayGeometry.ula(8, HALF_WAVE)
        near = nearfield_channel(
            tx, ArrayGeometry.ula_at(PolarLocation(10.0, 0.2), 4, HALF_WAVE), F28
        ).matrix
        far = nearfield_channel(
            tx, ArrayGeometry.ula_at(PolarLocation(11.0, 0.2), 4, HALF_WAVE), F28
        ).matrix
        assert np.all(np.abs(far) < np.abs(near))


class TestFarfieldChannel:
    def test_broadside_constant_tx_phase(self):
        tx = ArrayGeometry.ula(6, HALF_WAVE)
        rx = ArrayGeometry.ula_at(PolarLocation(20.0, 0.0), 3, HALF_WAVE)
        h = farfield_channel(tx, rx, F28).matrix
        for row in h:
            assert np.allclose(row, row[0], rtol=1e-12)

    def test_common_magnitude(self):
        tx = ArrayGeometry.ula(6, HALF_WAVE)
        rx = ArrayGeometry.ula_at(PolarLocation(20.0, 0.7), 3, HALF_WAVE)
        h = farfield_channel(tx, rx, F28).matrix
        expected = SPEED_OF_LIGHT / (4 * math.pi * F28 * 20.0) / math.sqrt(6)
        assert np.allclose(np.abs(h), expected, rtol=1e-12)

    def test_rank_one(self):
        tx = ArrayGeometry.ula(8, HALF_WAVE)
        rx = ArrayGeometry.ula_at(PolarLocation(20.0, 0.5), 4, HALF_WAVE)
        s = np.linalg.svd(farfield_channel(tx, rx, F28).matrix, compute_uv=False)
        assert s[1] <= 1e-12 * s[0]

    def test_converges_to_nearfield_beyond_rayleigh(self):
        # single-antenna receiver: per-row phase references coincide
        tx = ArrayGeometry.ula(16, HALF_WAVE)
        d_r = rayleigh_distance(tx.aperture_m, 0.0, F28)
        loc = PolarLocation(10.0 * d_r, math.radians(30.0))
        rx = ArrayGeometry.ula_at(loc, 1, HALF_WAVE)
        h_near = nearfield_channel(tx, rx, F28).matrix.ravel()
        h_far = farfield_channel(tx, rx, F28).matrix.ravel()
        corr = abs(np.vdot(h_near, h_far)) / (
            np.linalg.norm(h_near) * np.linalg.norm(h_far)
        )
        assert corr >= 0.99


class TestRayleighDistance:
    def test_quadratic_scaling(self):
        d1 = rayleigh_distance(1.0, 0.5, F28)
        d2 = rayleigh_distance(2.0, 1.0, F28)
        assert d2 == pytest.approx(4.0 * d1, rel=1e-14)

    def test_direct_substitution(self):
        lam = SPEED_OF_LIGHT / F28
        assert rayleigh_distance(lam, 0.0, F28) == pytest.approx(2.0 * lam, rel=1e-14)

    def test_default_geometry_value(self):
        d1 = 255 * HALF_WAVE
        d2 = 7 * HALF_WAVE
        assert d1 == pytest.approx(1.366, abs=1e-3)
        assert d2 == pytest.approx(0.0375, abs=1e-6)
        d_r = rayleigh_distance(d1, d2, F28)
        assert 367.0 < d_r < 369.0
        assert 15.0 < d_r  # the default user location is near-field at full scale

    def test_negative_aperture_raises(self):
        with pytest.raises(GeometryError):
            rayleigh_distance(-1.0, 0.0, F28)


def test_channel_csv_roundtrip(tmp_path):
    tx = ArrayGeometry.ula(3, HALF_WAVE)
    rx = ArrayGeometry.ula_at(PolarLocation(5.0, 0.1), 2, HALF_WAVE)
    ch = nearfield_channel(tx, rx, F28)
    path = tmp_path / "channel.csv"
    write_channel_csv(ch, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "re0,im0,re1,im1,re2,im2"
    values = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    rebuilt = values[:, 0::2] + 1j * values[:, 1::2]
    assert np.array_equal(rebuilt, ch.matrix)  # repr round-trips exactly


class TestValidation:
    def test_bad_location(self):
        with pytest.raises(GeometryError):
            PolarLocation(-1.0, 0.0)
        with pytest.raises(GeometryError):
            PolarLocation(1.0, 2.0)

    def test_bad_geometry(self):
        with pytest.raises(GeometryError):
            ArrayGeometry(0, 0.1)
        with pytest.raises(GeometryError):
            ArrayGeometry(4, -0.1)
