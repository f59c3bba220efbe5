import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matterwave.ladder import E, G
from matterwave.wavepacket import (WavePacket, brillouin_grid,
                                   gaussian_packet, integrate_interval)


def test_brillouin_grid_covers_zone():
    q = brillouin_grid(8)
    assert q[0] == -0.5
    assert q[-1] == pytest.approx(0.375)
    assert np.all(np.diff(q) == pytest.approx(0.125))
    with pytest.raises(ValueError):
        brillouin_grid(1)


def test_momenta_strictly_increasing():
    packet = gaussian_packet(16, 3, 0.0, 0.1)
    p = packet.momenta()
    assert len(p) == 7 * 16
    assert np.all(np.diff(p) > 0)
    assert p[0] == -3.5


def test_gaussian_packet_normalized():
    packet = gaussian_packet(256, 4, 0.3, 0.05, n_states=2, state=E)
    assert packet.norm() == pytest.approx(1.0, rel=1e-12)
    assert np.all(packet.psi[G] == 0)
    # density integrates to one on the grid measure
    assert np.sum(packet.density()) * packet.spacing == pytest.approx(1.0)


def test_gaussian_packet_validation():
    with pytest.raises(ValueError):
        gaussian_packet(64, 3, 0.0, 0.0)
    with pytest.raises(ValueError):
        gaussian_packet(64, 2, 40.0, 0.01)  # no support on the grid


def test_project_state_and_window():
    packet = gaussian_packet(128, 3, 0.0, 0.4, n_states=2, state=G)
    kept = packet.project(G, (-0.5, 0.5))
    p = packet.momenta()
    inside = (p >= -0.5) & (p < 0.5)
    assert np.all(kept.flat()[G, ~inside] == 0)
    assert np.all(kept.flat()[G, inside] == packet.flat()[G, inside])
    assert np.all(kept.flat()[E] == 0)


def test_project_interval_set():
    packet = gaussian_packet(128, 3, 0.0, 0.6)
    union = packet.project(window=((-1.5, -0.5), (0.5, 1.5)))
    single = packet.project(window=(-1.5, -0.5))
    other = packet.project(window=(0.5, 1.5))
    assert union.norm() == pytest.approx(single.norm() + other.norm())
    assert np.all(union.project(window=(-0.5, 0.5)).psi == 0)


def test_integrate_interval_linear_oracle():
    # exact for piecewise-linear data: integral of p over [a, b]
    p = np.linspace(-2.0, 2.0, 401)
    y = 3.0 * p + 1.0
    a, b = -0.123, 1.377
    exact = 1.5 * (b ** 2 - a ** 2) + (b - a)
    assert integrate_interval(p, y, a, b) == pytest.approx(exact, rel=1e-12)


def test_integrate_interval_clips_to_samples():
    p = np.linspace(0.0, 1.0, 101)
    y = np.ones_like(p)
    assert integrate_interval(p, y, -5.0, 5.0) == pytest.approx(1.0)
    assert integrate_interval(p, y, 2.0, 3.0) == 0.0
    with pytest.raises(ValueError):
        integrate_interval(p, y, 1.0, 0.0)


@given(st.floats(min_value=-1.0, max_value=1.0),
       st.floats(min_value=0.02, max_value=0.3))
def test_gaussian_width_matches_request(p0, delta_p):
    # second moment of |psi|^2 equals delta_p^2 (momentum-width convention)
    packet = gaussian_packet(512, 4, p0, delta_p)
    p = packet.momenta()
    dens = packet.density() * packet.spacing
    mean = float(np.sum(p * dens))
    var = float(np.sum((p - mean) ** 2 * dens))
    assert mean == pytest.approx(p0, abs=1e-6)
    assert math.sqrt(var) == pytest.approx(delta_p, rel=1e-2)
